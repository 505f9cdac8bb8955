//! Core library for the ring-barrier signal control workbench.
//!
//! The crate is organized around a mesoscopic single-intersection simulator
//! driven by an eight-phase dual-ring controller. On top of that sit a
//! from-scratch PPO learner with invalid-action masking, rule-based baseline
//! controllers (fixed-time, fully actuated, random-feasible), demand-pattern
//! utilities (arrival generation, SSIM similarity, volume-to-capacity
//! analysis) and an evaluation harness producing per-movement delay reports.
//!
//! Everything is deterministic under a fixed seed. Data-parallel sections go
//! through [`exec`], which uses rayon when the `parallel` feature (default)
//! is enabled and falls back to equivalent sequential loops otherwise; both
//! paths reduce in a fixed order and produce bit-identical results.

pub mod control;
pub mod eval;
pub mod exec;
pub mod movement;
pub mod nn;
pub mod od;
pub mod ppo;
pub mod seeds;
pub mod signal;
pub mod sim;
pub mod ticks;
pub mod train;

pub use movement::{Indication, Movement};
pub use od::OdMatrix;
pub use signal::{ActionId, ControllerState, PhaseId};
pub use sim::TrafficEnv;
