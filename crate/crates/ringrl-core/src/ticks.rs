//! Half-second tick arithmetic for signal timers.
//!
//! All controller timers live on a 0.5 s lattice, which keeps interval
//! boundaries exact and the state machine free of float drift. Vehicle-level
//! times stay in continuous seconds; only the controller uses ticks.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Ticks per second of simulated time.
pub const TICKS_PER_SEC: u64 = 2;

/// Duration of one tick in seconds.
pub const TICK_SECS: f64 = 0.5;

#[derive(Debug, Error, PartialEq)]
pub enum TickError {
    #[error("duration {0} s is not a nonnegative multiple of 0.5 s")]
    OffLattice(f64),
}

/// A nonnegative duration as a count of 0.5 s ticks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Ticks(pub u64);

impl Ticks {
    pub const ZERO: Ticks = Ticks(0);

    /// Converts a duration in seconds, requiring it to sit on the lattice.
    pub fn from_secs(secs: f64) -> Result<Ticks, TickError> {
        if !secs.is_finite() || secs < 0.0 {
            return Err(TickError::OffLattice(secs));
        }
        let scaled = secs * TICKS_PER_SEC as f64;
        let rounded = scaled.round();
        if (scaled - rounded).abs() > 1e-9 {
            return Err(TickError::OffLattice(secs));
        }
        Ok(Ticks(rounded as u64))
    }

    pub fn as_secs(self) -> f64 {
        self.0 as f64 * TICK_SECS
    }

    pub fn saturating_sub(self, other: Ticks) -> Ticks {
        Ticks(self.0.saturating_sub(other.0))
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl std::ops::Add for Ticks {
    type Output = Ticks;
    fn add(self, rhs: Ticks) -> Ticks {
        Ticks(self.0 + rhs.0)
    }
}

impl std::ops::AddAssign for Ticks {
    fn add_assign(&mut self, rhs: Ticks) {
        self.0 += rhs.0;
    }
}

impl std::ops::Sub for Ticks {
    type Output = Ticks;
    fn sub(self, rhs: Ticks) -> Ticks {
        Ticks(self.0 - rhs.0)
    }
}
