//! Origin–destination demand patterns.
//!
//! An [`OdMatrix`] holds hourly flows between the four approaches. It maps
//! one-to-one onto the eight signalized movements (no U-turns, no right
//! turns), drives stochastic arrival generation, and supports two analyses:
//! structural similarity (SSIM) between patterns and the intersection
//! volume-to-capacity ratio via critical-movement analysis.

use crate::movement::{Movement, MOVEMENTS};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::Path;
use thiserror::Error;

/// Compass approaches, named by the edge a vehicle enters from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Approach {
    E,
    W,
    N,
    S,
}

pub const APPROACHES: [Approach; 4] = [Approach::E, Approach::W, Approach::N, Approach::S];

impl Approach {
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn label(self) -> &'static str {
        match self {
            Approach::E => "E",
            Approach::W => "W",
            Approach::N => "N",
            Approach::S => "S",
        }
    }

    fn parse(s: &str) -> Option<Approach> {
        APPROACHES.iter().copied().find(|a| a.label().eq_ignore_ascii_case(s))
    }
}

/// Movement served by the origin→destination cell, if any.
///
/// A vehicle entering from the west edge heads eastbound; its left turn
/// exits to the north. Diagonal cells are U-turns and the four remaining
/// cells are right turns; neither is part of the modeled intersection.
pub fn cell_movement(origin: Approach, dest: Approach) -> Option<Movement> {
    use Approach::*;
    match (origin, dest) {
        (W, E) => Some(Movement::Ebt),
        (W, N) => Some(Movement::Ebl),
        (E, W) => Some(Movement::Wbt),
        (E, S) => Some(Movement::Wbl),
        (S, N) => Some(Movement::Nbt),
        (S, W) => Some(Movement::Nbl),
        (N, S) => Some(Movement::Sbt),
        (N, E) => Some(Movement::Sbl),
        _ => None,
    }
}

fn movement_cell(m: Movement) -> (Approach, Approach) {
    use Approach::*;
    match m {
        Movement::Ebt => (W, E),
        Movement::Ebl => (W, N),
        Movement::Wbt => (E, W),
        Movement::Wbl => (E, S),
        Movement::Nbt => (S, N),
        Movement::Nbl => (S, W),
        Movement::Sbt => (N, S),
        Movement::Sbl => (N, E),
    }
}

#[derive(Debug, Error)]
pub enum OdError {
    #[error("pattern {label}: cell {origin}->{dest} is a U-turn and must be 0, got {value}")]
    NonzeroDiagonal { label: String, origin: &'static str, dest: &'static str, value: f64 },
    #[error("pattern {label}: cell {origin}->{dest} is a right turn and must be 0, got {value}")]
    NonzeroRightTurn { label: String, origin: &'static str, dest: &'static str, value: f64 },
    #[error("pattern {label}: cell {origin}->{dest} must be finite and >= 0, got {value}")]
    InvalidFlow { label: String, origin: &'static str, dest: &'static str, value: f64 },
    #[error("both matrices are all-zero; similarity is undefined")]
    DegenerateSsim,
    #[error("\"origins\" must be a permutation of [\"E\",\"W\",\"N\",\"S\"], got {0:?}")]
    BadOrigins(Vec<String>),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

/// A 4x4 hourly demand matrix over approaches, with U-turn and right-turn
/// cells identically zero.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OdMatrix {
    label: String,
    /// entries[origin][dest] in vehicles/hour, approach order E, W, N, S.
    entries: [[f64; 4]; 4],
}

impl OdMatrix {
    pub fn new(label: impl Into<String>, entries: [[f64; 4]; 4]) -> Result<OdMatrix, OdError> {
        let m = OdMatrix { label: label.into(), entries };
        m.validate()?;
        Ok(m)
    }

    /// Builds the matrix from per-movement hourly volumes.
    pub fn from_volumes(label: impl Into<String>, volumes: &MovementVolumes) -> OdMatrix {
        let mut entries = [[0.0; 4]; 4];
        for &m in &MOVEMENTS {
            let (o, d) = movement_cell(m);
            entries[o.index()][d.index()] = volumes.get(m);
        }
        OdMatrix { label: label.into(), entries }
    }

    fn validate(&self) -> Result<(), OdError> {
        for (i, &o) in APPROACHES.iter().enumerate() {
            for (j, &d) in APPROACHES.iter().enumerate() {
                let v = self.entries[i][j];
                let ctx = |v| (self.label.clone(), o.label(), d.label(), v);
                if !v.is_finite() || v < 0.0 {
                    let (label, origin, dest, value) = ctx(v);
                    return Err(OdError::InvalidFlow { label, origin, dest, value });
                }
                if cell_movement(o, d).is_none() && v != 0.0 {
                    let (label, origin, dest, value) = ctx(v);
                    return Err(if i == j {
                        OdError::NonzeroDiagonal { label, origin, dest, value }
                    } else {
                        OdError::NonzeroRightTurn { label, origin, dest, value }
                    });
                }
            }
        }
        Ok(())
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn entries(&self) -> &[[f64; 4]; 4] {
        &self.entries
    }

    pub fn total_flow(&self) -> f64 {
        self.entries.iter().flatten().sum()
    }

    /// Flows of the eight movement cells in [`MOVEMENTS`] order.
    pub fn movement_cells(&self) -> [f64; 8] {
        let mut out = [0.0; 8];
        for (k, &m) in MOVEMENTS.iter().enumerate() {
            let (o, d) = movement_cell(m);
            out[k] = self.entries[o.index()][d.index()];
        }
        out
    }

    pub fn from_json_file(path: impl AsRef<Path>) -> Result<OdMatrix, OdError> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    /// Parses the interchange document. `origins` gives the approach order of
    /// the rows and columns; any permutation of E/W/N/S is accepted and the
    /// entries are reordered to the canonical order.
    pub fn from_json(text: &str) -> Result<OdMatrix, OdError> {
        #[derive(Deserialize)]
        struct Doc {
            label: String,
            entries: [[f64; 4]; 4],
            origins: Vec<String>,
        }
        let doc: Doc = serde_json::from_str(text)?;
        let order: Vec<Approach> = doc
            .origins
            .iter()
            .map(|s| Approach::parse(s))
            .collect::<Option<_>>()
            .ok_or_else(|| OdError::BadOrigins(doc.origins.clone()))?;
        let mut seen = [false; 4];
        for a in &order {
            seen[a.index()] = true;
        }
        if order.len() != 4 || seen.iter().any(|s| !s) {
            return Err(OdError::BadOrigins(doc.origins));
        }
        let mut entries = [[0.0; 4]; 4];
        for (ri, &ra) in order.iter().enumerate() {
            for (ci, &ca) in order.iter().enumerate() {
                entries[ra.index()][ca.index()] = doc.entries[ri][ci];
            }
        }
        OdMatrix::new(doc.label, entries)
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Doc<'a> {
            label: &'a str,
            entries: &'a [[f64; 4]; 4],
            origins: [&'static str; 4],
        }
        serde_json::to_string_pretty(&Doc {
            label: &self.label,
            entries: &self.entries,
            origins: ["E", "W", "N", "S"],
        })
        .expect("od matrix serializes")
    }
}

/// Hourly volumes for the eight movements.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MovementVolumes(pub [f64; 8]);

impl MovementVolumes {
    pub fn zero() -> MovementVolumes {
        MovementVolumes([0.0; 8])
    }

    pub fn get(&self, m: Movement) -> f64 {
        self.0[m.index()]
    }

    pub fn set(&mut self, m: Movement, v: f64) {
        self.0[m.index()] = v;
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }
}

/// Maps a demand matrix onto per-movement volumes. Total flow is preserved.
pub fn od_to_movements(m: &OdMatrix) -> MovementVolumes {
    MovementVolumes(m.movement_cells())
}

/// Global single-window SSIM over the eight movement cells.
///
/// The matrices are far too small for sliding windows, so mean, variance and
/// covariance are taken over the eight cells directly, with the usual
/// constants k1 = 0.01, k2 = 0.03 and dynamic range L = the largest entry
/// across both matrices. Returns a value <= 1, equal to 1 exactly when the
/// patterns are identical.
pub fn ssim(a: &OdMatrix, b: &OdMatrix) -> Result<f64, OdError> {
    let xa = a.movement_cells();
    let xb = b.movement_cells();
    let range = xa.iter().chain(xb.iter()).cloned().fold(0.0, f64::max);
    if range == 0.0 {
        return Err(OdError::DegenerateSsim);
    }
    let n = xa.len() as f64;
    let mu_a = xa.iter().sum::<f64>() / n;
    let mu_b = xb.iter().sum::<f64>() / n;
    let var_a = xa.iter().map(|x| (x - mu_a) * (x - mu_a)).sum::<f64>() / n;
    let var_b = xb.iter().map(|x| (x - mu_b) * (x - mu_b)).sum::<f64>() / n;
    let cov = xa.iter().zip(&xb).map(|(x, y)| (x - mu_a) * (y - mu_b)).sum::<f64>() / n;
    let c1 = (0.01 * range) * (0.01 * range);
    let c2 = (0.03 * range) * (0.03 * range);
    Ok(((2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2))
        / ((mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2)))
}

/// 1 − SSIM; 0 for identical patterns, larger for structurally different
/// demand. Bounded by [0, 2], and by [0, 1] when the cell covariance is
/// nonnegative.
pub fn dissimilarity(a: &OdMatrix, b: &OdMatrix) -> Result<f64, OdError> {
    Ok(1.0 - ssim(a, b)?)
}

/// Writes the pairwise dissimilarity matrix of a pattern set as CSV with
/// labels on the header row and column.
pub fn write_dissimilarity_csv<W: Write>(patterns: &[OdMatrix], out: &mut W) -> Result<(), OdError> {
    write!(out, "pattern")?;
    for p in patterns {
        write!(out, ",{}", p.label())?;
    }
    writeln!(out)?;
    for a in patterns {
        write!(out, "{}", a.label())?;
        for b in patterns {
            if std::ptr::eq(a, b) {
                write!(out, ",0.000")?;
            } else {
                write!(out, ",{:.3}", dissimilarity(a, b)?)?;
            }
        }
        writeln!(out)?;
    }
    Ok(())
}

/// Lane counts per movement used for capacity analysis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaneCounts(pub [u32; 8]);

impl LaneCounts {
    pub fn get(&self, m: Movement) -> u32 {
        self.0[m.index()]
    }
}

/// Reference cycle length for the critical-movement v/c computation.
pub const VC_REF_CYCLE_S: f64 = 120.0;
/// Total lost time per reference cycle (4 s per phase pair).
pub const VC_LOST_TIME_S: f64 = 16.0;

/// Intersection volume-to-capacity ratio by critical-movement analysis.
///
/// Per barrier side the critical flow ratio is the larger of the two ring
/// sums of phase flow ratios `volume / (sat_flow * lanes)`; the intersection
/// ratio scales the sum of the two sides by `C / (C - L)` with a 120 s
/// reference cycle and 16 s total lost time.
pub fn volume_capacity_ratio(v: &MovementVolumes, lanes: &LaneCounts, sat_flow: f64) -> f64 {
    assert!(sat_flow > 0.0, "saturation flow must be positive");
    let y = |m: Movement| v.get(m) / (sat_flow * lanes.get(m).max(1) as f64);
    // Barrier side 1 serves the main street: ring 1 runs WBL then EBT,
    // ring 2 runs EBL then WBT. Side 2 mirrors this on the cross street.
    let side1 = f64::max(
        y(Movement::Wbl) + y(Movement::Ebt),
        y(Movement::Ebl) + y(Movement::Wbt),
    );
    let side2 = f64::max(
        y(Movement::Sbl) + y(Movement::Nbt),
        y(Movement::Nbl) + y(Movement::Sbt),
    );
    (side1 + side2) * VC_REF_CYCLE_S / (VC_REF_CYCLE_S - VC_LOST_TIME_S)
}

/// A time-sorted stream of vehicle arrivals over an episode horizon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArrivalStream {
    pub seed: u64,
    pub horizon_s: f64,
    /// (arrival time in seconds, movement), nondecreasing in time.
    pub events: Vec<(f64, Movement)>,
}

impl ArrivalStream {
    /// Builds a stream from explicit events, sorting them by time.
    pub fn from_events(horizon_s: f64, mut events: Vec<(f64, Movement)>) -> ArrivalStream {
        events.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.index().cmp(&b.1.index())));
        ArrivalStream { seed: 0, horizon_s, events }
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }
}

/// Samples one episode of arrivals: an independent Poisson process per
/// movement (exponential inter-arrival times at `volume/3600` per second),
/// merged and time-sorted. Identical `(matrix, horizon, seed)` inputs yield
/// bit-identical streams.
pub fn generate_arrivals(m: &OdMatrix, horizon_s: f64, seed: u64) -> ArrivalStream {
    assert!(horizon_s > 0.0, "horizon must be positive");
    let volumes = od_to_movements(m);
    let mut events: Vec<(f64, Movement)> = Vec::new();
    for &mv in &MOVEMENTS {
        let rate_per_s = volumes.get(mv) / 3600.0;
        if rate_per_s <= 0.0 {
            continue;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(mv.index() as u64);
        let exp = Exp::new(rate_per_s).expect("positive rate");
        let mut t = 0.0;
        loop {
            t += exp.sample(&mut rng);
            if t > horizon_s {
                break;
            }
            events.push((t, mv));
        }
    }
    events.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.index().cmp(&b.1.index())));
    ArrivalStream { seed, horizon_s, events }
}
