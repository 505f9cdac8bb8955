//! Turning movements and signal indications at the study intersection.
//!
//! The intersection has four approaches (E, W, N, S named by the compass side
//! a vehicle enters from) and eight signalized movements: protected lefts and
//! throughs on every approach. Right turns are not modeled.

use serde::{Deserialize, Serialize};

/// The eight signalized movements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Movement {
    /// Eastbound left (enters from the west edge, exits north).
    Ebl,
    /// Eastbound through.
    Ebt,
    /// Westbound left.
    Wbl,
    /// Westbound through.
    Wbt,
    /// Northbound left.
    Nbl,
    /// Northbound through.
    Nbt,
    /// Southbound left.
    Sbl,
    /// Southbound through.
    Sbt,
}

pub const MOVEMENTS: [Movement; 8] = [
    Movement::Ebl,
    Movement::Ebt,
    Movement::Wbl,
    Movement::Wbt,
    Movement::Nbl,
    Movement::Nbt,
    Movement::Sbl,
    Movement::Sbt,
];

impl Movement {
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Movement> {
        MOVEMENTS.get(i).copied()
    }

    pub fn label(self) -> &'static str {
        match self {
            Movement::Ebl => "EBL",
            Movement::Ebt => "EBT",
            Movement::Wbl => "WBL",
            Movement::Wbt => "WBT",
            Movement::Nbl => "NBL",
            Movement::Nbt => "NBT",
            Movement::Sbl => "SBL",
            Movement::Sbt => "SBT",
        }
    }

    pub fn parse_label(s: &str) -> Option<Movement> {
        MOVEMENTS.iter().copied().find(|m| m.label().eq_ignore_ascii_case(s))
    }

    pub fn is_left(self) -> bool {
        matches!(self, Movement::Ebl | Movement::Wbl | Movement::Nbl | Movement::Sbl)
    }

    /// Movements whose paths cross; concurrent green for a conflicting pair
    /// is a safety violation. Protected lefts conflict with the opposing
    /// through, and everything on one street conflicts with everything on
    /// the cross street.
    pub fn conflicts_with(self, other: Movement) -> bool {
        use Movement::*;
        if self == other {
            return false;
        }
        let main = |m: Movement| matches!(m, Ebl | Ebt | Wbl | Wbt);
        if main(self) != main(other) {
            return true;
        }
        let pair = |a: Movement, b: Movement| (self == a && other == b) || (self == b && other == a);
        pair(Ebl, Wbt) || pair(Wbl, Ebt) || pair(Nbl, Sbt) || pair(Sbl, Nbt)
    }
}

impl std::fmt::Display for Movement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// Per-movement signal display.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Indication {
    Green,
    Yellow,
    Red,
}

/// A value for each of the eight movements, indexed by [`Movement::index`].
pub type PerMovement<T> = [T; 8];
