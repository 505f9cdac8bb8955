//! Eight-phase dual-ring/barrier signal controller.
//!
//! Phases 1..4 run on ring 1 and 5..8 on ring 2. Phases {1,2,5,6} sit on
//! barrier side 1 (main street) and {3,4,7,8} on side 2 (cross street); both
//! rings must finish their side before either may serve the other side. The
//! eight legal concurrent pairs, one phase per ring on a common side, form
//! the action space:
//!
//! action:  1      2      3      4      5      6      7      8
//! pair:  {1,5}  {1,6}  {2,5}  {2,6}  {3,7}  {3,8}  {4,7}  {4,8}
//!
//! Movement assignment: ring 1 serves WBL(1), EBT(2), SBL(3), NBT(4) and
//! ring 2 serves EBL(5), WBT(6), NBL(7), SBT(8). Each pair in the table is
//! conflict-free under this assignment.
//!
//! A ring serves MinGreen, then ExtensionGreen for as long as decisions keep
//! re-selecting its phase. Switching commits the ring to the new phase and
//! starts Yellow, then RedClearance, then the committed phase's MinGreen.
//! Commitments are binding: a ring in clearance can only proceed to its
//! committed phase. All timers run on the half-second lattice of
//! [`crate::ticks`].

use crate::movement::{Indication, Movement};
use crate::ticks::{TickError, Ticks};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SignalError {
    #[error("phase id {0} outside 1..=8")]
    BadPhase(u8),
    #[error("action id {0} outside 1..=8")]
    BadAction(u8),
    #[error("action {action} is not feasible in the current controller state")]
    InfeasibleAction { action: u8 },
    #[error("advance of {requested} ticks exceeds the decision horizon of {horizon} ticks")]
    AdvancePastDecision { requested: u64, horizon: u64 },
    #[error("timing for phase {phase}: {reason}")]
    BadTiming { phase: u8, reason: String },
    #[error(transparent)]
    Tick(#[from] TickError),
}

/// NEMA phase number, 1..=8.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PhaseId(u8);

impl PhaseId {
    pub fn new(value: u8) -> Result<PhaseId, SignalError> {
        if (1..=8).contains(&value) {
            Ok(PhaseId(value))
        } else {
            Err(SignalError::BadPhase(value))
        }
    }

    pub fn value(self) -> u8 {
        self.0
    }

    pub fn ring(self) -> Ring {
        if self.0 <= 4 {
            Ring::R1
        } else {
            Ring::R2
        }
    }

    pub fn barrier_side(self) -> BarrierSide {
        match self.0 {
            1 | 2 | 5 | 6 => BarrierSide::Main,
            _ => BarrierSide::Cross,
        }
    }

    pub fn movement(self) -> Movement {
        match self.0 {
            1 => Movement::Wbl,
            2 => Movement::Ebt,
            3 => Movement::Sbl,
            4 => Movement::Nbt,
            5 => Movement::Ebl,
            6 => Movement::Wbt,
            7 => Movement::Nbl,
            _ => Movement::Sbt,
        }
    }

    fn index(self) -> usize {
        (self.0 - 1) as usize
    }
}

pub const PHASES: [u8; 8] = [1, 2, 3, 4, 5, 6, 7, 8];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Ring {
    R1,
    R2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BarrierSide {
    Main,
    Cross,
}

/// One of the eight phase-pair actions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ActionId(u8);

const ACTION_PAIRS: [(u8, u8); 8] =
    [(1, 5), (1, 6), (2, 5), (2, 6), (3, 7), (3, 8), (4, 7), (4, 8)];

impl ActionId {
    pub fn new(value: u8) -> Result<ActionId, SignalError> {
        if (1..=8).contains(&value) {
            Ok(ActionId(value))
        } else {
            Err(SignalError::BadAction(value))
        }
    }

    pub fn value(self) -> u8 {
        self.0
    }

    pub const ALL: [ActionId; 8] = [
        ActionId(1),
        ActionId(2),
        ActionId(3),
        ActionId(4),
        ActionId(5),
        ActionId(6),
        ActionId(7),
        ActionId(8),
    ];
}

/// Phase pair served by an action: (ring 1 phase, ring 2 phase).
pub fn action_phases(a: ActionId) -> (PhaseId, PhaseId) {
    let (p1, p2) = ACTION_PAIRS[(a.0 - 1) as usize];
    (PhaseId(p1), PhaseId(p2))
}

/// Action serving the given pair, if it is one of the eight legal pairs.
pub fn pair_action(p1: PhaseId, p2: PhaseId) -> Option<ActionId> {
    ACTION_PAIRS
        .iter()
        .position(|&(a, b)| a == p1.0 && b == p2.0)
        .map(|i| ActionId((i + 1) as u8))
}

/// A set of actions as a bitmask (bit a-1 for action a), the same layout the
/// policy's invalid-action mask uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionSet(pub u8);

impl ActionSet {
    pub const EMPTY: ActionSet = ActionSet(0);

    pub fn insert(&mut self, a: ActionId) {
        self.0 |= 1 << (a.0 - 1);
    }

    pub fn contains(self, a: ActionId) -> bool {
        self.0 & (1 << (a.0 - 1)) != 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = ActionId> {
        ActionId::ALL.into_iter().filter(move |a| self.contains(*a))
    }
}

/// Per-phase interval timings. `max_green` only constrains the actuated
/// baseline; the learned policy is limited by min green and clearances only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseTiming {
    pub min_green_s: f64,
    pub yellow_s: f64,
    pub red_clearance_s: f64,
    pub max_green_s: f64,
}

impl PhaseTiming {
    pub fn validate(&self, phase: u8) -> Result<(), SignalError> {
        let err = |reason: String| Err(SignalError::BadTiming { phase, reason });
        for (name, v) in [
            ("min_green", self.min_green_s),
            ("yellow", self.yellow_s),
            ("red_clearance", self.red_clearance_s),
            ("max_green", self.max_green_s),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return err(format!("{name} must be positive, got {v}"));
            }
            if Ticks::from_secs(v).is_err() {
                return err(format!("{name} = {v} s is not a multiple of 0.5 s"));
            }
        }
        if self.max_green_s < self.min_green_s {
            return err(format!(
                "max_green {} < min_green {}",
                self.max_green_s, self.min_green_s
            ));
        }
        Ok(())
    }
}

/// Timing plan for all eight phases.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingPlan {
    /// Indexed by phase - 1.
    pub phases: [PhaseTiming; 8],
}

impl TimingPlan {
    /// Defaults: 8 s min green on throughs, 5 s on lefts, 3.5 s yellow,
    /// 1.5 s red clearance, 40 s / 25 s actuated max greens.
    pub fn default_plan() -> TimingPlan {
        let through = PhaseTiming {
            min_green_s: 8.0,
            yellow_s: 3.5,
            red_clearance_s: 1.5,
            max_green_s: 40.0,
        };
        let left = PhaseTiming { min_green_s: 5.0, max_green_s: 25.0, ..through };
        let mut phases = [through; 8];
        for p in PHASES {
            if PhaseId(p).movement().is_left() {
                phases[(p - 1) as usize] = left;
            }
        }
        TimingPlan { phases }
    }

    pub fn get(&self, phase: PhaseId) -> &PhaseTiming {
        &self.phases[phase.index()]
    }

    pub fn min_green(&self, phase: PhaseId) -> Ticks {
        Ticks::from_secs(self.get(phase).min_green_s).expect("validated")
    }

    pub fn yellow(&self, phase: PhaseId) -> Ticks {
        Ticks::from_secs(self.get(phase).yellow_s).expect("validated")
    }

    pub fn red_clearance(&self, phase: PhaseId) -> Ticks {
        Ticks::from_secs(self.get(phase).red_clearance_s).expect("validated")
    }

    pub fn max_green(&self, phase: PhaseId) -> Ticks {
        Ticks::from_secs(self.get(phase).max_green_s).expect("validated")
    }

    /// Validates every phase, plus the cross-barrier alignment requirement:
    /// phases on one barrier side must share a common yellow+red clearance
    /// total so that a barrier crossing releases both rings at the same tick.
    pub fn validate(&self) -> Result<(), SignalError> {
        for p in PHASES {
            self.phases[(p - 1) as usize].validate(p)?;
        }
        for side in [BarrierSide::Main, BarrierSide::Cross] {
            let totals: Vec<f64> = PHASES
                .iter()
                .filter(|&&p| PhaseId(p).barrier_side() == side)
                .map(|&p| {
                    let t = &self.phases[(p - 1) as usize];
                    t.yellow_s + t.red_clearance_s
                })
                .collect();
            if totals.windows(2).any(|w| (w[0] - w[1]).abs() > 1e-9) {
                return Err(SignalError::BadTiming {
                    phase: 0,
                    reason: format!(
                        "yellow + red clearance must be uniform within a barrier side, got {totals:?}"
                    ),
                });
            }
        }
        Ok(())
    }
}

impl Default for TimingPlan {
    fn default() -> Self {
        Self::default_plan()
    }
}

/// Interval a ring is currently serving.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Interval {
    MinGreen,
    ExtensionGreen,
    Yellow,
    RedClearance,
}

/// State of one ring.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RingState {
    pub active_phase: PhaseId,
    pub interval: Interval,
    pub elapsed: Ticks,
    /// Next phase after termination; present exactly while in clearance.
    pub committed_phase: Option<PhaseId>,
}

impl RingState {
    fn start(phase: PhaseId) -> RingState {
        RingState {
            active_phase: phase,
            interval: Interval::MinGreen,
            elapsed: Ticks::ZERO,
            committed_phase: None,
        }
    }

    pub fn in_green(&self) -> bool {
        matches!(self.interval, Interval::MinGreen | Interval::ExtensionGreen)
    }

    /// The phase this ring is bound to serve next: the commitment while in
    /// clearance, otherwise the active phase.
    pub fn target_phase(&self) -> PhaseId {
        self.committed_phase.unwrap_or(self.active_phase)
    }

    /// Whether the active phase may terminate now: min green has been served
    /// and the ring is not already clearing toward a commitment.
    pub fn may_terminate(&self) -> bool {
        self.interval == Interval::ExtensionGreen
    }

    /// Green time served in the current phase activation (min + extension).
    pub fn green_elapsed(&self, plan: &TimingPlan) -> Ticks {
        match self.interval {
            Interval::MinGreen => self.elapsed,
            Interval::ExtensionGreen => plan.min_green(self.active_phase) + self.elapsed,
            _ => Ticks::ZERO,
        }
    }
}

/// Full controller state: both rings plus the decision clock.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControllerState {
    pub ring1: RingState,
    pub ring2: RingState,
    pub clock: Ticks,
    pub plan: TimingPlan,
}

impl ControllerState {
    /// Fresh controller resting at the start of the given pair's min green.
    pub fn new(plan: TimingPlan, initial: ActionId) -> Result<ControllerState, SignalError> {
        plan.validate()?;
        let (p1, p2) = action_phases(initial);
        Ok(ControllerState {
            ring1: RingState::start(p1),
            ring2: RingState::start(p2),
            clock: Ticks::ZERO,
            plan,
        })
    }

    pub fn ring(&self, r: Ring) -> &RingState {
        match r {
            Ring::R1 => &self.ring1,
            Ring::R2 => &self.ring2,
        }
    }

    fn ring_mut(&mut self, r: Ring) -> &mut RingState {
        match r {
            Ring::R1 => &mut self.ring1,
            Ring::R2 => &mut self.ring2,
        }
    }

    /// The pair the controller is bound for (commitments included).
    pub fn target_action(&self) -> ActionId {
        pair_action(self.ring1.target_phase(), self.ring2.target_phase())
            .expect("ring targets always form a legal pair")
    }

    /// Actions selectable at this decision point. Per ring, an action's phase
    /// must equal the ring's target phase or the ring must be free to
    /// terminate (extension green). Cross-barrier selections therefore
    /// require both rings to be terminable. Never empty: the target pair is
    /// always a member.
    pub fn feasible_actions(&self) -> ActionSet {
        let mut set = ActionSet::EMPTY;
        for a in ActionId::ALL {
            let (p1, p2) = action_phases(a);
            let ok = |ring: &RingState, p: PhaseId| p == ring.target_phase() || ring.may_terminate();
            if ok(&self.ring1, p1) && ok(&self.ring2, p2) {
                set.insert(a);
            }
        }
        debug_assert!(set.contains(self.target_action()));
        set
    }

    /// Seconds until this ring next needs a decision.
    ///
    /// MinGreen: the remaining min green. ExtensionGreen: one unit extension
    /// of 1 s. Yellow/RedClearance: the rest of the clearance plus the
    /// committed phase's full min green (the ring is decision-inert until
    /// the new phase can actually change).
    pub fn ring_timestep(&self, r: Ring) -> Ticks {
        let ring = self.ring(r);
        let plan = &self.plan;
        match ring.interval {
            Interval::MinGreen => plan.min_green(ring.active_phase) - ring.elapsed,
            Interval::ExtensionGreen => Ticks::from_secs(1.0).unwrap(),
            Interval::Yellow => {
                let committed = ring.committed_phase.expect("clearance has a commitment");
                (plan.yellow(ring.active_phase) - ring.elapsed)
                    + plan.red_clearance(ring.active_phase)
                    + plan.min_green(committed)
            }
            Interval::RedClearance => {
                let committed = ring.committed_phase.expect("clearance has a commitment");
                (plan.red_clearance(ring.active_phase) - ring.elapsed) + plan.min_green(committed)
            }
        }
    }

    /// Decision timestep: the smaller of the two ring timesteps.
    pub fn timestep(&self) -> Ticks {
        self.ring_timestep(Ring::R1).min(self.ring_timestep(Ring::R2))
    }

    /// Applies a decision. Rings whose target equals the action's phase
    /// continue unchanged; a ring selecting a different phase (necessarily
    /// from extension green) commits to it and starts Yellow. The clock does
    /// not move.
    pub fn apply_action(&mut self, a: ActionId) -> Result<(), SignalError> {
        if !self.feasible_actions().contains(a) {
            return Err(SignalError::InfeasibleAction { action: a.value() });
        }
        let (p1, p2) = action_phases(a);
        for (r, p) in [(Ring::R1, p1), (Ring::R2, p2)] {
            let ring = self.ring_mut(r);
            if ring.target_phase() == p {
                continue;
            }
            debug_assert!(ring.may_terminate());
            ring.interval = Interval::Yellow;
            ring.elapsed = Ticks::ZERO;
            ring.committed_phase = Some(p);
        }
        Ok(())
    }

    /// Advances time by `dt` ticks, firing interval transitions exactly at
    /// their boundaries. `dt` may not pass the next decision point.
    pub fn advance(&mut self, dt: Ticks) -> Result<crate::movement::PerMovement<Indication>, SignalError> {
        let horizon = self.timestep();
        if dt > horizon {
            return Err(SignalError::AdvancePastDecision { requested: dt.0, horizon: horizon.0 });
        }
        for r in [Ring::R1, Ring::R2] {
            self.advance_ring(r, dt);
        }
        self.clock += dt;
        Ok(self.indications())
    }

    fn advance_ring(&mut self, r: Ring, dt: Ticks) {
        let plan = self.plan.clone();
        let ring = self.ring_mut(r);
        let mut left = dt;
        while !left.is_zero() {
            let boundary = match ring.interval {
                Interval::MinGreen => Some(plan.min_green(ring.active_phase)),
                Interval::ExtensionGreen => None,
                Interval::Yellow => Some(plan.yellow(ring.active_phase)),
                Interval::RedClearance => Some(plan.red_clearance(ring.active_phase)),
            };
            let to_boundary = boundary.map(|b| b - ring.elapsed);
            match to_boundary {
                Some(rem) if rem <= left => {
                    left = left - rem;
                    match ring.interval {
                        Interval::MinGreen => {
                            ring.interval = Interval::ExtensionGreen;
                        }
                        Interval::Yellow => {
                            ring.interval = Interval::RedClearance;
                        }
                        Interval::RedClearance => {
                            ring.active_phase =
                                ring.committed_phase.take().expect("clearance has a commitment");
                            ring.interval = Interval::MinGreen;
                        }
                        Interval::ExtensionGreen => unreachable!(),
                    }
                    ring.elapsed = Ticks::ZERO;
                }
                _ => {
                    ring.elapsed += left;
                    left = Ticks::ZERO;
                }
            }
        }
    }

    /// Current per-movement display.
    pub fn indications(&self) -> crate::movement::PerMovement<Indication> {
        let mut out = [Indication::Red; 8];
        for ring in [&self.ring1, &self.ring2] {
            let m = ring.active_phase.movement();
            out[m.index()] = match ring.interval {
                Interval::MinGreen | Interval::ExtensionGreen => Indication::Green,
                Interval::Yellow => Indication::Yellow,
                Interval::RedClearance => Indication::Red,
            };
        }
        out
    }

    /// Elapsed green per phase (seconds): nonzero only for phases currently
    /// in a green interval, so at most two entries are set.
    pub fn signal_state_vector(&self) -> [f64; 8] {
        let mut out = [0.0; 8];
        for ring in [&self.ring1, &self.ring2] {
            if ring.in_green() {
                out[ring.active_phase.index()] = ring.green_elapsed(&self.plan).as_secs();
            }
        }
        out
    }

    /// Movements currently shown green.
    pub fn green_movements(&self) -> Vec<Movement> {
        self.indications()
            .iter()
            .enumerate()
            .filter(|(_, i)| **i == Indication::Green)
            .map(|(k, _)| Movement::from_index(k).unwrap())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::movement::MOVEMENTS;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn state_on(pair: ActionId) -> ControllerState {
        ControllerState::new(TimingPlan::default_plan(), pair).unwrap()
    }

    fn tick(s: f64) -> Ticks {
        Ticks::from_secs(s).unwrap()
    }

    /// Walks `n` random feasible decisions; returns the resulting state.
    fn random_walk(seed: u64, n: usize) -> ControllerState {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut s = state_on(ActionId::new(4).unwrap());
        for _ in 0..n {
            let feasible: Vec<ActionId> = s.feasible_actions().iter().collect();
            let a = feasible[rng.gen_range(0..feasible.len())];
            s.apply_action(a).unwrap();
            let dt = s.timestep();
            s.advance(dt).unwrap();
        }
        s
    }

    #[test]
    fn action_pair_table() {
        assert_eq!(
            action_phases(ActionId::new(1).unwrap()),
            (PhaseId::new(1).unwrap(), PhaseId::new(5).unwrap())
        );
        assert_eq!(
            action_phases(ActionId::new(8).unwrap()),
            (PhaseId::new(4).unwrap(), PhaseId::new(8).unwrap())
        );
        assert_eq!(ActionId::new(9).unwrap_err(), SignalError::BadAction(9));
        assert_eq!(ActionId::new(0).unwrap_err(), SignalError::BadAction(0));
    }

    #[test]
    fn pairs_are_one_per_ring_same_side() {
        for a in ActionId::ALL {
            let (p1, p2) = action_phases(a);
            assert_eq!(p1.ring(), Ring::R1);
            assert_eq!(p2.ring(), Ring::R2);
            assert_eq!(p1.barrier_side(), p2.barrier_side());
            assert!(!p1.movement().conflicts_with(p2.movement()));
        }
    }

    #[test]
    fn all_actions_feasible_from_dual_extension() {
        let mut s = state_on(ActionId::new(4).unwrap()); // {2,6}
        s.advance(tick(8.0)).unwrap(); // through min green, both rings extend
        assert_eq!(s.ring1.interval, Interval::ExtensionGreen);
        assert_eq!(s.ring2.interval, Interval::ExtensionGreen);
        assert_eq!(s.feasible_actions().len(), 8);
    }

    #[test]
    fn min_green_binds_its_ring() {
        // Ring 1 back in min green on phase 2 while ring 2 extends phase 6:
        // reach it by cycling ring 1 away and back.
        let mut s = state_on(ActionId::new(4).unwrap());
        s.advance(tick(8.0)).unwrap();
        // Send ring 1 to phase 1, keep ring 2 on 6.
        s.apply_action(ActionId::new(2).unwrap()).unwrap(); // {1,6}
        assert_eq!(s.ring1.interval, Interval::Yellow);
        assert_eq!(s.ring1.committed_phase, Some(PhaseId::new(1).unwrap()));
        // Ride out the clearance into phase 1 min green.
        s.advance(s.timestep()).unwrap();
        // Now ring 1 is in extension green on phase 1 (timestep ran through
        // its min green); bring it back toward phase 2.
        s.apply_action(ActionId::new(4).unwrap()).unwrap(); // commit 1 -> 2
        s.advance(tick(3.5 + 1.5 + 2.0)).unwrap(); // mid min green of phase 2
        assert_eq!(s.ring1.interval, Interval::MinGreen);
        assert_eq!(s.ring1.active_phase, PhaseId::new(2).unwrap());
        assert_eq!(s.ring2.interval, Interval::ExtensionGreen);
        let feas: Vec<u8> = s.feasible_actions().iter().map(|a| a.value()).collect();
        assert_eq!(feas, vec![3, 4]); // {2,5} and {2,6}
    }

    #[test]
    fn clearance_commitment_is_binding() {
        let mut s = state_on(ActionId::new(4).unwrap());
        s.advance(tick(8.0)).unwrap();
        s.apply_action(ActionId::new(5).unwrap()).unwrap(); // cross to {3,7}
        assert_eq!(s.ring1.interval, Interval::Yellow);
        assert_eq!(s.ring2.interval, Interval::Yellow);
        s.advance(tick(2.0)).unwrap(); // mid-yellow
        let feas: Vec<u8> = s.feasible_actions().iter().map(|a| a.value()).collect();
        assert_eq!(feas, vec![5]); // only {3,7}
    }

    #[test]
    fn ring_timestep_rules() {
        // MinGreen with 6 of 10 elapsed -> 4 s remaining.
        let mut plan = TimingPlan::default_plan();
        plan.phases[1].min_green_s = 10.0; // phase 2
        let mut s = ControllerState::new(plan, ActionId::new(4).unwrap()).unwrap();
        s.advance(tick(6.0)).unwrap();
        assert_eq!(s.ring_timestep(Ring::R1), tick(4.0));

        // ExtensionGreen, no commitment -> unit extension.
        let mut s = state_on(ActionId::new(4).unwrap());
        s.advance(tick(8.0)).unwrap();
        assert_eq!(s.ring_timestep(Ring::R1), tick(1.0));

        // Yellow 1.0 of 3.5 elapsed, red 1.5, committed min green 5 (left):
        // 2.5 + 1.5 + 5 = 9.
        let mut s = state_on(ActionId::new(4).unwrap());
        s.advance(tick(8.0)).unwrap();
        s.apply_action(ActionId::new(2).unwrap()).unwrap(); // ring 1 commits to phase 1
        s.advance(tick(1.0)).unwrap();
        assert_eq!(s.ring1.interval, Interval::Yellow);
        assert_eq!(s.ring_timestep(Ring::R1), tick(9.0));
    }

    #[test]
    fn controller_timestep_is_min_of_ring_timesteps() {
        for seed in 0..200 {
            let s = random_walk(seed, (seed % 17) as usize + 1);
            let brute = s.ring_timestep(Ring::R1).min(s.ring_timestep(Ring::R2));
            assert_eq!(s.timestep(), brute);
        }
    }

    #[test]
    fn apply_action_continuation_and_switch() {
        // Continuation leaves both rings untouched.
        let mut s = state_on(ActionId::new(4).unwrap());
        s.advance(tick(8.0)).unwrap();
        let before = s.clone();
        s.apply_action(ActionId::new(4).unwrap()).unwrap();
        assert_eq!(s, before);

        // Cross-barrier switch commits both rings into yellow.
        s.apply_action(ActionId::new(8).unwrap()).unwrap(); // {4,8}
        assert_eq!(s.ring1.interval, Interval::Yellow);
        assert_eq!(s.ring2.interval, Interval::Yellow);
        assert_eq!(s.ring1.committed_phase, Some(PhaseId::new(4).unwrap()));
        assert_eq!(s.ring2.committed_phase, Some(PhaseId::new(8).unwrap()));

        // Single-ring switch only commits ring 1.
        let mut s = state_on(ActionId::new(4).unwrap());
        s.advance(tick(8.0)).unwrap();
        s.apply_action(ActionId::new(2).unwrap()).unwrap(); // {1,6}
        assert_eq!(s.ring1.interval, Interval::Yellow);
        assert_eq!(s.ring2.interval, Interval::ExtensionGreen);
        assert_eq!(s.ring2.committed_phase, None);
    }

    #[test]
    fn infeasible_action_rejected() {
        let s = state_on(ActionId::new(4).unwrap());
        // Both rings in min green: everything but the active pair is infeasible.
        let mut s2 = s.clone();
        assert_eq!(
            s2.apply_action(ActionId::new(8).unwrap()).unwrap_err(),
            SignalError::InfeasibleAction { action: 8 }
        );
    }

    #[test]
    fn advance_through_clearance_lands_in_committed_min_green() {
        let mut s = state_on(ActionId::new(4).unwrap());
        s.advance(tick(8.0)).unwrap();
        s.apply_action(ActionId::new(8).unwrap()).unwrap();
        s.advance(tick(3.5 + 1.5)).unwrap(); // exactly yellow + red clearance
        assert_eq!(s.ring1.active_phase, PhaseId::new(4).unwrap());
        assert_eq!(s.ring1.interval, Interval::MinGreen);
        assert_eq!(s.ring1.elapsed, Ticks::ZERO);
        assert_eq!(s.ring2.active_phase, PhaseId::new(8).unwrap());
    }

    #[test]
    fn advance_zero_is_identity() {
        let mut s = random_walk(3, 9);
        let before = s.clone();
        s.advance(Ticks::ZERO).unwrap();
        assert_eq!(s, before);
    }

    #[test]
    fn advance_past_decision_rejected() {
        let mut s = state_on(ActionId::new(4).unwrap());
        let dt = s.timestep();
        assert!(matches!(
            s.advance(dt + tick(0.5)),
            Err(SignalError::AdvancePastDecision { .. })
        ));
    }

    #[test]
    fn greens_never_conflict_along_action_sequence() {
        // {2,6} -> {4,8} -> {2,6} with half-second scanning.
        let mut s = state_on(ActionId::new(4).unwrap());
        let script = [ActionId::new(8).unwrap(), ActionId::new(4).unwrap()];
        let mut script = script.iter();
        for _ in 0..200 {
            let feasible = s.feasible_actions();
            let next = script.clone().next().copied();
            let a = match next {
                Some(a) if feasible.contains(a) && s.ring1.may_terminate() && s.ring2.may_terminate() => {
                    script.next();
                    a
                }
                _ => s.target_action(),
            };
            if feasible.contains(a) {
                s.apply_action(a).unwrap();
            }
            let dt = s.timestep();
            let mut stepped = Ticks::ZERO;
            while stepped < dt {
                s.advance(tick(0.5)).unwrap();
                stepped += tick(0.5);
                let greens = s.green_movements();
                for (i, a) in greens.iter().enumerate() {
                    for b in &greens[i + 1..] {
                        assert!(!a.conflicts_with(*b), "conflicting greens {a} and {b}");
                    }
                }
            }
        }
    }

    #[test]
    fn signal_state_vector_tracks_green_elapsed() {
        let mut s = state_on(ActionId::new(4).unwrap());
        s.advance(tick(8.0)).unwrap();
        for _ in 0..4 {
            s.apply_action(ActionId::new(4).unwrap()).unwrap();
            s.advance(tick(1.0)).unwrap();
        }
        let v = s.signal_state_vector();
        assert_eq!(v[1], 12.0);
        assert_eq!(v[5], 12.0);
        assert_eq!(v.iter().filter(|x| **x != 0.0).count(), 2);

        // Both rings in clearance: all zero.
        s.apply_action(ActionId::new(8).unwrap()).unwrap();
        s.advance(tick(1.0)).unwrap();
        assert_eq!(s.signal_state_vector(), [0.0; 8]);
    }

    #[test]
    fn green_elapsed_matches_independent_timer_log() {
        // Trace oracle: accumulate green ticks per phase from indications and
        // compare against the state vector at every decision point.
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut s = state_on(ActionId::new(4).unwrap());
        let mut timers = [0.0f64; 8];
        let phase_of = |m: Movement| PHASES.iter().find(|&&p| PhaseId(p).movement() == m).copied();
        for _ in 0..400 {
            let feasible: Vec<ActionId> = s.feasible_actions().iter().collect();
            let a = feasible[rng.gen_range(0..feasible.len())];
            let before_targets = (s.ring1.target_phase(), s.ring2.target_phase());
            s.apply_action(a).unwrap();
            // A ring that left green resets its phase timer when green next begins.
            let dt = s.timestep();
            let mut stepped = Ticks::ZERO;
            while stepped < dt {
                let pre = s.indications();
                s.advance(tick(0.5)).unwrap();
                stepped += tick(0.5);
                let post = s.indications();
                for &m in &MOVEMENTS {
                    let p = phase_of(m).unwrap() as usize - 1;
                    if post[m.index()] == Indication::Green {
                        if pre[m.index()] != Indication::Green {
                            timers[p] = 0.0;
                        }
                        timers[p] += 0.5;
                    }
                }
            }
            let v = s.signal_state_vector();
            for ring in [&s.ring1, &s.ring2] {
                if ring.in_green() {
                    let p = ring.active_phase.index();
                    assert_eq!(v[p], timers[p], "phase {} green timer", p + 1);
                }
            }
            let _ = before_targets;
        }
    }

    #[test]
    fn feasible_set_never_empty_and_contains_target() {
        for seed in 0..100 {
            let s = random_walk(seed, (seed % 23) as usize);
            let set = s.feasible_actions();
            assert!(!set.is_empty());
            assert!(set.contains(s.target_action()));
        }
    }

    #[test]
    fn mismatched_clearance_across_barrier_side_rejected() {
        let mut plan = TimingPlan::default_plan();
        plan.phases[0].yellow_s = 4.0; // phase 1 deviates from its side
        assert!(plan.validate().is_err());
    }
}
