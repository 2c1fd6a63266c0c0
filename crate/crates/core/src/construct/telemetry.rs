//! Per-extension step log.

use serde::Serialize;

/// Pipeline phases in execution order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Phase {
    Exact,
    DirectPair,
    Track,
    Scheme2,
    FiveHeavy,
    Scheme3,
    Lucky,
    Final,
}

impl Phase {
    pub fn name(self) -> &'static str {
        match self {
            Phase::Exact => "exact",
            Phase::DirectPair => "direct-pair",
            Phase::Track => "track",
            Phase::Scheme2 => "scheme2",
            Phase::FiveHeavy => "five-heavy",
            Phase::Scheme3 => "scheme3",
            Phase::Lucky => "lucky",
            Phase::Final => "final",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum FiveHeavyCase {
    One,
    TwoA,
    TwoB,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum FinalCase {
    /// One of the two elements lies outside the left components.
    Outside,
    /// Both in the same left component.
    SameLeft,
    /// In two different left components.
    DifferentLeft,
}

/// The branch that produced the matching.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Branch {
    DirectPair,
    /// A two-element class outside the right components while building
    /// track component `step + 1`.
    TrackWin {
        step: usize,
    },
    /// The same condition for the last track relation once the track is built.
    TrackFinalObs,
    FiveHeavy {
        case: FiveHeavyCase,
    },
    OutsidePair {
        heavy: usize,
    },
    OutsideIdentity {
        heavy: usize,
    },
    Final {
        case: FinalCase,
    },
    /// Solved by the exact solver; `reason` names the step that deferred.
    Exact {
        reason: &'static str,
    },
}

impl Branch {
    pub fn name(&self) -> String {
        match self {
            Branch::DirectPair => "direct-pair".into(),
            Branch::TrackWin { .. } => "track-win".into(),
            Branch::TrackFinalObs => "track-final".into(),
            Branch::FiveHeavy { case } => format!("five-heavy-{case:?}").to_lowercase(),
            Branch::OutsidePair { .. } => "outside-a".into(),
            Branch::OutsideIdentity { .. } => "outside-b".into(),
            Branch::Final { case } => format!("final-{case:?}").to_lowercase(),
            Branch::Exact { reason } => format!("exact:{reason}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StepLog {
    pub n: usize,
    pub c_eff: u64,
    pub phase_reached: Phase,
    pub branch: Branch,
    /// Left components at the time of the win.
    pub track_len: usize,
    /// `sigma_hist[k]` = components with exactly `k` 1-charges.
    pub sigma_hist: [u32; 5],
    pub tau_hist: [u32; 5],
    pub heavy_total: usize,
    pub heavy_left: usize,
    pub heavy_right: usize,
    pub scheme3_runs: usize,
    pub max_uncharged: usize,
    pub lucky: Option<usize>,
    pub h_prime: usize,
    pub h_double: usize,
    pub conflict_edges: usize,
    pub popular: usize,
    pub y_size: usize,
    /// Alternative recipe choices tried after the first one failed to complete.
    pub recipe_retries: u32,
    pub exact_nodes: u64,
}

impl StepLog {
    pub fn new(n: usize, c_eff: u64) -> Self {
        StepLog {
            n,
            c_eff,
            phase_reached: Phase::DirectPair,
            branch: Branch::DirectPair,
            track_len: 0,
            sigma_hist: [0; 5],
            tau_hist: [0; 5],
            heavy_total: 0,
            heavy_left: 0,
            heavy_right: 0,
            scheme3_runs: 0,
            max_uncharged: 0,
            lucky: None,
            h_prime: 0,
            h_double: 0,
            conflict_edges: 0,
            popular: 0,
            y_size: 0,
            recipe_retries: 0,
            exact_nodes: 0,
        }
    }
}
