//! Run metrics and transition detection for experiment curves.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pgm::{classify_matches, MatchState};
use crate::sample::ObservedPair;

/// Observed degree below which a non-seed pair can never be admitted at the
/// base threshold; defines the matchable set.
pub const MATCHABLE_MIN_DEGREE: usize = 4;

/// Aggregated quality metrics of one finished run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunMetrics {
    pub good: usize,
    pub bad: usize,
    pub unmatched: usize,
    pub seeds_used: usize,
    pub steps: u64,
    /// `good / (good + bad)`; 1 when nothing was matched.
    pub precision: f64,
    /// `good / matchable`, where a vertex is matchable when its observed
    /// degree is at least 4 in both graphs; 1 when nothing is matchable.
    pub recall_vs_matchable: f64,
}

/// Vertices whose observed degree reaches 4 in both graphs.
pub fn matchable_count(pair: &ObservedPair) -> usize {
    (0..pair.n() as u32)
        .filter(|&a| {
            pair.g1.degree(a) >= MATCHABLE_MIN_DEGREE
                && pair.g2.degree(pair.truth(a)) >= MATCHABLE_MIN_DEGREE
        })
        .count()
}

pub fn run_metrics(state: &MatchState, pair: &ObservedPair) -> RunMetrics {
    let c = classify_matches(state, pair);
    let seeds_used = state.records().iter().filter(|r| r.is_seed).count();
    let matched = c.good + c.bad;
    let matchable = matchable_count(pair);
    RunMetrics {
        good: c.good,
        bad: c.bad,
        unmatched: c.unmatched,
        seeds_used,
        steps: state.steps(),
        precision: if matched == 0 {
            1.0
        } else {
            c.good as f64 / matched as f64
        },
        recall_vs_matchable: if matchable == 0 {
            1.0
        } else {
            c.good as f64 / matchable as f64
        },
    }
}

/// Finds the seed count at the sharpest logarithmic jump of a transition
/// curve `(a0, mean matched)`, sorted by `a0` with at least 4 points.
/// Returns the right endpoint of the jump; ties break toward smaller `a0`.
/// Mean values below 1 are floored at 1 on the log scale. A curve whose
/// largest jump stays below 2x carries no transition.
pub fn detect_transition(curve: &[(f64, f64)]) -> Result<f64> {
    if curve.len() < 4 {
        return Err(Error::InvalidParameter(format!(
            "transition detection needs at least 4 points, got {}",
            curve.len()
        )));
    }
    for w in curve.windows(2) {
        if w[1].0 <= w[0].0 {
            return Err(Error::InvalidParameter(
                "transition curve must be sorted by a0".into(),
            ));
        }
    }
    let mut best_jump = f64::NEG_INFINITY;
    let mut best_a0 = None;
    for w in curve.windows(2) {
        let jump = (w[1].1.max(1.0) / w[0].1.max(1.0)).ln();
        if jump > best_jump {
            best_jump = jump;
            best_a0 = Some(w[1].0);
        }
    }
    if best_jump < 2.0f64.ln() {
        return Err(Error::NoTransition);
    }
    Ok(best_a0.unwrap())
}
