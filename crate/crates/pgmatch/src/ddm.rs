//! The degree-driven matcher: percolation inside the first slice, a
//! downward cascade with per-stage thresholds, base-threshold rounds below
//! the logarithmic cutoff, and the top slice last.
//!
//! Stage layout, given a slice plan and stage plan:
//!
//! 1. Percolate over slice-1-eligible pairs at threshold `r1`. All seeds
//!    spread marks into the slice regardless of where they live; uniform
//!    seeds may be injected as atomic per-slice groups.
//! 2. For each cascade source slice `k` (upper boundary above `alpha*`),
//!    one synchronous admission pass over unreserved unmatched pairs with at
//!    least `threshold(rho_k)` matched neighbors in the slice-`k` core. The
//!    core of a slice is the set of matched pairs eligible for it: one
//!    endpoint in the inner region, the other inside the slice.
//! 3. Below the cutoff, repeated admission passes at the base threshold;
//!    the first pass is sourced by the deepest cascade core and matched
//!    pairs accumulate as sources until a pass admits nothing.
//! 4. Pairs reserved for the top stage (an endpoint above the reserve
//!    threshold, pair never placed in slice 1) are matched against the
//!    designated low reference slice at the top threshold.
//!
//! Conflict-freedom is enforced globally across all stages through the
//! shared match state.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pairs::{check_non_conflicting, VertexPair};
use crate::pgm::{percolate, Frontier, MarkTable, MatchState, PgmOptions, StageId, STAGE_SEED};
use crate::sample::ObservedPair;
use crate::slices::{assign_slices, SliceAssignment, SlicePlan, StagePlan, SLICE_EXCLUDED};

/// Options for a staged run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DdmOptions {
    pub pgm: PgmOptions,
    /// Inject below-slice-1 seeds as atomic per-slice groups.
    pub group_seeds: bool,
}

impl Default for DdmOptions {
    fn default() -> Self {
        DdmOptions {
            pgm: PgmOptions::default(),
            group_seeds: false,
        }
    }
}

/// What one stage did: its threshold, mark sources, and admissions, as
/// indices into the match-state record list.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StageRecord {
    pub stage: StageId,
    pub label: String,
    /// Slice sourcing the marks (admissions may land anywhere below it).
    pub source_slice: Option<usize>,
    /// Bounds of the source slice, `[lo, hi)`.
    pub alpha_lo: f64,
    pub alpha_hi: f64,
    pub threshold: u32,
    pub sources: Vec<u32>,
    pub admitted: Vec<u32>,
}

/// A finished staged run: the shared match state, the per-stage trace, and
/// the slice assignment it ran under.
#[derive(Debug, Clone)]
pub struct DdmOutcome {
    pub state: MatchState,
    pub stages: Vec<StageRecord>,
    pub assignment: SliceAssignment,
}

/// Groups seeds for injection into the slice-1 percolation.
///
/// Seeds in slices 0 and 1 stand alone. Seeds of a deeper slice `k` are
/// chunked into groups of `ceil(alpha_1/alpha_{k+1}) + 1`, each handled as
/// one atomic frontier element; a trailing partial chunk is injected as
/// individual seeds.
pub fn group_uniform_seeds(
    seeds: &[VertexPair],
    plan: &SlicePlan,
    assignment: &SliceAssignment,
) -> Vec<Vec<VertexPair>> {
    let mut by_slice: std::collections::BTreeMap<u16, Vec<VertexPair>> = Default::default();
    for &p in seeds {
        by_slice.entry(assignment.pair_slice(p)).or_default().push(p);
    }
    let mut groups = Vec::new();
    for (k, mut members) in by_slice {
        members.sort_unstable();
        let size = plan.seed_group_size(k);
        if size <= 1 {
            groups.extend(members.into_iter().map(|p| vec![p]));
            continue;
        }
        let mut it = members.chunks_exact(size);
        for chunk in &mut it {
            groups.push(chunk.to_vec());
        }
        for &p in it.remainder() {
            groups.push(vec![p]);
        }
    }
    groups
}

/// Runs the staged matcher. Seeds are matched outright wherever they live;
/// the percolation and every later stage run on the given plans. Fails if no
/// seed falls inside any slice of the plan.
pub fn run_ddm(
    pair: &ObservedPair,
    seeds: &[VertexPair],
    plan: &SlicePlan,
    stages: &StagePlan,
    options: &DdmOptions,
) -> Result<DdmOutcome> {
    let n = pair.n();
    let assignment = assign_slices(pair, plan)?;

    let mut sorted: Vec<VertexPair> = seeds.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    for p in &sorted {
        if p.a as usize >= n || p.b as usize >= n {
            return Err(Error::InvalidParameter(format!(
                "seed ({},{}) out of range for n={n}",
                p.a, p.b
            )));
        }
    }
    check_non_conflicting(&sorted)?;
    if !sorted.is_empty()
        && !sorted.iter().any(|p| {
            assignment.g1[p.a as usize].slice != SLICE_EXCLUDED
                || assignment.g2[p.b as usize].slice != SLICE_EXCLUDED
        })
    {
        return Err(Error::SeedSetUnreachable);
    }

    let mut state = MatchState::new(n);
    let mut trace: Vec<StageRecord> = Vec::new();

    // ---- stage 1: percolation restricted to slice-1-eligible pairs -------
    let mut frontier = Frontier::new(options.pgm.pop);
    if options.group_seeds {
        for group in group_uniform_seeds(&sorted, plan, &assignment) {
            let idxs: Vec<u32> = group
                .into_iter()
                .map(|p| state.admit(p, true, 0, 0, STAGE_SEED))
                .collect();
            frontier.push_group(&idxs);
        }
    } else {
        for &p in &sorted {
            let idx = state.admit(p, true, 0, 0, STAGE_SEED);
            frontier.push_single(idx);
        }
    }

    let mut stage_id: StageId = 1;
    let mut sources = Vec::new();
    percolate(
        pair,
        &mut state,
        &mut frontier,
        stages.r1,
        stage_id,
        |v1, v2| assignment.pair_eligible(1, v1, v2),
        &mut sources,
    );
    let admitted = records_of_stage(&state, stage_id);
    let (lo1, hi1) = plan.slice_bounds(1);
    trace.push(StageRecord {
        stage: stage_id,
        label: "slice-1 percolation".into(),
        source_slice: Some(1),
        alpha_lo: lo1,
        alpha_hi: hi1,
        threshold: stages.r1,
        sources,
        admitted,
    });

    // ---- cascade stages above alpha* --------------------------------------
    let mut last_core_slice = 1usize;
    for &(k, _rho, threshold) in &stages.cascade {
        stage_id += 1;
        let core = slice_core(&state, &assignment, k as u16);
        let reached = admission_pass(
            pair,
            &state,
            &mut MarkTable::new(),
            &core,
            threshold,
            |v1, v2| !assignment.reserved_for_top(v1, v2),
        );
        let admitted = admit_all(&mut state, &reached, threshold, stage_id);
        let (lo, hi) = plan.slice_bounds(k);
        trace.push(StageRecord {
            stage: stage_id,
            label: format!("cascade from slice {k}"),
            source_slice: Some(k),
            alpha_lo: lo,
            alpha_hi: hi,
            threshold,
            sources: core,
            admitted,
        });
        last_core_slice = k;
    }

    // ---- base-threshold rounds below alpha* --------------------------------
    // Sources start from the deepest cascade core and accumulate admissions.
    // Seeds source these rounds too, wherever they live: they are a-priori
    // correct, so the inner-core safety argument covers them, and marks from
    // below-slice-1 seeds would otherwise never reach sub-slice-1 pairs.
    let mut marks = MarkTable::new();
    let mut new_sources = slice_core(&state, &assignment, last_core_slice as u16);
    {
        let in_core: std::collections::HashSet<u32> = new_sources.iter().copied().collect();
        new_sources.extend(
            state
                .records()
                .iter()
                .enumerate()
                .filter(|(i, r)| r.is_seed && !in_core.contains(&(*i as u32)))
                .map(|(i, _)| i as u32),
        );
        new_sources.sort_unstable();
    }
    loop {
        stage_id += 1;
        let reached = admission_pass(pair, &state, &mut marks, &new_sources, stages.low, |v1, v2| {
            !assignment.reserved_for_top(v1, v2)
        });
        let admitted = admit_all(&mut state, &reached, stages.low, stage_id);
        let done = admitted.is_empty();
        let round = stage_id - 1;
        trace.push(StageRecord {
            stage: stage_id,
            label: format!("low round {round}"),
            source_slice: None,
            alpha_lo: plan.last_boundary(),
            alpha_hi: plan.alphas[last_core_slice + 1],
            threshold: stages.low,
            sources: new_sources,
            admitted: admitted.clone(),
        });
        if done {
            break;
        }
        new_sources = admitted;
    }

    // ---- top slice against the designated low reference slice -------------
    stage_id += 1;
    if let Some(k_ref) = plan.top_stage_reference_slice() {
        let core = slice_core(&state, &assignment, k_ref as u16);
        let reached = admission_pass(
            pair,
            &state,
            &mut MarkTable::new(),
            &core,
            stages.top,
            |v1, v2| assignment.reserved_for_top(v1, v2),
        );
        let admitted = admit_all(&mut state, &reached, stages.top, stage_id);
        let (lo, hi) = plan.slice_bounds(k_ref);
        trace.push(StageRecord {
            stage: stage_id,
            label: format!("top slice from reference slice {k_ref}"),
            source_slice: Some(k_ref),
            alpha_lo: lo,
            alpha_hi: hi,
            threshold: stages.top,
            sources: core,
            admitted,
        });
    }

    Ok(DdmOutcome {
        state,
        stages: trace,
        assignment,
    })
}

/// Replays every admission against its stage's source set and checks it
/// collects at least the stage threshold of co-adjacencies. Low rounds share
/// one counter table, so their sources accumulate across rounds. Returns a
/// description of the first violation, if any.
pub fn verify_stage_soundness(pair: &ObservedPair, out: &DdmOutcome) -> std::result::Result<(), String> {
    use std::collections::HashSet;
    let mut cumulative_low: HashSet<u64> = HashSet::new();
    for stage in &out.stages {
        let is_low = stage.label.starts_with("low round");
        let sources: HashSet<u64> = if is_low {
            cumulative_low.extend(
                stage
                    .sources
                    .iter()
                    .map(|&i| out.state.records()[i as usize].pair.key()),
            );
            cumulative_low.clone()
        } else {
            stage
                .sources
                .iter()
                .map(|&i| out.state.records()[i as usize].pair.key())
                .collect()
        };
        for &idx in &stage.admitted {
            let r = out.state.records()[idx as usize];
            let mut count = 0u32;
            for &v1 in pair.g1.neighbors(r.pair.a) {
                for &v2 in pair.g2.neighbors(r.pair.b) {
                    if sources.contains(&VertexPair::new(v1, v2).key()) {
                        count += 1;
                    }
                }
            }
            if count < stage.threshold {
                return Err(format!(
                    "stage {:?} admitted ({},{}) with only {count} of {} marks",
                    stage.label, r.pair.a, r.pair.b, stage.threshold
                ));
            }
        }
    }
    Ok(())
}

fn records_of_stage(state: &MatchState, stage: StageId) -> Vec<u32> {
    state
        .records()
        .iter()
        .enumerate()
        .filter(|(_, r)| r.stage == stage)
        .map(|(i, _)| i as u32)
        .collect()
}

/// Matched pairs eligible for slice `k` (the slice's core), including seeds.
fn slice_core(state: &MatchState, assignment: &SliceAssignment, k: u16) -> Vec<u32> {
    state
        .records()
        .iter()
        .enumerate()
        .filter(|(_, r)| assignment.pair_eligible(k, r.pair.a, r.pair.b))
        .map(|(i, _)| i as u32)
        .collect()
}

/// One synchronous pass: spread marks from `sources` and collect candidates
/// whose counter crosses `threshold`, in ascending pair order. Counters may
/// persist across passes (low rounds) or start fresh (cascade, top stage).
fn admission_pass<F>(
    pair: &ObservedPair,
    state: &MatchState,
    marks: &mut MarkTable,
    sources: &[u32],
    threshold: u32,
    candidate_ok: F,
) -> Vec<VertexPair>
where
    F: Fn(u32, u32) -> bool,
{
    let mut reached = Vec::new();
    for &rec_idx in sources {
        let VertexPair { a: u1, b: u2 } = state.records()[rec_idx as usize].pair;
        for &v1 in pair.g1.neighbors(u1) {
            if state.is_used1(v1) {
                continue;
            }
            for &v2 in pair.g2.neighbors(u2) {
                if state.is_used2(v2) || !candidate_ok(v1, v2) {
                    continue;
                }
                let cand = VertexPair::new(v1, v2);
                if marks.increment(cand) == threshold {
                    reached.push(cand);
                }
            }
        }
    }
    reached.sort_unstable();
    reached
}

/// Admits the reached candidates in order, skipping conflicts.
fn admit_all(
    state: &mut MatchState,
    reached: &[VertexPair],
    threshold: u32,
    stage: StageId,
) -> Vec<u32> {
    let step = state.bump_steps();
    let mut admitted = Vec::new();
    for &cand in reached {
        if !state.is_used1(cand.a) && !state.is_used2(cand.b) {
            admitted.push(state.admit(cand, false, threshold, step, stage));
        }
    }
    admitted
}
