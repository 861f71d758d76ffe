//! The percolation matcher: sparse mark counters over an implicit pairs
//! graph, threshold admission, and conflict blocking.
//!
//! The pairs graph is never materialized. Processing a matched pair `[u1,u2]`
//! enumerates `adj1(u1) x adj2(u2)` and increments a sparse counter per
//! candidate; a candidate whose counter reaches the threshold at this step is
//! admitted unless it conflicts with an earlier match. Candidates with an
//! already-used endpoint are neither stored nor counted: they can never be
//! admitted, so their counters are unobservable.

use std::collections::HashMap;
use std::hash::{BuildHasherDefault, Hasher};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pairs::{check_non_conflicting, VertexPair};
use crate::rng::{rng_from_seed, ChaCha12Rng};
use crate::sample::ObservedPair;

pub(crate) const UNMATCHED: u32 = u32::MAX;

/// Stage tag on a match record. Plain PGM uses `SEED` and `PGM`; the staged
/// matcher numbers its stages upward from `PGM`.
pub type StageId = u16;
pub const STAGE_SEED: StageId = 0;
pub const STAGE_PGM: StageId = 1;

/// How the next frontier element is picked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PopPolicy {
    /// Uniformly at random, driven by the run seed.
    Uniform { rng_seed: u64 },
    /// First-in-first-out; deterministic, intended for debugging.
    Fifo,
}

/// One admitted pair with its admission context.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchRecord {
    pub pair: VertexPair,
    pub is_seed: bool,
    /// Counter value when admitted (0 for seeds).
    pub marks_at_match: u32,
    /// Frontier pop index at admission time (0 for seeds).
    pub step: u64,
    pub stage: StageId,
}

/// The matcher's evolving (and final) state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchState {
    n: usize,
    records: Vec<MatchRecord>,
    match1: Vec<u32>,
    match2: Vec<u32>,
    steps: u64,
}

impl MatchState {
    pub fn new(n: usize) -> Self {
        MatchState {
            n,
            records: Vec::new(),
            match1: vec![UNMATCHED; n],
            match2: vec![UNMATCHED; n],
            steps: 0,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Matched pairs in admission order.
    pub fn records(&self) -> &[MatchRecord] {
        &self.records
    }

    pub fn matched_count(&self) -> usize {
        self.records.len()
    }

    /// Number of frontier pops performed.
    pub fn steps(&self) -> u64 {
        self.steps
    }

    #[inline]
    pub fn is_used1(&self, v: u32) -> bool {
        self.match1[v as usize] != UNMATCHED
    }

    #[inline]
    pub fn is_used2(&self, v: u32) -> bool {
        self.match2[v as usize] != UNMATCHED
    }

    /// Record index of the match using `v` on the first-graph side.
    pub fn record_of1(&self, v: u32) -> Option<&MatchRecord> {
        match self.match1[v as usize] {
            UNMATCHED => None,
            i => Some(&self.records[i as usize]),
        }
    }

    pub fn record_of2(&self, v: u32) -> Option<&MatchRecord> {
        match self.match2[v as usize] {
            UNMATCHED => None,
            i => Some(&self.records[i as usize]),
        }
    }

    /// Matched pairs as a sorted list (useful for set comparisons).
    pub fn matched_pairs_sorted(&self) -> Vec<VertexPair> {
        let mut v: Vec<VertexPair> = self.records.iter().map(|r| r.pair).collect();
        v.sort_unstable();
        v
    }

    pub(crate) fn admit(
        &mut self,
        pair: VertexPair,
        is_seed: bool,
        marks_at_match: u32,
        step: u64,
        stage: StageId,
    ) -> u32 {
        debug_assert!(!self.is_used1(pair.a) && !self.is_used2(pair.b));
        let idx = self.records.len() as u32;
        self.records.push(MatchRecord {
            pair,
            is_seed,
            marks_at_match,
            step,
            stage,
        });
        self.match1[pair.a as usize] = idx;
        self.match2[pair.b as usize] = idx;
        idx
    }

    pub(crate) fn bump_steps(&mut self) -> u64 {
        self.steps += 1;
        self.steps
    }
}

/// Classification of a finalized state against the hidden truth.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classified {
    pub good: usize,
    pub bad: usize,
    pub unmatched: usize,
}

/// Counts matched pairs that agree with the groundtruth correspondence.
/// `unmatched` is `n - good - bad`.
pub fn classify_matches(state: &MatchState, pair: &ObservedPair) -> Classified {
    let mut good = 0;
    let mut bad = 0;
    for r in state.records() {
        if pair.is_good(r.pair.a, r.pair.b) {
            good += 1;
        } else {
            bad += 1;
        }
    }
    Classified {
        good,
        bad,
        unmatched: state.n().saturating_sub(good + bad),
    }
}

// ---------------------------------------------------------------------------
// sparse mark table

/// Multiply-xor finalizer for pair keys; the map is never iterated, so only
/// lookup speed and determinism matter.
#[derive(Default)]
pub(crate) struct KeyHasher {
    state: u64,
}

impl Hasher for KeyHasher {
    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.state = (self.state ^ b as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15);
        }
    }

    #[inline]
    fn write_u64(&mut self, v: u64) {
        let mut z = v.wrapping_add(0x9e37_79b9_7f4a_7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        self.state = z ^ (z >> 31);
    }

    #[inline]
    fn finish(&self) -> u64 {
        self.state
    }
}

pub(crate) type MarkMap = HashMap<u64, u32, BuildHasherDefault<KeyHasher>>;

/// Sparse counters with amortized purging of entries whose endpoints got
/// used after accumulation (they are permanently blocked and unreadable).
pub(crate) struct MarkTable {
    map: MarkMap,
    purge_at: usize,
}

impl MarkTable {
    pub fn new() -> Self {
        MarkTable {
            map: MarkMap::default(),
            purge_at: 1 << 21,
        }
    }

    /// Increments and returns the new counter value.
    #[inline]
    pub fn increment(&mut self, pair: VertexPair) -> u32 {
        let c = self.map.entry(pair.key()).or_insert(0);
        *c += 1;
        *c
    }

    /// Drops blocked entries once the table doubles past the last purge.
    pub fn maybe_purge(&mut self, state: &MatchState) {
        if self.map.len() < self.purge_at {
            return;
        }
        self.map.retain(|&key, _| {
            let a = (key >> 32) as u32;
            let b = key as u32;
            !state.is_used1(a) && !state.is_used2(b)
        });
        self.purge_at = (self.map.len() * 2).max(1 << 21);
    }
}

// ---------------------------------------------------------------------------
// frontier

/// A frontier element: one record, or a group of seed records handled as a
/// single atomic element (used for grouped uniform seeds).
#[derive(Debug, Clone, Copy)]
pub(crate) enum FrontierItem {
    Single(u32),
    Group { offset: u32, len: u32 },
}

pub(crate) struct Frontier {
    items: Vec<FrontierItem>,
    /// Backing storage for group members (record indices).
    arena: Vec<u32>,
    cursor: usize,
    popper: Popper,
}

pub(crate) enum Popper {
    Uniform(ChaCha12Rng),
    Fifo,
}

impl Frontier {
    pub fn new(policy: PopPolicy) -> Self {
        let popper = match policy {
            PopPolicy::Uniform { rng_seed } => Popper::Uniform(rng_from_seed(rng_seed)),
            PopPolicy::Fifo => Popper::Fifo,
        };
        Frontier {
            items: Vec::new(),
            arena: Vec::new(),
            cursor: 0,
            popper,
        }
    }

    pub fn push_single(&mut self, record: u32) {
        self.items.push(FrontierItem::Single(record));
    }

    pub fn push_group(&mut self, records: &[u32]) {
        if records.len() == 1 {
            self.push_single(records[0]);
            return;
        }
        let offset = self.arena.len() as u32;
        self.arena.extend_from_slice(records);
        self.items.push(FrontierItem::Group {
            offset,
            len: records.len() as u32,
        });
    }

    pub fn is_empty(&self) -> bool {
        self.cursor >= self.items.len()
    }

    /// Pops per policy; uniform mode swap-removes a random live element.
    pub fn pop(&mut self) -> Option<FrontierItem> {
        if self.is_empty() {
            return None;
        }
        match &mut self.popper {
            Popper::Uniform(rng) => {
                let live = self.items.len() - self.cursor;
                let i = self.cursor + rng.gen_range(0..live);
                let last = self.items.len() - 1;
                self.items.swap(i, last);
                self.items.pop()
            }
            Popper::Fifo => {
                let item = self.items[self.cursor];
                self.cursor += 1;
                Some(item)
            }
        }
    }

    pub fn members<'a>(&'a self, item: &FrontierItem) -> &'a [u32] {
        match item {
            FrontierItem::Single(_) => unreachable!("singletons are inlined by callers"),
            FrontierItem::Group { offset, len } => {
                &self.arena[*offset as usize..(*offset + *len) as usize]
            }
        }
    }
}

// ---------------------------------------------------------------------------
// percolation core

/// Pops frontier elements, spreads marks over the implicit pairs graph, and
/// admits candidates reaching `threshold`, in ascending pair order, skipping
/// conflicts. Restricting `candidate_ok` confines the percolation to a slice.
///
/// `sources` records every processed record index in pop order (the final
/// processed set, for soundness replay).
pub(crate) fn percolate<F>(
    pair: &ObservedPair,
    state: &mut MatchState,
    frontier: &mut Frontier,
    threshold: u32,
    stage: StageId,
    candidate_ok: F,
    sources: &mut Vec<u32>,
) where
    F: Fn(u32, u32) -> bool,
{
    let mut reached: Vec<VertexPair> = Vec::new();
    let mut member_buf: Vec<u32> = Vec::new();
    let mut marks = MarkTable::new();

    while let Some(item) = frontier.pop() {
        let step = state.bump_steps();
        reached.clear();
        member_buf.clear();
        match item {
            FrontierItem::Single(r) => member_buf.push(r),
            g @ FrontierItem::Group { .. } => member_buf.extend_from_slice(frontier.members(&g)),
        }

        for &rec_idx in &member_buf {
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
            sources.push(rec_idx);
        }

        // Delta-B of this step, tested for admission in ascending pair order.
        reached.sort_unstable();
        for &cand in reached.iter() {
            if !state.is_used1(cand.a) && !state.is_used2(cand.b) {
                let idx = state.admit(cand, false, threshold, step, stage);
                frontier.push_single(idx);
            }
        }

        marks.maybe_purge(state);
    }
}

/// Options for a plain PGM run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PgmOptions {
    pub pop: PopPolicy,
}

impl Default for PgmOptions {
    fn default() -> Self {
        PgmOptions {
            pop: PopPolicy::Uniform { rng_seed: 0 },
        }
    }
}

/// Runs percolation graph matching with threshold `r` from the given seeds.
///
/// Seeds are matched outright, regardless of their counters. The run is a
/// pure function of `(pair, seeds, r, options)`.
pub fn run_pgm(
    pair: &ObservedPair,
    seeds: &[VertexPair],
    r: u32,
    options: &PgmOptions,
) -> Result<MatchState> {
    let (state, _sources) = run_pgm_with_sources(pair, seeds, r, options)?;
    Ok(state)
}

/// As [`run_pgm`], also returning the processed-set log (record indices in
/// pop order) for mark-soundness replay.
pub fn run_pgm_with_sources(
    pair: &ObservedPair,
    seeds: &[VertexPair],
    r: u32,
    options: &PgmOptions,
) -> Result<(MatchState, Vec<u32>)> {
    if r < 1 {
        return Err(Error::InvalidParameter("threshold r must be at least 1".into()));
    }
    let n = pair.n();
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

    let mut state = MatchState::new(n);
    let mut frontier = Frontier::new(options.pop);
    for &p in &sorted {
        let idx = state.admit(p, true, 0, 0, STAGE_SEED);
        frontier.push_single(idx);
    }

    let mut sources = Vec::new();
    percolate(
        pair,
        &mut state,
        &mut frontier,
        r,
        STAGE_PGM,
        |_, _| true,
        &mut sources,
    );
    Ok((state, sources))
}

/// Export of match records as CSV rows
/// `(g1_id, g2_id, is_seed, marks_at_match, step_index)`.
pub fn write_match_csv<W: std::io::Write>(state: &MatchState, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["g1_id", "g2_id", "is_seed", "marks_at_match", "step_index"])
        .and_then(|_| {
            for r in state.records() {
                w.write_record([
                    r.pair.a.to_string(),
                    r.pair.b.to_string(),
                    (r.is_seed as u8).to_string(),
                    r.marks_at_match.to_string(),
                    r.step.to_string(),
                ])?;
            }
            w.flush()?;
            Ok(())
        })
        .map_err(|e| Error::DataFormat(format!("csv write failed: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::generate_chung_lu;
    use crate::pairs::{select_seeds, SeedPolicy};
    use crate::sample::sample_observed_pair;
    use crate::weights::WeightedGraphSpec;

    fn fixture(n: usize, s: f64, seed: u64) -> ObservedPair {
        let spec = WeightedGraphSpec::new(n, 2.5, 8.0, seed).unwrap();
        let g = generate_chung_lu(&spec).unwrap();
        sample_observed_pair(&g, s, seed + 1).unwrap()
    }

    fn all_good_seeds(pair: &ObservedPair) -> Vec<VertexPair> {
        (0..pair.n() as u32)
            .map(|a| VertexPair::new(a, pair.truth(a)))
            .collect()
    }

    #[test]
    fn all_seeds_match_everything_in_n_pops() {
        let pair = fixture(200, 0.9, 1);
        let state = run_pgm(&pair, &all_good_seeds(&pair), 3, &PgmOptions::default()).unwrap();
        let c = classify_matches(&state, &pair);
        assert_eq!(c.good, 200);
        assert_eq!(c.bad, 0);
        assert_eq!(c.unmatched, 0);
        assert_eq!(state.steps(), 200);
    }

    #[test]
    fn no_seeds_no_matches() {
        let pair = fixture(100, 0.9, 2);
        let state = run_pgm(&pair, &[], 2, &PgmOptions::default()).unwrap();
        assert_eq!(state.matched_count(), 0);
        assert_eq!(state.steps(), 0);
    }

    #[test]
    fn conflicting_seeds_rejected() {
        let pair = fixture(50, 0.9, 3);
        let seeds = vec![VertexPair::new(0, 5), VertexPair::new(0, 6)];
        assert!(matches!(
            run_pgm(&pair, &seeds, 2, &PgmOptions::default()),
            Err(Error::ConflictingSeeds { .. })
        ));
    }

    #[test]
    fn deterministic_given_seed() {
        let pair = fixture(300, 0.8, 4);
        let seeds = select_seeds(&pair, &SeedPolicy::uniform(30, 77)).unwrap();
        let opts = PgmOptions {
            pop: PopPolicy::Uniform { rng_seed: 5 },
        };
        let s1 = run_pgm(&pair, &seeds, 2, &opts).unwrap();
        let s2 = run_pgm(&pair, &seeds, 2, &opts).unwrap();
        assert_eq!(s1, s2);
    }

    #[test]
    fn conflict_freedom_and_mark_soundness() {
        let pair = fixture(400, 0.8, 6);
        let seeds = select_seeds(&pair, &SeedPolicy::uniform(40, 9)).unwrap();
        let (state, sources) =
            run_pgm_with_sources(&pair, &seeds, 2, &PgmOptions::default()).unwrap();

        // no two matches share a coordinate
        let mut seen1 = std::collections::HashSet::new();
        let mut seen2 = std::collections::HashSet::new();
        for r in state.records() {
            assert!(seen1.insert(r.pair.a));
            assert!(seen2.insert(r.pair.b));
        }

        // every non-seed match has >= r co-adjacencies with the processed set
        let processed: std::collections::HashSet<u64> = sources
            .iter()
            .map(|&i| state.records()[i as usize].pair.key())
            .collect();
        for r in state.records() {
            if r.is_seed {
                continue;
            }
            let mut count = 0;
            for &v1 in pair.g1.neighbors(r.pair.a) {
                for &v2 in pair.g2.neighbors(r.pair.b) {
                    if processed.contains(&VertexPair::new(v1, v2).key()) {
                        count += 1;
                    }
                }
            }
            assert!(
                count >= 2,
                "match ({},{}) replays only {count} marks",
                r.pair.a,
                r.pair.b
            );
        }
    }

    #[test]
    fn seed_monotonicity_in_distribution() {
        // Adding seeds must not decrease the mean final good count.
        let pair = fixture(500, 0.9, 8);
        let mut means = Vec::new();
        for &a0 in &[5usize, 20, 60] {
            let mut total = 0usize;
            let trials = 30;
            for t in 0..trials {
                let seeds = select_seeds(&pair, &SeedPolicy::uniform(a0, 1000 + t)).unwrap();
                let state = run_pgm(
                    &pair,
                    &seeds,
                    3,
                    &PgmOptions {
                        pop: PopPolicy::Uniform { rng_seed: t },
                    },
                )
                .unwrap();
                total += classify_matches(&state, &pair).good;
            }
            means.push(total as f64 / trials as f64);
        }
        assert!(
            means[0] <= means[1] + 1.0 && means[1] <= means[2] + 1.0,
            "good-count means not monotone: {means:?}"
        );
    }

    #[test]
    fn fifo_mode_is_deterministic_without_rng() {
        let pair = fixture(200, 0.9, 10);
        let seeds = select_seeds(&pair, &SeedPolicy::uniform(20, 3)).unwrap();
        let opts = PgmOptions { pop: PopPolicy::Fifo };
        assert_eq!(
            run_pgm(&pair, &seeds, 2, &opts).unwrap(),
            run_pgm(&pair, &seeds, 2, &opts).unwrap()
        );
    }

    #[test]
    fn match_csv_schema() {
        let pair = fixture(50, 1.0, 12);
        let seeds = vec![VertexPair::new(0, pair.truth(0))];
        let state = run_pgm(&pair, &seeds, 1, &PgmOptions::default()).unwrap();
        let mut buf = Vec::new();
        write_match_csv(&state, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "g1_id,g2_id,is_seed,marks_at_match,step_index"
        );
        assert!(text.lines().count() > 1);
    }
}
