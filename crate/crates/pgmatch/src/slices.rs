//! Weight slicing and per-stage thresholds for the degree-driven matcher.
//!
//! The weight axis `[alpha_floor, sqrt(n)]` is cut into half-open slices
//! `[alpha_{k+1}, alpha_k)`: slice 0 spans `[n^gamma, sqrt(n))`, slice 1
//! spans `[n^gamma/2, n^gamma)`, and each further boundary halves the one
//! above. Slices whose upper boundary exceeds the logarithmic cutoff
//! `alpha*` support a cascade stage with threshold `rho_k`; slices below it
//! run at the base threshold 4; the top slice is matched last against a
//! designated low slice at threshold `rho_0 = n^(gamma/2)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sample::ObservedPair;

/// Sentinel slice index for vertices below the last kept boundary.
pub const SLICE_EXCLUDED: u16 = u16::MAX;

/// Where a vertex weight (true or estimated) falls.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexSlice {
    /// Slice index, or [`SLICE_EXCLUDED`].
    pub slice: u16,
    /// Inside the inner region of its slice.
    pub inner: bool,
}

/// Whether slicing reads hidden weights or degree-estimated ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SliceMode {
    /// Bin by the hidden groundtruth weights (harness and testing only).
    TrueWeight,
    /// Bin by the estimated weight `D/s` from the observed degree.
    EstimatedWeight,
}

/// Whether boundary-parameter violations are fatal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PlanMode {
    /// Enforce the provable regime `1/4 < gamma < 1/2`.
    Theory,
    /// Allow out-of-regime parameters (notably `gamma = 1/2`), warn instead.
    Exploratory,
}

/// Slice boundaries, margins, and derived cutoffs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlicePlan {
    pub n: usize,
    pub beta: f64,
    pub w_bar: f64,
    pub s: f64,
    pub gamma: f64,
    /// Inner-region margin, in (0, 1/4].
    pub epsilon_inner: f64,
    /// Weight-density constant in the `alpha*` cutoff.
    pub c: f64,
    /// Descending boundaries `[alpha_0, alpha_1, ..., alpha_L]`; slice `k`
    /// is `[alphas[k+1], alphas[k])`.
    pub alphas: Vec<f64>,
    /// Logarithmic cutoff below which cascade guarantees lapse.
    pub alpha_star: f64,
    /// Smallest boundary kept.
    pub alpha_floor: f64,
    pub mode: SliceMode,
    pub plan_mode: PlanMode,
    pub warnings: Vec<String>,
}

/// The cutoff `(8 w_bar ln n / (C s^2 (1-eps)^2))^(1/(3-beta))`.
pub fn alpha_star(n: usize, beta: f64, w_bar: f64, s: f64, c: f64, eps: f64) -> f64 {
    let ln_n = (n as f64).ln();
    (8.0 * w_bar * ln_n / (c * s * s * (1.0 - eps) * (1.0 - eps))).powf(1.0 / (3.0 - beta))
}

/// Stage threshold source value `rho_k = max(4, alpha_k^(4-beta) / sqrt(n))`.
pub fn rho_k(alpha_k: f64, beta: f64, n: usize) -> f64 {
    (alpha_k.powf(4.0 - beta) / (n as f64).sqrt()).max(4.0)
}

/// Integer admission threshold for a real stage value: the count must be
/// strictly greater than `rho`, i.e. `floor(rho) + 1`, which is `ceil(rho)`
/// except on exact integers where it bumps by one.
pub fn admission_threshold(rho: f64) -> u32 {
    ((rho + 1e-9).floor() as u32) + 1
}

/// Smallest integer at least `x`, tolerant of float noise just above an
/// integer.
pub fn ceil_tolerant(x: f64) -> u32 {
    (x - 1e-9).ceil().max(0.0) as u32
}

impl SlicePlan {
    pub fn last_boundary(&self) -> f64 {
        *self.alphas.last().unwrap()
    }

    /// Number of slices (`alphas.len() - 1`).
    pub fn slice_count(&self) -> usize {
        self.alphas.len() - 1
    }

    /// Bounds `[lo, hi)` of slice `k`.
    pub fn slice_bounds(&self, k: usize) -> (f64, f64) {
        (self.alphas[k + 1], self.alphas[k])
    }

    /// Classifies a weight. Weights at or above `alpha_0` clamp into the top
    /// slice's outer region; weights below the floor are excluded.
    pub fn classify_weight(&self, w: f64) -> VertexSlice {
        if w < self.last_boundary() {
            return VertexSlice {
                slice: SLICE_EXCLUDED,
                inner: false,
            };
        }
        if w >= self.alphas[0] {
            return VertexSlice {
                slice: 0,
                inner: false,
            };
        }
        // alphas is descending: find k with alphas[k+1] <= w < alphas[k]
        let k = match self
            .alphas
            .binary_search_by(|a| w.partial_cmp(a).unwrap())
        {
            Ok(i) => i.saturating_sub(1), // w equals a boundary: belongs to the slice above it
            Err(i) => i - 1,
        };
        let (lo, hi) = self.slice_bounds(k);
        let eps = self.epsilon_inner;
        let inner = w >= lo * (1.0 + eps) && w < hi * (1.0 - eps);
        VertexSlice {
            slice: k as u16,
            inner,
        }
    }

    /// Upper boundaries with a cascade guarantee: source slices `k >= 1`
    /// with `alpha_k > alpha_star`.
    pub fn cascade_sources(&self) -> Vec<usize> {
        (1..self.slice_count())
            .filter(|&k| self.alphas[k] > self.alpha_star)
            .collect()
    }

    /// The designated reference slice for the top stage: the largest slice
    /// (smallest index >= 1) whose upper boundary is below `ln(n)^2`.
    pub fn top_stage_reference_slice(&self) -> Option<usize> {
        let ln2 = (self.n as f64).ln().powi(2);
        (1..self.slice_count()).find(|&k| self.alphas[k] < ln2)
    }

    /// Pre-filter threshold `(alpha_1 + alpha_2) / 2` reserving would-be top
    /// pairs for the final stage.
    pub fn top_reserve_threshold(&self) -> f64 {
        (self.alphas[1] + self.alphas[2]) / 2.0
    }

    /// Group size for seeds in slice `k` when injected into the first-slice
    /// percolation: `ceil(alpha_1 / alpha_{k+1}) + 1`.
    pub fn seed_group_size(&self, k: u16) -> usize {
        if k == SLICE_EXCLUDED {
            return (self.alphas[1] / self.last_boundary()).ceil() as usize + 1;
        }
        if k <= 1 {
            return 1;
        }
        (self.alphas[1] / self.alphas[k as usize + 1]).ceil() as usize + 1
    }
}

/// Builds the slice plan. In theory mode, `gamma` outside `(1/4, 1/2)` and
/// `beta` outside `(2, 3)` are rejected; in exploratory mode they only add a
/// warning (the experiments deliberately run at `gamma = 1/2`).
#[allow(clippy::too_many_arguments)]
pub fn build_slice_plan(
    n: usize,
    beta: f64,
    w_bar: f64,
    s: f64,
    gamma: f64,
    epsilon_inner: f64,
    c: f64,
    mode: SliceMode,
    plan_mode: PlanMode,
) -> Result<SlicePlan> {
    if n < 4 {
        return Err(Error::InvalidParameter("slice plan needs n >= 4".into()));
    }
    if !(epsilon_inner > 0.0 && epsilon_inner <= 0.25) {
        return Err(Error::InvalidParameter(format!(
            "epsilon_inner must lie in (0, 1/4], got {epsilon_inner}"
        )));
    }
    if !(c > 0.0) {
        return Err(Error::InvalidParameter(format!("C must be positive, got {c}")));
    }
    if !(s > 0.0 && s <= 1.0) && matches!(mode, SliceMode::EstimatedWeight) {
        return Err(Error::InvalidParameter(format!(
            "estimated-weight slicing needs s in (0,1], got {s}"
        )));
    }
    if !(beta > 2.0 && beta < 3.0) {
        return Err(Error::InvalidParameter(format!(
            "slicing needs 2 < beta < 3, got {beta}"
        )));
    }

    let mut warnings = Vec::new();
    let gamma_ok = gamma > 0.25 && gamma < 0.5;
    if !gamma_ok {
        let msg = format!("gamma={gamma} outside the provable range (1/4, 1/2)");
        match plan_mode {
            PlanMode::Theory => return Err(Error::InvalidParameter(msg)),
            PlanMode::Exploratory => {
                log::warn!("{msg}");
                warnings.push(msg);
            }
        }
    }
    if !(gamma > 0.0 && gamma <= 0.5) {
        return Err(Error::InvalidParameter(format!(
            "gamma must lie in (0, 1/2], got {gamma}"
        )));
    }

    let nf = n as f64;
    let alpha_floor = 1.0f64;
    let mut alphas = vec![nf.sqrt(), nf.powf(gamma)];
    loop {
        let next = alphas.last().unwrap() / 2.0;
        if next < alpha_floor {
            break;
        }
        alphas.push(next);
    }
    if alphas.len() < 3 {
        return Err(Error::InvalidParameter(format!(
            "plan for n={n}, gamma={gamma} has no percolation slice"
        )));
    }

    Ok(SlicePlan {
        n,
        beta,
        w_bar,
        s,
        gamma,
        epsilon_inner,
        c,
        alphas,
        alpha_star: alpha_star(n, beta, w_bar, s, c, epsilon_inner),
        alpha_floor,
        mode,
        plan_mode,
        warnings,
    })
}

/// Per-stage integer thresholds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StagePlan {
    /// Threshold for the percolation inside slice 1.
    pub r1: u32,
    /// `(source slice k, rho_k, threshold)` for each cascade stage `k+1`.
    pub cascade: Vec<(usize, f64, u32)>,
    /// Threshold for the repeated stages below `alpha*`.
    pub low: u32,
    /// Real stage value for the top slice.
    pub rho0: f64,
    /// Integer threshold for the top slice.
    pub top: u32,
}

/// Minimal first-slice threshold `4 (1 + gamma (1 - beta)) / (1 - 2 gamma)`
/// from the percolation guarantee for slice 1.
pub fn p1_min_threshold(gamma: f64, beta: f64) -> f64 {
    4.0 * (1.0 + gamma * (1.0 - beta)) / (1.0 - 2.0 * gamma)
}

impl StagePlan {
    /// Thresholds in the provable regime: `r1` from the slice-1 bound,
    /// cascade stages strictly above `rho_k`, 4 below `alpha*`, and strictly
    /// above `rho_0 = n^(gamma/2)` for the top slice.
    pub fn theory(plan: &SlicePlan) -> Result<Self> {
        if !(plan.gamma < 0.5) {
            return Err(Error::InvalidParameter(
                "theory thresholds need gamma < 1/2".into(),
            ));
        }
        let r1 = ceil_tolerant(p1_min_threshold(plan.gamma, plan.beta)).max(4);
        Ok(Self::with_r1(plan, r1))
    }

    fn with_r1(plan: &SlicePlan, r1: u32) -> Self {
        let cascade = plan
            .cascade_sources()
            .iter()
            .map(|&k| {
                let rho = rho_k(plan.alphas[k], plan.beta, plan.n);
                (k, rho, admission_threshold(rho))
            })
            .collect();
        let rho0 = (plan.n as f64).powf(plan.gamma / 2.0);
        StagePlan {
            r1,
            cascade,
            low: 4,
            rho0,
            top: admission_threshold(rho0),
        }
    }

    /// The experiment protocol: a constant threshold (4 unless overridden)
    /// at every stage, including the top one.
    pub fn simplified(plan: &SlicePlan) -> Self {
        Self::fixed(plan, 4)
    }

    /// Constant threshold `r` at every stage.
    pub fn fixed(plan: &SlicePlan, r: u32) -> Self {
        let cascade = plan
            .cascade_sources()
            .iter()
            .map(|&k| (k, r as f64, r))
            .collect();
        StagePlan {
            r1: r,
            cascade,
            low: r,
            rho0: r as f64,
            top: r,
        }
    }
}

/// Per-vertex slice assignment for both observed graphs, plus the flags the
/// staged matcher needs for eligibility, reservation, and seed grouping.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SliceAssignment {
    pub g1: Vec<VertexSlice>,
    pub g2: Vec<VertexSlice>,
    /// Estimated (or true) weight exceeds the top-reserve threshold.
    pub top1: Vec<bool>,
    pub top2: Vec<bool>,
    pub mode: SliceMode,
}

impl SliceAssignment {
    /// Slice-eligibility of a candidate pair for slice `k`: one side in the
    /// inner region of `k`, the other anywhere in `k`.
    #[inline]
    pub fn pair_eligible(&self, k: u16, v1: u32, v2: u32) -> bool {
        let a = self.g1[v1 as usize];
        let b = self.g2[v2 as usize];
        (a.slice == k && a.inner && b.slice == k) || (b.slice == k && b.inner && a.slice == k)
    }

    /// Pair reserved for the final stage: some endpoint lies above the
    /// reserve threshold and the pair was not placed in slice 1.
    #[inline]
    pub fn reserved_for_top(&self, v1: u32, v2: u32) -> bool {
        (self.top1[v1 as usize] || self.top2[v2 as usize]) && !self.pair_eligible(1, v1, v2)
    }

    /// Deeper of the two endpoint slices, for seed grouping.
    pub fn pair_slice(&self, p: crate::pairs::VertexPair) -> u16 {
        let a = self.g1[p.a as usize].slice;
        let b = self.g2[p.b as usize].slice;
        if a == SLICE_EXCLUDED || b == SLICE_EXCLUDED {
            SLICE_EXCLUDED
        } else {
            a.max(b)
        }
    }
}

/// Bins every vertex of both observed graphs into slices.
///
/// In estimated mode the weight is inferred from the observed degree as
/// `D/s`; hidden weights are never read. True mode requires the graphs to
/// carry groundtruth weights and exists for harness-side comparisons.
pub fn assign_slices(pair: &ObservedPair, plan: &SlicePlan) -> Result<SliceAssignment> {
    let reserve = plan.top_reserve_threshold();
    let classify = |g: &crate::graph::Graph| -> Result<(Vec<VertexSlice>, Vec<bool>)> {
        let n = g.n();
        let mut slices = Vec::with_capacity(n);
        let mut top = Vec::with_capacity(n);
        match plan.mode {
            SliceMode::EstimatedWeight => {
                if pair.s <= 0.0 {
                    return Err(Error::InvalidParameter(
                        "estimated weights are undefined for s = 0".into(),
                    ));
                }
                for v in 0..n as u32 {
                    let w = g.degree(v) as f64 / pair.s;
                    slices.push(plan.classify_weight(w));
                    top.push(w > reserve);
                }
            }
            SliceMode::TrueWeight => {
                let weights = g.weights().ok_or_else(|| {
                    Error::InvalidParameter(
                        "true-weight slicing needs graphs with stored weights".into(),
                    )
                })?;
                for v in 0..n {
                    let w = weights[v];
                    slices.push(plan.classify_weight(w));
                    top.push(w > reserve);
                }
            }
        }
        Ok((slices, top))
    };
    let (g1, top1) = classify(&pair.g1)?;
    let (g2, top2) = classify(&pair.g2)?;
    Ok(SliceAssignment {
        g1,
        g2,
        top1,
        top2,
        mode: plan.mode,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plan(n: usize, gamma: f64) -> SlicePlan {
        build_slice_plan(
            n,
            2.5,
            5.0,
            0.8,
            gamma,
            0.2,
            1.0,
            SliceMode::EstimatedWeight,
            PlanMode::Exploratory,
        )
        .unwrap()
    }

    #[test]
    fn boundaries_follow_the_halving_rule() {
        let p = plan(10_000, 0.45);
        assert!((p.alphas[0] - 100.0).abs() < 1e-9);
        assert!((p.alphas[1] - 10f64.powf(1.8)).abs() < 1e-6);
        assert!((p.alphas[2] - 10f64.powf(1.8) / 2.0).abs() < 1e-6);
        assert!((p.alphas[3] - 10f64.powf(1.8) / 4.0).abs() < 1e-6);
        for w in p.alphas.windows(2) {
            assert!(w[1] < w[0]);
        }
        assert!(*p.alphas.last().unwrap() >= 1.0);
        assert!(p.alphas.last().unwrap() / 2.0 < 1.0);
    }

    #[test]
    fn theory_mode_rejects_boundary_gamma() {
        for bad in [0.5, 0.25, 0.6, 0.2] {
            let r = build_slice_plan(
                10_000,
                2.5,
                5.0,
                0.8,
                bad,
                0.2,
                1.0,
                SliceMode::EstimatedWeight,
                PlanMode::Theory,
            );
            assert!(r.is_err(), "gamma={bad} accepted in theory mode");
        }
        // exploratory mode warns instead
        let p = plan(10_000, 0.5);
        assert!(!p.warnings.is_empty());
    }

    #[test]
    fn rho_values_match_direct_evaluation() {
        // beta=2.5, n=10^4
        let a = 10f64.powf(1.8);
        let r = rho_k(a, 2.5, 10_000);
        assert!((r - a.powf(1.5) / 100.0).abs() < 1e-9);
        assert!((r - 5.0119).abs() < 0.01);
        assert_eq!(admission_threshold(r), 6);

        let a2 = 10f64.powf(1.6);
        let r2 = rho_k(a2, 2.5, 10_000);
        assert_eq!(r2, 4.0); // 2.51 clamps to 4
        assert_eq!(admission_threshold(r2), 5); // strictly greater than 4
    }

    #[test]
    fn weight_classification_is_a_partition() {
        let p = plan(10_000, 0.45);
        // every weight in [floor boundary, alpha_0) belongs to exactly one slice
        let mut w = p.last_boundary();
        while w < 100.0 {
            let c = p.classify_weight(w);
            assert_ne!(c.slice, SLICE_EXCLUDED, "w={w}");
            let (lo, hi) = p.slice_bounds(c.slice as usize);
            assert!(w >= lo && w < hi, "w={w} got [{lo},{hi})");
            w *= 1.07;
        }
        // boundaries belong to the slice above them
        for k in 1..p.slice_count() {
            let c = p.classify_weight(p.alphas[k + 1]);
            assert_eq!(c.slice as usize, k);
        }
        // below the last boundary: excluded
        assert_eq!(
            p.classify_weight(p.last_boundary() * 0.99).slice,
            SLICE_EXCLUDED
        );
        // clamp at and above the top boundary
        assert_eq!(p.classify_weight(100.0).slice, 0);
        assert_eq!(p.classify_weight(5000.0).slice, 0);
    }

    #[test]
    fn inner_region_margins() {
        let p = plan(10_000, 0.45);
        let (lo, hi) = p.slice_bounds(1);
        let mid = p.classify_weight((lo * (1.0 + 0.2) + hi * (1.0 - 0.2)) / 2.0);
        assert!(mid.inner);
        let low_outer = p.classify_weight(lo * 1.05);
        assert!(!low_outer.inner && low_outer.slice == 1);
        let high_outer = p.classify_weight(hi * 0.95);
        assert!(!high_outer.inner && high_outer.slice == 1);
    }

    #[test]
    fn p1_threshold_example() {
        // gamma=0.45, beta=2.5 -> minimal r is 13
        assert_eq!(ceil_tolerant(p1_min_threshold(0.45, 2.5)), 13);
    }

    #[test]
    fn seed_group_sizes() {
        let p = plan(100_000, 0.5);
        assert_eq!(p.seed_group_size(0), 1);
        assert_eq!(p.seed_group_size(1), 1);
        // slice with alpha_{k+1} = alpha_1 / 8 -> ceil(8)+1 = 9
        assert_eq!(p.seed_group_size(3), 9);
    }

    #[test]
    fn stage_plans() {
        let p = plan(10_000, 0.45);
        let theory = StagePlan::theory(&p).unwrap();
        assert_eq!(theory.r1, 13);
        assert_eq!(theory.low, 4);
        assert_eq!(theory.top, admission_threshold(10_000f64.powf(0.225)));
        // alpha* at these parameters sits far above sqrt(n): no cascade stage
        assert!(p.alpha_star > p.alphas[0]);
        assert!(theory.cascade.is_empty());

        let simplified = StagePlan::simplified(&p);
        assert_eq!(simplified.r1, 4);
        assert_eq!(simplified.low, 4);
        assert_eq!(simplified.top, 4);

        // forcing a tiny C pulls alpha* below the boundaries and enables
        // cascade stages with the documented thresholds
        let mut forced = p.clone();
        forced.alpha_star = 20.0;
        let t2 = StagePlan::theory(&forced).unwrap();
        assert!(!t2.cascade.is_empty());
        let (k, rho, thr) = t2.cascade[0];
        assert_eq!(k, 1);
        assert!((rho - rho_k(forced.alphas[1], 2.5, 10_000)).abs() < 1e-12);
        assert_eq!(thr, admission_threshold(rho));
    }
}
