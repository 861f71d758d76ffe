//! Closed-form theory quantities: the critical seed count for percolation
//! matching on G(n,p), the first-slice seed-size exponent, regime checks,
//! and boundary-edge counts of a seed set.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pairs::VertexPair;
use crate::sample::ObservedPair;
use crate::slices::ceil_tolerant;

/// Inputs of the closed-form predictions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoryParams {
    pub n: usize,
    /// Groundtruth edge probability, for G(n,p) comparisons.
    pub p: f64,
    pub s: f64,
    pub r: u32,
    pub gamma: f64,
    pub beta: f64,
}

/// Critical seed count
/// `a_c = (1 - 1/r) * ((r-1)! / (n (p s^2)^r))^(1/(r-1))`,
/// evaluated in log space so large `r` does not overflow.
///
/// ```
/// use pgmatch::theory::{critical_seed_count, TheoryParams};
/// // r=4 and n(ps^2)^4 = 6 make the factorial cancel: a_c = 3/4
/// let q: f64 = (6.0f64 / 1e4).powf(0.25);
/// let params = TheoryParams { n: 10_000, p: q, s: 1.0, r: 4, gamma: 0.5, beta: 2.5 };
/// assert!((critical_seed_count(&params).unwrap() - 0.75).abs() < 1e-9);
/// ```
pub fn critical_seed_count(params: &TheoryParams) -> Result<f64> {
    let r = params.r;
    if r < 2 {
        return Err(Error::InvalidParameter("a_c needs r >= 2".into()));
    }
    let q = params.p * params.s * params.s;
    if !(q > 0.0) || params.n == 0 {
        return Err(Error::InvalidParameter(
            "a_c needs n > 0 and p s^2 > 0".into(),
        ));
    }
    let ln_factorial: f64 = (2..r).map(|k| (k as f64).ln()).sum();
    let ln_core = (ln_factorial - (params.n as f64).ln() - r as f64 * q.ln()) / (r as f64 - 1.0);
    Ok((1.0 - 1.0 / r as f64) * ln_core.exp())
}

/// The hypothesis window of the critical-seed-count statement:
/// `n^-1 << p s^2 <= s^2 n^(-4/r)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeCheck {
    /// `n * p * s^2`; must be much larger than 1.
    pub lower_margin: f64,
    /// Whether `p <= n^(-4/r)` holds.
    pub upper_ok: bool,
}

impl RegimeCheck {
    /// Inside the window, reading "much larger" as at least `min_margin`.
    pub fn inside(&self, min_margin: f64) -> bool {
        self.lower_margin >= min_margin && self.upper_ok
    }
}

pub fn theorem_regime(params: &TheoryParams) -> RegimeCheck {
    let nf = params.n as f64;
    RegimeCheck {
        lower_margin: nf * params.p * params.s * params.s,
        upper_ok: params.p <= nf.powf(-4.0 / params.r as f64),
    }
}

/// First-slice seed bound: exponent and minimal threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct P1SeedBound {
    /// `e` in the sufficient seed-set size `n^e` for the first slice:
    /// `e = ((1-2g) r + g (b-1) - 1) / (r-1)`.
    pub exponent: f64,
    /// Minimal threshold `ceil(4 (1 + g (1-b)) / (1 - 2g))`.
    pub r_min: u32,
    /// `gamma > 1/4 - 3/(4r)` holds.
    pub gamma_above_lower: bool,
    /// `gamma < 1/(beta-1)` holds.
    pub gamma_below_upper: bool,
}

/// Evaluates the first-slice seed-size bound at `(gamma, beta, r)`.
pub fn p1_seed_exponent(gamma: f64, beta: f64, r: u32) -> Result<P1SeedBound> {
    if !(gamma > 0.25 && gamma < 0.5) {
        return Err(Error::InvalidParameter(format!(
            "gamma must lie in (1/4, 1/2), got {gamma}"
        )));
    }
    if !(beta > 2.0 && beta < 3.0) {
        return Err(Error::InvalidParameter(format!(
            "beta must lie in (2, 3), got {beta}"
        )));
    }
    if r < 2 {
        return Err(Error::InvalidParameter("r must be at least 2".into()));
    }
    let rf = r as f64;
    let exponent = ((1.0 - 2.0 * gamma) * rf + gamma * (beta - 1.0) - 1.0) / (rf - 1.0);
    let r_min = ceil_tolerant(crate::slices::p1_min_threshold(gamma, beta));
    Ok(P1SeedBound {
        exponent,
        r_min,
        gamma_above_lower: gamma > 0.25 - 3.0 / (4.0 * rf),
        gamma_below_upper: gamma < 1.0 / (beta - 1.0),
    })
}

/// Number of pairs-graph edges between the seed set and all other pairs:
/// for each seed `[u1,u2]`, the neighbor pairs `adj1(u1) x adj2(u2)` that
/// are not themselves seeds.
pub fn boundary_edges(pair: &ObservedPair, seeds: &[VertexPair]) -> u64 {
    let seed_set: std::collections::HashSet<u64> = seeds.iter().map(|p| p.key()).collect();
    let mut count = 0u64;
    for s in seeds {
        for &v1 in pair.g1.neighbors(s.a) {
            for &v2 in pair.g2.neighbors(s.b) {
                if !seed_set.contains(&VertexPair::new(v1, v2).key()) {
                    count += 1;
                }
            }
        }
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::generate_chung_lu;
    use crate::oracle::build_pairs_graph;
    use crate::sample::sample_observed_pair;
    use crate::weights::WeightedGraphSpec;

    fn params(n: usize, p: f64, s: f64, r: u32) -> TheoryParams {
        TheoryParams {
            n,
            p,
            s,
            r,
            gamma: 0.45,
            beta: 2.5,
        }
    }

    #[test]
    fn factorial_cancellation_case() {
        // n (p s^2)^4 = 6 with r = 4: a_c = (3/4) * (6/6)^(1/3) = 0.75
        let q = (6.0f64 / 1e4).powf(0.25);
        let ac = critical_seed_count(&params(10_000, q, 1.0, 4)).unwrap();
        assert!((ac - 0.75).abs() < 1e-9);
    }

    #[test]
    fn direct_evaluation_case() {
        // n (p s^2)^4 = 24: a_c = 0.75 * (6/24)^(1/3) ~ 0.4725
        let q = (24.0f64 / 1e4).powf(0.25);
        let ac = critical_seed_count(&params(10_000, q, 1.0, 4)).unwrap();
        assert!((ac - 0.75 * 0.25f64.powf(1.0 / 3.0)).abs() < 1e-9);
        assert!((ac - 0.4725).abs() < 5e-4);
    }

    #[test]
    fn large_r_is_finite() {
        let ac = critical_seed_count(&params(1_000_000, 1e-4, 0.9, 200)).unwrap();
        assert!(ac.is_finite() && ac > 0.0);
    }

    #[test]
    fn ac_is_decreasing_in_p_s_n() {
        let base = params(10_000, 2e-3, 0.8, 4);
        let ac = |p: &TheoryParams| critical_seed_count(p).unwrap();
        let mut q = base;
        let mut last = ac(&q);
        for i in 1..20 {
            q.p = 2e-3 * (1.0 + i as f64 * 0.3);
            let v = ac(&q);
            assert!(v < last);
            last = v;
        }
        let mut q = base;
        last = ac(&q);
        for i in 1..10 {
            q.s = (0.8 + 0.02 * i as f64).min(1.0);
            let v = ac(&q);
            assert!(v < last);
            last = v;
        }
        let mut q = base;
        last = ac(&q);
        for i in 1..10 {
            q.n = 10_000 + 5_000 * i;
            let v = ac(&q);
            assert!(v < last);
            last = v;
        }
    }

    #[test]
    fn regime_flags() {
        // upper bound p <= n^(-4/r)
        let inside = params(10_000, 1e-4, 0.8, 4);
        let check = theorem_regime(&inside);
        assert!(check.upper_ok);
        assert!((check.lower_margin - 1e4 * 1e-4 * 0.64).abs() < 1e-12);
        let outside = params(10_000, 2e-3, 0.8, 4);
        assert!(!theorem_regime(&outside).upper_ok);
    }

    #[test]
    fn p1_bound_examples() {
        // gamma=0.45, beta=2.5: r_min = 13 and e(r=13) ~ 0.08125
        let b = p1_seed_exponent(0.45, 2.5, 13).unwrap();
        assert_eq!(b.r_min, 13);
        assert!((b.exponent - 0.975 / 12.0).abs() < 1e-12);
        assert!(b.gamma_above_lower && b.gamma_below_upper);
        // d/dr e = gamma (3 - beta) / (r-1)^2 > 0 on 2 < beta < 3: raising
        // the threshold demands more seeds
        let mut last = f64::NEG_INFINITY;
        for r in 5..40 {
            let e = p1_seed_exponent(0.45, 2.5, r).unwrap().exponent;
            assert!(e > last);
            last = e;
        }
        // and e is decreasing in gamma for fixed r
        let mut last = f64::INFINITY;
        for i in 1..20 {
            let gamma = 0.26 + 0.012 * i as f64;
            let e = p1_seed_exponent(gamma, 2.5, 13).unwrap().exponent;
            assert!(e < last);
            last = e;
        }
        // near gamma = 1/2 the exponent goes negative for beta < 3
        let e = p1_seed_exponent(0.499, 2.5, 13).unwrap().exponent;
        assert!(e < 0.02);
        assert!(p1_seed_exponent(0.2, 2.5, 13).is_err());
    }

    #[test]
    fn boundary_edges_trivial_cases() {
        let spec = WeightedGraphSpec::new(30, 2.5, 4.0, 50).unwrap();
        let ground = generate_chung_lu(&spec).unwrap();
        let pair = sample_observed_pair(&ground, 0.9, 51).unwrap();
        assert_eq!(boundary_edges(&pair, &[]), 0);
        // single seed with no seed neighbors: exactly d1*d2
        let s = VertexPair::new(0, pair.truth(0));
        let expect = pair.g1.degree(s.a) as u64 * pair.g2.degree(s.b) as u64;
        assert_eq!(boundary_edges(&pair, &[s]), expect);
    }

    #[test]
    fn boundary_edges_matches_exhaustive_enumeration() {
        // count edges between seed nodes and the rest on the explicit graph
        for seed in 0..8u64 {
            let spec = WeightedGraphSpec::new(12, 2.5, 4.0, 60 + seed).unwrap();
            let ground = generate_chung_lu(&spec).unwrap();
            let pair = sample_observed_pair(&ground, 0.8, 70 + seed).unwrap();
            let seeds: Vec<VertexPair> = (0..4u32)
                .map(|a| VertexPair::new(a, pair.truth(a)))
                .collect();
            let pg = build_pairs_graph(&pair).unwrap();
            let seed_idx: std::collections::HashSet<usize> =
                seeds.iter().map(|&p| pg.index(p)).collect();
            let mut exhaustive = 0u64;
            for &si in &seed_idx {
                for &q in pg.neighbors(pg.pair_at(si)) {
                    if !seed_idx.contains(&(q as usize)) {
                        exhaustive += 1;
                    }
                }
            }
            assert_eq!(boundary_edges(&pair, &seeds), exhaustive, "seed {seed}");
        }
    }
}
