//! Vertex pairs, seed policies, and match classification.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::rng_from_seed;
use crate::sample::ObservedPair;

/// An ordered candidate pair: vertex `a` of the first graph matched against
/// vertex `b` of the second.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VertexPair {
    pub a: u32,
    pub b: u32,
}

impl VertexPair {
    pub fn new(a: u32, b: u32) -> Self {
        VertexPair { a, b }
    }

    #[inline]
    pub(crate) fn key(self) -> u64 {
        (self.a as u64) << 32 | self.b as u64
    }

    /// Two pairs conflict when they share exactly one coordinate.
    pub fn conflicts_with(self, other: VertexPair) -> bool {
        (self.a == other.a) != (self.b == other.b)
    }
}

/// How the a-priori matched seed pairs are chosen.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SeedMode {
    /// Good pairs drawn uniformly among all good pairs.
    Uniform,
    /// Good pairs whose observed degree in the first graph lies in `[lo, hi]`.
    DegreeWindow { lo: u64, hi: u64 },
    /// A caller-supplied list, order-normalized.
    Explicit(Vec<VertexPair>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedPolicy {
    pub mode: SeedMode,
    /// Requested number of seeds (ignored in explicit mode).
    pub count: usize,
    pub rng_seed: u64,
}

impl SeedPolicy {
    pub fn uniform(count: usize, rng_seed: u64) -> Self {
        SeedPolicy {
            mode: SeedMode::Uniform,
            count,
            rng_seed,
        }
    }

    pub fn degree_window(count: usize, lo: u64, hi: u64, rng_seed: u64) -> Self {
        SeedPolicy {
            mode: SeedMode::DegreeWindow { lo, hi },
            count,
            rng_seed,
        }
    }

    /// The window used throughout the experiments: observed degree in
    /// `[sqrt(n)/2, sqrt(n)]`.
    pub fn selected(count: usize, n: usize, rng_seed: u64) -> Self {
        let hi = (n as f64).sqrt();
        Self::degree_window(count, (hi / 2.0).floor() as u64, hi.ceil() as u64, rng_seed)
    }
}

/// Draws the seed set prescribed by `policy`. Uniform and degree-window
/// modes sample distinct good pairs; eligibility for the window is tested on
/// the observed degree in the first graph. The result is sorted.
pub fn select_seeds(pair: &ObservedPair, policy: &SeedPolicy) -> Result<Vec<VertexPair>> {
    let n = pair.n();
    let mut seeds = match &policy.mode {
        SeedMode::Explicit(list) => {
            let mut out = list.clone();
            out.sort_unstable();
            out.dedup();
            for p in &out {
                if p.a as usize >= n || p.b as usize >= n {
                    return Err(Error::InvalidParameter(format!(
                        "explicit seed ({},{}) out of range",
                        p.a, p.b
                    )));
                }
            }
            out
        }
        SeedMode::Uniform => {
            let eligible: Vec<u32> = (0..n as u32).collect();
            draw_good_pairs(pair, eligible, policy)?
        }
        SeedMode::DegreeWindow { lo, hi } => {
            let eligible: Vec<u32> = (0..n as u32)
                .filter(|&v| {
                    let d = pair.g1.degree(v) as u64;
                    d >= *lo && d <= *hi
                })
                .collect();
            draw_good_pairs(pair, eligible, policy)?
        }
    };
    seeds.sort_unstable();
    check_non_conflicting(&seeds)?;
    Ok(seeds)
}

fn draw_good_pairs(
    pair: &ObservedPair,
    mut eligible: Vec<u32>,
    policy: &SeedPolicy,
) -> Result<Vec<VertexPair>> {
    if eligible.len() < policy.count {
        return Err(Error::SeedSelection {
            requested: policy.count,
            eligible: eligible.len(),
        });
    }
    let mut rng = rng_from_seed(policy.rng_seed);
    eligible.shuffle(&mut rng);
    Ok(eligible[..policy.count]
        .iter()
        .map(|&a| VertexPair::new(a, pair.truth(a)))
        .collect())
}

/// Fails on the first pair of conflicting seeds.
pub fn check_non_conflicting(seeds: &[VertexPair]) -> Result<()> {
    let mut by_a = std::collections::HashMap::new();
    let mut by_b = std::collections::HashMap::new();
    for &p in seeds {
        if let Some(q) = by_a.insert(p.a, p) {
            if q.b != p.b {
                return Err(Error::ConflictingSeeds {
                    a1: q.a,
                    b1: q.b,
                    a2: p.a,
                    b2: p.b,
                });
            }
        }
        if let Some(q) = by_b.insert(p.b, p) {
            if q.a != p.a {
                return Err(Error::ConflictingSeeds {
                    a1: q.a,
                    b1: q.b,
                    a2: p.a,
                    b2: p.b,
                });
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::generate_chung_lu;
    use crate::sample::sample_observed_pair;
    use crate::weights::WeightedGraphSpec;

    fn pair_fixture(n: usize, seed: u64) -> ObservedPair {
        let spec = WeightedGraphSpec::new(n, 2.5, 6.0, seed).unwrap();
        let g = generate_chung_lu(&spec).unwrap();
        sample_observed_pair(&g, 0.9, seed + 1).unwrap()
    }

    #[test]
    fn conflict_definition() {
        let p = VertexPair::new(1, 2);
        assert!(p.conflicts_with(VertexPair::new(1, 3)));
        assert!(p.conflicts_with(VertexPair::new(0, 2)));
        assert!(!p.conflicts_with(VertexPair::new(1, 2)));
        assert!(!p.conflicts_with(VertexPair::new(3, 4)));
    }

    #[test]
    fn explicit_seeds_are_order_normalized() {
        let pair = pair_fixture(50, 3);
        let list = vec![
            VertexPair::new(9, pair.truth(9)),
            VertexPair::new(2, pair.truth(2)),
            VertexPair::new(9, pair.truth(9)),
        ];
        let policy = SeedPolicy {
            mode: SeedMode::Explicit(list),
            count: 0,
            rng_seed: 0,
        };
        let seeds = select_seeds(&pair, &policy).unwrap();
        assert_eq!(seeds.len(), 2);
        assert!(seeds[0] < seeds[1]);
    }

    #[test]
    fn degree_window_filters_on_g1_degree() {
        let pair = pair_fixture(400, 5);
        let policy = SeedPolicy::degree_window(5, 3, 8, 42);
        let seeds = select_seeds(&pair, &policy).unwrap();
        assert_eq!(seeds.len(), 5);
        for s in &seeds {
            let d = pair.g1.degree(s.a) as u64;
            assert!((3..=8).contains(&d), "degree {d} outside window");
            assert!(pair.is_good(s.a, s.b));
        }
    }

    #[test]
    fn errors_report_eligible_count() {
        let pair = pair_fixture(50, 7);
        let policy = SeedPolicy::degree_window(40, 1000, 2000, 0);
        match select_seeds(&pair, &policy) {
            Err(Error::SeedSelection { requested, eligible }) => {
                assert_eq!(requested, 40);
                assert_eq!(eligible, 0);
            }
            other => panic!("expected SeedSelection error, got {other:?}"),
        }
    }

    #[test]
    fn uniform_draws_are_close_to_multinomial() {
        // 10^4 draws of a single seed on n=100; every vertex frequency must
        // sit within 3 multinomial sigmas on this pinned stream.
        let pair = pair_fixture(100, 11);
        let draws = 10_000;
        let mut counts = vec![0u32; 100];
        for k in 0..draws {
            let policy = SeedPolicy::uniform(1, 9000 + k);
            let s = select_seeds(&pair, &policy).unwrap();
            counts[s[0].a as usize] += 1;
        }
        let p = 0.01f64;
        let sigma = (draws as f64 * p * (1.0 - p)).sqrt();
        let mean = draws as f64 * p;
        // ~0.27% of bins are expected beyond 3 sigma; tolerate two of the
        // hundred, none beyond 4 sigma
        let mut beyond3 = 0;
        for (v, &c) in counts.iter().enumerate() {
            let z = (c as f64 - mean).abs() / sigma;
            assert!(z <= 4.0, "vertex {v} drawn {c} times (z = {z:.2})");
            if z > 3.0 {
                beyond3 += 1;
            }
        }
        assert!(beyond3 <= 2, "{beyond3} bins beyond 3 sigma");
    }

    #[test]
    fn conflicting_seed_detection() {
        let seeds = vec![VertexPair::new(0, 1), VertexPair::new(0, 2)];
        assert!(check_non_conflicting(&seeds).is_err());
        let seeds = vec![VertexPair::new(0, 1), VertexPair::new(2, 1)];
        assert!(check_non_conflicting(&seeds).is_err());
        let seeds = vec![VertexPair::new(0, 1), VertexPair::new(2, 3)];
        assert!(check_non_conflicting(&seeds).is_ok());
    }
}
