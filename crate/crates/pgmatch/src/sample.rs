//! Dual edge sampling of a groundtruth graph into two observed graphs.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, GraphBuilder};
use crate::rng::rng_from_seed;

/// Two independently sampled, label-permuted observations of one graph.
///
/// `g1` keeps the groundtruth labels; `g2` labels are shuffled by a hidden
/// uniform permutation. `truth[i]` is the `g2` label of the vertex that is
/// labeled `i` in `g1`. The permutation is carried for evaluation only; the
/// matchers never read it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservedPair {
    pub g1: Graph,
    pub g2: Graph,
    truth: Vec<u32>,
    truth_inv: Vec<u32>,
    pub s: f64,
}

impl ObservedPair {
    pub fn n(&self) -> usize {
        self.truth.len()
    }

    /// Groundtruth counterpart of `g1` vertex `a` in `g2`.
    #[inline]
    pub fn truth(&self, a: u32) -> u32 {
        self.truth[a as usize]
    }

    /// Groundtruth counterpart of `g2` vertex `b` in `g1`.
    #[inline]
    pub fn truth_inv(&self, b: u32) -> u32 {
        self.truth_inv[b as usize]
    }

    pub fn truth_map(&self) -> &[u32] {
        &self.truth
    }

    #[inline]
    pub fn is_good(&self, a: u32, b: u32) -> bool {
        self.truth[a as usize] == b
    }

    pub(crate) fn from_parts(g1: Graph, g2: Graph, truth: Vec<u32>, s: f64) -> Result<Self> {
        if g1.n() != truth.len() || g2.n() != truth.len() {
            return Err(Error::DataFormat(
                "observed pair components disagree on vertex count".into(),
            ));
        }
        let mut truth_inv = vec![u32::MAX; truth.len()];
        for (a, &b) in truth.iter().enumerate() {
            if (b as usize) >= truth.len() || truth_inv[b as usize] != u32::MAX {
                return Err(Error::DataFormat("truth map is not a bijection".into()));
            }
            truth_inv[b as usize] = a as u32;
        }
        Ok(ObservedPair {
            g1,
            g2,
            truth,
            truth_inv,
            s,
        })
    }
}

/// Samples each groundtruth edge twice: kept in `g1` with probability `s`
/// and, independently, in `g2` with probability `s`. `g2` labels are then
/// permuted uniformly at random and the permutation recorded as the truth.
///
/// Groundtruth vertex weights, when present, are carried onto both observed
/// graphs (onto `g2` under the permutation) for weight-aware test harnesses.
pub fn sample_observed_pair(ground: &Graph, s: f64, rng_seed: u64) -> Result<ObservedPair> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::InvalidParameter(format!(
            "sampling probability must be in [0,1], got {s}"
        )));
    }
    let n = ground.n();
    let mut rng = rng_from_seed(rng_seed);

    let mut b1 = GraphBuilder::new(n)?;
    let mut b2_ground_labels: Vec<(u32, u32)> = Vec::new();
    for (u, v) in ground.edges() {
        if s >= 1.0 || rng.gen::<f64>() < s {
            b1.add_edge(u, v)?;
        }
        if s >= 1.0 || rng.gen::<f64>() < s {
            b2_ground_labels.push((u, v));
        }
    }

    let mut truth: Vec<u32> = (0..n as u32).collect();
    truth.shuffle(&mut rng);

    let mut b2 = GraphBuilder::new(n)?;
    for (u, v) in b2_ground_labels {
        b2.add_edge(truth[u as usize], truth[v as usize])?;
    }

    let mut g1 = b1.finish();
    let mut g2 = b2.finish();
    if let Some(w) = ground.weights() {
        g1.set_weights(Some(w.to_vec()));
        let mut w2 = vec![0.0; n];
        for i in 0..n {
            w2[truth[i] as usize] = w[i];
        }
        g2.set_weights(Some(w2));
    }

    ObservedPair::from_parts(g1, g2, truth, s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::generate_chung_lu;
    use crate::weights::WeightedGraphSpec;

    fn test_graph() -> Graph {
        let spec = WeightedGraphSpec::new(300, 2.5, 6.0, 11).unwrap();
        generate_chung_lu(&spec).unwrap()
    }

    #[test]
    fn s_one_preserves_both_graphs() {
        let ground = test_graph();
        let pair = sample_observed_pair(&ground, 1.0, 5).unwrap();
        assert_eq!(pair.g1, {
            let mut g = ground.clone();
            g.set_weights(ground.weights().map(|w| w.to_vec()));
            g
        });
        assert_eq!(pair.g2.edge_count(), ground.edge_count());
        // every g2 edge maps back to a groundtruth edge
        for (u, v) in pair.g2.edges() {
            assert!(ground.has_edge(pair.truth_inv(u), pair.truth_inv(v)));
        }
    }

    #[test]
    fn s_zero_gives_edgeless_graphs() {
        let ground = test_graph();
        let pair = sample_observed_pair(&ground, 0.0, 5).unwrap();
        assert_eq!(pair.g1.edge_count(), 0);
        assert_eq!(pair.g2.edge_count(), 0);
    }

    #[test]
    fn sampled_edges_are_subsets_of_ground() {
        let ground = test_graph();
        let pair = sample_observed_pair(&ground, 0.6, 17).unwrap();
        for (u, v) in pair.g1.edges() {
            assert!(ground.has_edge(u, v));
        }
        for (u, v) in pair.g2.edges() {
            assert!(ground.has_edge(pair.truth_inv(u), pair.truth_inv(v)));
        }
        // truth is a bijection by construction; spot-check the inverse
        for a in 0..pair.n() as u32 {
            assert_eq!(pair.truth_inv(pair.truth(a)), a);
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let ground = test_graph();
        let p1 = sample_observed_pair(&ground, 0.7, 123).unwrap();
        let p2 = sample_observed_pair(&ground, 0.7, 123).unwrap();
        assert_eq!(p1, p2);
        let p3 = sample_observed_pair(&ground, 0.7, 124).unwrap();
        assert_ne!(p1, p3);
    }

    #[test]
    fn retained_count_is_binomial_like() {
        // Scaled-down version of the binomial-quantile oracle in the spec:
        // with m edges and s=0.5 the retained count should stay inside the
        // central 99.9% binomial interval nearly always.
        let ground = test_graph();
        let m = ground.edge_count() as f64;
        let (lo, hi) = {
            // normal approximation to Binomial(m, 0.5) central 99.9% interval
            let mu = 0.5 * m;
            let sd = (m * 0.25).sqrt();
            (mu - 3.29 * sd, mu + 3.29 * sd)
        };
        let mut misses = 0;
        let trials = 200;
        for seed in 0..trials {
            let pair = sample_observed_pair(&ground, 0.5, seed).unwrap();
            let kept = pair.g1.edge_count() as f64;
            if kept < lo || kept > hi {
                misses += 1;
            }
        }
        assert!(misses <= 2, "{misses} of {trials} outside the 99.9% interval");
    }

    #[test]
    fn rejects_bad_probability() {
        let ground = test_graph();
        assert!(sample_observed_pair(&ground, -0.1, 0).is_err());
        assert!(sample_observed_pair(&ground, 1.1, 0).is_err());
    }
}
