//! Brute-force reference implementations for small instances.
//!
//! The pairs graph is built explicitly over all `n^2` ordered pairs and the
//! matcher is transcribed literally over it, keeping counters for every pair
//! (including permanently blocked ones). The reference shares the engine's
//! frontier policy and RNG stream, so on any shared instance the two
//! implementations must produce identical matched sets. Test-only by intent:
//! correctness over speed.

use crate::error::{Error, Result};
use crate::pairs::{check_non_conflicting, VertexPair};
use crate::pgm::{Frontier, PopPolicy};
use crate::sample::ObservedPair;

/// Hard cap on the vertex count; the construction is Theta(n^2).
pub const MAX_ORACLE_N: usize = 200;

/// Dense pairs graph: node `a*n+b` is the ordered pair `[a, b]`; two pairs
/// are adjacent iff their first coordinates are adjacent in the first graph
/// and their second coordinates in the second.
#[derive(Debug, Clone)]
pub struct ExplicitPairsGraph {
    n: usize,
    adj: Vec<Vec<u32>>,
}

impl ExplicitPairsGraph {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn pair_count(&self) -> usize {
        self.n * self.n
    }

    #[inline]
    pub fn index(&self, p: VertexPair) -> usize {
        p.a as usize * self.n + p.b as usize
    }

    #[inline]
    pub fn pair_at(&self, idx: usize) -> VertexPair {
        VertexPair::new((idx / self.n) as u32, (idx % self.n) as u32)
    }

    pub fn neighbors(&self, p: VertexPair) -> &[u32] {
        &self.adj[self.index(p)]
    }

    /// Total undirected pairs-graph edges.
    pub fn edge_count(&self) -> u64 {
        self.adj.iter().map(|a| a.len() as u64).sum::<u64>() / 2
    }
}

/// Dense construction of the pairs graph. Refuses `n > 200`.
pub fn build_pairs_graph(pair: &ObservedPair) -> Result<ExplicitPairsGraph> {
    let n = pair.n();
    if n > MAX_ORACLE_N {
        return Err(Error::InvalidParameter(format!(
            "explicit pairs graph refused for n={n} > {MAX_ORACLE_N}"
        )));
    }
    let mut adj = vec![Vec::new(); n * n];
    for a in 0..n as u32 {
        for b in 0..n as u32 {
            let idx = a as usize * n + b as usize;
            for &v1 in pair.g1.neighbors(a) {
                for &v2 in pair.g2.neighbors(b) {
                    adj[idx].push(v1 * n as u32 + v2);
                }
            }
            adj[idx].sort_unstable();
        }
    }
    Ok(ExplicitPairsGraph { n, adj })
}

/// Literal transcription of the percolation matcher over the explicit pairs
/// graph. Counters are kept for all pairs; conflict filtering happens only
/// at admission time. Returns the matched set in admission order.
pub fn run_pgm_reference(
    g: &ExplicitPairsGraph,
    seeds: &[VertexPair],
    r: u32,
    pop: PopPolicy,
) -> Result<Vec<VertexPair>> {
    if r < 1 {
        return Err(Error::InvalidParameter("threshold r must be at least 1".into()));
    }
    let n = g.n();
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

    let mut counters = vec![0u32; g.pair_count()];
    let mut matched = vec![false; g.pair_count()];
    let mut used1 = vec![false; n];
    let mut used2 = vec![false; n];
    let mut order: Vec<VertexPair> = Vec::new();

    // The frontier stores indices into `order`, mirroring the engine's
    // record indices so both consume the pop RNG identically.
    let mut frontier = Frontier::new(pop);
    for &p in &sorted {
        matched[g.index(p)] = true;
        used1[p.a as usize] = true;
        used2[p.b as usize] = true;
        frontier.push_single(order.len() as u32);
        order.push(p);
    }

    let mut delta_b: Vec<u32> = Vec::new();
    while let Some(item) = frontier.pop() {
        let popped = match item {
            crate::pgm::FrontierItem::Single(i) => order[i as usize],
            _ => unreachable!("reference matcher uses singleton frontier items"),
        };
        delta_b.clear();
        for &q in g.neighbors(popped) {
            counters[q as usize] += 1;
            if counters[q as usize] == r {
                delta_b.push(q);
            }
        }
        // ascending index order is ascending (a, b) order
        delta_b.sort_unstable();
        for &q in &delta_b {
            let cand = g.pair_at(q as usize);
            if !used1[cand.a as usize] && !used2[cand.b as usize] {
                matched[q as usize] = true;
                used1[cand.a as usize] = true;
                used2[cand.b as usize] = true;
                frontier.push_single(order.len() as u32);
                order.push(cand);
            }
        }
    }
    Ok(order)
}
