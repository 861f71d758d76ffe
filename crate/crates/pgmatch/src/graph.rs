//! Compressed sparse row undirected graph.
//!
//! Neighbor lists are sorted, duplicate-free, and contain no self-loops; the
//! structure is immutable after construction and safe to share across threads.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Undirected graph in CSR form with optional per-vertex weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Graph {
    offsets: Vec<u64>,
    neighbors: Vec<u32>,
    weights: Option<Vec<f64>>,
}

impl Graph {
    /// Builds a graph from an undirected edge list. Self-loops and duplicate
    /// edges are dropped silently; use [`GraphBuilder`] to get drop counts.
    pub fn from_edges(n: usize, edges: &[(u32, u32)]) -> Result<Self> {
        let mut b = GraphBuilder::new(n)?;
        for &(u, v) in edges {
            b.add_edge(u, v)?;
        }
        Ok(b.finish())
    }

    /// Empty graph on `n` vertices.
    pub fn empty(n: usize) -> Self {
        Graph {
            offsets: vec![0; n + 1],
            neighbors: Vec::new(),
            weights: None,
        }
    }

    pub fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Number of undirected edges.
    pub fn edge_count(&self) -> u64 {
        self.neighbors.len() as u64 / 2
    }

    #[inline]
    pub fn degree(&self, v: u32) -> usize {
        (self.offsets[v as usize + 1] - self.offsets[v as usize]) as usize
    }

    #[inline]
    pub fn neighbors(&self, v: u32) -> &[u32] {
        &self.neighbors[self.offsets[v as usize] as usize..self.offsets[v as usize + 1] as usize]
    }

    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }

    pub fn mean_degree(&self) -> f64 {
        if self.n() == 0 {
            0.0
        } else {
            self.neighbors.len() as f64 / self.n() as f64
        }
    }

    /// Per-vertex expected-degree weights, when the graph was synthesized.
    pub fn weights(&self) -> Option<&[f64]> {
        self.weights.as_deref()
    }

    pub fn set_weights(&mut self, weights: Option<Vec<f64>>) {
        if let Some(w) = &weights {
            assert_eq!(w.len(), self.n());
        }
        self.weights = weights;
    }

    /// Iterates each undirected edge once, as `(u, v)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        (0..self.n() as u32)
            .flat_map(move |u| self.neighbors(u).iter().map(move |&v| (u, v)))
            .filter(|&(u, v)| u < v)
    }

    pub fn degrees(&self) -> Vec<u64> {
        (0..self.n() as u32).map(|v| self.degree(v) as u64).collect()
    }

    /// Checks the structural invariants: sorted duplicate-free rows, no
    /// self-loops, and symmetry. Intended for tests and debug assertions.
    pub fn check_invariants(&self) -> Result<()> {
        for u in 0..self.n() as u32 {
            let row = self.neighbors(u);
            for (i, &v) in row.iter().enumerate() {
                if v == u {
                    return Err(Error::DataFormat(format!("self-loop at vertex {u}")));
                }
                if i > 0 && row[i - 1] >= v {
                    return Err(Error::DataFormat(format!("row {u} not sorted/unique")));
                }
                if !self.has_edge(v, u) {
                    return Err(Error::DataFormat(format!("asymmetric edge ({u},{v})")));
                }
            }
        }
        Ok(())
    }

    pub(crate) fn raw_parts(&self) -> (&[u64], &[u32], Option<&[f64]>) {
        (&self.offsets, &self.neighbors, self.weights.as_deref())
    }

    pub(crate) fn from_raw_parts(
        offsets: Vec<u64>,
        neighbors: Vec<u32>,
        weights: Option<Vec<f64>>,
    ) -> Self {
        Graph {
            offsets,
            neighbors,
            weights,
        }
    }
}

/// Incremental builder that deduplicates edges and reports what was dropped.
#[derive(Debug)]
pub struct GraphBuilder {
    n: usize,
    // one (u,v) entry per direction; sorted and deduplicated in finish()
    directed: Vec<(u32, u32)>,
    self_loops: u64,
}

/// Counts of input edges discarded while building a graph.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DropReport {
    pub self_loops: u64,
    pub duplicates: u64,
}

impl GraphBuilder {
    pub fn new(n: usize) -> Result<Self> {
        if n > u32::MAX as usize {
            return Err(Error::InvalidParameter(format!(
                "vertex count {n} exceeds u32 range"
            )));
        }
        Ok(GraphBuilder {
            n,
            directed: Vec::new(),
            self_loops: 0,
        })
    }

    pub fn add_edge(&mut self, u: u32, v: u32) -> Result<()> {
        if (u as usize) >= self.n || (v as usize) >= self.n {
            return Err(Error::InvalidParameter(format!(
                "edge ({u},{v}) out of range for n={}",
                self.n
            )));
        }
        if u == v {
            self.self_loops += 1;
            return Ok(());
        }
        self.directed.push((u, v));
        self.directed.push((v, u));
        Ok(())
    }

    pub fn finish(self) -> Graph {
        self.finish_with_report().0
    }

    pub fn finish_with_report(mut self) -> (Graph, DropReport) {
        self.directed.sort_unstable();
        let before = self.directed.len() as u64;
        self.directed.dedup();
        let duplicates = (before - self.directed.len() as u64) / 2;

        let mut offsets = vec![0u64; self.n + 1];
        for &(u, _) in &self.directed {
            offsets[u as usize + 1] += 1;
        }
        for i in 1..offsets.len() {
            offsets[i] += offsets[i - 1];
        }
        let neighbors = self.directed.iter().map(|&(_, v)| v).collect();
        (
            Graph {
                offsets,
                neighbors,
                weights: None,
            },
            DropReport {
                self_loops: self.self_loops,
                duplicates,
            },
        )
    }
}
