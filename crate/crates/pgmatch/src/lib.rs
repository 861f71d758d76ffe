//! Percolation graph matching on scale-free graphs.
//!
//! `pgmatch` implements the full pipeline for studying seed-based network
//! de-anonymization on power-law graphs:
//!
//! * synthesis of expected-degree (Chung-Lu) groundtruth graphs and G(n,p)
//!   baselines, plus SNAP edge-list ingestion for real snapshots;
//! * dual edge sampling of a groundtruth graph into two label-permuted
//!   observed graphs;
//! * the percolation matcher (mark propagation with a global threshold over
//!   the implicit pairs graph) and a brute-force reference for it;
//! * the degree-driven matcher, which slices vertices by (estimated)
//!   weight, percolates the critical slice, and cascades downward with
//!   per-stage thresholds;
//! * closed-form theory quantities (critical seed counts, seed-size
//!   exponents, boundary edges) and an experiment harness for reproducible
//!   seed sweeps with CSV/JSON output.
//!
//! The guide under `book/` walks through the model and each subsystem; its
//! code snippets are compiled as doc-tests from this crate.
//!
//! ```
//! use pgmatch::prelude::*;
//!
//! // synthesize a small scale-free graph and observe it twice
//! let spec = WeightedGraphSpec::new(300, 2.5, 6.0, 7)?;
//! let ground = generate_chung_lu(&spec)?;
//! let pair = sample_observed_pair(&ground, 0.9, 11)?;
//!
//! // match from 20 random seeds
//! let seeds = select_seeds(&pair, &SeedPolicy::uniform(20, 3))?;
//! let state = run_pgm(&pair, &seeds, 2, &PgmOptions::default())?;
//! let counts = classify_matches(&state, &pair);
//! assert!(counts.good >= 20);
//! # Ok::<(), pgmatch::Error>(())
//! ```

pub mod ddm;
pub mod error;
pub mod experiment;
pub mod generate;
pub mod graph;
pub mod io;
pub mod metrics;
pub mod mle;
pub mod oracle;
pub mod pairs;
pub mod pgm;
pub mod rng;
pub mod sample;
pub mod slices;
pub mod theory;
pub mod weights;

pub use error::{Error, Result};

/// The common imports for library users.
pub mod prelude {
    pub use crate::ddm::{group_uniform_seeds, run_ddm, verify_stage_soundness, DdmOptions, DdmOutcome};
    pub use crate::error::{Error, Result};
    pub use crate::generate::{generate_chung_lu, generate_gnp, generate_gnp_mean_degree};
    pub use crate::graph::Graph;
    pub use crate::metrics::{detect_transition, matchable_count, run_metrics, RunMetrics};
    pub use crate::mle::estimate_power_law_exponent;
    pub use crate::pairs::{select_seeds, SeedMode, SeedPolicy, VertexPair};
    pub use crate::pgm::{
        classify_matches, run_pgm, MatchState, PgmOptions, PopPolicy,
    };
    pub use crate::sample::{sample_observed_pair, ObservedPair};
    pub use crate::slices::{
        assign_slices, build_slice_plan, PlanMode, SliceMode, SlicePlan, StagePlan,
    };
    pub use crate::theory::{
        boundary_edges, critical_seed_count, p1_seed_exponent, theorem_regime, TheoryParams,
    };
    pub use crate::weights::WeightedGraphSpec;
}

// The guide's code blocks are compiled and run by `cargo test --doc` so the
// book cannot drift from the library.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/model.md")]
    mod model {}
    #[doc = include_str!("../../../book/src/matching.md")]
    mod matching {}
    #[doc = include_str!("../../../book/src/ddm.md")]
    mod ddm {}
    #[doc = include_str!("../../../book/src/theory.md")]
    mod theory {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
    #[doc = include_str!("../../../book/src/formats.md")]
    mod formats {}
}
