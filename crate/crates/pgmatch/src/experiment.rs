//! Seed-sweep experiments: reproducible trial scheduling, crash-safe CSV
//! output with resume, and result aggregation.
//!
//! A sweep takes a fixed groundtruth graph and, for every `(a0, trial)` cell
//! of the grid, draws a fresh observed pair, a fresh seed set, and runs the
//! configured matcher. Each cell's randomness is derived from the master
//! seed and the cell key alone, so any subset of cells can be recomputed
//! independently and a resumed sweep is bit-identical to an uninterrupted
//! one. Rows are appended (and flushed) as cells finish; on completion the
//! file is rewritten in canonical `(a0, trial)` order.

use std::collections::BTreeMap;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::ddm::{run_ddm, DdmOptions};
use crate::error::{Error, Result};
use crate::generate::{generate_chung_lu, generate_gnp_mean_degree};
use crate::graph::Graph;
use crate::io::load_graph_auto;
use crate::metrics::detect_transition;
use crate::pairs::{select_seeds, SeedPolicy};
use crate::pgm::{classify_matches, run_pgm, PgmOptions, PopPolicy};
use crate::rng::derive_seed;
use crate::sample::sample_observed_pair;
use crate::slices::{build_slice_plan, PlanMode, SliceMode, StagePlan};
use crate::weights::WeightedGraphSpec;

/// Environment variable overriding the worker-pool size.
pub const WORKERS_ENV: &str = "PGMATCH_WORKERS";

/// Where the groundtruth graph comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum GraphSource {
    ChungLu {
        n: usize,
        beta: f64,
        w_bar: f64,
        seed: u64,
    },
    Gnp {
        n: usize,
        mean_degree: f64,
        seed: u64,
    },
    File {
        path: PathBuf,
    },
}

/// Which matcher a sweep runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Algorithm {
    Pgm,
    Ddm,
    DdmSimplified,
}

/// Seed-set policy of a sweep (the count comes from the grid).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SweepSeedPolicy {
    Uniform,
    /// Observed g1 degree in `[sqrt(n)/2, sqrt(n)]`.
    DegreeWindowAuto,
    DegreeWindow { lo: u64, hi: u64 },
}

/// Full description of one sweep experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub source: GraphSource,
    pub s: f64,
    pub algorithm: Algorithm,
    pub r: u32,
    pub seed_policy: SweepSeedPolicy,
    pub a0_grid: Vec<usize>,
    pub trials: usize,
    pub master_seed: u64,
    // staged-matcher knobs
    pub gamma: f64,
    pub epsilon: f64,
    pub c: f64,
    pub slice_mode: SliceMode,
    pub group_uniform_seeds: bool,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials < 1 {
            return Err(Error::InvalidParameter("trials must be at least 1".into()));
        }
        if self.a0_grid.is_empty() {
            return Err(Error::InvalidParameter("a0 grid is empty".into()));
        }
        for w in self.a0_grid.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::InvalidParameter(
                    "a0 grid must be strictly increasing".into(),
                ));
            }
        }
        Ok(())
    }
}

/// One CSV row of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepRow {
    pub a0: usize,
    pub trial: usize,
    pub good: usize,
    pub bad: usize,
    pub unmatched: usize,
    pub steps: u64,
}

/// Per-grid-point aggregation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct A0Summary {
    pub a0: usize,
    pub trials: usize,
    pub mean_good: f64,
    pub mean_bad: f64,
    pub mean_matched: f64,
}

/// Sweep output: aggregated curve, detected transitions, and medians.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepSummary {
    pub per_a0: Vec<A0Summary>,
    /// Transition of the mean curve, if any.
    pub transition: Option<f64>,
    /// Per-trial transitions of the individual curves.
    pub per_trial_transition: Vec<Option<f64>>,
    /// Median of the per-trial transitions (absent trials excluded).
    pub median_transition: Option<f64>,
}

/// Loads or generates the groundtruth graph of a config.
pub fn load_source(source: &GraphSource) -> Result<Graph> {
    match source {
        GraphSource::ChungLu { n, beta, w_bar, seed } => {
            let spec = WeightedGraphSpec::new(*n, *beta, *w_bar, *seed)?;
            generate_chung_lu(&spec)
        }
        GraphSource::Gnp { n, mean_degree, seed } => {
            generate_gnp_mean_degree(*n, *mean_degree, *seed)
        }
        GraphSource::File { path } => load_graph_auto(path),
    }
}

fn seed_policy_for(config: &SweepConfig, n: usize, a0: usize, seed: u64) -> SeedPolicy {
    match config.seed_policy {
        SweepSeedPolicy::Uniform => SeedPolicy::uniform(a0, seed),
        SweepSeedPolicy::DegreeWindowAuto => SeedPolicy::selected(a0, n, seed),
        SweepSeedPolicy::DegreeWindow { lo, hi } => SeedPolicy::degree_window(a0, lo, hi, seed),
    }
}

/// Runs one `(a0, trial)` cell. All randomness derives from
/// `(master_seed, a0, trial, purpose)` with purposes 1 = sampling,
/// 2 = seed selection, 3 = matcher pops.
pub fn run_cell(config: &SweepConfig, ground: &Graph, a0: usize, trial: usize) -> Result<SweepRow> {
    let key = [a0 as u64, trial as u64];
    let pair = sample_observed_pair(
        ground,
        config.s,
        derive_seed(config.master_seed, &[key[0], key[1], 1]),
    )?;
    let policy = seed_policy_for(
        config,
        pair.n(),
        a0,
        derive_seed(config.master_seed, &[key[0], key[1], 2]),
    );
    let seeds = select_seeds(&pair, &policy)?;
    let pop = PopPolicy::Uniform {
        rng_seed: derive_seed(config.master_seed, &[key[0], key[1], 3]),
    };

    let (classified, steps) = match config.algorithm {
        Algorithm::Pgm => {
            let state = run_pgm(&pair, &seeds, config.r, &PgmOptions { pop })?;
            (classify_matches(&state, &pair), state.steps())
        }
        Algorithm::Ddm | Algorithm::DdmSimplified => {
            let plan = build_slice_plan(
                pair.n(),
                // the plan needs the degree-distribution shape; take it from
                // the configured source when synthetic, else a neutral 2.5
                match &config.source {
                    GraphSource::ChungLu { beta, .. } => *beta,
                    _ => 2.5,
                },
                ground.mean_degree(),
                config.s,
                config.gamma,
                config.epsilon,
                config.c,
                config.slice_mode,
                PlanMode::Exploratory,
            )?;
            let stages = match config.algorithm {
                Algorithm::DdmSimplified => StagePlan::fixed(&plan, config.r),
                _ => StagePlan::theory(&plan)?,
            };
            let group = config.group_uniform_seeds
                && matches!(config.seed_policy, SweepSeedPolicy::Uniform);
            let out = run_ddm(
                &pair,
                &seeds,
                &plan,
                &stages,
                &DdmOptions {
                    pgm: PgmOptions { pop },
                    group_seeds: group,
                },
            )?;
            (classify_matches(&out.state, &pair), out.state.steps())
        }
    };
    Ok(SweepRow {
        a0,
        trial,
        good: classified.good,
        bad: classified.bad,
        unmatched: classified.unmatched,
        steps,
    })
}

fn worker_count(requested: Option<usize>) -> usize {
    if let Ok(v) = std::env::var(WORKERS_ENV) {
        if let Ok(k) = v.parse::<usize>() {
            if k >= 1 {
                return k;
            }
        }
    }
    requested.unwrap_or_else(|| {
        std::thread::available_parallelism()
            .map(|v| v.get())
            .unwrap_or(1)
    })
}

/// Runs a sweep, appending rows to `out_csv` as cells complete and skipping
/// cells already present (crash-safe resume). The finished file is rewritten
/// in canonical `(a0, trial)` order and the summary is returned.
pub fn run_sweep(
    config: &SweepConfig,
    out_csv: impl AsRef<Path>,
    workers: Option<usize>,
) -> Result<SweepSummary> {
    config.validate()?;
    let out_csv = out_csv.as_ref();
    let ground = load_source(&config.source)?;

    let mut have: BTreeMap<(usize, usize), SweepRow> = BTreeMap::new();
    if out_csv.exists() {
        for row in read_rows(out_csv)? {
            let key = (row.a0, row.trial);
            if !config.a0_grid.contains(&row.a0) || row.trial >= config.trials {
                return Err(Error::DataFormat(format!(
                    "resume-key conflict: row (a0={}, trial={}) is outside the configured grid",
                    row.a0, row.trial
                )));
            }
            if have.insert(key, row).is_some() {
                return Err(Error::DataFormat(format!(
                    "resume-key conflict: duplicate row for (a0={}, trial={})",
                    row.a0, row.trial
                )));
            }
        }
    }

    let todo: Vec<(usize, usize)> = config
        .a0_grid
        .iter()
        .flat_map(|&a0| (0..config.trials).map(move |t| (a0, t)))
        .filter(|key| !have.contains_key(key))
        .collect();

    if !todo.is_empty() {
        let append = std::fs::OpenOptions::new()
            .create(true)
            .append(true)
            .open(out_csv)
            .map_err(|e| Error::io(out_csv, e))?;
        let needs_header = have.is_empty()
            && append.metadata().map(|m| m.len() == 0).unwrap_or(true);
        let sink = Mutex::new(std::io::BufWriter::new(append));
        if needs_header {
            writeln!(
                sink.lock().unwrap(),
                "a0,trial,good,bad,unmatched,steps"
            )
            .map_err(|e| Error::io(out_csv, e))?;
        }

        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(worker_count(workers))
            .build()
            .map_err(|e| Error::InvalidParameter(format!("worker pool: {e}")))?;
        let results: Vec<Result<SweepRow>> = pool.install(|| {
            use rayon::prelude::*;
            todo.par_iter()
                .map(|&(a0, trial)| {
                    let row = run_cell(config, &ground, a0, trial)?;
                    let mut w = sink.lock().unwrap();
                    writeln!(
                        w,
                        "{},{},{},{},{},{}",
                        row.a0, row.trial, row.good, row.bad, row.unmatched, row.steps
                    )
                    .and_then(|_| w.flush())
                    .map_err(|e| Error::io(out_csv, e))?;
                    Ok(row)
                })
                .collect()
        });
        for r in results {
            let row = r?;
            have.insert((row.a0, row.trial), row);
        }
    }

    // canonical rewrite
    let rows: Vec<SweepRow> = have.into_values().collect();
    write_rows(out_csv, &rows)?;
    summarize(config, &rows)
}

fn summarize(config: &SweepConfig, rows: &[SweepRow]) -> Result<SweepSummary> {
    let mut per_a0 = Vec::new();
    for &a0 in &config.a0_grid {
        let cells: Vec<&SweepRow> = rows.iter().filter(|r| r.a0 == a0).collect();
        let k = cells.len().max(1) as f64;
        per_a0.push(A0Summary {
            a0,
            trials: cells.len(),
            mean_good: cells.iter().map(|r| r.good as f64).sum::<f64>() / k,
            mean_bad: cells.iter().map(|r| r.bad as f64).sum::<f64>() / k,
            mean_matched: cells.iter().map(|r| (r.good + r.bad) as f64).sum::<f64>() / k,
        });
    }
    let mean_curve: Vec<(f64, f64)> = per_a0
        .iter()
        .map(|s| (s.a0 as f64, s.mean_matched))
        .collect();
    let transition = if mean_curve.len() >= 4 {
        detect_transition(&mean_curve).ok()
    } else {
        None
    };

    let mut per_trial_transition = Vec::new();
    for t in 0..config.trials {
        let curve: Vec<(f64, f64)> = config
            .a0_grid
            .iter()
            .filter_map(|&a0| {
                rows.iter()
                    .find(|r| r.a0 == a0 && r.trial == t)
                    .map(|r| (a0 as f64, (r.good + r.bad) as f64))
            })
            .collect();
        per_trial_transition.push(if curve.len() >= 4 {
            detect_transition(&curve).ok()
        } else {
            None
        });
    }
    let mut found: Vec<f64> = per_trial_transition.iter().flatten().copied().collect();
    found.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median_transition = if found.is_empty() {
        None
    } else {
        Some(found[found.len() / 2])
    };

    Ok(SweepSummary {
        per_a0,
        transition,
        per_trial_transition,
        median_transition,
    })
}

/// Reads sweep rows, reporting malformed lines with their line number.
pub fn read_rows(path: impl AsRef<Path>) -> Result<Vec<SweepRow>> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| Error::DataFormat(format!("{}: {e}", path.display())))?;
    let mut rows = Vec::new();
    for (i, rec) in reader.deserialize::<SweepRow>().enumerate() {
        let row =
            rec.map_err(|e| Error::parse(path, i + 2, format!("bad sweep row: {e}")))?;
        rows.push(row);
    }
    Ok(rows)
}

fn write_rows(path: impl AsRef<Path>, rows: &[SweepRow]) -> Result<()> {
    let path = path.as_ref();
    let tmp = path.with_extension("tmp");
    {
        let mut w = csv::Writer::from_path(&tmp)
            .map_err(|e| Error::DataFormat(format!("{}: {e}", tmp.display())))?;
        for row in rows {
            w.serialize(row)
                .map_err(|e| Error::DataFormat(format!("csv write: {e}")))?;
        }
        w.flush().map_err(|e| Error::io(&tmp, e))?;
    }
    std::fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

/// Aggregated report over a results file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub rows: usize,
    pub per_a0: Vec<A0Summary>,
    pub transition: Option<f64>,
    /// Pooled `bad/(good+bad)` over all trials at the detected transition.
    pub bad_fraction_at_transition: Option<f64>,
}

/// Aggregates a sweep CSV into per-a0 means, the detected transition, and
/// the pooled bad fraction at the transition point.
pub fn analyze_rows(rows: &[SweepRow]) -> AnalysisReport {
    let mut grid: Vec<usize> = rows.iter().map(|r| r.a0).collect();
    grid.sort_unstable();
    grid.dedup();
    let mut per_a0 = Vec::new();
    for &a0 in &grid {
        let cells: Vec<&SweepRow> = rows.iter().filter(|r| r.a0 == a0).collect();
        let k = cells.len().max(1) as f64;
        per_a0.push(A0Summary {
            a0,
            trials: cells.len(),
            mean_good: cells.iter().map(|r| r.good as f64).sum::<f64>() / k,
            mean_bad: cells.iter().map(|r| r.bad as f64).sum::<f64>() / k,
            mean_matched: cells.iter().map(|r| (r.good + r.bad) as f64).sum::<f64>() / k,
        });
    }
    let curve: Vec<(f64, f64)> = per_a0
        .iter()
        .map(|s| (s.a0 as f64, s.mean_matched))
        .collect();
    let transition = if curve.len() >= 4 {
        detect_transition(&curve).ok()
    } else {
        None
    };
    let bad_fraction_at_transition = transition.map(|t| {
        let cells: Vec<&SweepRow> = rows.iter().filter(|r| r.a0 as f64 == t).collect();
        let good: usize = cells.iter().map(|r| r.good).sum();
        let bad: usize = cells.iter().map(|r| r.bad).sum();
        if good + bad == 0 {
            0.0
        } else {
            bad as f64 / (good + bad) as f64
        }
    });
    AnalysisReport {
        rows: rows.len(),
        per_a0,
        transition,
        bad_fraction_at_transition,
    }
}

// ---------------------------------------------------------------------------
// plain key-value config files

impl SweepConfig {
    /// Parses the plain `key = value` config format (`#` comments). See the
    /// book's experiments chapter for the key list.
    pub fn from_kv_text(text: &str, base: impl AsRef<Path>) -> Result<Self> {
        let mut kv = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                Error::parse(base.as_ref(), i + 1, "expected 'key = value'")
            })?;
            kv.insert(k.trim().to_string(), v.trim().to_string());
        }
        let get = |k: &str| -> Result<&str> {
            kv.get(k)
                .map(|s| s.as_str())
                .ok_or_else(|| Error::DataFormat(format!("missing config key '{k}'")))
        };
        let parse_f = |k: &str, d: f64| -> Result<f64> {
            match kv.get(k) {
                None => Ok(d),
                Some(v) => v
                    .parse()
                    .map_err(|_| Error::DataFormat(format!("bad float for '{k}': {v}"))),
            }
        };
        let parse_u = |k: &str, d: u64| -> Result<u64> {
            match kv.get(k) {
                None => Ok(d),
                Some(v) => v
                    .parse()
                    .map_err(|_| Error::DataFormat(format!("bad integer for '{k}': {v}"))),
            }
        };

        let source = match get("graph")? {
            "chung_lu" => GraphSource::ChungLu {
                n: parse_u("n", 0)? as usize,
                beta: parse_f("beta", 2.5)?,
                w_bar: parse_f("w_bar", 5.0)?,
                seed: parse_u("graph_seed", 1)?,
            },
            "gnp" => GraphSource::Gnp {
                n: parse_u("n", 0)? as usize,
                mean_degree: parse_f("mean_degree", 10.0)?,
                seed: parse_u("graph_seed", 1)?,
            },
            "edgelist" | "file" => GraphSource::File {
                path: PathBuf::from(get("path")?),
            },
            other => {
                return Err(Error::DataFormat(format!("unknown graph source '{other}'")))
            }
        };
        let algorithm = match get("algorithm")? {
            "pgm" => Algorithm::Pgm,
            "ddm" => Algorithm::Ddm,
            "ddm_simplified" => Algorithm::DdmSimplified,
            other => return Err(Error::DataFormat(format!("unknown algorithm '{other}'"))),
        };
        let seed_policy = match kv.get("seed_policy").map(|s| s.as_str()).unwrap_or("uniform") {
            "uniform" => SweepSeedPolicy::Uniform,
            "degree_window" => match (kv.get("window_lo"), kv.get("window_hi")) {
                (Some(lo), Some(hi)) => SweepSeedPolicy::DegreeWindow {
                    lo: lo
                        .parse()
                        .map_err(|_| Error::DataFormat("bad window_lo".into()))?,
                    hi: hi
                        .parse()
                        .map_err(|_| Error::DataFormat("bad window_hi".into()))?,
                },
                _ => SweepSeedPolicy::DegreeWindowAuto,
            },
            other => {
                return Err(Error::DataFormat(format!("unknown seed policy '{other}'")))
            }
        };
        let a0_grid: Vec<usize> = get("a0_grid")?
            .split(',')
            .map(|t| {
                t.trim()
                    .parse()
                    .map_err(|_| Error::DataFormat(format!("bad a0 grid entry '{t}'")))
            })
            .collect::<Result<_>>()?;
        let slice_mode = match kv.get("slice_mode").map(|s| s.as_str()).unwrap_or("estimated") {
            "estimated" => SliceMode::EstimatedWeight,
            "true" => SliceMode::TrueWeight,
            other => return Err(Error::DataFormat(format!("unknown slice mode '{other}'"))),
        };

        let config = SweepConfig {
            source,
            s: parse_f("s", 0.7)?,
            algorithm,
            r: parse_u("r", 4)? as u32,
            seed_policy,
            a0_grid,
            trials: parse_u("trials", 1)? as usize,
            master_seed: parse_u("master_seed", 42)?,
            gamma: parse_f("gamma", 0.5)?,
            epsilon: parse_f("epsilon", 0.1)?,
            c: parse_f("c", 1.0)?,
            slice_mode,
            group_uniform_seeds: kv
                .get("group_uniform_seeds")
                .map(|v| v == "true" || v == "1")
                .unwrap_or(true),
        };
        config.validate()?;
        Ok(config)
    }

    pub fn from_kv_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_kv_text(&text, path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tmp(name: &str) -> PathBuf {
        let dir = std::env::temp_dir().join("pgmatch-exp-tests");
        std::fs::create_dir_all(&dir).unwrap();
        dir.join(format!("{}-{name}", std::process::id()))
    }

    fn small_config() -> SweepConfig {
        SweepConfig {
            source: GraphSource::ChungLu {
                n: 400,
                beta: 2.5,
                w_bar: 8.0,
                seed: 5,
            },
            s: 0.9,
            algorithm: Algorithm::Pgm,
            r: 2,
            seed_policy: SweepSeedPolicy::Uniform,
            a0_grid: vec![1, 2, 4, 8, 16],
            trials: 3,
            master_seed: 99,
            gamma: 0.5,
            epsilon: 0.1,
            c: 1.0,
            slice_mode: SliceMode::EstimatedWeight,
            group_uniform_seeds: true,
        }
    }

    #[test]
    fn sweep_rows_are_reproducible() {
        let config = small_config();
        let p1 = tmp("sweep1.csv");
        let p2 = tmp("sweep2.csv");
        let _ = std::fs::remove_file(&p1);
        let _ = std::fs::remove_file(&p2);
        run_sweep(&config, &p1, Some(2)).unwrap();
        run_sweep(&config, &p2, Some(1)).unwrap();
        assert_eq!(
            std::fs::read_to_string(&p1).unwrap(),
            std::fs::read_to_string(&p2).unwrap()
        );
    }

    #[test]
    fn resume_reproduces_identical_output() {
        let config = small_config();
        let full = tmp("full.csv");
        let resumed = tmp("resumed.csv");
        let _ = std::fs::remove_file(&full);
        let _ = std::fs::remove_file(&resumed);
        run_sweep(&config, &full, Some(2)).unwrap();

        // simulate an interrupted run: only part of the grid completed
        let mut partial = config.clone();
        partial.a0_grid = vec![1, 2, 4];
        partial.trials = 2;
        run_sweep(&partial, &resumed, Some(2)).unwrap();
        run_sweep(&config, &resumed, Some(2)).unwrap();
        assert_eq!(
            std::fs::read_to_string(&full).unwrap(),
            std::fs::read_to_string(&resumed).unwrap()
        );
    }

    #[test]
    fn resume_key_conflicts_are_rejected() {
        let config = small_config();
        let path = tmp("conflict.csv");
        std::fs::write(&path, "a0,trial,good,bad,unmatched,steps\n77,0,1,0,399,1\n").unwrap();
        assert!(matches!(
            run_sweep(&config, &path, Some(1)),
            Err(Error::DataFormat(_))
        ));
    }

    #[test]
    fn malformed_rows_report_line_numbers() {
        let path = tmp("malformed.csv");
        std::fs::write(&path, "a0,trial,good,bad,unmatched,steps\n1,0,oops,0,10,3\n").unwrap();
        match read_rows(&path) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn analyze_fixture_by_hand() {
        let rows = vec![
            SweepRow { a0: 1, trial: 0, good: 2, bad: 0, unmatched: 98, steps: 3 },
            SweepRow { a0: 1, trial: 1, good: 4, bad: 2, unmatched: 94, steps: 7 },
            SweepRow { a0: 2, trial: 0, good: 90, bad: 2, unmatched: 8, steps: 92 },
            SweepRow { a0: 2, trial: 1, good: 94, bad: 0, unmatched: 6, steps: 95 },
        ];
        let report = analyze_rows(&rows);
        assert_eq!(report.rows, 4);
        assert_eq!(report.per_a0.len(), 2);
        assert!((report.per_a0[0].mean_good - 3.0).abs() < 1e-12);
        assert!((report.per_a0[0].mean_matched - 4.0).abs() < 1e-12);
        assert!((report.per_a0[1].mean_matched - 93.0).abs() < 1e-12);
        // too few points for a transition
        assert!(report.transition.is_none());
        let empty = analyze_rows(&[]);
        assert_eq!(empty.rows, 0);
        assert!(empty.per_a0.is_empty());
    }

    #[test]
    fn config_round_trip_from_text() {
        let text = "\
# demo sweep
graph = chung_lu
n = 400
beta = 2.5
w_bar = 8
graph_seed = 5
s = 0.9
algorithm = pgm
r = 2
seed_policy = uniform
a0_grid = 1, 2, 4, 8, 16
trials = 3
master_seed = 99
";
        let config = SweepConfig::from_kv_text(text, "demo.cfg").unwrap();
        assert_eq!(config, small_config());
        assert!(SweepConfig::from_kv_text("graph = nope\nalgorithm = pgm\na0_grid = 1,2,4,8", "x").is_err());
    }

    #[test]
    fn trivial_sweep_with_zero_seed_grid_point() {
        let mut config = small_config();
        config.a0_grid = vec![0, 1, 2, 4];
        config.trials = 1;
        let path = tmp("zero.csv");
        let _ = std::fs::remove_file(&path);
        run_sweep(&config, &path, Some(1)).unwrap();
        let rows = read_rows(&path).unwrap();
        let zero = rows.iter().find(|r| r.a0 == 0).unwrap();
        assert_eq!(zero.good, 0);
        assert_eq!(zero.bad, 0);
    }
}
