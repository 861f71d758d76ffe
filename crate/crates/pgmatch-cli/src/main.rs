//! Command-line front end: graph generation and ingestion, observed-pair
//! sampling, seed selection, single matcher runs, seed sweeps, and result
//! analysis.
//!
//! Exit codes: 0 on success, 1 on usage errors, 2 on data errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use pgmatch::ddm::{run_ddm, DdmOptions};
use pgmatch::error::Error;
use pgmatch::experiment::{
    analyze_rows, read_rows, run_sweep, SweepConfig,
};
use pgmatch::generate::{generate_chung_lu, generate_gnp_mean_degree};
use pgmatch::io::{
    load_graph_auto, load_observed_pair, save_edge_list, save_graph_cache, save_observed_pair,
};
use pgmatch::metrics::run_metrics;
use pgmatch::mle::{default_d_min, estimate_power_law_exponent};
use pgmatch::pairs::{select_seeds, SeedMode, SeedPolicy, VertexPair};
use pgmatch::pgm::{run_pgm, write_match_csv, PgmOptions, PopPolicy};
use pgmatch::sample::sample_observed_pair;
use pgmatch::slices::{build_slice_plan, PlanMode, SliceMode, StagePlan};
use pgmatch::theory::{critical_seed_count, p1_seed_exponent, theorem_regime, TheoryParams};
use pgmatch::weights::WeightedGraphSpec;

#[derive(Parser)]
#[command(
    name = "pgmatch",
    about = "Percolation graph matching on scale-free graphs",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a groundtruth graph (Chung-Lu or G(n,p)) into a cache file
    Generate(GenerateArgs),
    /// Sample a groundtruth graph into an observed pair
    Sample(SampleArgs),
    /// Select a seed set for an observed pair
    Seeds(SeedsArgs),
    /// Run the percolation matcher on an observed pair
    Pgm(PgmArgs),
    /// Run the degree-driven matcher on an observed pair
    Ddm(DdmArgs),
    /// Run a seed-sweep experiment from a config file
    Sweep(SweepArgs),
    /// Aggregate a sweep CSV into a report
    Analyze(AnalyzeArgs),
    /// Estimate the power-law exponent of a graph's degree sequence
    Exponent(ExponentArgs),
    /// Evaluate closed-form theory quantities
    Theory(TheoryArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// chung-lu | gnp
    #[arg(long, default_value = "chung-lu")]
    model: String,
    #[arg(long)]
    n: usize,
    /// Power-law exponent (chung-lu)
    #[arg(long, default_value_t = 2.5)]
    beta: f64,
    /// Target average weight (chung-lu)
    #[arg(long, default_value_t = 5.0)]
    w_bar: f64,
    /// Index offset; defaults to the value capping the top weight at sqrt(n)
    #[arg(long)]
    i0: Option<f64>,
    /// Mean degree (gnp)
    #[arg(long, default_value_t = 10.0)]
    mean_degree: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output: .txt writes an edge list, anything else the binary cache
    out: PathBuf,
}

#[derive(Args)]
struct SampleArgs {
    /// Groundtruth graph (cache or edge list)
    graph: PathBuf,
    #[arg(long, default_value_t = 0.7)]
    s: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output observed-pair file
    out: PathBuf,
}

#[derive(Args)]
struct SeedsArgs {
    /// Observed-pair file
    pair: PathBuf,
    /// uniform | window | explicit
    #[arg(long, default_value = "uniform")]
    policy: String,
    #[arg(long, default_value_t = 10)]
    count: usize,
    /// Degree window bounds; default [sqrt(n)/2, sqrt(n)]
    #[arg(long)]
    window_lo: Option<u64>,
    #[arg(long)]
    window_hi: Option<u64>,
    /// CSV file of explicit pairs "a,b" (explicit policy)
    #[arg(long)]
    file: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output seeds CSV
    out: PathBuf,
}

#[derive(Args)]
struct PgmArgs {
    pair: PathBuf,
    #[arg(long)]
    seeds: PathBuf,
    #[arg(long, default_value_t = 4)]
    r: u32,
    /// random | fifo
    #[arg(long, default_value = "random")]
    pop: String,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output match CSV
    out: PathBuf,
    /// Metrics JSON (stdout if omitted)
    #[arg(long)]
    metrics: Option<PathBuf>,
}

#[derive(Args)]
struct DdmArgs {
    pair: PathBuf,
    #[arg(long)]
    seeds: PathBuf,
    /// estimated | true
    #[arg(long, default_value = "estimated")]
    mode: String,
    /// theory | simplified | fixed:<r>
    #[arg(long, default_value = "simplified")]
    thresholds: String,
    #[arg(long, default_value_t = 0.5)]
    gamma: f64,
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    /// Power-law exponent assumed by the slice plan
    #[arg(long, default_value_t = 2.5)]
    beta: f64,
    /// Group below-slice-1 seeds into atomic frontier elements
    #[arg(long)]
    group_seeds: bool,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output match CSV
    out: PathBuf,
    /// Stage-trace JSON
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Metrics JSON (stdout if omitted)
    #[arg(long)]
    metrics: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// Plain key-value config file
    config: PathBuf,
    /// Output rows CSV
    #[arg(long)]
    out: PathBuf,
    /// Summary JSON
    #[arg(long)]
    summary: Option<PathBuf>,
    /// Worker threads (default: PGMATCH_WORKERS or all cores)
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Sweep rows CSV
    results: PathBuf,
    /// Report JSON (stdout if omitted)
    #[arg(long)]
    report: Option<PathBuf>,
    /// Plot-ready per-a0 CSV
    #[arg(long)]
    plot: Option<PathBuf>,
}

#[derive(Args)]
struct ExponentArgs {
    /// Graph file (cache or edge list)
    graph: PathBuf,
    /// Degree cutoff; defaults to the smallest positive degree
    #[arg(long)]
    d_min: Option<u64>,
}

#[derive(Args)]
struct TheoryArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    p: f64,
    #[arg(long, default_value_t = 1.0)]
    s: f64,
    #[arg(long, default_value_t = 4)]
    r: u32,
    #[arg(long, default_value_t = 0.45)]
    gamma: f64,
    #[arg(long, default_value_t = 2.5)]
    beta: f64,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap treats --help/--version as "errors" with successful exit
            if e.use_stderr() {
                eprint!("{e}");
                return ExitCode::from(1);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_data_error() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn run(cli: Cli) -> pgmatch::Result<()> {
    match cli.command {
        Command::Generate(a) => {
            let graph = match a.model.as_str() {
                "chung-lu" => {
                    let spec = match a.i0 {
                        Some(i0) => WeightedGraphSpec::with_i0(a.n, a.beta, a.w_bar, i0, a.seed)?,
                        None => WeightedGraphSpec::new(a.n, a.beta, a.w_bar, a.seed)?,
                    };
                    generate_chung_lu(&spec)?
                }
                "gnp" => generate_gnp_mean_degree(a.n, a.mean_degree, a.seed)?,
                other => {
                    return Err(Error::InvalidParameter(format!("unknown model '{other}'")))
                }
            };
            if a.out.extension().map(|e| e == "txt").unwrap_or(false) {
                save_edge_list(&graph, &a.out)?;
            } else {
                save_graph_cache(&graph, &a.out)?;
            }
            eprintln!(
                "generated n={} edges={} mean degree {:.3}",
                graph.n(),
                graph.edge_count(),
                graph.mean_degree()
            );
            Ok(())
        }
        Command::Sample(a) => {
            let ground = load_graph_auto(&a.graph)?;
            let pair = sample_observed_pair(&ground, a.s, a.seed)?;
            save_observed_pair(&pair, &a.out)?;
            eprintln!(
                "sampled s={}: g1 edges {}, g2 edges {}",
                a.s,
                pair.g1.edge_count(),
                pair.g2.edge_count()
            );
            Ok(())
        }
        Command::Seeds(a) => {
            let pair = load_observed_pair(&a.pair)?;
            let policy = match a.policy.as_str() {
                "uniform" => SeedPolicy::uniform(a.count, a.seed),
                "window" => match (a.window_lo, a.window_hi) {
                    (Some(lo), Some(hi)) => SeedPolicy::degree_window(a.count, lo, hi, a.seed),
                    _ => SeedPolicy::selected(a.count, pair.n(), a.seed),
                },
                "explicit" => {
                    let path = a.file.ok_or_else(|| {
                        Error::InvalidParameter("explicit policy needs --file".into())
                    })?;
                    SeedPolicy {
                        mode: SeedMode::Explicit(read_seed_csv(&path)?),
                        count: 0,
                        rng_seed: 0,
                    }
                }
                other => {
                    return Err(Error::InvalidParameter(format!("unknown policy '{other}'")))
                }
            };
            let seeds = select_seeds(&pair, &policy)?;
            write_seed_csv(&seeds, &a.out)?;
            eprintln!("selected {} seeds", seeds.len());
            Ok(())
        }
        Command::Pgm(a) => {
            let pair = load_observed_pair(&a.pair)?;
            let seeds = read_seed_csv(&a.seeds)?;
            let pop = pop_policy(&a.pop, a.seed)?;
            let state = run_pgm(&pair, &seeds, a.r, &PgmOptions { pop })?;
            let out = std::fs::File::create(&a.out).map_err(|e| Error::Io {
                path: a.out.clone(),
                source: e,
            })?;
            write_match_csv(&state, out)?;
            emit_json(&run_metrics(&state, &pair), a.metrics.as_deref())
        }
        Command::Ddm(a) => {
            let pair = load_observed_pair(&a.pair)?;
            let seeds = read_seed_csv(&a.seeds)?;
            let mode = match a.mode.as_str() {
                "estimated" => SliceMode::EstimatedWeight,
                "true" => SliceMode::TrueWeight,
                other => {
                    return Err(Error::InvalidParameter(format!("unknown mode '{other}'")))
                }
            };
            let plan_mode = if a.thresholds == "theory" {
                PlanMode::Theory
            } else {
                PlanMode::Exploratory
            };
            let plan = build_slice_plan(
                pair.n(),
                a.beta,
                pair.g1.mean_degree() / pair.s.max(f64::MIN_POSITIVE),
                pair.s,
                a.gamma,
                a.epsilon,
                a.c,
                mode,
                plan_mode,
            )?;
            let stages = match a.thresholds.as_str() {
                "theory" => StagePlan::theory(&plan)?,
                "simplified" => StagePlan::simplified(&plan),
                other => match other.strip_prefix("fixed:") {
                    Some(r) => {
                        let r: u32 = r.parse().map_err(|_| {
                            Error::InvalidParameter(format!("bad threshold spec '{other}'"))
                        })?;
                        StagePlan::fixed(&plan, r)
                    }
                    None => {
                        return Err(Error::InvalidParameter(format!(
                            "unknown thresholds '{other}'"
                        )))
                    }
                },
            };
            let out = run_ddm(
                &pair,
                &seeds,
                &plan,
                &stages,
                &DdmOptions {
                    pgm: PgmOptions {
                        pop: PopPolicy::Uniform { rng_seed: a.seed },
                    },
                    group_seeds: a.group_seeds,
                },
            )?;
            let file = std::fs::File::create(&a.out).map_err(|e| Error::Io {
                path: a.out.clone(),
                source: e,
            })?;
            write_match_csv(&out.state, file)?;
            if let Some(trace) = &a.trace {
                let enriched: Vec<serde_json::Value> = out
                    .stages
                    .iter()
                    .map(|s| {
                        let good = s
                            .admitted
                            .iter()
                            .filter(|&&i| {
                                let p = out.state.records()[i as usize].pair;
                                pair.is_good(p.a, p.b)
                            })
                            .count();
                        serde_json::json!({
                            "stage": s.stage,
                            "label": s.label,
                            "source_slice": s.source_slice,
                            "alpha_lo": s.alpha_lo,
                            "alpha_hi": s.alpha_hi,
                            "threshold": s.threshold,
                            "sources": s.sources.len(),
                            "admitted": s.admitted.len(),
                            "admitted_good": good,
                            "admitted_bad": s.admitted.len() - good,
                        })
                    })
                    .collect();
                emit_json(&enriched, Some(trace))?;
            }
            emit_json(&run_metrics(&out.state, &pair), a.metrics.as_deref())
        }
        Command::Sweep(a) => {
            let config = SweepConfig::from_kv_file(&a.config)?;
            let summary = run_sweep(&config, &a.out, a.workers)?;
            emit_json(&summary, a.summary.as_deref())
        }
        Command::Analyze(a) => {
            let rows = read_rows(&a.results)?;
            let report = analyze_rows(&rows);
            if let Some(plot) = &a.plot {
                let mut w = csv::io_writer(plot)?;
                use std::io::Write;
                writeln!(w, "a0,trials,mean_good,mean_bad,mean_matched")
                    .map_err(|e| Error::Io { path: plot.clone(), source: e })?;
                for s in &report.per_a0 {
                    writeln!(
                        w,
                        "{},{},{},{},{}",
                        s.a0, s.trials, s.mean_good, s.mean_bad, s.mean_matched
                    )
                    .map_err(|e| Error::Io { path: plot.clone(), source: e })?;
                }
            }
            emit_json(&report, a.report.as_deref())
        }
        Command::Exponent(a) => {
            let graph = load_graph_auto(&a.graph)?;
            let degrees = graph.degrees();
            let d_min = match a.d_min {
                Some(d) => d,
                None => default_d_min(&degrees).ok_or_else(|| {
                    Error::Estimation("graph has no vertex with positive degree".into())
                })?,
            };
            let beta = estimate_power_law_exponent(&degrees, d_min)?;
            emit_json(
                &serde_json::json!({
                    "n": graph.n(),
                    "edges": graph.edge_count(),
                    "mean_degree": graph.mean_degree(),
                    "d_min": d_min,
                    "beta": beta,
                }),
                None,
            )
        }
        Command::Theory(a) => {
            let params = TheoryParams {
                n: a.n,
                p: a.p,
                s: a.s,
                r: a.r,
                gamma: a.gamma,
                beta: a.beta,
            };
            let ac = critical_seed_count(&params)?;
            let regime = theorem_regime(&params);
            let p1 = p1_seed_exponent(a.gamma, a.beta, a.r).ok();
            emit_json(
                &serde_json::json!({
                    "a_c": ac,
                    "regime": regime,
                    "p1_seed_bound": p1,
                }),
                None,
            )
        }
    }
}

mod csv {
    use pgmatch::error::Error;
    use std::io::BufWriter;
    use std::path::Path;

    pub fn io_writer(path: &Path) -> pgmatch::Result<BufWriter<std::fs::File>> {
        Ok(BufWriter::new(std::fs::File::create(path).map_err(
            |e| Error::Io {
                path: path.to_path_buf(),
                source: e,
            },
        )?))
    }
}

fn pop_policy(name: &str, seed: u64) -> pgmatch::Result<PopPolicy> {
    match name {
        "random" => Ok(PopPolicy::Uniform { rng_seed: seed }),
        "fifo" => Ok(PopPolicy::Fifo),
        other => Err(Error::InvalidParameter(format!(
            "unknown pop policy '{other}'"
        ))),
    }
}

fn read_seed_csv(path: &std::path::Path) -> pgmatch::Result<Vec<VertexPair>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    let mut seeds = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line == "g1_id,g2_id" {
            continue;
        }
        let (a, b) = line.split_once(',').ok_or_else(|| {
            Error::Parse {
                path: path.to_path_buf(),
                line: i + 1,
                msg: "expected 'a,b'".into(),
            }
        })?;
        let parse = |v: &str| {
            v.trim().parse::<u32>().map_err(|_| Error::Parse {
                path: path.to_path_buf(),
                line: i + 1,
                msg: format!("bad vertex id {v:?}"),
            })
        };
        seeds.push(VertexPair::new(parse(a)?, parse(b)?));
    }
    Ok(seeds)
}

fn write_seed_csv(seeds: &[VertexPair], path: &std::path::Path) -> pgmatch::Result<()> {
    use std::io::Write;
    let mut w = csv::io_writer(path)?;
    let io = |e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    };
    writeln!(w, "g1_id,g2_id").map_err(io)?;
    for s in seeds {
        writeln!(w, "{},{}", s.a, s.b).map_err(io)?;
    }
    Ok(())
}

fn emit_json<T: serde::Serialize>(value: &T, path: Option<&std::path::Path>) -> pgmatch::Result<()> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::DataFormat(format!("json: {e}")))?;
    match path {
        Some(p) => std::fs::write(p, text + "\n").map_err(|e| Error::Io {
            path: p.to_path_buf(),
            source: e,
        }),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}
