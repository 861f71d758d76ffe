//! Scratch harness for sizing experiment grids and inspecting stage traces.
//! Usage: cargo run --release -p pgmatch --example calibrate -- <mode>

use pgmatch::ddm::{run_ddm, DdmOptions};
use pgmatch::generate::{generate_chung_lu, generate_gnp_mean_degree};
use pgmatch::metrics::matchable_count;
use pgmatch::pairs::{select_seeds, SeedPolicy};
use pgmatch::pgm::{classify_matches, run_pgm, PgmOptions, PopPolicy};
use pgmatch::rng::derive_seed;
use pgmatch::sample::sample_observed_pair;
use pgmatch::slices::{build_slice_plan, PlanMode, SliceMode, StagePlan};
use pgmatch::theory::{critical_seed_count, TheoryParams};
use pgmatch::weights::WeightedGraphSpec;

fn main() {
    let mode = std::env::args().nth(1).unwrap_or_else(|| "est_vs_true".into());
    match mode.as_str() {
        "est_vs_true" => est_vs_true(),
        "gnp_ac" => gnp_ac(),
        "crit5" => crit5(),
        "crit7" => crit7(),
        "pgm_cl" => pgm_cl(),
        other => eprintln!("unknown mode {other}"),
    }
}

fn est_vs_true() {
    let n = 100_000usize;
    let spec = WeightedGraphSpec::new(n, 2.5, 10.0, 0xC8B0).unwrap();
    let ground = generate_chung_lu(&spec).unwrap();
    let a0: usize = std::env::args().nth(2).and_then(|v| v.parse().ok()).unwrap_or(40);
    for t in 0..20u64 {
        let pair = sample_observed_pair(&ground, 0.8, derive_seed(0xC8B1, &[t])).unwrap();
        if t == 0 { println!("matchable = {}", matchable_count(&pair)); }
        let seeds =
            select_seeds(&pair, &SeedPolicy::selected(a0, n, derive_seed(0xC8B2, &[t]))).unwrap();
        for mode in [SliceMode::EstimatedWeight, SliceMode::TrueWeight] {

            let plan = build_slice_plan(n, 2.5, 10.0, pair.s, 0.5, 0.1, 1.0, mode, PlanMode::Exploratory).unwrap();
            let stages = StagePlan::simplified(&plan);
            let out = run_ddm(
                &pair,
                &seeds,
                &plan,
                &stages,
                &DdmOptions {
                    pgm: PgmOptions {
                        pop: PopPolicy::Uniform { rng_seed: derive_seed(0xC8B3, &[t]) },
                    },
                    group_seeds: false,
                },
            )
            .unwrap();
            let c = classify_matches(&out.state, &pair);
            print!("  t{t} {mode:?}: good={} bad={}", c.good, c.bad);
        }
    }
}

fn gnp_ac() {
    let n = 10_000usize;
    let p = 2.0e-3;
    let s = 0.8;
    let params = TheoryParams { n, p, s, r: 4, gamma: 0.5, beta: 2.5 };
    let ac = critical_seed_count(&params).unwrap();
    println!("a_c = {ac:.1}");
    let ground = generate_gnp_mean_degree(n, p * (n as f64 - 1.0), 77).unwrap();
    println!("mean degree = {:.2}", ground.mean_degree());
    for a0 in [113usize, 160, 226, 320, 453, 640, 905, 1280] {
        let mut total = 0usize;
        let trials = 10u64;
        for t in 0..trials {
            let pair = sample_observed_pair(&ground, s, derive_seed(1, &[a0 as u64, t])).unwrap();
            let seeds =
                select_seeds(&pair, &SeedPolicy::uniform(a0, derive_seed(2, &[a0 as u64, t])))
                    .unwrap();
            let state = run_pgm(
                &pair,
                &seeds,
                4,
                &PgmOptions {
                    pop: PopPolicy::Uniform { rng_seed: derive_seed(3, &[a0 as u64, t]) },
                },
            )
            .unwrap();
            total += classify_matches(&state, &pair).good;
        }
        println!("a0={a0:5}  mean good = {:.0}", total as f64 / trials as f64);
    }
}

fn crit5() {
    use pgmatch::experiment::*;
    let n = 100_000usize;
    let trials: usize = std::env::args().nth(2).and_then(|v| v.parse().ok()).unwrap_or(8);
    let dir = std::env::temp_dir().join("pgmatch-crit5");
    std::fs::create_dir_all(&dir).unwrap();

    let cl = GraphSource::ChungLu { n, beta: 2.9, w_bar: 25.0, seed: 50 };
    let ground = load_source(&cl).unwrap();
    let mean_degree = ground.mean_degree();
    println!("CL mean degree = {mean_degree:.2}");
    let gnp = GraphSource::Gnp { n, mean_degree, seed: 51 };

    let base = SweepConfig {
        source: cl.clone(),
        s: 0.7,
        algorithm: Algorithm::DdmSimplified,
        r: 4,
        seed_policy: SweepSeedPolicy::Uniform,
        a0_grid: vec![],
        trials,
        master_seed: 0xC5,
        gamma: 0.5,
        epsilon: 0.1,
        c: 1.0,
        slice_mode: SliceMode::EstimatedWeight,
        group_uniform_seeds: true,
    };

    let mut gnp_cfg = base.clone();
    gnp_cfg.source = gnp;
    gnp_cfg.algorithm = Algorithm::Pgm;
    gnp_cfg.a0_grid = vec![1810, 2560, 3620, 5120, 7240, 10240, 14480];

    let mut uni = base.clone();
    uni.a0_grid = vec![181, 256, 362, 512, 724, 1024, 1448, 2048];

    let mut sel = base.clone();
    sel.seed_policy = SweepSeedPolicy::DegreeWindowAuto;
    sel.a0_grid = vec![16, 23, 32, 45, 64, 91, 128];

    for (label, cfg) in [("gnp-pgm", &gnp_cfg), ("ddm-uniform", &uni), ("ddm-selected", &sel)] {
        let csv = dir.join(format!("{label}-{}.csv", std::process::id()));
        let _ = std::fs::remove_file(&csv);
        let t0 = std::time::Instant::now();
        let summary = run_sweep(cfg, &csv, None).unwrap();
        println!(
            "== {label} ({:.0}s): mean-curve transition {:?}, median per-trial {:?}",
            t0.elapsed().as_secs_f64(),
            summary.transition,
            summary.median_transition
        );
        for s in &summary.per_a0 {
            println!("   a0={:6} mean matched {:9.0} mean bad {:7.2}", s.a0, s.mean_matched, s.mean_bad);
        }
        println!("   per-trial: {:?}", summary.per_trial_transition);
    }
}

fn pgm_cl() {
    // plain percolation (r=4, no slicing) on the criterion-5 Chung-Lu graph
    let n = 100_000usize;
    let spec = WeightedGraphSpec::new(n, 2.9, 25.0, 50).unwrap();
    let ground = generate_chung_lu(&spec).unwrap();
    let trials = 3u64;
    for (label, selected, grid) in [
        ("uniform", false, vec![256usize, 512, 1024, 2048]),
        ("selected", true, vec![16usize, 32, 64, 128]),
    ] {
        println!("== pgm-on-cl {label}");
        for a0 in grid {
            let mut total = 0usize;
            let mut bad_total = 0usize;
            for t in 0..trials {
                let pair = sample_observed_pair(&ground, 0.7, derive_seed(30, &[a0 as u64, t])).unwrap();
                let policy = if selected {
                    SeedPolicy::selected(a0, n, derive_seed(31, &[a0 as u64, t]))
                } else {
                    SeedPolicy::uniform(a0, derive_seed(31, &[a0 as u64, t]))
                };
                let seeds = select_seeds(&pair, &policy).unwrap();
                let state = run_pgm(
                    &pair,
                    &seeds,
                    4,
                    &PgmOptions {
                        pop: PopPolicy::Uniform { rng_seed: derive_seed(32, &[a0 as u64, t]) },
                    },
                )
                .unwrap();
                let c = classify_matches(&state, &pair);
                total += c.good + c.bad;
                bad_total += c.bad;
            }
            println!(
                "a0={a0:6}  mean matched = {:9.0}   mean bad = {:6.1}",
                total as f64 / trials as f64,
                bad_total as f64 / trials as f64
            );
        }
    }
}

fn crit7() {
    // few-seed percolation instance: n=1e5, beta=2.23, w_bar 6, s=0.9
    let n = 100_000usize;
    let spec = WeightedGraphSpec::new(n, 2.23, 6.0, 60).unwrap();
    let ground = generate_chung_lu(&spec).unwrap();
    println!("CL mean degree = {:.2}", ground.mean_degree());
    let trials = 10u64;
    let mut matchable_sum = 0usize;
    let mut hit = 0usize;
    for t in 0..trials {
        let pair = sample_observed_pair(&ground, 0.9, derive_seed(20, &[t])).unwrap();
        matchable_sum += matchable_count(&pair);
        let seeds =
            select_seeds(&pair, &SeedPolicy::selected(10, n, derive_seed(21, &[t]))).unwrap();
        let plan = build_slice_plan(n, 2.23, 6.0, 0.9, 0.5, 0.1, 1.0, SliceMode::EstimatedWeight, PlanMode::Exploratory).unwrap();
        let stages = StagePlan::simplified(&plan);
        let out = run_ddm(
            &pair,
            &seeds,
            &plan,
            &stages,
            &DdmOptions {
                pgm: PgmOptions { pop: PopPolicy::Uniform { rng_seed: derive_seed(22, &[t]) } },
                group_seeds: false,
            },
        )
        .unwrap();
        let c = classify_matches(&out.state, &pair);
        let frac = (c.good + c.bad) as f64 / n as f64;
        println!("trial {t}: matched = {} ({:.1}% of n)  bad = {}", c.good + c.bad, frac * 100.0, c.bad);
        if frac >= 0.30 {
            hit += 1;
        }
    }
    println!(
        "matchable mean = {:.1}% of n; trials reaching 30% = {hit}/{trials}",
        matchable_sum as f64 / trials as f64 / n as f64 * 100.0
    );
}
