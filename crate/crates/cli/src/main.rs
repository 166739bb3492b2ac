//! `qwalk` — drives the torus quantum-walk search simulator and its
//! verification machinery from the command line.
//!
//! Subcommands:
//!
//! - `simulate`    one search run: distance-profile CSV plus a JSON result
//! - `sweep`       the pipeline across grid sizes: scaling CSV
//! - `analytic`    lattice-sum tables and asymptotic error sweeps: CSV
//! - `spectrum`    eigenpair verification and final-state prediction: JSON
//! - `postprocess` sampled end-to-end success trials: CSV
//! - `selftest`    the small-grid oracle suite; exit code 0 when clean
//!
//! Every output file embeds its schema version and producing config. For a
//! fixed config and seed, outputs are byte-identical across runs and worker
//! counts.

mod output;
mod selftest;

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use qwalk_core::analytic::{
    cosine_harmonic_sum, eval_f, eval_f_prime, eval_g, f_prime_log_error, f_quadratic_gap_scaled,
    g_square_sum_ratio, scaled_cosine_harmonic_sum, up_amplitude_correspondence, FTable,
};
use qwalk_core::search::{
    classical_postprocess, neighborhood_probability_to_nearest, run_search, scaling_sweep,
    trial_rng, DistanceMetric, MeasurementSampler, RadiusRule, StoppingRule,
};
use qwalk_core::spectral::{
    eigenphase_multiset_gap, predict_final_state, verify_eigenpairs, EigenVerificationReport,
    DENSE_MAX_SIDE,
};
use qwalk_core::{GridGeometry, MarkedSet, Site};

#[derive(Parser)]
#[command(name = "qwalk", version, about = "Quantum walk search on the 2D torus")]
struct Cli {
    /// Worker threads for data-parallel kernels (default: QWALK_WORKERS or
    /// all cores). Results never depend on this.
    #[arg(long, global = true)]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one search and write its distance profile and result summary.
    Simulate(SimulateArgs),
    /// Run the full pipeline across grid sizes and tabulate the scaling.
    Sweep(SweepArgs),
    /// Lattice-sum tables and asymptotic error sweeps.
    #[command(subcommand)]
    Analytic(AnalyticCommand),
    /// Verify eigenpairs and the final-state prediction.
    Spectrum(SpectrumArgs),
    /// Sample measurements and classically check their neighborhoods.
    Postprocess(PostprocessArgs),
    /// Run the small-grid oracle suite.
    Selftest,
}

#[derive(Args)]
struct SimulateArgs {
    /// Grid side length (even, >= 2).
    #[arg(long)]
    n: usize,
    /// Marked site as "x,y"; repeat for several sites.
    #[arg(long = "marked", value_parser = parse_site, default_values = ["0,0"])]
    marked: Vec<Site>,
    /// Stopping rule: max-marked-prob | min-overlap | fixed:T.
    #[arg(long, default_value = "max-marked-prob", value_parser = parse_strategy)]
    strategy: StoppingRule,
    /// Neighborhood rule: fourth-root | eps:E | step-budget.
    #[arg(long, default_value = "fourth-root", value_parser = parse_radius_rule)]
    radius: RadiusRule,
    /// Output directory for profile_n{n}.csv and result_n{n}.json.
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    /// Comma-separated grid sides, e.g. 64,128,256.
    #[arg(long, value_parser = parse_sizes)]
    sizes: std::vec::Vec<usize>,
    #[arg(long, default_value = "fourth-root", value_parser = parse_radius_rule)]
    radius: RadiusRule,
    /// Sampled end-to-end trials per size (0 disables the success column).
    #[arg(long, default_value_t = 0)]
    trials: usize,
    /// Master seed; per-trial generators are derived from (seed, trial).
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, default_value = "out/sweep.csv")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum AnalyticCommand {
    /// Tabulate f, f', and g on a block of offsets.
    Table(AnalyticTableArgs),
    /// Per-size error quantities for the asymptotic statements.
    Claims(AnalyticClaimsArgs),
}

#[derive(Args)]
struct AnalyticTableArgs {
    #[arg(long)]
    n: usize,
    /// Offsets 0..max-offset in each coordinate.
    #[arg(long, default_value_t = 16)]
    max_offset: usize,
    #[arg(long, default_value = "out/analytic_table.csv")]
    out: PathBuf,
}

#[derive(Args)]
struct AnalyticClaimsArgs {
    #[arg(long, value_parser = parse_sizes)]
    sizes: std::vec::Vec<usize>,
    /// Exponent for the logarithmic-approximation offsets (j = n^eps).
    #[arg(long, default_value_t = 0.5)]
    eps: f64,
    /// Aspect ratio j' = beta·j.
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    #[arg(long, default_value = "out/analytic_claims.csv")]
    out: PathBuf,
}

#[derive(Args)]
struct SpectrumArgs {
    #[arg(long)]
    n: usize,
    /// Also run the search and report the prediction/simulation overlap.
    #[arg(long, default_value_t = false)]
    compare_simulation: bool,
    /// Directory for cached f-tables.
    #[arg(long, default_value = "out/cache")]
    cache_dir: PathBuf,
    #[arg(long, default_value = "out/spectrum.json")]
    out: PathBuf,
}

#[derive(Args)]
struct PostprocessArgs {
    #[arg(long)]
    n: usize,
    #[arg(long = "marked", value_parser = parse_site, default_values = ["0,0"])]
    marked: Vec<Site>,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, default_value = "fourth-root", value_parser = parse_radius_rule)]
    radius: RadiusRule,
    #[arg(long, default_value = "out/postprocess.csv")]
    out: PathBuf,
}

fn parse_site(s: &str) -> std::result::Result<Site, String> {
    let (x, y) = s
        .split_once(',')
        .ok_or_else(|| format!("expected \"x,y\", got {s:?}"))?;
    let x = x.trim().parse::<usize>().map_err(|e| e.to_string())?;
    let y = y.trim().parse::<usize>().map_err(|e| e.to_string())?;
    Ok(Site::new(x, y))
}

fn parse_sizes(s: &str) -> std::result::Result<Vec<usize>, String> {
    s.split(',')
        .map(|part| part.trim().parse::<usize>().map_err(|e| e.to_string()))
        .collect()
}

fn parse_strategy(s: &str) -> std::result::Result<StoppingRule, String> {
    match s {
        "max-marked-prob" => Ok(StoppingRule::MaxMarkedProbability),
        "min-overlap" => Ok(StoppingRule::MinOverlap),
        _ => match s.strip_prefix("fixed:") {
            Some(t) => t
                .parse::<usize>()
                .map(StoppingRule::FixedSteps)
                .map_err(|e| e.to_string()),
            None => Err(format!(
                "unknown strategy {s:?}; use max-marked-prob, min-overlap, or fixed:T"
            )),
        },
    }
}

fn parse_radius_rule(s: &str) -> std::result::Result<RadiusRule, String> {
    match s {
        "fourth-root" => Ok(RadiusRule::FourthRoot),
        "step-budget" => Ok(RadiusRule::StepBudget),
        _ => match s.strip_prefix("eps:") {
            Some(e) => {
                let eps = e.parse::<f64>().map_err(|e| e.to_string())?;
                if !(0.0..0.5).contains(&eps) {
                    return Err(format!("epsilon must be in [0, 0.5), got {eps}"));
                }
                Ok(RadiusRule::EpsilonBox(eps))
            }
            None => Err(format!(
                "unknown radius rule {s:?}; use fourth-root, eps:E, or step-budget"
            )),
        },
    }
}

fn init_workers(workers: Option<usize>) -> Result<()> {
    let workers = match workers {
        Some(w) => Some(w),
        None => match std::env::var("QWALK_WORKERS") {
            Ok(v) => Some(v.parse::<usize>().context("parsing QWALK_WORKERS")?),
            Err(_) => None,
        },
    };
    if let Some(w) = workers {
        if w == 0 {
            bail!("worker count must be positive");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build_global()
            .context("initializing worker pool")?;
    }
    Ok(())
}

fn main() {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            1
        }
    };
    std::process::exit(code);
}

fn run(cli: Cli) -> Result<i32> {
    init_workers(cli.workers)?;
    match cli.command {
        Command::Simulate(args) => cmd_simulate(args)?,
        Command::Sweep(args) => cmd_sweep(args)?,
        Command::Analytic(AnalyticCommand::Table(args)) => cmd_analytic_table(args)?,
        Command::Analytic(AnalyticCommand::Claims(args)) => cmd_analytic_claims(args)?,
        Command::Spectrum(args) => cmd_spectrum(args)?,
        Command::Postprocess(args) => cmd_postprocess(args)?,
        Command::Selftest => {
            let failures = selftest::run();
            if failures > 0 {
                eprintln!("{failures} check(s) failed");
                return Ok(1);
            }
            println!("all checks passed");
        }
    }
    Ok(0)
}

#[derive(Serialize)]
struct SimulateConfig {
    n: usize,
    marked: Vec<Site>,
    strategy: StoppingRule,
    radius_rule: RadiusRule,
    radius: usize,
}

#[derive(Serialize)]
struct NeighborhoodSummary {
    rule: RadiusRule,
    metric: DistanceMetric,
    radius: usize,
    probability: f64,
}

#[derive(Serialize)]
struct SimulateReport {
    schema: &'static str,
    config: SimulateConfig,
    t_max: usize,
    t_star: usize,
    pr0: f64,
    pr0_ln_n: f64,
    neighborhood: NeighborhoodSummary,
    final_norm_error: f64,
    overlap_trace: Vec<f64>,
    marked_probability_trace: Vec<f64>,
}

fn cmd_simulate(args: SimulateArgs) -> Result<()> {
    let geom = GridGeometry::new(args.n)?;
    let marked = MarkedSet::new(&geom, args.marked.iter().copied())?;
    let result = run_search(geom, &marked, args.strategy)?;
    let radius = args.radius.radius(geom);
    let metric = args.radius.metric();
    let neighborhood_prob =
        neighborhood_probability_to_nearest(&result.final_state, &marked, radius, metric)?;

    let config = SimulateConfig {
        n: args.n,
        marked: marked.sites().to_vec(),
        strategy: args.strategy,
        radius_rule: args.radius,
        radius,
    };

    let profile_rows: Vec<String> = (0..=result.profile.max_radius())
        .map(|r| {
            format!(
                "{},{},{},{}",
                r,
                result.profile.site_count[r],
                result.profile.total_prob[r],
                result.profile.mean_prob[r]
            )
        })
        .collect();
    let profile_path = args.out_dir.join(format!("profile_n{}.csv", args.n));
    output::write_csv(
        &profile_path,
        "qwalk.profile.v1",
        &config,
        "radius,site_count,total_prob,mean_prob",
        &profile_rows,
    )?;

    let pr0 = result.marked_probability();
    let report = SimulateReport {
        schema: "qwalk.simulate.v1",
        t_max: result.t_max,
        t_star: result.t_star,
        pr0,
        pr0_ln_n: pr0 * (geom.num_sites() as f64).ln(),
        neighborhood: NeighborhoodSummary {
            rule: args.radius,
            metric,
            radius,
            probability: neighborhood_prob,
        },
        final_norm_error: (result.final_state.norm() - 1.0).abs(),
        overlap_trace: result.overlap_trace,
        marked_probability_trace: result.marked_probability_trace,
        config,
    };
    let json_path = args.out_dir.join(format!("result_n{}.json", args.n));
    output::write_json(&json_path, &report)?;

    eprintln!(
        "n={} t*={} pr0={:.6} neighborhood(r={})={:.6}",
        args.n, report.t_star, report.pr0, radius, neighborhood_prob
    );
    eprintln!(
        "wrote {} and {}",
        profile_path.display(),
        json_path.display()
    );
    Ok(())
}

#[derive(Serialize)]
struct SweepConfig {
    sizes: Vec<usize>,
    radius_rule: RadiusRule,
    trials: usize,
    seed: u64,
}

fn cmd_sweep(args: SweepArgs) -> Result<()> {
    let rows = scaling_sweep(&args.sizes, args.radius, args.trials, args.seed)?;
    let with_success = args.trials > 0;
    let header = if with_success {
        "n,t_star,pr0,nbhd_prob,pr0_ln_n,success_rate"
    } else {
        "n,t_star,pr0,nbhd_prob,pr0_ln_n"
    };
    let lines: Vec<String> = rows
        .iter()
        .map(|row| {
            let mut line = format!(
                "{},{},{},{},{}",
                row.n, row.t_star, row.pr0, row.neighborhood_prob, row.pr0_ln_n
            );
            if let Some(rate) = row.success_rate {
                line.push(',');
                line.push_str(&rate.to_string());
            }
            line
        })
        .collect();
    let config = SweepConfig {
        sizes: args.sizes.clone(),
        radius_rule: args.radius,
        trials: args.trials,
        seed: args.seed,
    };
    output::write_csv(&args.out, "qwalk.sweep.v1", &config, header, &lines)?;
    eprintln!("wrote {} ({} rows)", args.out.display(), lines.len());
    Ok(())
}

#[derive(Serialize)]
struct AnalyticTableConfig {
    n: usize,
    max_offset: usize,
}

fn cmd_analytic_table(args: AnalyticTableArgs) -> Result<()> {
    let geom = GridGeometry::new(args.n)?;
    let m = args.max_offset.min(args.n);
    let mut rows = Vec::with_capacity(m * m);
    for j in 0..m as i64 {
        for jp in 0..m as i64 {
            rows.push(format!(
                "{},{},{},{},{}",
                j,
                jp,
                eval_f(geom, j, jp),
                eval_f_prime(geom, j, jp),
                eval_g(geom, j, jp)
            ));
        }
    }
    let config = AnalyticTableConfig {
        n: args.n,
        max_offset: m,
    };
    output::write_csv(
        &args.out,
        "qwalk.analytic-table.v1",
        &config,
        "j,jp,f,f_prime,g",
        &rows,
    )?;
    eprintln!("wrote {} ({} rows)", args.out.display(), rows.len());
    Ok(())
}

#[derive(Serialize)]
struct AnalyticClaimsConfig {
    sizes: Vec<usize>,
    eps: f64,
    beta: f64,
}

fn cmd_analytic_claims(args: AnalyticClaimsArgs) -> Result<()> {
    let mut rows = Vec::new();
    for &n in &args.sizes {
        let geom = GridGeometry::new(n)?;
        let half = (n / 2) as i64;
        let root = (n as f64).sqrt().round() as i64;
        let offsets = [
            (0, 0),
            (1, 0),
            (1, 1),
            (2, 1),
            (root, root),
            (half / 2, 0),
            (half / 2, half / 2),
            (half - 1, half - 1),
        ];
        let quad_gap_max = offsets
            .iter()
            .map(|&(j, jp)| f_quadratic_gap_scaled(geom, j, jp))
            .fold(0.0f64, f64::max);
        let ln_n = (n as f64).ln();
        let m = (n as f64).sqrt().ceil() as usize;
        rows.push(format!(
            "{},{},{},{},{},{},{}",
            n,
            quad_gap_max,
            f_prime_log_error(geom, args.eps, args.beta),
            f_prime_log_error(geom, args.eps, 0.5),
            cosine_harmonic_sum(n) - ln_n,
            scaled_cosine_harmonic_sum(n, args.eps) - (1.0 - args.eps) * ln_n,
            g_square_sum_ratio(geom, m),
        ));
    }
    let config = AnalyticClaimsConfig {
        sizes: args.sizes.clone(),
        eps: args.eps,
        beta: args.beta,
    };
    output::write_csv(
        &args.out,
        "qwalk.analytic-claims.v1",
        &config,
        "n,quad_gap_max,fprime_log_err,fprime_log_err_half_beta,harmonic_gap,scaled_harmonic_gap,g_square_ratio",
        &rows,
    )?;
    eprintln!("wrote {} ({} rows)", args.out.display(), rows.len());
    Ok(())
}

#[derive(Serialize)]
struct SpectrumConfig {
    n: usize,
    compare_simulation: bool,
}

#[derive(Serialize)]
struct DenseSummary {
    checked: bool,
    eigenphase_multiset_gap: Option<f64>,
}

#[derive(Serialize)]
struct PredictionSummary {
    norm: f64,
    norm_sq_over_ln_n: f64,
    max_imag: f64,
    /// Largest per-site relative error of the Up-plane against the Green-sum
    /// difference identity; only computed when an f-table is affordable.
    up_plane_identity_max_rel_err: Option<f64>,
}

#[derive(Serialize)]
struct SimulationComparison {
    t_star: usize,
    overlap_prediction_vs_simulated: f64,
    correlation: f64,
    fitted_scale_normalized: f64,
    inequality_ratio: f64,
}

#[derive(Serialize)]
struct SpectrumReport {
    schema: &'static str,
    config: SpectrumConfig,
    eigen: EigenVerificationReport,
    dense: DenseSummary,
    prediction: PredictionSummary,
    simulation: Option<SimulationComparison>,
}

/// f-tables cost O(n⁴); beyond this side the identity check is skipped.
const SPECTRUM_TABLE_MAX_SIDE: usize = 256;

fn cmd_spectrum(args: SpectrumArgs) -> Result<()> {
    let geom = GridGeometry::new(args.n)?;
    let eigen = verify_eigenpairs(geom)?;
    let dense = if args.n <= DENSE_MAX_SIDE {
        DenseSummary {
            checked: true,
            eigenphase_multiset_gap: Some(eigenphase_multiset_gap(geom)?),
        }
    } else {
        DenseSummary {
            checked: false,
            eigenphase_multiset_gap: None,
        }
    };

    let origin = Site::new(0, 0);
    let prediction = predict_final_state(geom, origin)?;
    let table = if args.n <= SPECTRUM_TABLE_MAX_SIDE {
        Some(FTable::load_or_compute(geom, &args.cache_dir)?)
    } else {
        None
    };
    let up_plane_identity_max_rel_err = table.as_ref().map(|table| {
        let n = args.n;
        let sites = geom.num_sites() as f64;
        let plane = prediction.up_plane();
        let scale = plane.iter().map(|a| a.norm()).fold(0.0f64, f64::max);
        let mut max_rel = 0.0f64;
        for y in 0..n {
            for x in 0..n {
                if (x, y) == (0, 0) {
                    continue;
                }
                let expected =
                    (table.value(y as i64 - 1, x as i64) - table.value(y as i64, x as i64)) / sites
                        - 1.0 / (2.0 * sites);
                let got = plane[y * n + x].re;
                let rel = (got - expected).abs() / got.abs().max(1e-9 * scale);
                max_rel = max_rel.max(rel);
            }
        }
        max_rel
    });
    let norm_sq = prediction.norm() * prediction.norm();
    let prediction_summary = PredictionSummary {
        norm: prediction.norm(),
        norm_sq_over_ln_n: norm_sq / (geom.num_sites() as f64).ln(),
        max_imag: prediction.max_imag(),
        up_plane_identity_max_rel_err,
    };

    let simulation = if args.compare_simulation {
        let marked = MarkedSet::single(&geom, origin)?;
        let result = run_search(geom, &marked, StoppingRule::MaxMarkedProbability)?;
        let overlap = prediction.normalized().overlap(&result.final_state).norm();
        let table = table
            .as_ref()
            .context("prediction/simulation comparison needs an f-table; side too large")?;
        let report = up_amplitude_correspondence(&result.final_state, &marked, table, args.n / 4)?;
        Some(SimulationComparison {
            t_star: result.t_star,
            overlap_prediction_vs_simulated: overlap,
            correlation: report.correlation,
            fitted_scale_normalized: report.fitted_scale_normalized,
            inequality_ratio: report.inequality_ratio(),
        })
    } else {
        None
    };

    let report = SpectrumReport {
        schema: "qwalk.spectrum.v1",
        config: SpectrumConfig {
            n: args.n,
            compare_simulation: args.compare_simulation,
        },
        eigen,
        dense,
        prediction: prediction_summary,
        simulation,
    };
    output::write_json(&args.out, &report)?;
    eprintln!("wrote {}", args.out.display());
    Ok(())
}

#[derive(Serialize)]
struct PostprocessConfig {
    n: usize,
    marked: Vec<Site>,
    trials: usize,
    seed: u64,
    radius_rule: RadiusRule,
    radius: usize,
}

fn cmd_postprocess(args: PostprocessArgs) -> Result<()> {
    let geom = GridGeometry::new(args.n)?;
    let marked = MarkedSet::new(&geom, args.marked.iter().copied())?;
    let result = run_search(geom, &marked, StoppingRule::MaxMarkedProbability)?;
    let radius = args.radius.radius(geom);
    let sampler = MeasurementSampler::new(&result.final_state);

    let mut successes = 0usize;
    let rows: Vec<String> = (0..args.trials as u64)
        .map(|trial| {
            let mut rng = trial_rng(args.seed, trial);
            let (outcome, _) = sampler.sample(&mut rng);
            let (found, checked) = classical_postprocess(geom, outcome, &marked, radius);
            successes += usize::from(found);
            format!(
                "{},{},{},{},{}",
                trial,
                outcome.x,
                outcome.y,
                u8::from(found),
                checked
            )
        })
        .collect();

    let config = PostprocessConfig {
        n: args.n,
        marked: marked.sites().to_vec(),
        trials: args.trials,
        seed: args.seed,
        radius_rule: args.radius,
        radius,
    };
    output::write_csv(
        &args.out,
        "qwalk.postprocess.v1",
        &config,
        "trial,outcome_x,outcome_y,found,sites_checked",
        &rows,
    )?;

    let exact = neighborhood_probability_to_nearest(
        &result.final_state,
        &marked,
        radius,
        DistanceMetric::L1,
    )?;
    if args.trials > 0 {
        eprintln!(
            "success rate {}/{} = {:.4} (exact neighborhood probability {:.4})",
            successes,
            args.trials,
            successes as f64 / args.trials as f64,
            exact
        );
    }
    eprintln!("wrote {}", args.out.display());
    Ok(())
}
