//! `spb`: seeded certification runs for subspace perturbation bounds.
//!
//! Exit codes: 0 on success, 1 when a certified bound is violated (the
//! offending trial is dumped as a fixture), 2 on usage errors, 3 on runtime
//! failures.

mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use output::{emit, fixture_dir, serialize_rows, Format, GridRow, ResultRow};
use spb_core::bounds::{constants, m_kmm, m_ms, m_star};
use spb_core::ensemble::{generate_problem, EnsembleConfig, GeneratedProblem};
use spb_core::lab::{analyze_full, projection_path, sin2theta_check};
use spb_core::matrix::write_symmetric_text;
use spb_core::oscillator::oscillator_experiment;

#[derive(Parser)]
#[command(
    name = "spb",
    version,
    about = "Subspace perturbation bounds: constants, bound tables, and seeded certification ensembles"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the named threshold constants.
    Constants(ConstantsArgs),
    /// Tabulate the three estimating functions on a grid (plot-ready).
    Bounds(BoundsArgs),
    /// Run a seeded ensemble and certify every applicable bound.
    Verify(EnsembleArgs),
    /// Run seeded projection-path certifications along the coupling homotopy.
    Path(PathArgs),
    /// Run the truncated harmonic-oscillator parity experiment.
    Oscillator(OscillatorArgs),
    /// Sample the regime beyond the acute-angle threshold and report the
    /// observed angle distribution (no certification).
    Stress(StressArgs),
}

#[derive(Args)]
struct ConstantsArgs {
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct BoundsArgs {
    /// Number of grid intervals.
    #[arg(long, default_value_t = 200)]
    grid: usize,
    /// Right end of the grid (must stay below 1/2).
    #[arg(long, default_value_t = 0.499)]
    x_max: f64,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct EnsembleArgs {
    #[arg(long, default_value_t = 20240214)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    trials: u64,
    /// Inclusive dimension range `LO:HI`.
    #[arg(long, default_value = "2:50", value_parser = parse_usize_range)]
    dim_range: (usize, usize),
    /// Ratio range `LO:HI` inside (0, 1/2).
    #[arg(long, default_value = "0.01:0.49", value_parser = parse_f64_range)]
    x_range: (f64, f64),
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long)]
    output: Option<PathBuf>,
    /// Suppress the timestamp header and zero the wall-time column, making
    /// the output byte-stable.
    #[arg(long)]
    no_timestamp: bool,
}

#[derive(Args)]
struct PathArgs {
    #[command(flatten)]
    ensemble: EnsembleArgs,
    /// Number of partition points on [0, 1].
    #[arg(long, default_value_t = 64)]
    points: usize,
}

#[derive(Args)]
struct OscillatorArgs {
    /// Number of oscillator dimensions N.
    #[arg(long)]
    dims: usize,
    /// Truncation level.
    #[arg(long)]
    nmax: usize,
    /// Perturbation norm (must stay below 1/2).
    #[arg(long)]
    vnorm: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct StressArgs {
    #[arg(long, default_value_t = 20240214)]
    seed: u64,
    #[arg(long, default_value_t = 200)]
    trials: u64,
    #[arg(long, default_value = "2:30", value_parser = parse_usize_range)]
    dim_range: (usize, usize),
    /// Lower end of the sampled ratio range; defaults to the acute-angle
    /// threshold constant.
    #[arg(long)]
    x_min: Option<f64>,
    #[arg(long, default_value_t = 0.4999)]
    x_max: f64,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    no_timestamp: bool,
}

fn parse_usize_range(s: &str) -> Result<(usize, usize), String> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| format!("expected LO:HI, got {s:?}"))?;
    let lo = lo.parse().map_err(|e| format!("bad lower end: {e}"))?;
    let hi = hi.parse().map_err(|e| format!("bad upper end: {e}"))?;
    Ok((lo, hi))
}

fn parse_f64_range(s: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| format!("expected LO:HI, got {s:?}"))?;
    let lo = lo.parse().map_err(|e| format!("bad lower end: {e}"))?;
    let hi = hi.parse().map_err(|e| format!("bad upper end: {e}"))?;
    Ok((lo, hi))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Constants(args) => run_constants(args),
        Command::Bounds(args) => run_bounds(args),
        Command::Verify(args) => run_ensemble(args, None),
        Command::Path(args) => run_ensemble(args.ensemble, Some(args.points)),
        Command::Oscillator(args) => run_oscillator(args),
        Command::Stress(args) => run_stress(args),
    };
    match outcome {
        Ok(0) => ExitCode::SUCCESS,
        Ok(_) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(3)
        }
    }
}

fn usage_error(message: &str) -> ! {
    eprintln!("error: {message}");
    std::process::exit(2);
}

#[derive(Serialize)]
struct ConstantRow {
    name: &'static str,
    value: f64,
}

fn run_constants(args: ConstantsArgs) -> Result<u64> {
    let c = constants::<f64>();
    let rows = vec![
        ConstantRow {
            name: "c_star",
            value: c.c_star,
        },
        ConstantRow {
            name: "c_ms",
            value: c.c_ms,
        },
        ConstantRow {
            name: "c_kmm",
            value: c.c_kmm,
        },
        ConstantRow {
            name: "c_pi4",
            value: c.c_pi4,
        },
        ConstantRow {
            name: "c0",
            value: c.c0,
        },
        ConstantRow {
            name: "q",
            value: c.q,
        },
        ConstantRow {
            name: "kappa_1",
            value: spb_core::bounds::kappa::<f64>(1),
        },
        ConstantRow {
            name: "kappa_2",
            value: spb_core::bounds::kappa::<f64>(2),
        },
    ];
    let bytes = serialize_rows(&rows, args.format, None)?;
    emit(&args.output, &bytes)?;
    Ok(0)
}

fn run_bounds(args: BoundsArgs) -> Result<u64> {
    if args.grid == 0 {
        usage_error("--grid must be positive");
    }
    if !(args.x_max > 0.0 && args.x_max < 0.5) {
        usage_error("--x-max must lie in (0, 1/2)");
    }
    let c = constants::<f64>();
    let scale = 2.0 / std::f64::consts::PI;
    let mut rows = Vec::with_capacity(args.grid + 1);
    for i in 0..=args.grid {
        let x = args.x_max * i as f64 / args.grid as f64;
        let star = m_star(x).expect("grid stays inside [0, 1/2)");
        let ms = m_ms(x).expect("grid stays inside [0, 1/2)");
        let kmm = if x <= c.c_kmm {
            Some(m_kmm(x).unwrap())
        } else {
            None
        };
        rows.push(GridRow {
            x,
            m_star: star,
            m_ms: ms,
            m_kmm: kmm,
            scaled_m_star: scale * star,
            scaled_m_ms: scale * ms,
            scaled_m_kmm: kmm.map(|v| scale * v),
        });
    }
    let bytes = serialize_rows(&rows, args.format, None)?;
    emit(&args.output, &bytes)?;
    Ok(0)
}

fn ensemble_config(seed: u64, dim_range: (usize, usize), x_range: (f64, f64)) -> EnsembleConfig {
    let config = EnsembleConfig {
        master_seed: seed,
        dim_range,
        x_range,
    };
    if let Err(e) = config.validate() {
        usage_error(&e.to_string());
    }
    config
}

fn run_ensemble(args: EnsembleArgs, path_points: Option<usize>) -> Result<u64> {
    let config = ensemble_config(args.seed, args.dim_range, args.x_range);
    if let Some(points) = path_points {
        if points < 2 {
            usage_error("--points must be at least 2");
        }
    }
    let mut rows = Vec::with_capacity(args.trials as usize);
    let mut violations = 0u64;
    for trial in 0..args.trials {
        let started = Instant::now();
        let generated = generate_problem::<f64>(&config, trial)
            .with_context(|| format!("generating trial {trial}"))?;
        let analysis =
            analyze_full(&generated.problem).with_context(|| format!("analyzing trial {trial}"))?;
        let sin2 = sin2theta_check(&generated.problem, &analysis.record);
        let pass_path = match path_points {
            Some(points) => {
                let partition: Vec<f64> = (0..points)
                    .map(|k| k as f64 / (points - 1) as f64)
                    .collect();
                let report = projection_path(&generated.problem, &partition)
                    .with_context(|| format!("projection path for trial {trial}"))?;
                Some(report.all_ok())
            }
            None => None,
        };
        let wall_ms = if args.no_timestamp {
            0.0
        } else {
            started.elapsed().as_secs_f64() * 1e3
        };
        let mut row = ResultRow::from_record(
            trial,
            generated.trial_seed,
            &analysis.record,
            pass_path,
            wall_ms,
        );
        row.pass_all = row.pass_all
            && sin2.pass_apriori
            && sin2.pass_posteriori
            && sin2.pass_refined.unwrap_or(true);
        if !row.pass_all {
            violations += 1;
            dump_fixture(&args.output, trial, &generated)?;
            eprintln!(
                "violation in trial {trial}: theta = {}, m_star = {}",
                row.theta, row.m_star
            );
        }
        rows.push(row);
    }
    let header = if args.no_timestamp {
        None
    } else {
        Some(timestamp_header())
    };
    let bytes = serialize_rows(&rows, args.format, header.as_deref())?;
    emit(&args.output, &bytes)?;
    Ok(violations)
}

fn timestamp_header() -> String {
    let secs = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    format!("generated-unix {secs}")
}

fn dump_fixture(
    output: &Option<PathBuf>,
    trial: u64,
    generated: &GeneratedProblem<f64>,
) -> Result<()> {
    let dir = fixture_dir(output);
    std::fs::create_dir_all(&dir)?;
    std::fs::write(
        dir.join(format!("violation_trial_{trial}_A.txt")),
        write_symmetric_text(&generated.problem.a),
    )?;
    std::fs::write(
        dir.join(format!("violation_trial_{trial}_V.txt")),
        write_symmetric_text(&generated.problem.v),
    )?;
    let meta = serde_json::json!({
        "trial": trial,
        "seed": generated.trial_seed,
        "dim": generated.dim,
        "sigma": generated.problem.sigma.intervals(),
        "d": generated.problem.d,
        "vnorm": generated.problem.vnorm,
        "x": generated.problem.x,
    });
    std::fs::write(
        dir.join(format!("violation_trial_{trial}_meta.json")),
        serde_json::to_vec_pretty(&meta)?,
    )?;
    Ok(())
}

fn run_oscillator(args: OscillatorArgs) -> Result<u64> {
    if !(args.vnorm >= 0.0 && args.vnorm < 0.5) {
        usage_error("--vnorm must lie in [0, 1/2)");
    }
    let experiment = oscillator_experiment::<f64>(args.dims, args.nmax, args.vnorm, args.seed)?;
    let record = &experiment.record;
    eprintln!(
        "oscillator N={} n_max={} dim={} vnorm={} seed={}",
        args.dims, args.nmax, record.dim, args.vnorm, args.seed
    );
    eprintln!(
        "theta = {:.12}, m_star = {:.12}, pass = {}",
        record.theta,
        record.bound_mstar,
        record.pass_all()
    );
    eprintln!(
        "complement angle match: {} (theta_perp = {:.12})",
        experiment.complement_matches, experiment.complement_theta
    );
    eprintln!(
        "localization: counts {} / neighborhoods {}",
        if experiment.localization.counts_ok {
            "exact"
        } else {
            "MISMATCH"
        },
        if experiment.localization.all_localized {
            "ok"
        } else {
            "VIOLATED"
        },
    );
    let row = ResultRow::from_record(0, args.seed, record, None, 0.0);
    let bytes = serialize_rows(&[row], args.format, None)?;
    emit(&args.output, &bytes)?;
    let ok = record.pass_all()
        && experiment.complement_matches
        && experiment.localization.counts_ok
        && experiment.localization.all_localized;
    Ok(if ok { 0 } else { 1 })
}

fn run_stress(args: StressArgs) -> Result<u64> {
    let x_min = args.x_min.unwrap_or_else(|| constants::<f64>().c_star);
    let config = ensemble_config(args.seed, args.dim_range, (x_min, args.x_max));
    let mut rows = Vec::with_capacity(args.trials as usize);
    let mut thetas = Vec::with_capacity(args.trials as usize);
    let mut flat = 0usize;
    for trial in 0..args.trials {
        let started = Instant::now();
        let generated = generate_problem::<f64>(&config, trial)
            .with_context(|| format!("generating trial {trial}"))?;
        let analysis = analyze_full(&generated.problem)?;
        let wall_ms = if args.no_timestamp {
            0.0
        } else {
            started.elapsed().as_secs_f64() * 1e3
        };
        thetas.push(analysis.record.theta);
        if !analysis.record.acute {
            flat += 1;
        }
        rows.push(ResultRow::from_record(
            trial,
            generated.trial_seed,
            &analysis.record,
            None,
            wall_ms,
        ));
    }
    let header = if args.no_timestamp {
        None
    } else {
        Some(timestamp_header())
    };
    let bytes = serialize_rows(&rows, args.format, header.as_deref())?;
    emit(&args.output, &bytes)?;

    // distribution summary; observational only, never a failure
    thetas.sort_by(|a, b| a.partial_cmp(b).unwrap());
    if !thetas.is_empty() {
        let quantile = |q: f64| thetas[((thetas.len() - 1) as f64 * q).round() as usize];
        eprintln!(
            "stress: {} trials, x in [{:.6}, {:.6}]",
            args.trials, x_min, args.x_max
        );
        eprintln!(
            "theta quantiles: min {:.6}, p50 {:.6}, p90 {:.6}, max {:.6} (pi/2 = {:.6})",
            thetas[0],
            quantile(0.5),
            quantile(0.9),
            thetas[thetas.len() - 1],
            std::f64::consts::FRAC_PI_2
        );
        eprintln!("right-angle pairs observed: {flat}");
    }
    Ok(0)
}
