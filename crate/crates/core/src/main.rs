//! Command-line driver: `simulate`, `compare`, `series`, and
//! `probe-stationarity` over the solver library, with config-file/preset
//! resolution and the documented exit codes (0 success, 2 config error,
//! 3 numerical failure, 4 breakdown-abort).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use rampdyn::config::{ExperimentConfig, SolverKind};
use rampdyn::coupled::{BasisPolicy, CoefficientState};
use rampdyn::diagnostics;
use rampdyn::error::Error;
use rampdyn::experiment::{
    compare_solvers, oracle_post_ramp_populations, run_experiment, series_report, write_atomic,
    RunOutcome,
};
use rampdyn::rk4::{integrate, IntegrationSettings};

const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;
const EXIT_BREAKDOWN_ABORT: u8 = 4;

#[derive(Parser)]
#[command(
    name = "rampdyn",
    version,
    about = "Time-ramped oscillator dynamics: expansion solvers, reference oracles, and series probes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one solver and emit the diagnostics time series as CSV.
    Simulate(SimulateArgs),
    /// Run two solvers on the same physics and report population differences.
    Compare(CompareArgs),
    /// Growth profile of the differentiated model series and norm tails.
    Series(SeriesArgs),
    /// Population drift in the post-ramp eigenbasis for t ≥ T.
    ProbeStationarity(ProbeArgs),
}

/// Flags shared by config resolution; every science parameter mirrors a
/// config-file key, and explicit flags override preset/file values.
#[derive(Args, Clone)]
struct ConfigArgs {
    /// Named preset: fig1, fig2, ramp-down, oracle-check.
    #[arg(long)]
    preset: Option<String>,
    /// Config file ([schedule]/[model]/[solver]/[output] sections).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Solver: growing, fixed, grid, gaussian.
    #[arg(long)]
    solver: Option<String>,
    /// Ramp variant: ramp-up, ramp-down.
    #[arg(long)]
    variant: Option<String>,
    /// Ramp slope η.
    #[arg(long)]
    eta: Option<f64>,
    /// Ramp end time T.
    #[arg(long)]
    ramp_end: Option<f64>,
    /// Integrator step h.
    #[arg(long)]
    step: Option<f64>,
    /// End time of the run.
    #[arg(long)]
    t_end: Option<f64>,
    /// Mode count for the fixed-truncation solver.
    #[arg(long)]
    fixed_size: Option<usize>,
    /// Record every N-th step.
    #[arg(long)]
    cadence: Option<usize>,
    /// |norm − 1| level that counts as breakdown in the report.
    #[arg(long)]
    breakdown_threshold: Option<f64>,
    /// Norm ceiling that aborts a run.
    #[arg(long)]
    norm_ceiling: Option<f64>,
    /// Half-width of the spatial grid.
    #[arg(long)]
    grid_half_width: Option<f64>,
    /// Number of spatial grid points.
    #[arg(long)]
    grid_points: Option<usize>,
    /// Time step of the grid propagator.
    #[arg(long)]
    grid_dt: Option<f64>,
    /// Output CSV path (manifest written alongside).
    #[arg(long, short)]
    output: Option<PathBuf>,
}

impl ConfigArgs {
    fn resolve(&self) -> Result<ExperimentConfig, Error> {
        if self.preset.is_some() && self.config.is_some() {
            return Err(Error::Config(
                "--preset and --config are mutually exclusive".into(),
            ));
        }
        let mut c = if let Some(name) = &self.preset {
            ExperimentConfig::preset(name)?
        } else if let Some(path) = &self.config {
            ExperimentConfig::from_file(path)?
        } else {
            ExperimentConfig::default()
        };
        if let Some(s) = &self.solver {
            c.solver = SolverKind::parse(s)?;
        }
        if let Some(v) = &self.variant {
            if v != "ramp-up" && v != "ramp-down" {
                return Err(Error::Config(format!(
                    "variant must be ramp-up or ramp-down, got '{v}'"
                )));
            }
            c.variant = v.clone();
        }
        macro_rules! take {
            ($field:ident) => {
                if let Some(v) = self.$field {
                    c.$field = v;
                }
            };
        }
        take!(eta);
        take!(ramp_end);
        take!(step);
        take!(t_end);
        take!(fixed_size);
        take!(cadence);
        take!(breakdown_threshold);
        take!(norm_ceiling);
        take!(grid_half_width);
        take!(grid_points);
        take!(grid_dt);
        if let Some(out) = &self.output {
            c.output = Some(out.to_string_lossy().into_owned());
        }
        c.validate()?;
        Ok(c)
    }
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    config: ConfigArgs,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    config: ConfigArgs,
    /// Solver for the second run (first run uses --solver / preset).
    #[arg(long, default_value = "grid")]
    solver_b: String,
    /// Spacing of the shared sample times.
    #[arg(long, default_value_t = 0.1)]
    sample_spacing: f64,
    /// Highest mode index compared.
    #[arg(long, default_value_t = 100)]
    modes: usize,
    /// Per-population difference that counts as disagreement.
    #[arg(long, default_value_t = 1e-3)]
    threshold: f64,
    /// Where to write the JSON report (stdout when omitted).
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct SeriesArgs {
    /// Truncations to profile, comma-separated.
    #[arg(long, default_value = "4,16,64,256")]
    truncations: String,
    /// Supremum window [0, x_max].
    #[arg(long, default_value_t = 8.0)]
    window: f64,
    /// Truncations at which to tabulate the norm tail, comma-separated.
    #[arg(long, default_value = "100,1000,10000")]
    tails: String,
    /// Output CSV path (stdout when omitted).
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ProbeArgs {
    #[command(flatten)]
    config: ConfigArgs,
    /// First sample time (must be ≥ the ramp end).
    #[arg(long, default_value_t = 1.0)]
    t_start: f64,
    /// Number of equally spaced samples in [t_start, t_end].
    #[arg(long, default_value_t = 5)]
    samples: usize,
    /// Fail (exit 3) when the drift exceeds this value.
    #[arg(long)]
    tolerance: Option<f64>,
}

fn error_exit(err: &Error) -> ExitCode {
    let code = match err {
        Error::Config(_) | Error::InvalidParameter(_) => EXIT_CONFIG,
        _ => EXIT_NUMERICAL,
    };
    eprintln!("error: {err}");
    ExitCode::from(code)
}

fn simulate(args: &SimulateArgs) -> ExitCode {
    let config = match args.config.resolve() {
        Ok(c) => c,
        Err(e) => return error_exit(&e),
    };
    match run_experiment(&config) {
        Ok(summary) => {
            let last = summary.records.last().expect("at least one record");
            println!(
                "solver={} records={} t_final={:.6} norm={:.6e} energy={:.6e}",
                config.solver.name(),
                summary.records.len(),
                last.time,
                last.norm,
                last.energy
            );
            if let Some(b) = &summary.breakdown {
                match b.breakdown_time {
                    Some(t) => println!(
                        "breakdown: |norm - 1| > {} first at t = {:.6} (one period = {:.2})",
                        b.threshold, t, b.oscillation_period
                    ),
                    None => println!("breakdown: none at threshold {}", b.threshold),
                }
            }
            if let Some(p) = &summary.csv_path {
                println!("csv: {}", p.display());
            }
            match summary.outcome {
                RunOutcome::Completed => ExitCode::SUCCESS,
                RunOutcome::BreakdownAbort { t, norm } => {
                    eprintln!("aborted: norm {norm:.3e} crossed the ceiling at t = {t:.6}");
                    ExitCode::from(EXIT_BREAKDOWN_ABORT)
                }
            }
        }
        Err(e) => error_exit(&e),
    }
}

fn compare(args: &CompareArgs) -> ExitCode {
    let config_a = match args.config.resolve() {
        Ok(c) => c,
        Err(e) => return error_exit(&e),
    };
    let mut config_b = config_a.clone();
    config_b.solver = match SolverKind::parse(&args.solver_b) {
        Ok(s) => s,
        Err(e) => return error_exit(&e),
    };
    if !(args.sample_spacing > 0.0) {
        return error_exit(&Error::Config("sample spacing must be positive".into()));
    }
    let mut times = Vec::new();
    let mut t = args.sample_spacing;
    while t <= config_a.t_end + 1e-12 {
        times.push(t);
        t += args.sample_spacing;
    }
    match compare_solvers(&config_a, &config_b, &times, args.modes, args.threshold) {
        Ok(report) => {
            let body = match serde_json::to_string_pretty(&report) {
                Ok(b) => b,
                Err(e) => {
                    return error_exit(&Error::Config(format!("report serialization: {e}")))
                }
            };
            if let Some(path) = &args.report {
                if let Err(e) = write_atomic(path, &body) {
                    return error_exit(&e);
                }
                println!(
                    "compared {} vs {}: max population difference {:.3e} ({} times); report: {}",
                    report.solver_a,
                    report.solver_b,
                    report.max_population_difference,
                    report.times.len(),
                    path.display()
                );
            } else {
                println!("{body}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => error_exit(&e),
    }
}

fn parse_usize_list(text: &str) -> Result<Vec<usize>, Error> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| Error::Config(format!("invalid list entry '{s}'")))
        })
        .collect()
}

fn series(args: &SeriesArgs) -> ExitCode {
    let truncations = match parse_usize_list(&args.truncations) {
        Ok(v) if !v.is_empty() => v,
        Ok(_) => return error_exit(&Error::Config("empty truncation list".into())),
        Err(e) => return error_exit(&e),
    };
    let tails = match parse_usize_list(&args.tails) {
        Ok(v) => v,
        Err(e) => return error_exit(&e),
    };
    let model = rampdyn::OscillatorModel64::paper_units();
    match series_report(&model, &truncations, args.window, &tails) {
        Ok(table) => {
            if let Some(path) = &args.output {
                if let Err(e) = write_atomic(path, &table) {
                    return error_exit(&e);
                }
                println!("series profile written to {}", path.display());
            } else {
                print!("{table}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => error_exit(&e),
    }
}

fn probe_stationarity(args: &ProbeArgs) -> ExitCode {
    let config = match args.config.resolve() {
        Ok(c) => c,
        Err(e) => return error_exit(&e),
    };
    if args.samples < 2 {
        return error_exit(&Error::Config("stationarity probe needs ≥ 2 samples".into()));
    }
    if !(args.t_start >= config.ramp_end) || !(config.t_end > args.t_start) {
        return error_exit(&Error::Config(format!(
            "need ramp_end ≤ t_start < t_end (t_start = {}, t_end = {})",
            args.t_start, config.t_end
        )));
    }
    let times: Vec<f64> = (0..args.samples)
        .map(|i| {
            args.t_start
                + (config.t_end - args.t_start) * (i as f64) / ((args.samples - 1) as f64)
        })
        .collect();

    let drift = match config.solver {
        SolverKind::Grid => {
            // populations of the grid oracle in the post-ramp eigenbasis
            let n_max = 100;
            match oracle_post_ramp_populations(&config, &times, n_max) {
                Ok(pops) => {
                    let mut max_drift = 0.0f64;
                    for n in 0..=n_max {
                        let series: Vec<f64> = pops.iter().map(|p| p[n]).collect();
                        let lo = series.iter().copied().fold(f64::INFINITY, f64::min);
                        let hi = series.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                        max_drift = max_drift.max(hi - lo);
                    }
                    max_drift
                }
                Err(e) => return error_exit(&e),
            }
        }
        SolverKind::Fixed | SolverKind::Growing => {
            let schedule = match config.schedule() {
                Ok(s) => s,
                Err(e) => return error_exit(&e),
            };
            let model = match config.model() {
                Ok(m) => m,
                Err(e) => return error_exit(&e),
            };
            let policy = if config.solver == SolverKind::Growing {
                BasisPolicy::Growing
            } else {
                BasisPolicy::Fixed(config.fixed_size)
            };
            let settings = IntegrationSettings {
                step: config.step,
                steps: config.steps(),
                norm_ceiling: None,
            };
            let target_steps: Vec<usize> = times
                .iter()
                .map(|t| (t / config.step).round() as usize)
                .collect();
            let mut samples: Vec<CoefficientState<f64>> = Vec::new();
            let run = integrate(
                CoefficientState::initial(policy),
                &schedule,
                &model,
                &settings,
                |step, state| {
                    if target_steps.contains(&step) {
                        samples.push(state.clone());
                    }
                },
            );
            if let Err(e) = run {
                return error_exit(&e);
            }
            match diagnostics::stationarity_probe(&samples, &schedule, &model) {
                Ok(d) => d,
                Err(e) => return error_exit(&e),
            }
        }
        SolverKind::Gaussian => {
            return error_exit(&Error::Config(
                "stationarity probe supports the grid, fixed, and growing solvers".into(),
            ))
        }
    };
    println!(
        "solver={} samples={} window=[{:.3}, {:.3}] max population drift = {:.6e}",
        config.solver.name(),
        args.samples,
        args.t_start,
        config.t_end,
        drift
    );
    if let Some(tol) = args.tolerance {
        if drift > tol {
            eprintln!("drift {drift:.6e} exceeds tolerance {tol:.6e}");
            return ExitCode::from(EXIT_NUMERICAL);
        }
    }
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match &cli.command {
        Command::Simulate(args) => simulate(args),
        Command::Compare(args) => compare(args),
        Command::Series(args) => series(args),
        Command::ProbeStationarity(args) => probe_stationarity(args),
    }
}
