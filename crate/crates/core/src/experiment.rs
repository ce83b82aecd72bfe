//! Experiment orchestration: runs a configured solver, records the
//! diagnostics time series, emits CSV plus a JSON run-manifest (atomically),
//! and compares solvers against each other.

use std::path::{Path, PathBuf};
use std::time::Instant;

use num_complex::Complex64;
use serde::Serialize;

use crate::basis::OscillatorModel;
use crate::config::{ExperimentConfig, SolverKind};
use crate::coupled::{BasisPolicy, CoefficientState};
use crate::diagnostics::{self, BreakdownReport, DiagnosticsRecord};
use crate::error::{Error, Result};
use crate::oracle::{
    gaussian_evolve, grid_propagate, hamiltonian_expectation, project_onto_basis,
    GridWavefunction,
};
use crate::rk4::{integrate, rk4_step, IntegrationSettings, StopReason};
use crate::series::{self, CoefficientRule};

/// Time step for the classical width ODE behind the Gaussian solver.
const GAUSSIAN_DT: f64 = 1e-5;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RunOutcome {
    /// The run reached t_end.
    Completed,
    /// The norm crossed the configured ceiling and the run stopped early.
    BreakdownAbort { t: f64, norm: f64 },
}

#[derive(Clone, Debug)]
pub struct RunSummary {
    pub records: Vec<DiagnosticsRecord<f64>>,
    pub outcome: RunOutcome,
    pub breakdown: Option<BreakdownReport<f64>>,
    pub csv_path: Option<PathBuf>,
    pub manifest_path: Option<PathBuf>,
}

#[derive(Serialize)]
struct Manifest<'a> {
    config: &'a ExperimentConfig,
    library_version: &'static str,
    outcome: RunOutcome,
    breakdown_time: Option<f64>,
    breakdown_threshold: f64,
    records: usize,
    wall_time_seconds: f64,
}

/// Writes `contents` to `path` through a sibling temp file and a rename, so
/// readers never observe a half-written file.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    std::fs::write(&tmp, contents)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// Renders the diagnostics series in the stable CSV schema. Values carry 13
/// significant digits so reruns are comparable at full precision.
pub fn render_csv(records: &[DiagnosticsRecord<f64>]) -> String {
    let mut out = String::from("t,norm,energy,basis_size,max_index,frontier_mag\n");
    for r in records {
        out.push_str(&format!(
            "{:.12e},{:.12e},{:.12e},{},{},{:.12e}\n",
            r.time, r.norm, r.energy, r.basis_size, r.max_index, r.frontier_mag
        ));
    }
    out
}

fn expansion_records(
    config: &ExperimentConfig,
    policy: BasisPolicy,
) -> Result<(Vec<DiagnosticsRecord<f64>>, RunOutcome)> {
    let schedule = config.schedule()?;
    let model = config.model()?;
    let settings = IntegrationSettings {
        step: config.step,
        steps: config.steps(),
        norm_ceiling: Some(config.norm_ceiling),
    };
    let mut records = Vec::new();
    let cadence = config.cadence;
    let total = settings.steps;
    let outcome = integrate(
        CoefficientState::initial(policy),
        &schedule,
        &model,
        &settings,
        |step, state| {
            if step % cadence == 0 || step == total {
                records.push(diagnostics::record(state, &model));
            }
        },
    )?;
    let run_outcome = match outcome.stop {
        StopReason::Completed => RunOutcome::Completed,
        StopReason::NormCeiling { t, norm } => {
            let last = diagnostics::record(&outcome.state, &model);
            if records.last().map(|r| r.time) != Some(last.time) {
                records.push(last);
            }
            RunOutcome::BreakdownAbort { t, norm }
        }
    };
    Ok((records, run_outcome))
}

fn grid_records(config: &ExperimentConfig) -> Result<(Vec<DiagnosticsRecord<f64>>, RunOutcome)> {
    let schedule = config.schedule()?;
    let model = config.model()?;
    let grid = config.grid()?;
    let mut psi = GridWavefunction::ground_state(&model, &grid)?;
    let record_of = |psi: &GridWavefunction<f64>, t: f64| DiagnosticsRecord {
        time: t,
        norm: psi.norm(),
        energy: hamiltonian_expectation(psi, &schedule, &model, t),
        basis_size: grid.points,
        max_index: grid.points - 1,
        frontier_mag: psi
            .psi
            .first()
            .map(|p| p.norm())
            .unwrap_or(0.0)
            .max(psi.psi.last().map(|p| p.norm()).unwrap_or(0.0)),
    };
    let mut records = vec![record_of(&psi, 0.0)];
    let total_steps = (config.t_end / config.grid_dt).round().max(1.0) as usize;
    let mut step = 0usize;
    while step < total_steps {
        let chunk = config.cadence.min(total_steps - step);
        let t_next = config.t_end * ((step + chunk) as f64) / (total_steps as f64);
        psi = grid_propagate(&psi, &schedule, &model, config.grid_dt, t_next)?;
        records.push(record_of(&psi, psi.time));
        step += chunk;
    }
    Ok((records, RunOutcome::Completed))
}

fn gaussian_records(
    config: &ExperimentConfig,
) -> Result<(Vec<DiagnosticsRecord<f64>>, RunOutcome)> {
    let schedule = config.schedule()?;
    let model = config.model()?;
    let omega = model.omega();
    let omega_sq = model.spring_constant() / model.mass();
    let deriv = |time: f64, y: &[f64]| -> Vec<f64> {
        let s = schedule.big_s(time) * omega_sq;
        vec![y[2], y[3], -s * y[0], -s * y[1]]
    };
    // ⟨H⟩ = ħ|ε̇|²/(4ω) + S(t)·k·ħ|ε|²/(4mω); exact for the Gaussian family
    let energy_of = |t: f64, y: &[f64]| -> f64 {
        let eps_sq = y[0] * y[0] + y[1] * y[1];
        let dot_sq = y[2] * y[2] + y[3] * y[3];
        model.hbar() * dot_sq / (4.0 * omega)
            + schedule.big_s(t) * model.spring_constant() * model.hbar() * eps_sq
                / (4.0 * model.mass() * omega)
    };
    let record_of = |t: f64, y: &[f64]| DiagnosticsRecord {
        time: t,
        // the exact solution is normalized by construction
        norm: 1.0,
        energy: energy_of(t, y),
        basis_size: 1,
        max_index: 0,
        frontier_mag: 0.0,
    };
    let mut y = vec![1.0, 0.0, 0.0, omega];
    let total_steps = (config.t_end / GAUSSIAN_DT).round().max(1.0) as usize;
    let record_every = ((config.step * config.cadence as f64) / GAUSSIAN_DT)
        .round()
        .max(1.0) as usize;
    let mut records = vec![record_of(0.0, &y)];
    let mut t = 0.0;
    for step in 1..=total_steps {
        y = rk4_step(t, &y, GAUSSIAN_DT, deriv);
        t = config.t_end * (step as f64) / (total_steps as f64);
        if step % record_every == 0 || step == total_steps {
            if !y.iter().all(|v| v.is_finite()) {
                return Err(Error::NonFinite { t });
            }
            records.push(record_of(t, &y));
        }
    }
    // conserved Wronskian as an accuracy guard
    let wronskian = y[0] * y[3] - y[1] * y[2];
    if (wronskian - omega).abs() > 1e-9 {
        return Err(Error::Range(format!(
            "Gaussian solver Wronskian drifted to {wronskian} (expected {omega})"
        )));
    }
    Ok((records, RunOutcome::Completed))
}

/// Runs the configured experiment, writing CSV and manifest when an output
/// path is set.
pub fn run_experiment(config: &ExperimentConfig) -> Result<RunSummary> {
    config.validate()?;
    let started = Instant::now();
    let (records, outcome) = match config.solver {
        SolverKind::Growing => expansion_records(config, BasisPolicy::Growing)?,
        SolverKind::Fixed => expansion_records(config, BasisPolicy::Fixed(config.fixed_size))?,
        SolverKind::Grid => grid_records(config)?,
        SolverKind::Gaussian => gaussian_records(config)?,
    };
    let model = config.model()?;
    let breakdown = diagnostics::detect_breakdown(&records, config.breakdown_threshold, &model)?;

    let mut csv_path = None;
    let mut manifest_path = None;
    if let Some(out) = &config.output {
        let path = PathBuf::from(out);
        write_atomic(&path, &render_csv(&records))?;
        let manifest = Manifest {
            config,
            library_version: env!("CARGO_PKG_VERSION"),
            outcome,
            breakdown_time: breakdown.breakdown_time,
            breakdown_threshold: config.breakdown_threshold,
            records: records.len(),
            wall_time_seconds: started.elapsed().as_secs_f64(),
        };
        let mut mp = path.as_os_str().to_owned();
        mp.push(".manifest.json");
        let mp = PathBuf::from(mp);
        let body = serde_json::to_string_pretty(&manifest)
            .map_err(|e| Error::Config(format!("manifest serialization failed: {e}")))?;
        write_atomic(&mp, &body)?;
        csv_path = Some(path);
        manifest_path = Some(mp);
    }
    Ok(RunSummary {
        records,
        outcome,
        breakdown: Some(breakdown),
        csv_path,
        manifest_path,
    })
}

/// Mode populations |C_n|² (n = 0..=n_max) at the requested times, produced
/// by whichever solver the config selects.
pub fn populations_over_time(
    config: &ExperimentConfig,
    times: &[f64],
    n_max: usize,
) -> Result<Vec<Vec<f64>>> {
    config.validate()?;
    let schedule = config.schedule()?;
    let model = config.model()?;
    match config.solver {
        SolverKind::Growing | SolverKind::Fixed => {
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
            for (t, s) in times.iter().zip(&target_steps) {
                if (*s as f64 * config.step - t).abs() > config.step / 2.0 + 1e-12 {
                    return Err(Error::InvalidParameter(format!(
                        "sample time {t} is not reachable with step {}",
                        config.step
                    )));
                }
            }
            let mut out = vec![Vec::new(); times.len()];
            integrate(
                CoefficientState::initial(policy),
                &schedule,
                &model,
                &settings,
                |step, state| {
                    for (slot, &want) in target_steps.iter().enumerate() {
                        if want == step {
                            let mut pops = vec![0.0; n_max + 1];
                            for s in 0..state.active_len() {
                                let n = state.mode_index(s);
                                if n <= n_max {
                                    pops[n] = state.amplitude(s).norm_sqr();
                                }
                            }
                            out[slot] = pops;
                        }
                    }
                },
            )?;
            Ok(out)
        }
        SolverKind::Grid => {
            let grid = config.grid()?;
            let mut psi = GridWavefunction::ground_state(&model, &grid)?;
            let mut out = Vec::with_capacity(times.len());
            for &t in times {
                psi = grid_propagate(&psi, &schedule, &model, config.grid_dt, t)?;
                let proj = project_onto_basis(&psi, &model, n_max)?;
                out.push(proj.populations());
            }
            Ok(out)
        }
        SolverKind::Gaussian => {
            let grid = config.grid()?;
            let mut out = Vec::with_capacity(times.len());
            for &t in times {
                let g = gaussian_evolve(&schedule, &model, t, GAUSSIAN_DT)?;
                let wf = g.sample_on(&model, &grid);
                let proj = project_onto_basis(&wf, &model, n_max)?;
                out.push(proj.populations());
            }
            Ok(out)
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ComparisonReport {
    pub solver_a: String,
    pub solver_b: String,
    pub times: Vec<f64>,
    /// max_n |p_a − p_b| at each sampled time
    pub per_time_max_difference: Vec<f64>,
    pub max_population_difference: f64,
    /// time-integrated (trapezoid) per-time max difference
    pub integrated_difference: f64,
    /// first sampled time where the per-time difference exceeds `threshold`
    pub first_disagreement_time: Option<f64>,
    pub threshold: f64,
    pub modes_compared: usize,
}

/// Runs both configurations and compares mode populations on a shared time
/// grid. The configs must agree on the model and the schedule.
pub fn compare_solvers(
    config_a: &ExperimentConfig,
    config_b: &ExperimentConfig,
    times: &[f64],
    n_max: usize,
    threshold: f64,
) -> Result<ComparisonReport> {
    let same_physics = config_a.eta == config_b.eta
        && config_a.ramp_end == config_b.ramp_end
        && config_a.variant == config_b.variant
        && config_a.mass == config_b.mass
        && config_a.spring_constant == config_b.spring_constant
        && config_a.hbar == config_b.hbar;
    if !same_physics {
        return Err(Error::Config(
            "solver comparison requires identical model and schedule parameters".into(),
        ));
    }
    if times.is_empty() {
        return Err(Error::InvalidParameter(
            "solver comparison needs at least one sample time".into(),
        ));
    }
    let pops_a = populations_over_time(config_a, times, n_max)?;
    let pops_b = populations_over_time(config_b, times, n_max)?;
    let mut per_time = Vec::with_capacity(times.len());
    for (a, b) in pops_a.iter().zip(&pops_b) {
        let d = a
            .iter()
            .zip(b)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0f64, f64::max);
        per_time.push(d);
    }
    let max_diff = per_time.iter().copied().fold(0.0f64, f64::max);
    let mut integrated = 0.0;
    for i in 1..times.len() {
        integrated += 0.5 * (per_time[i] + per_time[i - 1]) * (times[i] - times[i - 1]);
    }
    let first = times
        .iter()
        .zip(&per_time)
        .find(|(_, &d)| d > threshold)
        .map(|(&t, _)| t);
    Ok(ComparisonReport {
        solver_a: config_a.solver.name().to_string(),
        solver_b: config_b.solver.name().to_string(),
        times: times.to_vec(),
        per_time_max_difference: per_time,
        max_population_difference: max_diff,
        integrated_difference: integrated,
        first_disagreement_time: first,
        threshold,
        modes_compared: n_max + 1,
    })
}

/// CSV table of supremum growth (per truncation) and norm-tail values for
/// the inverse-linear coefficient family.
pub fn series_report(
    model: &OscillatorModel<f64>,
    n_list: &[usize],
    x_max: f64,
    tail_checkpoints: &[usize],
) -> Result<String> {
    let profile = series::sup_growth_profile(model, n_list, x_max)?;
    let mut out = String::from("kind,n,x_max,value\n");
    for (n, sup) in profile {
        out.push_str(&format!("sup_growth,{n},{x_max:.12e},{sup:.12e}\n"));
    }
    for &n in tail_checkpoints {
        let tail = 1.0 - series::partial_norm::<f64>(CoefficientRule::InverseLinear, n);
        out.push_str(&format!("norm_tail,{n},{x_max:.12e},{tail:.12e}\n"));
    }
    Ok(out)
}

/// Populations helper shared by the stationarity CLI path: amplitudes of the
/// grid oracle in the post-ramp eigenbasis at `t`.
pub fn oracle_post_ramp_populations(
    config: &ExperimentConfig,
    times: &[f64],
    n_max: usize,
) -> Result<Vec<Vec<f64>>> {
    let schedule = config.schedule()?;
    let model = config.model()?;
    let post = schedule.post_ramp_model(&model)?;
    let grid = config.grid()?;
    let mut psi = GridWavefunction::ground_state(&model, &grid)?;
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        psi = grid_propagate(&psi, &schedule, &model, config.grid_dt, t)?;
        let proj = project_onto_basis(&psi, &post, n_max)?;
        out.push(proj.populations());
    }
    Ok(out)
}

/// Convenience wrapper for tests and the CLI: complex amplitudes restored to
/// the Schrödinger picture for an expansion state.
pub fn schroedinger_amplitudes(
    state: &CoefficientState<f64>,
    model: &OscillatorModel<f64>,
) -> Vec<(usize, Complex64)> {
    state.to_complex_amplitudes(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::tempdir;

    fn quick_fixed(dir: &Path, name: &str) -> ExperimentConfig {
        let mut c = ExperimentConfig::default();
        c.solver = SolverKind::Fixed;
        c.fixed_size = 48;
        c.t_end = 0.2;
        c.cadence = 50;
        c.output = Some(dir.join(name).to_string_lossy().into_owned());
        c
    }

    #[test]
    fn run_writes_csv_and_manifest() {
        let dir = tempdir().unwrap();
        let config = quick_fixed(dir.path(), "run.csv");
        let summary = run_experiment(&config).unwrap();
        assert_eq!(summary.outcome, RunOutcome::Completed);
        let csv = std::fs::read_to_string(summary.csv_path.as_ref().unwrap()).unwrap();
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "t,norm,energy,basis_size,max_index,frontier_mag"
        );
        // 0.2/0.001 = 200 steps at cadence 50 → records at steps 0,50,...,200
        assert_eq!(csv.lines().count(), 1 + 5);
        let last = csv.lines().last().unwrap();
        let fields: Vec<&str> = last.split(',').collect();
        assert_eq!(fields.len(), 6);
        let norm: f64 = fields[1].parse().unwrap();
        assert!((norm - 1.0).abs() < 1e-10);
        // ≥ 12 significant digits in the floating-point columns
        assert!(fields[0].len() >= 13, "field '{}' too short", fields[0]);

        let manifest =
            std::fs::read_to_string(summary.manifest_path.as_ref().unwrap()).unwrap();
        let parsed: serde_json::Value = serde_json::from_str(&manifest).unwrap();
        assert_eq!(parsed["outcome"]["kind"], "completed");
        assert_eq!(parsed["config"]["fixed_size"], 48);
        assert!(parsed["wall_time_seconds"].as_f64().unwrap() >= 0.0);
    }

    #[test]
    fn reruns_are_byte_identical() {
        let dir = tempdir().unwrap();
        let a = quick_fixed(dir.path(), "a.csv");
        let b = quick_fixed(dir.path(), "b.csv");
        let ra = run_experiment(&a).unwrap();
        let rb = run_experiment(&b).unwrap();
        let ca = std::fs::read(ra.csv_path.unwrap()).unwrap();
        let cb = std::fs::read(rb.csv_path.unwrap()).unwrap();
        assert_eq!(ca, cb);
    }

    #[test]
    fn growing_run_aborts_on_ceiling() {
        let mut config = ExperimentConfig::default();
        config.solver = SolverKind::Growing;
        config.norm_ceiling = 2.0;
        config.cadence = 100;
        let summary = run_experiment(&config).unwrap();
        match summary.outcome {
            RunOutcome::BreakdownAbort { t, norm } => {
                assert!(norm > 2.0);
                assert!(t < 3.2);
            }
            other => panic!("expected abort, got {other:?}"),
        }
        let b = summary.breakdown.unwrap();
        assert!(b.breakdown_time.is_some());
    }

    #[test]
    fn gaussian_solver_records() {
        let mut config = ExperimentConfig::default();
        config.solver = SolverKind::Gaussian;
        config.t_end = 1.5;
        config.cadence = 100;
        let summary = run_experiment(&config).unwrap();
        assert_eq!(summary.outcome, RunOutcome::Completed);
        let first = summary.records.first().unwrap();
        assert_eq!(first.energy, 0.5);
        assert_eq!(first.norm, 1.0);
        // energy grows during the ramp-up
        let at_end_of_ramp = summary
            .records
            .iter()
            .find(|r| (r.time - 1.0).abs() < 1e-9)
            .unwrap();
        assert!(at_end_of_ramp.energy > 0.5);
        assert!(summary.breakdown.unwrap().breakdown_time.is_none());
    }

    #[test]
    fn identical_configs_compare_to_zero() {
        let mut config = ExperimentConfig::default();
        config.solver = SolverKind::Fixed;
        config.fixed_size = 32;
        config.t_end = 0.3;
        let times = [0.1, 0.2, 0.3];
        let report = compare_solvers(&config, &config.clone(), &times, 20, 1e-3).unwrap();
        assert_eq!(report.max_population_difference, 0.0);
        assert_eq!(report.integrated_difference, 0.0);
        assert_eq!(report.first_disagreement_time, None);
    }

    #[test]
    fn expansion_and_grid_agree_on_a_short_window() {
        let mut a = ExperimentConfig::default();
        a.solver = SolverKind::Fixed;
        a.fixed_size = 64;
        a.t_end = 0.4;
        let mut b = a.clone();
        b.solver = SolverKind::Grid;
        let times = [0.2, 0.4];
        let report = compare_solvers(&a, &b, &times, 30, 1e-3).unwrap();
        assert!(
            report.max_population_difference < 1e-4,
            "difference {:e}",
            report.max_population_difference
        );
    }

    #[test]
    fn comparison_rejects_mismatched_physics() {
        let a = ExperimentConfig::default();
        let mut b = ExperimentConfig::default();
        b.eta = 0.5;
        assert!(compare_solvers(&a, &b, &[0.1], 10, 1e-3).is_err());
    }

    #[test]
    fn series_report_table() {
        let model = OscillatorModel::paper_units();
        let table = series_report(&model, &[4, 16], 4.0, &[100]).unwrap();
        let lines: Vec<&str> = table.lines().collect();
        assert_eq!(lines[0], "kind,n,x_max,value");
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("sup_growth,4,"));
        assert!(lines[3].starts_with("norm_tail,100,"));
    }
}
