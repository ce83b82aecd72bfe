//! End-to-end tests of the command-line binary: config resolution, CSV
//! schema, reproducibility, and the documented exit codes.

use std::process::{Command, Output};

use tempfile::tempdir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rampdyn"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn simulate_writes_schema_and_manifest() {
    let dir = tempdir().unwrap();
    let csv = dir.path().join("run.csv");
    let out = run(&[
        "simulate",
        "--solver",
        "fixed",
        "--fixed-size",
        "48",
        "--t-end",
        "0.2",
        "--cadence",
        "50",
        "--output",
        csv.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let body = std::fs::read_to_string(&csv).unwrap();
    let mut lines = body.lines();
    assert_eq!(
        lines.next().unwrap(),
        "t,norm,energy,basis_size,max_index,frontier_mag"
    );
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 6);
        // ≥ 12 significant digits on the floating-point columns
        for idx in [0usize, 1, 2, 5] {
            let mantissa = fields[idx].split('e').next().unwrap();
            let digits = mantissa.chars().filter(|c| c.is_ascii_digit()).count();
            assert!(digits >= 12, "field '{}' has too few digits", fields[idx]);
        }
        fields[3].parse::<usize>().unwrap();
        fields[4].parse::<usize>().unwrap();
    }
    let manifest_path = dir.path().join("run.csv.manifest.json");
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&manifest_path).unwrap()).unwrap();
    assert_eq!(manifest["outcome"]["kind"], "completed");
    assert_eq!(manifest["config"]["solver"], "fixed");
}

#[test]
fn identical_configs_are_byte_identical() {
    let dir = tempdir().unwrap();
    let config = dir.path().join("exp.ini");
    std::fs::write(
        &config,
        "[solver]\nsolver = fixed\nfixed_size = 40\nt_end = 0.15\ncadence = 30\n",
    )
    .unwrap();
    let run_once = |name: &str| -> Vec<u8> {
        let csv = dir.path().join(name);
        let out = run(&[
            "simulate",
            "--config",
            config.to_str().unwrap(),
            "--output",
            csv.to_str().unwrap(),
        ]);
        assert!(out.status.success());
        std::fs::read(&csv).unwrap()
    };
    assert_eq!(run_once("a.csv"), run_once("b.csv"));
}

#[test]
fn config_errors_exit_2() {
    // unknown key in a config file
    let dir = tempdir().unwrap();
    let config = dir.path().join("bad.ini");
    std::fs::write(&config, "[solver]\nstep_size = 0.001\n").unwrap();
    let out = run(&["simulate", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    // unknown preset
    let out = run(&["simulate", "--preset", "fig9"]);
    assert_eq!(out.status.code(), Some(2));

    // missing config file
    let out = run(&["simulate", "--config", "/no/such/file.ini"]);
    assert_eq!(out.status.code(), Some(2));

    // preset and config together
    let out = run(&[
        "simulate",
        "--preset",
        "fig1",
        "--config",
        config.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));

    // invalid value through a flag
    let out = run(&["simulate", "--step", "-0.5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn numerical_failures_exit_3() {
    // a grid far too narrow for the initial state
    let out = run(&[
        "simulate",
        "--solver",
        "grid",
        "--grid-half-width",
        "2.0",
        "--grid-points",
        "64",
        "--t-end",
        "0.1",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn breakdown_abort_exits_4() {
    let dir = tempdir().unwrap();
    let csv = dir.path().join("fig1.csv");
    let out = run(&[
        "simulate",
        "--preset",
        "fig1",
        "--cadence",
        "100",
        "--output",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(4));
    // the data is still written, and the norm column diverges
    let body = std::fs::read_to_string(&csv).unwrap();
    let last = body.lines().last().unwrap();
    let norm: f64 = last.split(',').nth(1).unwrap().parse().unwrap();
    assert!(norm > 100.0);
    let manifest: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("fig1.csv.manifest.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(manifest["outcome"]["kind"], "breakdown-abort");
    assert!(manifest["breakdown_time"].as_f64().unwrap() < 6.28);
}

#[test]
fn compare_identical_solvers_reports_zero() {
    let out = run(&[
        "compare",
        "--solver",
        "fixed",
        "--solver-b",
        "fixed",
        "--fixed-size",
        "32",
        "--t-end",
        "0.2",
        "--sample-spacing",
        "0.1",
        "--modes",
        "16",
    ]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["max_population_difference"], 0.0);
    assert!(report["first_disagreement_time"].is_null());
}

#[test]
fn series_emits_growth_table() {
    let out = run(&[
        "series",
        "--truncations",
        "4,16",
        "--window",
        "4.0",
        "--tails",
        "100",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "kind,n,x_max,value");
    assert!(lines[1].starts_with("sup_growth,4,"));
    assert!(lines[2].starts_with("sup_growth,16,"));
    assert!(lines[3].starts_with("norm_tail,100,"));
    let sup4: f64 = lines[1].split(',').nth(3).unwrap().parse().unwrap();
    let sup16: f64 = lines[2].split(',').nth(3).unwrap().parse().unwrap();
    assert!(sup16 > sup4);
}

#[test]
fn probe_stationarity_reports_small_drift() {
    let out = run(&[
        "probe-stationarity",
        "--solver",
        "fixed",
        "--fixed-size",
        "96",
        "--t-end",
        "1.6",
        "--samples",
        "3",
        "--tolerance",
        "1e-6",
    ]);
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(stdout(&out).contains("max population drift"));

    // an impossible tolerance turns into the numerical-failure exit code
    let out = run(&[
        "probe-stationarity",
        "--solver",
        "fixed",
        "--fixed-size",
        "96",
        "--t-end",
        "1.6",
        "--samples",
        "3",
        "--tolerance",
        "1e-30",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn probe_rejects_window_before_ramp_end() {
    let out = run(&[
        "probe-stationarity",
        "--solver",
        "fixed",
        "--t-start",
        "0.5",
        "--t-end",
        "1.5",
    ]);
    assert_eq!(out.status.code(), Some(2));
}
