use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const BASE: &str = r#"
[eos]
law = "gamma-law"
params = { gamma = 2.0, K = 1.0, c_v = 1.0 }

[constants]
k = 4.0
A = 1.0
k1 = 0.5
k2 = 0.5
l = [10.1, 0.1, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0]

[entropy]
profile = "constant"

[grid]
x_left = -4.0
x_right = 4.0
cells = 256
boundary = "outflow"

[initial]
family = "sech2-pulse"
params = { amplitude = 1.0, width = 1.0, center = 0.0, tau = 1.0 }

[run]
horizon_time = 5.0

[output]
directory = "out"
stride_steps = 50
"#;

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn gradcat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gradcat")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn simulate(cfg: &Path, out: &Path) -> Output {
    gradcat(&["simulate", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()])
}

#[test]
fn check_passes_reference_and_names_failures() {
    let tmp = TempDir::new().unwrap();
    let good = write_config(tmp.path(), "good.toml", BASE);
    let o = gradcat(&["check", "--config", good.to_str().unwrap(), "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(tmp.path().join("check.json")).unwrap()).unwrap();
    assert_eq!(report["passed"], true);

    let bad = write_config(tmp.path(), "bad.toml", &BASE.replace("k = 4.0", "k = 2.0"));
    let o = gradcat(&["check", "--config", bad.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("H3"), "{}", stderr(&o));
}

#[test]
fn missing_key_is_a_config_error() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "c.toml", &BASE.replace("horizon_time = 5.0", ""));
    let o = gradcat(&["simulate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("horizon_time"), "{}", stderr(&o));
}

#[test]
fn compressive_run_blows_up_and_reports() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "c.toml", BASE);
    let out = tmp.path().join("run");
    let o = simulate(&cfg, &out);
    assert_eq!(code(&o), 10, "{}", stderr(&o));
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    for key in ["threshold", "envelopes", "a2_bound", "blowup_bound", "report"] {
        assert!(report.get(key).is_some(), "missing {key}");
    }
    assert_eq!(report["report"]["status"], "blew-up");
    assert!(report["report"]["detected_t"].as_f64().unwrap() > 0.0);

    let traj = fs::read_to_string(out.join("trajectory.csv")).unwrap();
    assert_eq!(traj.lines().next().unwrap(), "t,x,tau,u,c,p,h,s,r,y,q");
    let path = fs::read_to_string(out.join("path_forward.csv")).unwrap();
    assert_eq!(path.lines().next().unwrap(), "t,x,y,y_fd,a0,a1,a2");
    let monitors: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("monitors.json")).unwrap()).unwrap();
    assert_eq!(monitors["checks"].as_array().unwrap().len(), 18);
    let csv_header = fs::read_to_string(out.join("monitors.csv")).unwrap();
    assert!(csv_header.starts_with("t,p_leq_ch,"));
}

#[test]
fn zero_data_runs_to_horizon() {
    let tmp = TempDir::new().unwrap();
    let text = BASE
        .replace("family = \"sech2-pulse\"", "family = \"constant\"")
        .replace(
            "params = { amplitude = 1.0, width = 1.0, center = 0.0, tau = 1.0 }",
            "params = { tau = 1.0, u = 0.0 }",
        )
        .replace("horizon_time = 5.0", "horizon_time = 0.5");
    let cfg = write_config(tmp.path(), "c.toml", &text);
    let o = simulate(&cfg, &tmp.path().join("run"));
    assert_eq!(code(&o), 0, "{}", stderr(&o));
}

#[test]
fn floor_breach_aborts_with_diagnostic() {
    let tmp = TempDir::new().unwrap();
    let text = BASE.replace("horizon_time = 5.0", "horizon_time = 5.0\ntau_floor_volume = 0.95");
    let cfg = write_config(tmp.path(), "c.toml", &text);
    let o = simulate(&cfg, &tmp.path().join("run"));
    assert_eq!(code(&o), 20, "{}", stderr(&o));
    assert!(stderr(&o).contains("aborted"), "{}", stderr(&o));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "c.toml", BASE);
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    assert_eq!(code(&simulate(&cfg, &a)), 10);
    assert_eq!(code(&simulate(&cfg, &b)), 10);
    for f in ["trajectory.csv", "report.json", "monitors.json", "monitors.csv", "path_backward.csv"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn constant_state_traces_straight_lines() {
    let tmp = TempDir::new().unwrap();
    let text = BASE
        .replace("family = \"sech2-pulse\"", "family = \"constant\"")
        .replace(
            "params = { amplitude = 1.0, width = 1.0, center = 0.0, tau = 1.0 }",
            "params = { tau = 1.0, u = 0.0 }",
        )
        .replace("horizon_time = 5.0", "horizon_time = 0.5");
    let cfg = write_config(tmp.path(), "c.toml", &text);
    let out = tmp.path().join("trace");
    let o = gradcat(&[
        "trace",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--seed-x",
        "-1.0",
        "--seed-x",
        "0.5",
        "--direction",
        "backward",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    // γ = 2, K = 1, τ = 1: c = √2
    let c = 2f64.sqrt();
    for (k, x0) in [(0, -1.0), (1, 0.5)] {
        let text = fs::read_to_string(out.join(format!("trace_backward_{k:03}.csv"))).unwrap();
        let mut rows = 0;
        for line in text.lines().skip(1) {
            let v: Vec<f64> = line.split(',').map(|s| s.parse().unwrap()).collect();
            assert!((v[1] - (x0 - c * v[0])).abs() < 1e-10, "{line}");
            assert_eq!(v[2], 0.0);
            rows += 1;
        }
        assert!(rows > 10);
    }

    let o = gradcat(&["trace", "--config", cfg.to_str().unwrap(), "--seed-x", "9.0"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("outside"), "{}", stderr(&o));
}

#[test]
fn sweep_is_independent_of_worker_count() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "c.toml", &BASE.replace("horizon_time = 5.0", "horizon_time = 1.0"));
    let run = |workers: &str, out: &Path| {
        gradcat(&[
            "sweep",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--workers",
            workers,
            "--axis",
            "initial.params.amplitude",
            "--values",
            "0.0,1.0,3.0",
        ])
    };
    let (a, b) = (tmp.path().join("w1"), tmp.path().join("w3"));
    assert_eq!(code(&run("1", &a)), 0);
    assert_eq!(code(&run("3", &b)), 0);
    let sa = fs::read_to_string(a.join("sweep.csv")).unwrap();
    assert_eq!(sa, fs::read_to_string(b.join("sweep.csv")).unwrap());
    let statuses: Vec<&str> = sa.lines().skip(1).map(|l| l.rsplit(',').next().unwrap()).collect();
    assert_eq!(statuses, ["ran-to-horizon", "ran-to-horizon", "blew-up"]);
}

#[test]
fn single_value_sweep_matches_simulate() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "c.toml", BASE);
    let sweep_out = tmp.path().join("sweep");
    let o = gradcat(&[
        "sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        sweep_out.to_str().unwrap(),
        "--axis",
        "initial.params.amplitude",
        "--values",
        "1.0",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let sim_out = tmp.path().join("sim");
    assert_eq!(code(&simulate(&cfg, &sim_out)), 10);
    for f in ["report.json", "trajectory.csv", "monitors.csv"] {
        assert_eq!(
            fs::read(sweep_out.join("run_000").join(f)).unwrap(),
            fs::read(sim_out.join(f)).unwrap(),
            "{f}"
        );
    }

    let o = gradcat(&["sweep", "--config", cfg.to_str().unwrap(), "--axis", "grid.cells", "--values", ""]);
    assert_eq!(code(&o), 1);
}

#[test]
fn custom_table_loads_relative_to_config() {
    let tmp = TempDir::new().unwrap();
    fs::write(
        tmp.path().join("data.csv"),
        "x,tau,u\n-4.0,1.0,0.0\n0.0,1.0,-0.5\n4.0,1.0,0.0\n",
    )
    .unwrap();
    let text = BASE
        .replace("family = \"sech2-pulse\"", "family = \"custom-table\"")
        .replace(
            "params = { amplitude = 1.0, width = 1.0, center = 0.0, tau = 1.0 }",
            "params = { file = \"data.csv\" }",
        )
        .replace("horizon_time = 5.0", "horizon_time = 0.2");
    let cfg = write_config(tmp.path(), "c.toml", &text);
    let out = tmp.path().join("run");
    let o = simulate(&cfg, &out);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let traj = fs::read_to_string(out.join("trajectory.csv")).unwrap();
    let first: Vec<f64> = traj.lines().nth(1).unwrap().split(',').map(|s| s.parse().unwrap()).collect();
    assert!((first[2] - 1.0).abs() < 1e-12);
}
