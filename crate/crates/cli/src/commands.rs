use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use gradcat_core::eos::{check_h1, check_h2, check_h3, check_h4, HypothesisReport};
use gradcat_core::pipeline::{analyze, Analysis};
use gradcat_core::solver::{trace_characteristic, FieldCoefficients, RunStatus};
use gradcat_core::verify::check_pressure_sandwich;
use rayon::prelude::*;
use serde_json::json;

use crate::config::{load_tree, set_key, ConfigError, DirectionName, RunConfig};
use crate::output::{float, write_json, write_path, write_run};

pub const EXIT_HORIZON: i32 = 0;
pub const EXIT_BLEW_UP: i32 = 10;
pub const EXIT_ABORTED: i32 = 20;
pub const EXIT_USAGE: i32 = 1;

pub fn status_code(status: RunStatus) -> i32 {
    match status {
        RunStatus::RanToHorizon => EXIT_HORIZON,
        RunStatus::BlewUp => EXIT_BLEW_UP,
        RunStatus::Aborted => EXIT_ABORTED,
    }
}

fn output_dir(cfg: &RunConfig, out: Option<&Path>) -> PathBuf {
    out.map(Path::to_path_buf).unwrap_or_else(|| cfg.output.directory.clone())
}

/// Runs every hypothesis checker on the configured box; returns whether all passed.
pub fn check(cfg: &RunConfig, out: Option<&Path>) -> Result<bool> {
    let law = cfg.law()?;
    let profile = cfg.profile(&law)?;
    let b = cfg.check_box()?;
    let n = cfg.check.samples_per_axis;
    let (lo, hi) = cfg.domain();
    let mut report = check_h1(&law, &profile, b, n)?;
    for x in [lo, 0.5 * (lo + hi), hi] {
        report = report.merge(check_h2(&law, &profile, x)?);
    }
    report = report
        .merge(check_h3(&law, &profile, b, n)?)
        .merge(check_h4(&law, &profile, b, n, cfg.mu_convention())?);
    let sandwich = check_pressure_sandwich(&law, &profile, &b, n)?;
    print_report(&report);
    println!(
        "{:<8} {:<5} k_best={} declared k={}",
        "p<=ch<=kp",
        if sandwich.passed() { "pass" } else { "FAIL" },
        float(sandwich.k_best),
        float(sandwich.declared_k)
    );
    let passed = report.passed() && sandwich.passed();
    if let Some(dir) = out {
        std::fs::create_dir_all(dir)?;
        write_json(
            &dir.join("check.json"),
            &json!({ "passed": passed, "hypotheses": report, "sandwich": sandwich }),
        )?;
    }
    Ok(passed)
}

fn print_report(report: &HypothesisReport) {
    for c in &report.conditions {
        let verdict = serde_json::to_value(c.verdict).expect("verdict serializes");
        let best = c.best_constant.map(|b| format!(" best={}", float(b))).unwrap_or_default();
        println!(
            "{:<8} {:<14} margin={}{best} {}",
            c.id,
            verdict.as_str().unwrap_or("?"),
            float(c.worst_margin),
            c.statement
        );
    }
    for c in report.failures() {
        eprintln!("failed: {} ({})", c.id, c.statement);
    }
}

fn run_one(cfg: &RunConfig, dir: &Path) -> Result<Analysis> {
    let mut sc = cfg.scenario()?;
    let an = analyze(&mut sc).context("pipeline failed")?;
    write_run(dir, &sc.thermo, &an, cfg.output.stride_steps, &cfg.to_toml())?;
    Ok(an)
}

pub fn simulate(cfg: &RunConfig, out: Option<&Path>) -> Result<RunStatus> {
    let dir = output_dir(cfg, out);
    let an = run_one(cfg, &dir)?;
    let r = &an.outcome.report;
    println!("status {} at t={} after {} steps", r.status.as_str(), float(r.final_t), r.steps);
    println!(
        "N={} inf y0={} inf q0={} predicted T bound={} detected T={}",
        float(r.n),
        float(r.inf_y0),
        float(r.inf_q0),
        r.predicted_t_bound.map(float).unwrap_or_else(|| "-".into()),
        r.detected_t.map(float).unwrap_or_else(|| "-".into()),
    );
    if let Some(reason) = &r.abort_reason {
        eprintln!("aborted: {reason}");
    }
    for m in an.monitors.violations() {
        eprintln!("monitor {} violated {} times", m.name, m.violations);
    }
    println!("wrote {}", dir.display());
    Ok(r.status)
}

/// Re-runs the configured simulation and traces one path per seed.
pub fn trace(cfg: &RunConfig, out: Option<&Path>, seeds: &[f64], direction: Option<DirectionName>) -> Result<()> {
    let seeds = if seeds.is_empty() { &cfg.trace.seeds_x[..] } else { seeds };
    if seeds.is_empty() {
        bail!(ConfigError::Invalid("no trace seeds: pass --seed-x or set trace.seeds_x".into()));
    }
    let direction = direction.unwrap_or(cfg.trace.direction);
    let grid = cfg.grid()?;
    if let Some(x) = seeds.iter().find(|&&x| !grid.contains(x)) {
        bail!(ConfigError::Invalid(format!(
            "seed x={x} lies outside [{}, {}]",
            grid.x_left, grid.x_right
        )));
    }
    let mut sc = cfg.scenario()?;
    let an = analyze(&mut sc).context("pipeline failed")?;
    let dir = output_dir(cfg, out);
    std::fs::create_dir_all(&dir)?;
    let source = FieldCoefficients { thermo: &sc.thermo };
    let name = match direction {
        DirectionName::Forward => "forward",
        DirectionName::Backward => "backward",
    };
    for (k, &x0) in seeds.iter().enumerate() {
        let path = trace_characteristic(&an.outcome.trajectory, &source, x0, direction.into())?;
        let file = dir.join(format!("trace_{name}_{k:03}.csv"));
        write_path(&file, &path)?;
        println!(
            "seed x={} -> {} samples, blow-up {}",
            float(x0),
            path.samples.len(),
            path.blowup.map(|(t, _)| float(t)).unwrap_or_else(|| "none".into())
        );
    }
    Ok(())
}

pub struct SweepRow {
    pub value: f64,
    pub n: f64,
    pub inf_y0: f64,
    pub inf_q0: f64,
    pub predicted_t_bound: Option<f64>,
    pub detected_t: Option<f64>,
    pub status: Result<RunStatus, String>,
}

pub fn sweep(config: &Path, out: Option<&Path>, axis: &str, values: &[f64], workers: usize) -> Result<Vec<SweepRow>> {
    if values.is_empty() {
        bail!(ConfigError::Invalid("sweep needs at least one value".into()));
    }
    let tree = load_tree(config)?;
    let base = config.parent().unwrap_or(Path::new("."));
    let mut configs = Vec::with_capacity(values.len());
    for &v in values {
        let mut t = tree.clone();
        set_key(&mut t, axis, v)?;
        configs.push(RunConfig::from_tree(t, base)?);
    }
    let root = output_dir(&configs[0], out);
    std::fs::create_dir_all(&root)?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers.max(1)).build()?;
    let rows: Vec<SweepRow> = pool.install(|| {
        configs
            .par_iter()
            .zip(values.par_iter())
            .enumerate()
            .map(|(k, (cfg, &value))| {
                let dir = root.join(format!("run_{k:03}"));
                match run_one(cfg, &dir) {
                    Ok(an) => {
                        let r = &an.outcome.report;
                        SweepRow {
                            value,
                            n: r.n,
                            inf_y0: r.inf_y0,
                            inf_q0: r.inf_q0,
                            predicted_t_bound: r.predicted_t_bound,
                            detected_t: r.detected_t,
                            status: Ok(r.status),
                        }
                    }
                    Err(e) => SweepRow {
                        value,
                        n: f64::NAN,
                        inf_y0: f64::NAN,
                        inf_q0: f64::NAN,
                        predicted_t_bound: None,
                        detected_t: None,
                        status: Err(format!("{e:#}")),
                    },
                }
            })
            .collect()
    });
    let mut w = csv::Writer::from_path(root.join("sweep.csv"))?;
    w.write_record(["value", "n", "inf_y0", "inf_q0", "predicted_t_bound", "detected_t", "status"])?;
    for r in &rows {
        let opt = |v: Option<f64>| v.map(float).unwrap_or_default();
        let status = match &r.status {
            Ok(s) => s.as_str().to_string(),
            Err(_) => "error".to_string(),
        };
        w.write_record([
            float(r.value),
            float(r.n),
            float(r.inf_y0),
            float(r.inf_q0),
            opt(r.predicted_t_bound),
            opt(r.detected_t),
            status,
        ])?;
    }
    w.flush()?;
    for r in &rows {
        match &r.status {
            Ok(s) => println!("{axis}={} {}", float(r.value), s.as_str()),
            Err(e) => eprintln!("{axis}={} failed: {e}", float(r.value)),
        }
    }
    report_monotonicity(&rows);
    Ok(rows)
}

/// Reports, without asserting, whether blow-up sets in monotonically along the axis.
fn report_monotonicity(rows: &[SweepRow]) {
    let flags: Vec<bool> = rows
        .iter()
        .filter_map(|r| r.status.as_ref().ok().map(|s| *s == RunStatus::BlewUp))
        .collect();
    let flips = flags.windows(2).filter(|w| w[0] != w[1]).count();
    println!("blow-up status changes {flips} time(s) along the axis");
}
