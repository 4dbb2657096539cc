//! CSV and JSON writers. Every float is written with 17 significant digits.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use gradcat_core::pipeline::Analysis;
use gradcat_core::solver::{CharacteristicPath, Trajectory};
use gradcat_core::thermo::Thermo;
use gradcat_core::verify::{MonitorKind, MonitorLog};
use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter, Serializer};
use serde_json::json;

pub fn float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(float).unwrap_or_default()
}

/// Pretty JSON whose floats carry 17 significant digits.
struct Precise(PrettyFormatter<'static>);

impl Formatter for Precise {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        w.write_all(float(value).as_bytes())
    }

    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = Serializer::with_formatter(&mut buf, Precise(PrettyFormatter::new()));
    value.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf)?)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    std::fs::write(path, json_string(value)?).with_context(|| format!("writing {}", path.display()))
}

fn csv_writer(path: &Path) -> Result<csv::Writer<BufWriter<File>>> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(csv::Writer::from_writer(BufWriter::new(file)))
}

/// `t, x, tau, u, c, p, h, s, r, y, q` on every `stride`-th level and the last one.
pub fn write_trajectory(path: &Path, thermo: &Thermo, traj: &Trajectory, stride: usize) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["t", "x", "tau", "u", "c", "p", "h", "s", "r", "y", "q"])?;
    let last = traj.levels.len().saturating_sub(1);
    let centers = traj.grid.centers();
    for (k, level) in traj.levels.iter().enumerate() {
        if k % stride.max(1) != 0 && k != last {
            continue;
        }
        for (i, &x) in centers.iter().enumerate() {
            let h = level.h[i];
            let (u, tau) = (level.u[i], level.tau[i]);
            let fields = [
                level.t,
                x,
                tau,
                u,
                level.c[i],
                thermo.pressure(tau, x),
                h,
                u + h,
                u - h,
                level.y[i],
                level.q[i],
            ];
            w.write_record(fields.iter().map(|&v| float(v)))?;
        }
    }
    w.flush()?;
    Ok(())
}

/// `t, x, y, y_fd, a0, a1, a2`; on backward paths `y` holds `q`.
pub fn write_path(path: &Path, p: &CharacteristicPath) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["t", "x", "y", "y_fd", "a0", "a1", "a2"])?;
    for s in &p.samples {
        w.write_record([s.t, s.x, s.y, s.y_fd, s.a0, s.a1, s.a2].iter().map(|&v| float(v)))?;
    }
    w.flush()?;
    Ok(())
}

/// Per-step margins, one column per monitor; empty where a monitor does not apply.
pub fn write_monitor_csv(path: &Path, log: &MonitorLog) -> Result<()> {
    let mut w = csv_writer(path)?;
    let mut header = vec!["t"];
    header.extend(log.names());
    w.write_record(&header)?;
    for (k, &t) in log.times.iter().enumerate() {
        let mut row = vec![float(t)];
        row.extend(log.monitors.iter().map(|m| opt(m.margins.get(k).copied().flatten())));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn monitor_summary(log: &MonitorLog) -> serde_json::Value {
    let checks: Vec<_> = log
        .monitors
        .iter()
        .map(|m| {
            json!({
                "name": m.name,
                "kind": m.kind,
                "statement": m.statement,
                "worst_margin": m.worst_margin,
                "worst_at": m.worst_at,
                "first_violation": m.first_violation,
                "violations": m.violations,
                "counted": m.kind == MonitorKind::Inequality,
            })
        })
        .collect();
    json!({
        "slack": log.slack,
        "levels": log.times.len(),
        "violated": log.violations().iter().map(|m| m.name).collect::<Vec<_>>(),
        "checks": checks,
    })
}

pub fn report_json(an: &Analysis) -> serde_json::Value {
    let p = &an.prep;
    let r = &an.outcome.report;
    json!({
        "threshold": {
            "n": p.n,
            "estimate": p.threshold,
            "recheck": an.threshold_recheck,
        },
        "envelopes": { "Y": p.y_env, "Q": p.q_env },
        "a2_bound": p.growth,
        "blowup_bound": {
            "eps": r.eps,
            "criterion_triggered": r.criterion_triggered,
            "criterion_side": r.criterion_side,
            "predicted_t_bound": r.predicted_t_bound,
        },
        "bounds": p.bounds,
        "tau_bounds": p.tau_bounds,
        "extrapolated_segments": p.extrapolated_segments,
        "report": r,
    })
}

/// Writes the full artifact set of one run into `dir`.
pub fn write_run(dir: &Path, thermo: &Thermo, an: &Analysis, stride: usize, config_toml: &str) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    std::fs::write(dir.join("config.toml"), config_toml)?;
    write_trajectory(&dir.join("trajectory.csv"), thermo, &an.outcome.trajectory, stride)?;
    for p in &an.outcome.paths {
        write_path(&dir.join(format!("path_{}.csv", direction_name(p))), p)?;
    }
    write_json(&dir.join("report.json"), &report_json(an))?;
    write_json(&dir.join("monitors.json"), &monitor_summary(&an.monitors))?;
    write_monitor_csv(&dir.join("monitors.csv"), &an.monitors)?;
    Ok(())
}

fn direction_name(p: &CharacteristicPath) -> &'static str {
    match p.direction {
        gradcat_core::riccati::Direction::Forward => "forward",
        gradcat_core::riccati::Direction::Backward => "backward",
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_carry_seventeen_digits() {
        assert_eq!(float(0.1), "1.0000000000000001e-1");
        assert_eq!(float(-2.0), "-2.0000000000000000e0");
        let s = json_string(&json!({"a": 1.5, "b": [0.25], "n": 3, "z": f64::NAN})).unwrap();
        assert!(s.contains("1.5000000000000000e0"), "{s}");
        assert!(s.contains("2.5000000000000000e-1"));
        assert!(s.contains("\"n\": 3"));
        assert!(s.contains("null"));
        let back: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["a"], 1.5);
    }
}
