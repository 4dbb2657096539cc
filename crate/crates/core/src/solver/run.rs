//! Time stepping to a horizon with online blow-up detection.

use serde::{Deserialize, Serialize};

use super::field::{FieldState, Level};
use super::trace::{CharacteristicPath, CoefficientSource, Tracer};
use super::{Simulation, Trajectory};
use crate::error::SolverError;
use crate::riccati::{blowup_time_bound, envelopes, ode::Direction, A2Growth};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RunStatus {
    BlewUp,
    RanToHorizon,
    Aborted,
}

impl RunStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            RunStatus::BlewUp => "blew-up",
            RunStatus::RanToHorizon => "ran-to-horizon",
            RunStatus::Aborted => "aborted",
        }
    }
}

/// Which gradient variable met the criterion or diverged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Side {
    Y,
    Q,
}

impl Side {
    fn direction(self) -> Direction {
        match self {
            Side::Y => Direction::Forward,
            Side::Q => Direction::Backward,
        }
    }
}

/// What detected the blow-up.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Trigger {
    /// `1/y` along a traced characteristic crossed zero.
    Riccati,
    /// `max(|y|, |q|)` on the grid reached the sentinel.
    FieldSentinel,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    pub horizon: f64,
    /// Gradient sentinel; `None` uses `10³·max(|y₀|, |q₀|)`.
    pub sentinel: Option<f64>,
    pub eps: f64,
    /// Threshold `N` of the criterion.
    pub n: f64,
    /// Growth constants for the analytic time bound.
    pub growth: Option<A2Growth>,
    pub max_steps: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            horizon: 1.0,
            sentinel: None,
            eps: 0.05,
            n: 0.0,
            growth: None,
            max_steps: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlowupReport {
    pub n: f64,
    pub y_env: f64,
    pub q_env: f64,
    pub inf_y0: f64,
    pub inf_q0: f64,
    pub argmin_y0: f64,
    pub argmin_q0: f64,
    pub eps: f64,
    pub sentinel: f64,
    pub criterion_triggered: bool,
    pub criterion_side: Option<Side>,
    pub predicted_t_bound: Option<f64>,
    pub detected_t: Option<f64>,
    pub detected_bracket: Option<[f64; 2]>,
    pub detected_x: Option<f64>,
    pub detected_side: Option<Side>,
    pub trigger: Option<Trigger>,
    pub status: RunStatus,
    pub abort_reason: Option<String>,
    pub steps: usize,
    pub final_t: f64,
}

pub struct RunOutcome {
    pub trajectory: Trajectory,
    pub report: BlowupReport,
    /// Online paths from `argmin y₀` (forward) and `argmin q₀` (backward).
    pub paths: Vec<CharacteristicPath>,
}

fn argmin(grid_x: impl Fn(usize) -> f64, v: &[f64]) -> (f64, f64) {
    let (i, m) = v
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::INFINITY), |(bi, bm), (i, x)| if x < bm { (i, x) } else { (bi, bm) });
    (m, grid_x(i))
}

/// Initial-data part of the report: infima, envelopes, criterion and time bound.
fn criterion(sim_grid: &super::Grid, level0: &Level, opts: &RunOptions, sentinel: f64) -> BlowupReport {
    let (inf_y0, argmin_y0) = argmin(|i| sim_grid.center(i), &level0.y);
    let (inf_q0, argmin_q0) = argmin(|i| sim_grid.center(i), &level0.q);
    let (y_env, q_env) = envelopes(opts.n, &level0.y, &level0.q);
    let threshold = -(1.0 + opts.eps) * opts.n;
    let mut side = None;
    let mut bound: Option<f64> = None;
    for (s, inf) in [(Side::Y, inf_y0), (Side::Q, inf_q0)] {
        if inf < threshold && inf < 0.0 {
            let b = opts
                .growth
                .and_then(|g| blowup_time_bound(inf, opts.eps, g.k14, g.k15).ok());
            let better = match (bound, b) {
                (None, _) => true,
                (Some(old), Some(new)) => new < old,
                (Some(_), None) => false,
            };
            if side.is_none() || better {
                side = Some(s);
                bound = b.or(bound);
            }
        }
    }
    BlowupReport {
        n: opts.n,
        y_env,
        q_env,
        inf_y0,
        inf_q0,
        argmin_y0,
        argmin_q0,
        eps: opts.eps,
        sentinel,
        criterion_triggered: side.is_some(),
        criterion_side: side,
        predicted_t_bound: bound,
        detected_t: None,
        detected_bracket: None,
        detected_x: None,
        detected_side: None,
        trigger: None,
        status: RunStatus::RanToHorizon,
        abort_reason: None,
        steps: 0,
        final_t: 0.0,
    }
}

fn default_sentinel(level0: &Level) -> f64 {
    let m = level0.max_gradient();
    if m > 0.0 {
        1e3 * m
    } else {
        f64::INFINITY
    }
}

fn sentinel_hit(level: &Level, sentinel: f64) -> Option<(usize, Side)> {
    let (iy, my) = level
        .y
        .iter()
        .enumerate()
        .fold((0, 0.0f64), |b, (i, v)| if v.abs() > b.1 { (i, v.abs()) } else { b });
    let (iq, mq) = level
        .q
        .iter()
        .enumerate()
        .fold((0, 0.0f64), |b, (i, v)| if v.abs() > b.1 { (i, v.abs()) } else { b });
    if my.max(mq) >= sentinel {
        Some(if my >= mq { (iy, Side::Y) } else { (iq, Side::Q) })
    } else {
        None
    }
}

fn record_path_blowup(report: &mut BlowupReport, tracers: &[(Side, Tracer)], t_lo: f64, t_hi: f64) -> bool {
    let first = tracers
        .iter()
        .filter_map(|(s, tr)| tr.path.blowup.map(|(t, x)| (t, x, *s)))
        .min_by(|a, b| a.0.total_cmp(&b.0));
    if let Some((t, x, s)) = first {
        report.status = RunStatus::BlewUp;
        report.trigger = Some(Trigger::Riccati);
        report.detected_t = Some(t);
        report.detected_bracket = Some([t_lo, t_hi]);
        report.detected_x = Some(x);
        report.detected_side = Some(s);
        true
    } else {
        false
    }
}

/// Advances `field0` until the horizon, an abort, or blow-up. Characteristics
/// from the initial minima of `y` and `q` are traced online.
pub fn run(
    sim: &Simulation,
    field0: FieldState,
    opts: &RunOptions,
    source: &dyn CoefficientSource,
) -> Result<RunOutcome, SolverError> {
    let grid = sim.grid;
    let level0 = sim.derive(&field0)?;
    let sentinel = opts.sentinel.unwrap_or_else(|| default_sentinel(&level0));
    let mut report = criterion(&grid, &level0, opts, sentinel);
    let mut tracers = vec![
        (
            Side::Y,
            Tracer::start(&grid, &level0, report.argmin_y0, Side::Y.direction(), source)?,
        ),
        (
            Side::Q,
            Tracer::start(&grid, &level0, report.argmin_q0, Side::Q.direction(), source)?,
        ),
    ];
    let mut levels = vec![level0];
    let mut state = field0;
    loop {
        let current = levels.last().expect("at least one level");
        if current.t >= opts.horizon {
            report.status = RunStatus::RanToHorizon;
            break;
        }
        if report.steps >= opts.max_steps {
            report.status = RunStatus::Aborted;
            report.abort_reason = Some(format!("step limit {} reached", opts.max_steps));
            break;
        }
        let dt = sim.stable_dt(&current.c).min(opts.horizon - current.t);
        let next = match sim.step_field(&state, dt).and_then(|s| {
            let lv = sim.derive(&s)?;
            Ok((s, lv))
        }) {
            Ok(v) => v,
            Err(e) => {
                report.status = RunStatus::Aborted;
                report.abort_reason = Some(e.to_string());
                break;
            }
        };
        let (new_state, new_level) = next;
        state = new_state;
        report.steps += 1;
        let prev = levels.last().expect("at least one level");
        for (_, tr) in tracers.iter_mut() {
            tr.step(&grid, prev, &new_level, source)?;
        }
        let (t_lo, t_hi) = (prev.t, new_level.t);
        let hit = sentinel_hit(&new_level, sentinel);
        levels.push(new_level);
        if record_path_blowup(&mut report, &tracers, t_lo, t_hi) {
            break;
        }
        if let Some((i, side)) = hit {
            report.status = RunStatus::BlewUp;
            report.trigger = Some(Trigger::FieldSentinel);
            report.detected_t = Some(t_hi);
            report.detected_bracket = Some([t_lo, t_hi]);
            report.detected_x = Some(grid.center(i));
            report.detected_side = Some(side);
            break;
        }
    }
    let trajectory = Trajectory { grid, levels };
    report.final_t = trajectory.final_time();
    Ok(RunOutcome {
        trajectory,
        report,
        paths: tracers.into_iter().map(|(_, t)| t.path).collect(),
    })
}

/// Offline detection on a stored trajectory: re-traces both characteristics
/// from the initial minima and scans for the field sentinel.
pub fn detect_blowup(
    trajectory: &Trajectory,
    opts: &RunOptions,
    source: &dyn CoefficientSource,
) -> Result<BlowupReport, SolverError> {
    let grid = trajectory.grid;
    let level0 = trajectory.initial();
    let sentinel = opts.sentinel.unwrap_or_else(|| default_sentinel(level0));
    let mut report = criterion(&grid, level0, opts, sentinel);
    report.steps = trajectory.levels.len() - 1;
    report.final_t = trajectory.final_time();
    report.status = if report.final_t >= opts.horizon {
        RunStatus::RanToHorizon
    } else {
        RunStatus::Aborted
    };
    let mut tracers = vec![
        (Side::Y, Tracer::start(&grid, level0, report.argmin_y0, Direction::Forward, source)?),
        (Side::Q, Tracer::start(&grid, level0, report.argmin_q0, Direction::Backward, source)?),
    ];
    for pair in trajectory.levels.windows(2) {
        for (_, tr) in tracers.iter_mut() {
            tr.step(&grid, &pair[0], &pair[1], source)?;
        }
        if record_path_blowup(&mut report, &tracers, pair[0].t, pair[1].t) {
            return Ok(report);
        }
        if let Some((i, side)) = sentinel_hit(&pair[1], sentinel) {
            report.status = RunStatus::BlewUp;
            report.trigger = Some(Trigger::FieldSentinel);
            report.detected_t = Some(pair[1].t);
            report.detected_bracket = Some([pair[0].t, pair[1].t]);
            report.detected_x = Some(grid.center(i));
            report.detected_side = Some(side);
            return Ok(report);
        }
    }
    if report.status == RunStatus::Aborted && report.detected_t.is_none() {
        report.abort_reason = Some("trajectory ends before the horizon".into());
    }
    Ok(report)
}
