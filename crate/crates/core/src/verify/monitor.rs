//! Re-evaluation of every proved inequality at each stored time level.

use serde::Serialize;

use super::bounds::{BoundConstants, TauBounds};
use crate::error::{ThermoError, VerifyError};
use crate::numerics::{integrate, QuadTolerance};
use crate::riccati::{self, a2_closed_form, A2Growth};
use crate::solver::{cell_derivative, Level, Trajectory};
use crate::thermo::Thermo;

/// Relative slack for bounds proved for exact solutions and checked on a discretization.
pub const MONITOR_SLACK: f64 = 1e-3;

/// Names of all monitored relations, one per line after a version header.
pub const MONITOR_MANIFEST: &str = include_str!("../../monitors.manifest");

pub fn manifest_names() -> Vec<&'static str> {
    MONITOR_MANIFEST
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#') && !l.starts_with("version"))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MonitorKind {
    /// A proved inequality; negative margins beyond the slack are violations.
    Inequality,
    /// An identity; the margin is minus the relative residual and is only reported.
    Identity,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonitorSeries {
    pub name: &'static str,
    pub kind: MonitorKind,
    pub statement: &'static str,
    /// Worst margin per stored level; `None` where the relation does not apply.
    pub margins: Vec<Option<f64>>,
    pub worst_margin: Option<f64>,
    /// `(t, x)` of the worst margin.
    pub worst_at: Option<(f64, f64)>,
    pub first_violation: Option<(f64, f64)>,
    pub violations: usize,
}

impl MonitorSeries {
    fn new(name: &'static str, kind: MonitorKind, statement: &'static str) -> Self {
        Self {
            name,
            kind,
            statement,
            margins: Vec::new(),
            worst_margin: None,
            worst_at: None,
            first_violation: None,
            violations: 0,
        }
    }

    fn push(&mut self, t: f64, worst: Option<(f64, f64)>, slack: f64) {
        let Some((m, x)) = worst else {
            self.margins.push(None);
            return;
        };
        self.margins.push(Some(m));
        if self.worst_margin.map_or(true, |w| m < w) {
            self.worst_margin = Some(m);
            self.worst_at = Some((t, x));
        }
        if self.kind == MonitorKind::Inequality && m < -slack {
            self.violations += 1;
            if self.first_violation.is_none() {
                self.first_violation = Some((t, x));
            }
        }
    }

    pub fn violated(&self) -> bool {
        self.violations > 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonitorLog {
    pub slack: f64,
    pub times: Vec<f64>,
    pub monitors: Vec<MonitorSeries>,
}

impl MonitorLog {
    pub fn get(&self, name: &str) -> Option<&MonitorSeries> {
        self.monitors.iter().find(|m| m.name == name)
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.monitors.iter().map(|m| m.name).collect()
    }

    pub fn violations(&self) -> Vec<&MonitorSeries> {
        self.monitors.iter().filter(|m| m.violated()).collect()
    }
}

/// Constants the monitors compare against.
#[derive(Debug, Clone, Copy)]
pub struct MonitorInputs<'a> {
    pub bounds: &'a BoundConstants,
    pub tau: &'a TauBounds,
    pub n: f64,
    pub y_env: f64,
    pub q_env: f64,
    pub growth: &'a A2Growth,
    pub eps: f64,
    pub slack: f64,
}

const NAMES: [(&str, MonitorKind, &str); 18] = [
    ("p_leq_ch", MonitorKind::Inequality, "p <= c h"),
    ("pressure_sandwich", MonitorKind::Inequality, "c h <= k p"),
    ("sound_speed_slope", MonitorKind::Inequality, "k (p/c)_tau <= -c"),
    ("weight_bounds", MonitorKind::Inequality, "k_ml <= m(x) <= k_mr"),
    ("initial_riemann_bounds", MonitorKind::Inequality, "|s(.,0)| <= k_s, |r(.,0)| <= k_r"),
    ("s_bound", MonitorKind::Inequality, "|s| <= n_s"),
    ("r_bound", MonitorKind::Inequality, "|r| <= n_r"),
    ("tau_min", MonitorKind::Inequality, "tau >= tau_min"),
    ("density_max", MonitorKind::Inequality, "rho <= 1/tau_min"),
    ("sound_speed_max", MonitorKind::Inequality, "c <= c_max"),
    ("pressure_max", MonitorKind::Inequality, "p <= c_max h_max"),
    ("y_upper_envelope", MonitorKind::Inequality, "y <= Y"),
    ("q_upper_envelope", MonitorKind::Inequality, "q <= Q"),
    ("a2_inverse_growth", MonitorKind::Inequality, "1/a2 <= k14 t + k15"),
    ("sqrt_c_volume_growth", MonitorKind::Inequality, "int_{tau_min}^{tau} (-p_xi)^{1/4} <= k16 t + k17"),
    (
        "riccati_eps_sign",
        MonitorKind::Inequality,
        "a0 + a1 y - (1-eps) a2 y^2 <= 0 for y <= -N (and the q analogue)",
    ),
    (
        "s_plus_r_minus_sandwich",
        MonitorKind::Inequality,
        "-(p/k1) m'/m <= d+s = d-r <= -(p/k2) m'/m where S' != 0",
    ),
    ("partial_sr_identity", MonitorKind::Identity, "d+s = d-r = -p_mu (finite differences)"),
];

fn fold_min(acc: Option<(f64, f64)>, m: f64, x: f64) -> Option<(f64, f64)> {
    match acc {
        Some((w, _)) if w <= m => acc,
        _ => Some((m, x)),
    }
}

struct CellStatic {
    x: f64,
    s: f64,
    s_prime: f64,
    weight: f64,
    log_weight_slope: f64,
}

/// Checks every monitored relation at each stored level of `trajectory`.
pub fn monitor_run(thermo: &Thermo, trajectory: &Trajectory, inp: &MonitorInputs) -> Result<MonitorLog, VerifyError> {
    let grid = &trajectory.grid;
    let cells: Vec<CellStatic> = grid
        .centers()
        .into_iter()
        .map(|x| CellStatic {
            x,
            s: thermo.profile.s(x),
            s_prime: thermo.profile.s_prime(x),
            weight: thermo.profile.weight(x),
            log_weight_slope: thermo.profile.log_weight_slope(x),
        })
        .collect();
    let law = &thermo.law;
    let k = law.constants.k;
    let (k1, k2) = (law.constants.k1, law.constants.k2);
    let b = inp.bounds;
    let tb = inp.tau;
    let g = inp.growth;
    let level0 = trajectory.initial();
    let grad_scale = level0.max_gradient().max(inp.y_env.abs()).max(inp.q_env.abs()).max(1e-300);

    let mut series: Vec<MonitorSeries> = NAMES.iter().map(|(n, k, s)| MonitorSeries::new(n, *k, s)).collect();
    let tol = QuadTolerance {
        rel: 1e-10,
        ..QuadTolerance::default()
    };
    // running ∫_{τ_min}^{τ} (−p_ξ)^{1/4} per cell
    let quarter = |a: f64, bnd: f64, s: f64| -> Result<f64, VerifyError> {
        Ok(integrate(|xi| (-law.function.partials(xi, s).p_tau).powf(0.25), a, bnd, tol)?.value)
    };
    let mut volume: Vec<f64> = cells
        .iter()
        .zip(&level0.tau)
        .map(|(c, &tau)| quarter(tb.tau_min, tau, c.s))
        .collect::<Result<_, _>>()?;
    let mut prev: Option<&Level> = None;

    for level in &trajectory.levels {
        let t = level.t;
        let mut w = [None::<(f64, f64)>; 18];
        if let Some(p) = prev {
            for (i, c) in cells.iter().enumerate() {
                volume[i] += quarter(p.tau[i], level.tau[i], c.s)?;
            }
        }
        let s_all = level.s();
        let r_all = level.r();
        let s_x = cell_derivative(grid, &s_all);
        let r_x = cell_derivative(grid, &r_all);
        let mut ident_scale = 0.0f64;
        let mut ident_res: Vec<f64> = Vec::new();
        let prev_sr = prev.map(|p| {
            let ps = p.s();
            let pr = p.r();
            let psx = cell_derivative(grid, &ps);
            let prx = cell_derivative(grid, &pr);
            (p.t, ps, pr, psx, prx, p.c.clone())
        });
        for (i, cell) in cells.iter().enumerate() {
            let x = cell.x;
            let tau = level.tau[i];
            let d = law.partials(tau, cell.s).map_err(ThermoError::from)?;
            let p = d.p;
            let c = level.c[i];
            let h = level.h[i];
            let ch = c * h;
            w[0] = fold_min(w[0], (ch - p) / ch, x);
            w[1] = fold_min(w[1], (k * p - ch) / (k * p), x);
            let xx = -d.p_tau;
            let p_over_c_tau = -c + 0.5 * p * d.p_tau_tau * xx.powf(-1.5);
            w[2] = fold_min(w[2], (-c - k * p_over_c_tau) / c, x);
            let (k_ml, k_mr) = (b.inputs.k_ml, b.inputs.k_mr);
            w[3] = fold_min(
                w[3],
                ((cell.weight - k_ml) / k_ml).min((k_mr - cell.weight) / k_mr),
                x,
            );
            if prev.is_none() {
                let m = ((b.inputs.k_s - s_all[i].abs()) / b.inputs.k_s).min((b.inputs.k_r - r_all[i].abs()) / b.inputs.k_r);
                w[4] = fold_min(w[4], m, x);
            }
            w[5] = fold_min(w[5], (b.n_s - s_all[i].abs()) / b.n_s, x);
            w[6] = fold_min(w[6], (b.n_r - r_all[i].abs()) / b.n_r, x);
            w[7] = fold_min(w[7], (tau - tb.tau_min) / tb.tau_min, x);
            let rho_max = tb.rho_max();
            w[8] = fold_min(w[8], (rho_max - 1.0 / tau) / rho_max, x);
            w[9] = fold_min(w[9], (tb.c_max - c) / tb.c_max, x);
            w[10] = fold_min(w[10], (tb.p_max - p) / tb.p_max, x);
            w[11] = fold_min(w[11], (inp.y_env - level.y[i]) / grad_scale, x);
            w[12] = fold_min(w[12], (inp.q_env - level.q[i]) / grad_scale, x);
            let a2 = a2_closed_form(&d);
            let a2_bound = g.inverse_a2_bound(t);
            w[13] = fold_min(w[13], (a2_bound - 1.0 / a2) / a2_bound, x);
            let vb = g.volume_bound(t).max(1e-300);
            w[14] = fold_min(w[14], (vb - volume[i]) / vb, x);
            let (y, q) = (level.y[i], level.q[i]);
            if y <= -inp.n || q <= -inp.n {
                let co = riccati::coefficients(thermo, tau, x)?;
                let mut check = |v: f64, a1: f64| {
                    if v <= -inp.n && v != 0.0 {
                        let val = co.a0 + a1 * v - (1.0 - inp.eps) * co.a2 * v * v;
                        w[15] = fold_min(w[15], -val / (co.a2 * v * v), x);
                    }
                };
                check(y, co.a1);
                check(q, -co.a1);
            }
            if cell.s_prime != 0.0 {
                let mu = thermo.mu_partials(tau, x)?;
                let val = -mu.p_mu;
                let lo = -(p / k1) * cell.log_weight_slope;
                let hi = -(p / k2) * cell.log_weight_slope;
                let scale = (p * cell.log_weight_slope).abs().max(1e-300);
                w[16] = fold_min(w[16], ((val - lo).min(hi - val)) / scale, x);
            }
            if let Some((t0, ps, pr, psx, prx, pc)) = &prev_sr {
                let dt = t - t0;
                let p_mu = if cell.s_prime != 0.0 {
                    thermo.mu_partials(tau, x)?.p_mu
                } else {
                    0.0
                };
                let plus_s = (s_all[i] - ps[i]) / dt + 0.5 * (c * s_x[i] + pc[i] * psx[i]);
                let minus_r = (r_all[i] - pr[i]) / dt - 0.5 * (c * r_x[i] + pc[i] * prx[i]);
                ident_scale = ident_scale
                    .max(p_mu.abs())
                    .max((c * s_x[i]).abs())
                    .max((c * r_x[i]).abs());
                ident_res.push((plus_s + p_mu).abs().max((minus_r + p_mu).abs()));
            }
        }
        if !ident_res.is_empty() {
            let scale = ident_scale.max(1e-300);
            for (i, r) in ident_res.iter().enumerate() {
                w[17] = fold_min(w[17], -r / scale, cells[i].x);
            }
        }
        for (s, wi) in series.iter_mut().zip(w) {
            s.push(t, wi, inp.slack);
        }
        prev = Some(level);
    }
    Ok(MonitorLog {
        slack: inp.slack,
        times: trajectory.levels.iter().map(|l| l.t).collect(),
        monitors: series,
    })
}
