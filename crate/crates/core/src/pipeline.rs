//! End-to-end analysis: bounds, threshold, envelopes, run, monitors.

use serde::Serialize;

use crate::eos::StateBox;
use crate::error::Error;
use crate::numerics::uniform_points;
use crate::riccati::{a2_growth_constants, estimate_n, A2Growth, ThresholdEstimate};
use crate::solver::{
    run, FieldCoefficients, Grid, InitialData, Level, RunOptions, RunOutcome, Simulation, DEFAULT_CFL,
};
use crate::thermo::{LatticeSpec, Thermo};
use crate::verify::{
    bound_constants, monitor_run, tau_min_over, BoundConstants, BoundInputs, MonitorInputs, MonitorLog, TauBounds,
    MONITOR_SLACK,
};

/// Headroom applied to the initial sup of `|s|`, `|r|`.
pub const RIEMANN_HEADROOM: f64 = 1.01;

/// Everything needed for one run.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub thermo: Thermo,
    pub grid: Grid,
    pub initial: InitialData,
    pub horizon: f64,
    pub sentinel: Option<f64>,
    pub eps: f64,
    pub cfl: f64,
    /// `None` uses `10⁻⁴ · min τ₀`.
    pub tau_floor: Option<f64>,
    /// Samples per axis for the threshold estimate.
    pub threshold_samples: usize,
    /// Replaces the estimated `N` (synthetic-threshold experiments).
    pub n_override: Option<f64>,
    pub max_steps: usize,
}

impl Scenario {
    pub fn new(thermo: Thermo, grid: Grid, initial: InitialData, horizon: f64) -> Self {
        Self {
            thermo,
            grid,
            initial,
            horizon,
            sentinel: None,
            eps: 0.05,
            cfl: DEFAULT_CFL,
            tau_floor: None,
            threshold_samples: 24,
            n_override: None,
            max_steps: 1_000_000,
        }
    }
}

/// Constants derived from the initial data before the run.
#[derive(Debug, Clone, Serialize)]
pub struct Preparation {
    pub bounds: BoundConstants,
    pub tau_bounds: TauBounds,
    pub threshold: ThresholdEstimate,
    pub n: f64,
    pub y_env: f64,
    pub q_env: f64,
    pub growth: A2Growth,
    /// Number of monotone entropy segments beyond the three the cascade is proved for.
    pub extrapolated_segments: usize,
}

pub struct Analysis {
    pub prep: Preparation,
    pub outcome: RunOutcome,
    pub monitors: MonitorLog,
    /// Threshold re-estimated on a box covering the observed `τ` range, when the run left the original box.
    pub threshold_recheck: Option<ThresholdEstimate>,
}

/// `k_s`, `k_r` from the initial Riemann invariants with 1% headroom; `k_ml`, `k_mr`, `V` from the profile.
pub fn bound_inputs(thermo: &Thermo, level0: &Level) -> BoundInputs {
    let sup = |v: Vec<f64>| v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let (k_ml, k_mr) = thermo.profile.weight_bounds();
    let c = &thermo.law.constants;
    BoundInputs {
        k: c.k,
        k1: c.k1,
        k2: c.k2,
        k_ml,
        k_mr,
        k_s: RIEMANN_HEADROOM * sup(level0.s()).max(f64::MIN_POSITIVE),
        k_r: RIEMANN_HEADROOM * sup(level0.r()).max(f64::MIN_POSITIVE),
        v: thermo.profile.total_variation(),
    }
}

fn entropy_samples(thermo: &Thermo) -> Vec<f64> {
    let (lo, hi) = thermo.profile.entropy_range();
    if hi > lo {
        uniform_points(lo, hi, 9)
    } else {
        vec![lo]
    }
}

fn tau_range(level: &Level) -> (f64, f64) {
    level
        .tau
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &t| (lo.min(t), hi.max(t)))
}

/// Bounds, lattice, threshold and growth constants; returns the simulation-ready thermo.
pub fn prepare(sc: &mut Scenario) -> Result<(Preparation, Level), Error> {
    let state0 = sc.initial.sample(&sc.grid);
    let floor = sc.tau_floor.unwrap_or_else(|| Simulation::default_floor(&state0));
    // s, r need only h, so bounds come before the lattice
    let level_h = {
        let sim = Simulation::new(&sc.thermo, sc.grid, sc.cfl, floor)?;
        if sc.thermo.is_isentropic() {
            sim.derive(&state0)?
        } else {
            let mut h = Vec::with_capacity(state0.tau.len());
            for (i, &tau) in state0.tau.iter().enumerate() {
                h.push(sc.thermo.h(tau, sc.grid.center(i))?);
            }
            Level {
                t: 0.0,
                tau: state0.tau.clone(),
                u: state0.u.clone(),
                c: Vec::new(),
                h,
                y: Vec::new(),
                q: Vec::new(),
            }
        }
    };
    let bounds = bound_constants(bound_inputs(&sc.thermo, &level_h))?;
    let tau_bounds = tau_min_over(&sc.thermo.law, &entropy_samples(&sc.thermo), bounds.h_max())?;
    let (tau0_lo, tau0_hi) = tau_range(&level_h);
    let tau_box_hi = 2.0 * tau0_hi;
    if !sc.thermo.is_isentropic() {
        sc.thermo.build_lattice(LatticeSpec {
            tau_min: 0.5 * tau_bounds.tau_min.min(tau0_lo),
            tau_max: 2.0 * tau_box_hi,
            tau_points: 160,
            entropy_points: 65,
        })?;
    }
    let sim = Simulation::new(&sc.thermo, sc.grid, sc.cfl, floor)?;
    let level0 = sim.derive(&state0)?;
    let state_box = StateBox::new(
        (tau_bounds.tau_min.min(tau0_lo), tau_box_hi),
        (sc.grid.x_left, sc.grid.x_right),
    )?;
    let threshold = estimate_n(&sc.thermo, state_box, sc.threshold_samples, Some((tau0_lo, tau0_hi)))?;
    let n = sc.n_override.unwrap_or(threshold.n);
    let (y_env, q_env) = crate::riccati::envelopes(n, &level0.y, &level0.q);
    let growth = a2_growth_constants(&sc.thermo, tau_bounds.tau_min, &sc.grid.centers(), &level0.tau, y_env, q_env)?;
    let extrapolated_segments = sc.thermo.profile.monotone_segments().len().saturating_sub(3);
    Ok((
        Preparation {
            bounds,
            tau_bounds,
            threshold,
            n,
            y_env,
            q_env,
            growth,
            extrapolated_segments,
        },
        level0,
    ))
}

/// Runs the full pipeline.
pub fn analyze(sc: &mut Scenario) -> Result<Analysis, Error> {
    let (prep, level0) = prepare(sc)?;
    let floor = sc
        .tau_floor
        .unwrap_or_else(|| Simulation::default_floor(&level0.state()));
    let thermo = &sc.thermo;
    let sim = Simulation::new(thermo, sc.grid, sc.cfl, floor)?;
    let opts = RunOptions {
        horizon: sc.horizon,
        sentinel: sc.sentinel,
        eps: sc.eps,
        n: prep.n,
        growth: Some(prep.growth),
        max_steps: sc.max_steps,
    };
    let source = FieldCoefficients { thermo };
    let outcome = run(&sim, level0.state(), &opts, &source)?;
    let monitors = monitor_run(
        thermo,
        &outcome.trajectory,
        &MonitorInputs {
            bounds: &prep.bounds,
            tau: &prep.tau_bounds,
            n: prep.n,
            y_env: prep.y_env,
            q_env: prep.q_env,
            growth: &prep.growth,
            eps: sc.eps,
            slack: MONITOR_SLACK,
        },
    )?;
    let tau_hi = outcome
        .trajectory
        .levels
        .iter()
        .flat_map(|l| l.tau.iter())
        .fold(0.0f64, |m, &t| m.max(t));
    let threshold_recheck = if tau_hi > prep.threshold.state_box.tau.1 {
        let b = StateBox::new(
            (prep.threshold.state_box.tau.0, 1.1 * tau_hi),
            prep.threshold.state_box.x,
        )?;
        Some(estimate_n(thermo, b, sc.threshold_samples, None)?)
    } else {
        None
    };
    Ok(Analysis {
        prep,
        outcome,
        monitors,
        threshold_recheck,
    })
}
