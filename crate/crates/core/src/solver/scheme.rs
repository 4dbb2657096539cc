//! Second-order conservative central scheme for `τ_t − u_x = 0, u_t + p_x = 0`.
//!
//! Pressure and velocity are reconstructed with minmod slopes (so a resting
//! entropy contact, `p` and `u` uniform, is an exact steady state) and coupled
//! through the local acoustic flux with impedance `Z = max(c_L, c_R)`:
//!
//! `u* = ½(u_L + u_R) − (p_R − p_L)/(2Z)`, `p* = ½(p_L + p_R) − ½Z(u_R − u_L)`.
//!
//! Time integration is two-stage SSP Runge–Kutta.

use rayon::prelude::*;

use super::field::{CellEntropy, FieldState};
use super::grid::{Boundary, Grid};
use crate::error::{SolverError, ThermoError};
use crate::thermo::Thermo;

pub const DEFAULT_CFL: f64 = 0.4;

/// Limiter parameter of the generalized minmod; 1 is the most dissipative member.
pub const LIMITER_THETA: f64 = 1.5;

/// Generalized minmod of `θ·a`, `(a + b)/2`, `θ·b`; `θ = 1` is plain minmod.
fn minmod(theta: f64, a: f64, b: f64) -> f64 {
    if a * b <= 0.0 {
        return 0.0;
    }
    let m = (theta * a.abs()).min(0.5 * (a + b).abs()).min(theta * b.abs());
    m.copysign(a)
}

/// Extends cell data by two ghost cells per side.
fn with_ghosts(boundary: Boundary, v: &[f64]) -> Vec<f64> {
    let n = v.len();
    let mut out = Vec::with_capacity(n + 4);
    match boundary {
        Boundary::Periodic => {
            out.extend_from_slice(&v[n - 2..]);
            out.extend_from_slice(v);
            out.extend_from_slice(&v[..2]);
        }
        Boundary::Outflow => {
            out.extend_from_slice(&[v[0], v[0]]);
            out.extend_from_slice(v);
            out.extend_from_slice(&[v[n - 1], v[n - 1]]);
        }
    }
    out
}

pub(crate) struct Rates {
    pub dtau: Vec<f64>,
    pub du: Vec<f64>,
}

pub(crate) fn rates(
    thermo: &Thermo,
    grid: &Grid,
    cells: &[CellEntropy],
    t: f64,
    tau: &[f64],
    u: &[f64],
    tau_floor: f64,
) -> Result<Rates, SolverError> {
    let n = tau.len();
    let pc: Vec<(f64, f64)> = (0..n)
        .into_par_iter()
        .with_min_len(256)
        .map(|i| {
            let x = cells[i].x;
            if !tau[i].is_finite() || !u[i].is_finite() {
                return Err(SolverError::NonFinite { t, x });
            }
            if tau[i] < tau_floor {
                return Err(SolverError::TauFloor {
                    t,
                    x,
                    tau: tau[i],
                    floor: tau_floor,
                });
            }
            let d = thermo
                .law
                .partials(tau[i], cells[i].s)
                .map_err(|e| SolverError::Thermo(ThermoError::from(e)))?;
            if !(d.p_tau < 0.0) {
                return Err(SolverError::Thermo(ThermoError::Domain {
                    tau: tau[i],
                    x,
                    p_tau: d.p_tau,
                }));
            }
            Ok((d.p, (-d.p_tau).sqrt()))
        })
        .collect::<Result<_, _>>()?;
    let p: Vec<f64> = pc.iter().map(|v| v.0).collect();
    let c: Vec<f64> = pc.iter().map(|v| v.1).collect();

    let pg = with_ghosts(grid.boundary, &p);
    let ug = with_ghosts(grid.boundary, u);
    let cg = with_ghosts(grid.boundary, &c);
    // slopes for extended cells 1..=n+2 (original −1..=n)
    let slope = |v: &[f64], k: usize| minmod(LIMITER_THETA, v[k] - v[k - 1], v[k + 1] - v[k]);
    let mut p_star = Vec::with_capacity(n + 1);
    let mut u_star = Vec::with_capacity(n + 1);
    // interface between extended cells k and k+1, for k = 1..=n+1
    for k in 1..=n + 1 {
        let p_l = pg[k] + 0.5 * slope(&pg, k);
        let p_r = pg[k + 1] - 0.5 * slope(&pg, k + 1);
        let u_l = ug[k] + 0.5 * slope(&ug, k);
        let u_r = ug[k + 1] - 0.5 * slope(&ug, k + 1);
        let z = cg[k].max(cg[k + 1]);
        u_star.push(0.5 * (u_l + u_r) - (p_r - p_l) / (2.0 * z));
        p_star.push(0.5 * (p_l + p_r) - 0.5 * z * (u_r - u_l));
    }
    let dx = grid.dx();
    let dtau = (0..n).map(|i| (u_star[i + 1] - u_star[i]) / dx).collect();
    let du = (0..n).map(|i| -(p_star[i + 1] - p_star[i]) / dx).collect();
    Ok(Rates { dtau, du })
}

fn check(cells: &[CellEntropy], t: f64, tau: &[f64], u: &[f64], floor: f64) -> Result<(), SolverError> {
    for i in 0..tau.len() {
        let x = cells[i].x;
        if !tau[i].is_finite() || !u[i].is_finite() {
            return Err(SolverError::NonFinite { t, x });
        }
        if tau[i] < floor {
            return Err(SolverError::TauFloor {
                t,
                x,
                tau: tau[i],
                floor,
            });
        }
    }
    Ok(())
}

/// One SSP-RK2 step; the caller has checked `dt` against the CFL limit.
pub(crate) fn ssp_rk2(
    thermo: &Thermo,
    grid: &Grid,
    cells: &[CellEntropy],
    state: &FieldState,
    dt: f64,
    tau_floor: f64,
) -> Result<FieldState, SolverError> {
    let r0 = rates(thermo, grid, cells, state.t, &state.tau, &state.u, tau_floor)?;
    let tau1: Vec<f64> = state.tau.iter().zip(&r0.dtau).map(|(v, d)| v + dt * d).collect();
    let u1: Vec<f64> = state.u.iter().zip(&r0.du).map(|(v, d)| v + dt * d).collect();
    check(cells, state.t + dt, &tau1, &u1, tau_floor)?;
    let r1 = rates(thermo, grid, cells, state.t + dt, &tau1, &u1, tau_floor)?;
    let tau2: Vec<f64> = (0..tau1.len())
        .map(|i| 0.5 * state.tau[i] + 0.5 * (tau1[i] + dt * r1.dtau[i]))
        .collect();
    let u2: Vec<f64> = (0..u1.len())
        .map(|i| 0.5 * state.u[i] + 0.5 * (u1[i] + dt * r1.du[i]))
        .collect();
    check(cells, state.t + dt, &tau2, &u2, tau_floor)?;
    Ok(FieldState {
        t: state.t + dt,
        tau: tau2,
        u: u2,
    })
}
