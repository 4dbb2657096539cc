use rayon::prelude::*;
use serde::Serialize;

use super::grid::{Boundary, Grid};
use crate::error::{SolverError, ThermoError};
use crate::thermo::Thermo;

/// `(τ, u)` at one time level.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    pub t: f64,
    pub tau: Vec<f64>,
    pub u: Vec<f64>,
}

/// A stored time level with the derived fields the tracers and monitors need.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Level {
    pub t: f64,
    pub tau: Vec<f64>,
    pub u: Vec<f64>,
    pub c: Vec<f64>,
    pub h: Vec<f64>,
    pub y: Vec<f64>,
    pub q: Vec<f64>,
}

impl Level {
    pub fn state(&self) -> FieldState {
        FieldState {
            t: self.t,
            tau: self.tau.clone(),
            u: self.u.clone(),
        }
    }

    pub fn s(&self) -> Vec<f64> {
        self.u.iter().zip(&self.h).map(|(u, h)| u + h).collect()
    }

    pub fn r(&self) -> Vec<f64> {
        self.u.iter().zip(&self.h).map(|(u, h)| u - h).collect()
    }

    pub fn max_gradient(&self) -> f64 {
        self.y
            .iter()
            .chain(&self.q)
            .fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

/// Second-order derivative of cell data: centred inside, one-sided at outflow edges.
pub fn cell_derivative(grid: &Grid, f: &[f64]) -> Vec<f64> {
    let n = f.len();
    let dx = grid.dx();
    (0..n)
        .map(|i| match grid.boundary {
            Boundary::Periodic => (f[(i + 1) % n] - f[(i + n - 1) % n]) / (2.0 * dx),
            Boundary::Outflow => {
                if i == 0 {
                    (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * dx)
                } else if i == n - 1 {
                    (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * dx)
                } else {
                    (f[i + 1] - f[i - 1]) / (2.0 * dx)
                }
            }
        })
        .collect()
}

/// Per-cell entropy data, frozen for the run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct CellEntropy {
    pub x: f64,
    pub s: f64,
    pub isentropic: bool,
}

pub(crate) fn cell_entropy(thermo: &Thermo, grid: &Grid) -> Vec<CellEntropy> {
    grid.centers()
        .into_iter()
        .map(|x| {
            let (s, s1, s2) = thermo.profile.jet(x);
            CellEntropy {
                x,
                s,
                isentropic: s1 == 0.0 && s2 == 0.0,
            }
        })
        .collect()
}

/// Derives `c, h, y, q` for a state.
pub(crate) fn derive_level(
    thermo: &Thermo,
    grid: &Grid,
    cells: &[CellEntropy],
    state: &FieldState,
) -> Result<Level, SolverError> {
    let n = state.tau.len();
    let local: Vec<(f64, f64, f64)> = (0..n)
        .into_par_iter()
        .with_min_len(128)
        .map(|i| {
            let cell = cells[i];
            let tau = state.tau[i];
            let d = thermo.law.partials(tau, cell.s).map_err(ThermoError::from)?;
            if !(d.p_tau < 0.0) {
                return Err(ThermoError::Domain {
                    tau,
                    x: cell.x,
                    p_tau: d.p_tau,
                });
            }
            let c = (-d.p_tau).sqrt();
            let tail = thermo.tail_at_entropy(tau, cell.s)?;
            let shift = if cell.isentropic {
                0.0
            } else {
                let mu = thermo.mu_partials(tau, cell.x)?;
                let (i_corr, _) = thermo.correction_integrals(tau, cell.x)?;
                mu.p_mu / c.sqrt() - i_corr
            };
            Ok((c, tail.h, shift))
        })
        .collect::<Result<_, ThermoError>>()?;
    let c: Vec<f64> = local.iter().map(|l| l.0).collect();
    let h: Vec<f64> = local.iter().map(|l| l.1).collect();
    let s: Vec<f64> = state.u.iter().zip(&h).map(|(u, h)| u + h).collect();
    let r: Vec<f64> = state.u.iter().zip(&h).map(|(u, h)| u - h).collect();
    let s_x = cell_derivative(grid, &s);
    let r_x = cell_derivative(grid, &r);
    let mut y = Vec::with_capacity(n);
    let mut q = Vec::with_capacity(n);
    for i in 0..n {
        let rc = c[i].sqrt();
        y.push(rc * s_x[i] + local[i].2);
        q.push(rc * r_x[i] - local[i].2);
    }
    Ok(Level {
        t: state.t,
        tau: state.tau.clone(),
        u: state.u.clone(),
        c,
        h,
        y,
        q,
    })
}
