//! Initial-data families sampled at cell centres.

use std::f64::consts::PI;

use super::field::FieldState;
use super::grid::Grid;
use crate::error::SolverError;
use crate::numerics::Pchip;
use crate::params::{self, ParamMap};

#[derive(Debug, Clone, PartialEq)]
pub enum InitialData {
    /// `τ = τ₀`, `u = u₀`.
    Constant { tau: f64, u: f64 },
    /// `τ = τ₀`, `u = −a·sech²((x − x_c)/w)`.
    Sech2Pulse { amplitude: f64, width: f64, center: f64, tau: f64 },
    /// `τ = τ₀`, `u = a·sin(2πx/λ)`.
    Sine { amplitude: f64, wavelength: f64, tau: f64 },
    /// Smoothed jump between `(τ_L, u_L)` and `(τ_R, u_R)` of width `w` centred at `x_c`.
    RiemannSmooth { left: [f64; 2], right: [f64; 2], width: f64, center: f64 },
    /// Rows `(x, τ, u)`, interpolated monotonically.
    Table { x: Vec<f64>, tau: Vec<f64>, u: Vec<f64> },
}

fn pair(v: Vec<f64>, key: &str) -> Result<[f64; 2], SolverError> {
    match v.as_slice() {
        [a, b] => Ok([*a, *b]),
        _ => Err(SolverError::InitialData(format!(
            "`{key}` must be a [tau, u] pair, got {} values",
            v.len()
        ))),
    }
}

impl InitialData {
    pub fn from_params(family: &str, p: &ParamMap) -> Result<Self, SolverError> {
        let err = |e: crate::error::EosError| SolverError::InitialData(e.to_string());
        let tau = params::number_or(p, family, "tau", 1.0).map_err(err)?;
        let data = match family {
            "constant" => Self::Constant {
                tau,
                u: params::number_or(p, family, "u", 0.0).map_err(err)?,
            },
            "sech2-pulse" => Self::Sech2Pulse {
                amplitude: params::number(p, family, "amplitude").map_err(err)?,
                width: params::positive(p, family, "width").map_err(err)?,
                center: params::number_or(p, family, "center", 0.0).map_err(err)?,
                tau,
            },
            "sine" => Self::Sine {
                amplitude: params::number(p, family, "amplitude").map_err(err)?,
                wavelength: params::positive(p, family, "wavelength").map_err(err)?,
                tau,
            },
            "riemann-smooth" => Self::RiemannSmooth {
                left: pair(params::list(p, family, "left").map_err(err)?, "left")?,
                right: pair(params::list(p, family, "right").map_err(err)?, "right")?,
                width: params::positive(p, family, "transition-width").map_err(err)?,
                center: params::number_or(p, family, "center", 0.0).map_err(err)?,
            },
            "custom-table" => {
                let rows = params::table(p, family, "rows").map_err(err)?;
                Self::from_rows(&rows)?
            }
            other => {
                return Err(SolverError::InitialData(format!(
                    "unknown initial-data family `{other}`"
                )))
            }
        };
        data.validate()?;
        Ok(data)
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, SolverError> {
        if rows.len() < 2 {
            return Err(SolverError::InitialData("table needs at least two rows".into()));
        }
        let (mut x, mut tau, mut u) = (Vec::new(), Vec::new(), Vec::new());
        for (k, r) in rows.iter().enumerate() {
            if r.len() != 3 {
                return Err(SolverError::InitialData(format!(
                    "table row {k} has {} columns, expected x, tau, u",
                    r.len()
                )));
            }
            if let Some(&last) = x.last() {
                if !(r[0] > last) {
                    return Err(SolverError::InitialData(format!(
                        "table x must increase strictly (row {k})"
                    )));
                }
            }
            x.push(r[0]);
            tau.push(r[1]);
            u.push(r[2]);
        }
        let data = Self::Table { x, tau, u };
        data.validate()?;
        Ok(data)
    }

    fn validate(&self) -> Result<(), SolverError> {
        let ok = match self {
            Self::Constant { tau, u } => *tau > 0.0 && u.is_finite(),
            Self::Sech2Pulse { amplitude, tau, .. } => *tau > 0.0 && amplitude.is_finite(),
            Self::Sine { amplitude, tau, .. } => *tau > 0.0 && amplitude.is_finite(),
            Self::RiemannSmooth { left, right, .. } => left[0] > 0.0 && right[0] > 0.0,
            Self::Table { tau, u, .. } => tau.iter().all(|&t| t > 0.0) && u.iter().all(|v| v.is_finite()),
        };
        if ok {
            Ok(())
        } else {
            Err(SolverError::InitialData(
                "specific volume must be positive and velocity finite".into(),
            ))
        }
    }

    pub fn family(&self) -> &'static str {
        match self {
            Self::Constant { .. } => "constant",
            Self::Sech2Pulse { .. } => "sech2-pulse",
            Self::Sine { .. } => "sine",
            Self::RiemannSmooth { .. } => "riemann-smooth",
            Self::Table { .. } => "custom-table",
        }
    }

    /// `(τ, u)` at `x`.
    pub fn eval(&self, x: f64) -> (f64, f64) {
        match self {
            Self::Constant { tau, u } => (*tau, *u),
            Self::Sech2Pulse {
                amplitude,
                width,
                center,
                tau,
            } => {
                let sech = 1.0 / ((x - center) / width).cosh();
                (*tau, -amplitude * sech * sech)
            }
            Self::Sine {
                amplitude,
                wavelength,
                tau,
            } => (*tau, amplitude * (2.0 * PI * x / wavelength).sin()),
            Self::RiemannSmooth {
                left,
                right,
                width,
                center,
            } => {
                let w = 0.5 * (1.0 + ((x - center) / width).tanh());
                (
                    left[0] + (right[0] - left[0]) * w,
                    left[1] + (right[1] - left[1]) * w,
                )
            }
            Self::Table { x: xs, tau, u } => {
                let xc = x.clamp(xs[0], xs[xs.len() - 1]);
                let ft = Pchip::new(xs.clone(), tau.clone());
                let fu = Pchip::new(xs.clone(), u.clone());
                (ft.eval(xc), fu.eval(xc))
            }
        }
    }

    pub fn sample(&self, grid: &Grid) -> FieldState {
        let centers = grid.centers();
        let (tau, u) = match self {
            Self::Table { x: xs, tau, u } => {
                let ft = Pchip::new(xs.clone(), tau.clone());
                let fu = Pchip::new(xs.clone(), u.clone());
                let lo = xs[0];
                let hi = xs[xs.len() - 1];
                centers
                    .iter()
                    .map(|&x| {
                        let xc = x.clamp(lo, hi);
                        (ft.eval(xc), fu.eval(xc))
                    })
                    .unzip()
            }
            _ => centers.iter().map(|&x| self.eval(x)).unzip(),
        };
        FieldState { t: 0.0, tau, u }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::ParamValue;
    use crate::solver::Boundary;

    #[test]
    fn sech2_defaults() {
        let mut p = ParamMap::new();
        p.insert("amplitude".into(), ParamValue::Number(1.0));
        p.insert("width".into(), ParamValue::Number(1.0));
        let d = InitialData::from_params("sech2-pulse", &p).unwrap();
        assert_eq!(d.eval(0.0), (1.0, -1.0));
    }

    #[test]
    fn missing_key_is_named() {
        let p = ParamMap::new();
        let e = InitialData::from_params("sine", &p).unwrap_err().to_string();
        assert!(e.contains("amplitude"), "{e}");
    }

    #[test]
    fn riemann_smooth_limits() {
        let mut p = ParamMap::new();
        p.insert("left".into(), ParamValue::List(vec![1.0, 0.5]));
        p.insert("right".into(), ParamValue::List(vec![2.0, -0.5]));
        p.insert("transition-width".into(), ParamValue::Number(0.1));
        let d = InitialData::from_params("riemann-smooth", &p).unwrap();
        let (t, u) = d.eval(-10.0);
        assert!((t - 1.0).abs() < 1e-12 && (u - 0.5).abs() < 1e-12);
        let (t, u) = d.eval(10.0);
        assert!((t - 2.0).abs() < 1e-12 && (u + 0.5).abs() < 1e-12);
    }

    #[test]
    fn table_reproduces_nodes() {
        let rows = vec![vec![-1.0, 1.0, 0.0], vec![0.0, 1.5, 1.0], vec![1.0, 1.0, 0.0]];
        let d = InitialData::from_rows(&rows).unwrap();
        assert_eq!(d.eval(0.0), (1.5, 1.0));
        let g = Grid::new(-1.0, 1.0, 16, Boundary::Outflow).unwrap();
        let s = d.sample(&g);
        assert!(s.tau.iter().all(|&t| (1.0..=1.5).contains(&t)));
        assert!(InitialData::from_rows(&[vec![0.0, 1.0, 0.0], vec![0.0, 1.0, 0.0]]).is_err());
    }
}
