//! Memo lattice for the correction integrals over `(τ, S)`.
//!
//! `I` is linear in `S′` and `I_μ = S′²·K + S″·J`, where `J`, `K` are the two
//! integrals evaluated with `S′ = 1, S″ = 0`. The lattice stores `J`, `K` (and
//! `h, h_S, h_SS` for laws without a closed form) at geometric `τ` nodes and
//! uniform entropy nodes; lookups are shape-preserving cubic in `ln τ` and
//! linear in `S`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::eos::{HTail, PressureLaw};
use crate::error::ThermoError;
use crate::numerics::{geometric_points, uniform_points, Pchip, QuadTolerance};

use super::integrals::{h_tail_quadrature, i_direct, i_mu_direct, Jet};
use super::mu::MuConvention;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub tau_min: f64,
    pub tau_max: f64,
    pub tau_points: usize,
    pub entropy_points: usize,
}

#[derive(Debug, Clone)]
struct Column {
    j: Pchip,
    k: Pchip,
    tail: Option<[Pchip; 3]>,
}

#[derive(Debug, Clone)]
pub struct Lattice {
    pub spec: LatticeSpec,
    entropy_nodes: Vec<f64>,
    columns: Vec<Column>,
}

impl Lattice {
    pub fn build(
        law: &PressureLaw,
        entropy_range: (f64, f64),
        spec: LatticeSpec,
        convention: MuConvention,
        tol: QuadTolerance,
    ) -> Result<Self, ThermoError> {
        let taus = geometric_points(spec.tau_min, spec.tau_max, spec.tau_points.max(2));
        let log_taus: Vec<f64> = taus.iter().map(|t| t.ln()).collect();
        let entropy_nodes = if entropy_range.1 > entropy_range.0 {
            uniform_points(entropy_range.0, entropy_range.1, spec.entropy_points.max(2))
        } else {
            vec![entropy_range.0]
        };
        let need_tail = law.function.riemann_h(1.0, entropy_range.0).is_none();
        let columns = entropy_nodes
            .par_iter()
            .map(|&s| {
                let jet = Jet { s, s1: 1.0, s2: 0.0 };
                let rows = taus
                    .par_iter()
                    .map(|&tau| {
                        let j = i_direct(law, tau, jet, convention, tol)?;
                        let k = i_mu_direct(law, tau, jet, convention, tol)?;
                        let tail = if need_tail {
                            Some(h_tail_quadrature(law, tau, s, tol)?)
                        } else {
                            None
                        };
                        Ok((j, k, tail))
                    })
                    .collect::<Result<Vec<_>, ThermoError>>()?;
                let pchip = |f: &dyn Fn(&(f64, f64, Option<HTail>)) -> f64| {
                    Pchip::new(log_taus.clone(), rows.iter().map(f).collect())
                };
                Ok(Column {
                    j: pchip(&|r| r.0),
                    k: pchip(&|r| r.1),
                    tail: need_tail.then(|| {
                        [
                            pchip(&|r| r.2.unwrap().h),
                            pchip(&|r| r.2.unwrap().h_s),
                            pchip(&|r| r.2.unwrap().h_ss),
                        ]
                    }),
                })
            })
            .collect::<Result<Vec<_>, ThermoError>>()?;
        Ok(Self {
            spec,
            entropy_nodes,
            columns,
        })
    }

    pub fn contains(&self, tau: f64, s: f64) -> bool {
        let n = self.entropy_nodes.len();
        let s_ok = if n == 1 {
            s == self.entropy_nodes[0]
        } else {
            s >= self.entropy_nodes[0] && s <= self.entropy_nodes[n - 1]
        };
        s_ok && tau >= self.spec.tau_min && tau <= self.spec.tau_max
    }

    fn blend<F: Fn(&Column, f64) -> f64>(&self, s: f64, log_tau: f64, f: F) -> f64 {
        let n = self.entropy_nodes.len();
        if n == 1 {
            return f(&self.columns[0], log_tau);
        }
        let s0 = self.entropy_nodes[0];
        let ds = (self.entropy_nodes[n - 1] - s0) / (n - 1) as f64;
        let (i, theta) = crate::numerics::interp::uniform_bracket(s, s0, ds, n);
        let a = f(&self.columns[i], log_tau);
        if theta == 0.0 {
            return a;
        }
        let b = f(&self.columns[i + 1], log_tau);
        (1.0 - theta) * a + theta * b
    }

    /// `(J, K)` at `(τ, S)`; caller checks [`Lattice::contains`].
    pub fn jk(&self, tau: f64, s: f64) -> (f64, f64) {
        let lt = tau.ln();
        (
            self.blend(s, lt, |c, l| c.j.eval(l)),
            self.blend(s, lt, |c, l| c.k.eval(l)),
        )
    }

    /// Tabulated `h, h_S, h_SS`, when the law needed them.
    pub fn tail(&self, tau: f64, s: f64) -> Option<HTail> {
        self.columns[0].tail.as_ref()?;
        let lt = tau.ln();
        Some(HTail {
            h: self.blend(s, lt, |c, l| c.tail.as_ref().unwrap()[0].eval(l)),
            h_s: self.blend(s, lt, |c, l| c.tail.as_ref().unwrap()[1].eval(l)),
            h_ss: self.blend(s, lt, |c, l| c.tail.as_ref().unwrap()[2].eval(l)),
        })
    }

    pub fn entropy_nodes(&self) -> &[f64] {
        &self.entropy_nodes
    }
}
