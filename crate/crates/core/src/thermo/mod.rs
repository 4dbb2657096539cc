//! Derived thermodynamic fields: sound speed, the Riemann integral `h`, the
//! correction integrals `I`, `I_μ`, Riemann invariants and gradient variables.

pub mod integrals;
pub mod lattice;
pub mod mu;

use serde::Serialize;

use crate::eos::{EntropyProfile, HTail, Partials, PressureLaw};
use crate::error::ThermoError;
use crate::numerics::QuadTolerance;

pub use integrals::{h_quadrature, h_tail, h_tail_quadrature, i_by_parts, i_direct, i_mu_direct, Jet};
pub use lattice::{Lattice, LatticeSpec};
pub use mu::{entropy_direction, mu_partials, MuConvention, MuPartials};

/// `c = √(−p_τ)`.
pub fn sound_speed(law: &PressureLaw, tau: f64, s: f64) -> Result<f64, ThermoError> {
    let d = law.partials(tau, s)?;
    speed_from(&d, tau, f64::NAN)
}

fn speed_from(d: &Partials, tau: f64, x: f64) -> Result<f64, ThermoError> {
    if d.p_tau < 0.0 {
        Ok((-d.p_tau).sqrt())
    } else {
        Err(ThermoError::Domain {
            tau,
            x,
            p_tau: d.p_tau,
        })
    }
}

/// `h(τ, S)`: closed form when the law provides one, quadrature otherwise.
pub fn compute_h(law: &PressureLaw, tau: f64, s: f64) -> Result<f64, ThermoError> {
    match law.function.riemann_h(tau, s) {
        Some(t) => Ok(t.h),
        None => h_quadrature(law, tau, s, QuadTolerance::default()),
    }
}

/// `(h, h_S, h_SS)`, or `None` if the quadrature fails.
pub fn riemann_h_tail(law: &PressureLaw, tau: f64, s: f64) -> Option<HTail> {
    h_tail(law, tau, s, QuadTolerance::default()).ok()
}

/// `s = u + h`, `r = u − h`.
pub fn riemann_invariants(u: f64, h: f64) -> (f64, f64) {
    (u + h, u - h)
}

/// `y = √c·s_x + p_μ/√c − I`, `q = √c·r_x − p_μ/√c + I`.
pub fn gradient_pair(c: f64, s_x: f64, r_x: f64, p_mu: f64, i: f64) -> (f64, f64) {
    let rc = c.sqrt();
    let shift = p_mu / rc - i;
    (rc * s_x + shift, rc * r_x - shift)
}

/// All thermodynamic quantities at one `(τ, x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThermoPoint {
    pub tau: f64,
    pub x: f64,
    pub entropy: f64,
    pub entropy_slope: f64,
    pub c: f64,
    pub p: f64,
    pub h: f64,
    pub i: f64,
    pub i_mu: f64,
    #[serde(skip)]
    pub partials: Partials,
    #[serde(skip)]
    pub mu: MuPartials,
}

/// A pressure law and entropy profile, with an optional memo lattice.
#[derive(Debug, Clone)]
pub struct Thermo {
    pub law: PressureLaw,
    pub profile: EntropyProfile,
    pub convention: MuConvention,
    pub tol: QuadTolerance,
    lattice: Option<Lattice>,
}

impl Thermo {
    /// Uses the fixed-`h` convention, under which the Riccati decomposition is exact.
    pub fn new(law: PressureLaw, profile: EntropyProfile) -> Self {
        Self {
            law,
            profile,
            convention: MuConvention::FixedH,
            tol: QuadTolerance::default(),
            lattice: None,
        }
    }

    pub fn with_convention(mut self, convention: MuConvention) -> Self {
        self.convention = convention;
        self.lattice = None;
        self
    }

    pub fn build_lattice(&mut self, spec: LatticeSpec) -> Result<(), ThermoError> {
        let range = self.profile.entropy_range();
        self.lattice = Some(Lattice::build(&self.law, range, spec, self.convention, self.tol)?);
        Ok(())
    }

    pub fn lattice(&self) -> Option<&Lattice> {
        self.lattice.as_ref()
    }

    pub fn is_isentropic(&self) -> bool {
        self.profile.is_isentropic()
    }

    pub fn entropy(&self, x: f64) -> f64 {
        self.profile.s(x)
    }

    pub fn partials(&self, tau: f64, x: f64) -> Result<Partials, ThermoError> {
        Ok(self.law.partials(tau, self.profile.s(x))?)
    }

    pub fn sound_speed(&self, tau: f64, x: f64) -> Result<f64, ThermoError> {
        let d = self.partials(tau, x)?;
        speed_from(&d, tau, x)
    }

    pub fn pressure(&self, tau: f64, x: f64) -> f64 {
        self.law.pressure(tau, self.profile.s(x))
    }

    /// `(h, h_S, h_SS)` at entropy `s`: closed form, then lattice, then quadrature.
    pub fn tail_at_entropy(&self, tau: f64, s: f64) -> Result<HTail, ThermoError> {
        if let Some(t) = self.law.function.riemann_h(tau, s) {
            return Ok(t);
        }
        if let Some(l) = &self.lattice {
            if l.contains(tau, s) {
                if let Some(t) = l.tail(tau, s) {
                    return Ok(t);
                }
            }
        }
        h_tail_quadrature(&self.law, tau, s, self.tol)
    }

    pub fn h(&self, tau: f64, x: f64) -> Result<f64, ThermoError> {
        Ok(self.tail_at_entropy(tau, self.profile.s(x))?.h)
    }

    fn jet(&self, x: f64) -> Jet {
        let (s, s1, s2) = self.profile.jet(x);
        Jet { s, s1, s2 }
    }

    /// `(I, I_μ)`, from the lattice when it covers the point.
    pub fn correction_integrals(&self, tau: f64, x: f64) -> Result<(f64, f64), ThermoError> {
        let jet = self.jet(x);
        if jet.s1 == 0.0 && jet.s2 == 0.0 {
            return Ok((0.0, 0.0));
        }
        if let Some(l) = &self.lattice {
            if l.contains(tau, jet.s) {
                let (j, k) = l.jk(tau, jet.s);
                return Ok((jet.s1 * j, jet.s1 * jet.s1 * k + jet.s2 * j));
            }
        }
        Ok((self.i_direct(tau, x)?, self.i_mu_direct(tau, x)?))
    }

    pub fn i_direct(&self, tau: f64, x: f64) -> Result<f64, ThermoError> {
        i_direct(&self.law, tau, self.jet(x), self.convention, self.tol).map_err(|e| with_x(e, x))
    }

    pub fn i_by_parts(&self, tau: f64, x: f64) -> Result<f64, ThermoError> {
        i_by_parts(&self.law, tau, self.jet(x), self.convention, self.tol).map_err(|e| with_x(e, x))
    }

    pub fn i_mu_direct(&self, tau: f64, x: f64) -> Result<f64, ThermoError> {
        i_mu_direct(&self.law, tau, self.jet(x), self.convention, self.tol).map_err(|e| with_x(e, x))
    }

    pub fn mu_partials(&self, tau: f64, x: f64) -> Result<MuPartials, ThermoError> {
        let jet = self.jet(x);
        let d = self.law.partials(tau, jet.s)?;
        let tail = self.tail_at_entropy(tau, jet.s)?;
        Ok(mu_partials(&d, Some(&tail), jet.s1, jet.s2, self.convention))
    }

    pub fn point(&self, tau: f64, x: f64) -> Result<ThermoPoint, ThermoError> {
        let jet = self.jet(x);
        let d = self.law.partials(tau, jet.s)?;
        let c = speed_from(&d, tau, x)?;
        let tail = self.tail_at_entropy(tau, jet.s)?;
        let mu = mu_partials(&d, Some(&tail), jet.s1, jet.s2, self.convention);
        let (i, i_mu) = self.correction_integrals(tau, x)?;
        Ok(ThermoPoint {
            tau,
            x,
            entropy: jet.s,
            entropy_slope: jet.s1,
            c,
            p: d.p,
            h: tail.h,
            i,
            i_mu,
            partials: d,
            mu,
        })
    }
}

fn with_x(e: ThermoError, x: f64) -> ThermoError {
    match e {
        ThermoError::Integral {
            quantity,
            tau,
            source,
            ..
        } => ThermoError::Integral {
            quantity,
            tau,
            x,
            source,
        },
        other => other,
    }
}
