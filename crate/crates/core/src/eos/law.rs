use std::fmt::Debug;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::EosError;
use crate::params::{self, ParamMap};

/// Pressure and its partial derivatives at one `(τ, S)` point.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Partials {
    pub p: f64,
    pub p_tau: f64,
    pub p_tau_tau: f64,
    pub p_tau_tau_tau: f64,
    pub p_s: f64,
    pub p_tau_s: f64,
    pub p_s_s: f64,
    pub p_tau_tau_s: f64,
    pub p_tau_s_s: f64,
}

impl Partials {
    fn first_non_finite(&self) -> Option<&'static str> {
        [
            ("p", self.p),
            ("p_tau", self.p_tau),
            ("p_tau_tau", self.p_tau_tau),
            ("p_tau_tau_tau", self.p_tau_tau_tau),
            ("p_s", self.p_s),
            ("p_tau_s", self.p_tau_s),
            ("p_s_s", self.p_s_s),
            ("p_tau_tau_s", self.p_tau_tau_s),
            ("p_tau_s_s", self.p_tau_s_s),
        ]
        .into_iter()
        .find(|(_, v)| !v.is_finite())
        .map(|(name, _)| name)
    }
}

/// `h = ∫_τ^∞ √(−p_ξ) dξ` and its first two entropy derivatives at fixed τ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HTail {
    pub h: f64,
    pub h_s: f64,
    pub h_ss: f64,
}

/// A pressure law `p(τ, S)`.
///
/// Implementations must be pure. Laws with a closed-form Riemann integral
/// return it from [`PressureFunction::riemann_h`]; others fall back to quadrature.
pub trait PressureFunction: Debug + Send + Sync {
    fn name(&self) -> &str;

    fn partials(&self, tau: f64, s: f64) -> Partials;

    fn riemann_h(&self, _tau: f64, _s: f64) -> Option<HTail> {
        None
    }

    /// Default rate `r` in the entropy weight `m = exp(r·S)`, if the law implies one.
    fn weight_rate(&self) -> Option<f64> {
        None
    }
}

/// Candidate constants declared for the structural hypotheses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeclaredConstants {
    pub k: f64,
    #[serde(rename = "A")]
    pub a: f64,
    pub k1: f64,
    pub k2: f64,
    /// `l₁ … l₈`, zero-indexed.
    pub l: [f64; 8],
}

impl Default for DeclaredConstants {
    fn default() -> Self {
        Self {
            k: 4.0,
            a: 1.0,
            k1: 0.5,
            k2: 0.5,
            l: [1.0; 8],
        }
    }
}

impl DeclaredConstants {
    pub fn validate(&self) -> Result<(), EosError> {
        let bad = |key: &str, reason: &str| EosError::InvalidParameter {
            owner: "constants".into(),
            key: key.into(),
            reason: reason.into(),
        };
        if !(self.k > 1.0) {
            return Err(bad("k", "must exceed 1"));
        }
        if !(self.a > 0.0) {
            return Err(bad("A", "must be positive"));
        }
        if !(self.k1 > 0.0 && self.k2 > 0.0) {
            return Err(bad("k1/k2", "must be positive"));
        }
        if let Some(i) = self.l.iter().position(|l| !(*l > 0.0)) {
            return Err(bad(&format!("l{}", i + 1), "must be positive"));
        }
        Ok(())
    }
}

/// A pressure function together with its declared hypothesis constants.
#[derive(Debug, Clone)]
pub struct PressureLaw {
    pub function: Arc<dyn PressureFunction>,
    pub constants: DeclaredConstants,
}

impl PressureLaw {
    pub fn new(function: Arc<dyn PressureFunction>, constants: DeclaredConstants) -> Self {
        Self { function, constants }
    }

    pub fn name(&self) -> &str {
        self.function.name()
    }

    /// Evaluates all partials, rejecting non-finite output.
    pub fn partials(&self, tau: f64, s: f64) -> Result<Partials, EosError> {
        let d = self.function.partials(tau, s);
        match d.first_non_finite() {
            None => Ok(d),
            Some(quantity) => Err(EosError::Evaluation {
                law: self.name().to_string(),
                tau,
                entropy: s,
                quantity,
            }),
        }
    }

    pub fn pressure(&self, tau: f64, s: f64) -> f64 {
        self.function.partials(tau, s).p
    }
}

/// Polytropic gas `p = K·e^{S/c_v}·τ^{−γ}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaLaw {
    pub k: f64,
    pub gamma: f64,
    pub c_v: f64,
}

impl GammaLaw {
    pub fn new(k: f64, gamma: f64, c_v: f64) -> Self {
        Self { k, gamma, c_v }
    }

    fn theta(&self, s: f64) -> f64 {
        self.k * (s / self.c_v).exp()
    }
}

fn polytropic_partials(theta: f64, gamma: f64, c_v: f64, tau: f64, offset: f64) -> Partials {
    let p0 = theta * tau.powf(-gamma);
    let p_tau = -gamma * p0 / tau;
    let p_tau_tau = gamma * (gamma + 1.0) * p0 / (tau * tau);
    let p_tau_tau_tau = -gamma * (gamma + 1.0) * (gamma + 2.0) * p0 / (tau * tau * tau);
    Partials {
        p: p0 - offset,
        p_tau,
        p_tau_tau,
        p_tau_tau_tau,
        p_s: p0 / c_v,
        p_tau_s: p_tau / c_v,
        p_s_s: p0 / (c_v * c_v),
        p_tau_tau_s: p_tau_tau / c_v,
        p_tau_s_s: p_tau / (c_v * c_v),
    }
}

fn polytropic_h(theta: f64, gamma: f64, c_v: f64, tau: f64) -> HTail {
    let h = 2.0 * (theta * gamma).sqrt() / (gamma - 1.0) * tau.powf(-0.5 * (gamma - 1.0));
    HTail {
        h,
        h_s: h / (2.0 * c_v),
        h_ss: h / (4.0 * c_v * c_v),
    }
}

impl PressureFunction for GammaLaw {
    fn name(&self) -> &str {
        "gamma-law"
    }

    fn partials(&self, tau: f64, s: f64) -> Partials {
        polytropic_partials(self.theta(s), self.gamma, self.c_v, tau, 0.0)
    }

    fn riemann_h(&self, tau: f64, s: f64) -> Option<HTail> {
        (self.gamma > 1.0).then(|| polytropic_h(self.theta(s), self.gamma, self.c_v, tau))
    }

    fn weight_rate(&self) -> Option<f64> {
        Some(0.5 / self.c_v)
    }
}

/// Stiffened gas `p = K·e^{S/c_v}·τ^{−γ} − p_∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stiffened {
    pub k: f64,
    pub gamma: f64,
    pub p_inf: f64,
    pub c_v: f64,
}

impl PressureFunction for Stiffened {
    fn name(&self) -> &str {
        "stiffened"
    }

    fn partials(&self, tau: f64, s: f64) -> Partials {
        let theta = self.k * (s / self.c_v).exp();
        polytropic_partials(theta, self.gamma, self.c_v, tau, self.p_inf)
    }

    fn riemann_h(&self, tau: f64, s: f64) -> Option<HTail> {
        let theta = self.k * (s / self.c_v).exp();
        (self.gamma > 1.0).then(|| polytropic_h(theta, self.gamma, self.c_v, tau))
    }

    fn weight_rate(&self) -> Option<f64> {
        Some(0.5 / self.c_v)
    }
}

/// Builds a builtin pressure function from its config name and parameters.
pub fn builtin(name: &str, params: &ParamMap) -> Result<Arc<dyn PressureFunction>, EosError> {
    match name {
        "gamma-law" => {
            let gamma = params::number(params, name, "gamma")?;
            if !(gamma > 1.0) {
                return Err(EosError::InvalidParameter {
                    owner: name.into(),
                    key: "gamma".into(),
                    reason: format!("must exceed 1, got {gamma}"),
                });
            }
            Ok(Arc::new(GammaLaw {
                k: params::positive(params, name, "K")?,
                gamma,
                c_v: params::positive(params, name, "c_v")?,
            }))
        }
        "stiffened" => {
            let gamma = params::number(params, name, "gamma")?;
            if !(gamma > 1.0) {
                return Err(EosError::InvalidParameter {
                    owner: name.into(),
                    key: "gamma".into(),
                    reason: format!("must exceed 1, got {gamma}"),
                });
            }
            Ok(Arc::new(Stiffened {
                k: params::positive(params, name, "K")?,
                gamma,
                p_inf: params::number(params, name, "p_inf")?,
                c_v: params::positive(params, name, "c_v")?,
            }))
        }
        other => Err(EosError::UnknownLaw(other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::ParamValue;

    #[test]
    fn gamma_two_reference_point() {
        let d = GammaLaw::new(1.0, 2.0, 1.0).partials(1.0, 0.0);
        assert_eq!(d.p, 1.0);
        assert_eq!(d.p_tau, -2.0);
        assert_eq!(d.p_tau_tau, 6.0);
        assert_eq!(d.p_tau_tau_tau, -24.0);
        let h = GammaLaw::new(1.0, 2.0, 1.0).riemann_h(4.0, 0.0).unwrap();
        assert!((h.h - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn stiffened_shifts_pressure_only() {
        let g = GammaLaw::new(1.0, 1.4, 2.0).partials(0.7, 0.3);
        let s = Stiffened {
            k: 1.0,
            gamma: 1.4,
            p_inf: 0.25,
            c_v: 2.0,
        }
        .partials(0.7, 0.3);
        assert_eq!(s.p, g.p - 0.25);
        assert_eq!(s.p_tau, g.p_tau);
        assert_eq!(s.p_s, g.p_s);
    }

    #[test]
    fn builtin_reports_missing_key() {
        let mut params = ParamMap::new();
        params.insert("gamma".into(), ParamValue::Number(2.0));
        params.insert("K".into(), ParamValue::Number(1.0));
        let err = builtin("gamma-law", &params).unwrap_err();
        assert!(matches!(err, EosError::MissingParameter { ref key, .. } if key == "c_v"));
        assert!(matches!(
            builtin("van-der-waals", &params),
            Err(EosError::UnknownLaw(_))
        ));
    }

    #[test]
    fn non_finite_partials_are_rejected() {
        let law = PressureLaw::new(
            Arc::new(GammaLaw::new(1.0, 2.0, 1.0)),
            DeclaredConstants::default(),
        );
        assert!(law.partials(0.0, 0.0).is_err());
    }
}
