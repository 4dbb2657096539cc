//! The `L∞` constant cascade for `s, r` and the resulting bounds on `τ`, `c`, `p`.

use serde::{Deserialize, Serialize};

use crate::eos::PressureLaw;
use crate::error::VerifyError;
use crate::numerics::{bisect, integrate, QuadTolerance};

/// Inputs of the cascade.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundInputs {
    pub k: f64,
    pub k1: f64,
    pub k2: f64,
    pub k_ml: f64,
    pub k_mr: f64,
    pub k_s: f64,
    pub k_r: f64,
    pub v: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundConstants {
    pub inputs: BoundInputs,
    pub k3: f64,
    pub k4: f64,
    pub k5: f64,
    pub k6: f64,
    pub k7: f64,
    pub k8: f64,
    pub k9: f64,
    pub k10: f64,
    pub k11: f64,
    pub k12: f64,
    pub k13: f64,
    pub n_s: f64,
    pub n_r: f64,
    /// Variant with `max{k₄, k₆}` as the leading coefficient.
    pub n_s_robust: f64,
    pub n_r_robust: f64,
}

impl BoundConstants {
    /// `(n_s + n_r)/2`, the bound on `h = (s − r)/2`.
    pub fn h_max(&self) -> f64 {
        0.5 * (self.n_s + self.n_r)
    }
}

fn final_bound(c: &BoundConstants, lead: f64, own: f64, other: f64) -> f64 {
    let v = c.inputs.v;
    lead * own
        + c.k9 * c.k10 * other * v
        + c.k9 * c.k11 * v * (c.k12 * own * v + c.k10 * c.k13 * other * v * v) * (c.k11 * c.k13 * v * v).exp()
}

pub fn bound_constants(inp: BoundInputs) -> Result<BoundConstants, VerifyError> {
    let positive = [
        ("k1", inp.k1),
        ("k2", inp.k2),
        ("k_ml", inp.k_ml),
        ("k_mr", inp.k_mr),
        ("k_s", inp.k_s),
        ("k_r", inp.k_r),
    ];
    for (name, v) in positive {
        if !(v > 0.0 && v.is_finite()) {
            return Err(VerifyError::Precondition(format!("{name} must be positive, got {v}")));
        }
    }
    if !(inp.k > 1.0) {
        return Err(VerifyError::Precondition(format!("k must exceed 1, got {}", inp.k)));
    }
    if inp.k_mr < inp.k_ml {
        return Err(VerifyError::Precondition(format!(
            "k_mr = {} is below k_ml = {}",
            inp.k_mr, inp.k_ml
        )));
    }
    if !(inp.v >= 0.0 && inp.v.is_finite()) {
        return Err(VerifyError::Precondition(format!("V must be non-negative, got {}", inp.v)));
    }
    let BoundInputs { k, k1, k2, .. } = inp;
    let rho = inp.k_mr / inp.k_ml;
    let k3 = (1.0 / (2.0 * k1)).max(1.0 / (2.0 * k * k2));
    let k4 = rho.powf(1.0 / (2.0 * k * k1)).max(rho.powf(1.0 / (2.0 * k2)));
    let k5 = (rho.powf(1.0 / (2.0 * k * k1)) / (2.0 * k * k1)).max(rho.powf(1.0 / (2.0 * k2)) / (2.0 * k2));
    let k6 = rho.powf(1.0 / (2.0 * k1)).max(rho.powf(1.0 / (2.0 * k * k2)));
    let k7 = (1.0 / (2.0 * k * k1)).max(1.0 / (2.0 * k2));
    let k8 = (rho.powf(1.0 / (2.0 * k1)) / (2.0 * k1)).max(rho.powf(1.0 / (2.0 * k * k2)) / (2.0 * k * k2));
    let k9 = k3 * k4 + k5;
    let k10 = 1f64.max(k6);
    let k11 = (k6 * k7 + k8).max(k7 + k8);
    let k12 = 1f64.max(k4);
    let k13 = (k3 * k4 + k5).max(k3 + k5);
    let mut c = BoundConstants {
        inputs: inp,
        k3,
        k4,
        k5,
        k6,
        k7,
        k8,
        k9,
        k10,
        k11,
        k12,
        k13,
        n_s: 0.0,
        n_r: 0.0,
        n_s_robust: 0.0,
        n_r_robust: 0.0,
    };
    c.n_s = final_bound(&c, k6, inp.k_s, inp.k_r);
    c.n_r = final_bound(&c, k6, inp.k_r, inp.k_s);
    c.n_s_robust = final_bound(&c, k4.max(k6), inp.k_s, inp.k_r);
    c.n_r_robust = final_bound(&c, k4.max(k6), inp.k_r, inp.k_s);
    Ok(c)
}

/// Lower bound on `τ` and upper bounds on `c`, `p` implied by `h ≤ h_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TauBounds {
    pub h_max: f64,
    pub tau_min: f64,
    pub c_max: f64,
    pub p_max: f64,
    /// The integral never reached `h_max` above the search floor.
    pub bracket_exhausted: bool,
}

impl TauBounds {
    pub fn rho_max(&self) -> f64 {
        1.0 / self.tau_min
    }
}

/// Smallest `τ` considered by the root search.
pub const TAU_SEARCH_FLOOR: f64 = 1e-12;

/// Solves `∫_{τ_min}^1 c(ξ, S) dξ = h_max` at fixed entropy.
pub fn tau_min_bound(law: &PressureLaw, entropy: f64, h_max: f64) -> Result<TauBounds, VerifyError> {
    if !(h_max > 0.0 && h_max.is_finite()) {
        return Err(VerifyError::Precondition(format!("h_max must be positive, got {h_max}")));
    }
    let f = &law.function;
    let tol = QuadTolerance {
        rel: 1e-13,
        ..QuadTolerance::default()
    };
    let c = |xi: f64| (-f.partials(xi, entropy).p_tau).sqrt();
    let g = |tau: f64| -> Result<f64, VerifyError> { Ok(integrate(c, tau, 1.0, tol)?.value - h_max) };
    let mut lo = 0.5;
    let mut exhausted = false;
    while g(lo)? < 0.0 {
        lo *= 0.5;
        if lo < TAU_SEARCH_FLOOR {
            lo = TAU_SEARCH_FLOOR;
            exhausted = true;
            break;
        }
    }
    let tau_min = if exhausted {
        lo
    } else {
        let mut failure = None;
        let root = bisect(
            |t| match g(t) {
                Ok(v) => v,
                Err(e) => {
                    failure = Some(e);
                    f64::NAN
                }
            },
            lo,
            1.0,
            1e-12,
        );
        if let Some(e) = failure {
            return Err(e);
        }
        root?
    };
    let c_max = c(tau_min);
    Ok(TauBounds {
        h_max,
        tau_min,
        c_max,
        p_max: c_max * h_max,
        bracket_exhausted: exhausted,
    })
}

/// The most conservative bounds over a set of entropy values.
pub fn tau_min_over(law: &PressureLaw, entropies: &[f64], h_max: f64) -> Result<TauBounds, VerifyError> {
    let mut best: Option<TauBounds> = None;
    for &s in entropies {
        let b = tau_min_bound(law, s, h_max)?;
        best = Some(match best {
            None => b,
            Some(old) => TauBounds {
                h_max,
                tau_min: old.tau_min.min(b.tau_min),
                c_max: old.c_max.max(b.c_max),
                p_max: old.p_max.max(b.p_max),
                bracket_exhausted: old.bracket_exhausted || b.bracket_exhausted,
            },
        });
    }
    best.ok_or_else(|| VerifyError::Precondition("no entropy values supplied".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eos::GammaLaw;
    use std::sync::Arc;

    fn inputs(v: f64) -> BoundInputs {
        BoundInputs {
            k: 4.0,
            k1: 0.5,
            k2: 0.5,
            k_ml: 1.0,
            k_mr: 1.0,
            k_s: 2.0,
            k_r: 3.0,
            v,
        }
    }

    #[test]
    fn isentropic_cascade_is_identity() {
        let c = bound_constants(inputs(0.0)).unwrap();
        assert_eq!(c.k3, 1.0);
        assert_eq!(c.n_s, 2.0);
        assert_eq!(c.n_r, 3.0);
    }

    #[test]
    fn monotone_in_variation() {
        let mut inp = inputs(0.3);
        inp.k_mr = 1.5;
        let a = bound_constants(inp).unwrap();
        inp.v = 0.6;
        let b = bound_constants(inp).unwrap();
        assert!(b.n_s >= a.n_s && b.n_r >= a.n_r);
        assert!(a.n_s_robust >= a.n_s);
    }

    #[test]
    fn rejects_bad_inputs() {
        let mut inp = inputs(0.0);
        inp.k = 1.0;
        assert!(bound_constants(inp).is_err());
        let mut inp = inputs(0.0);
        inp.k_mr = 0.5;
        assert!(bound_constants(inp).is_err());
    }

    #[test]
    fn gamma_two_inversion() {
        let law = PressureLaw::new(Arc::new(GammaLaw::new(1.0, 2.0, 1.0)), Default::default());
        let h = 2.0 * 2f64.sqrt();
        let b = tau_min_bound(&law, 0.0, h).unwrap();
        assert!((b.tau_min - 0.25).abs() < 1e-9, "{}", b.tau_min);
        assert!((b.c_max - 2f64.sqrt() * 8.0).abs() < 1e-6);
        let small = tau_min_bound(&law, 0.0, 1e-6).unwrap();
        assert!((small.tau_min - 1.0).abs() < 1e-5);
        let big = tau_min_bound(&law, 0.0, 2.0 * h).unwrap();
        assert!(big.tau_min < b.tau_min);
        assert!(tau_min_bound(&law, 0.0, 0.0).is_err());
    }
}
