//! Improper integrals along the `h`-line: `h` itself, its entropy derivatives,
//! and the correction integrals `I` and `I_μ`, all anchored at `τ = ∞` (`h₀ = 0`).
//!
//! Writing `X = −p_τ`, `P = p_ττ`, the substitution `dh = −c dτ` turns the
//! `h`-line integrals into tails in `τ`:
//!
//! `I = ∫_τ^∞ [−¼ X^{−1/4} p_τμ − ¼ X^{−5/4} P p_μ] dξ`
//!
//! and, after one integration by parts,
//!
//! `I = ½ X^{−1/4} p_μ − ⅛ ∫_τ^∞ X^{−5/4} P p_μ dξ`,
//!
//! `I_μ = ½[¼ X^{−5/4} p_τμ p_μ + X^{−1/4} p_μμ]
//!        − ⅛ ∫_τ^∞ [7/4 X^{−11/4} p_τμ P p_μ + X^{−7/4} p_ττμ p_μ + X^{−7/4} P p_μμ] X^{1/2} dξ`.

use crate::eos::{HTail, PressureLaw};
use crate::error::{NumericsError, ThermoError};
use crate::numerics::{integrate_tail, QuadTolerance};

use super::mu::{mu_partials, MuConvention};

fn wrap(quantity: &'static str, tau: f64, x: f64) -> impl FnOnce(NumericsError) -> ThermoError {
    move |source| ThermoError::Integral {
        quantity,
        tau,
        x,
        source,
    }
}

/// `∫_τ^∞ √(−p_ξ) dξ` by quadrature.
pub fn h_quadrature(law: &PressureLaw, tau: f64, s: f64, tol: QuadTolerance) -> Result<f64, ThermoError> {
    let f = &law.function;
    integrate_tail(|xi| (-f.partials(xi, s).p_tau).sqrt(), tau, tol)
        .map(|r| r.value)
        .map_err(wrap("h", tau, f64::NAN))
}

/// `h`, `h_S`, `h_SS` by quadrature (no closed forms used).
pub fn h_tail_quadrature(law: &PressureLaw, tau: f64, s: f64, tol: QuadTolerance) -> Result<HTail, ThermoError> {
    let f = &law.function;
    let h = h_quadrature(law, tau, s, tol)?;
    let h_s = integrate_tail(
        |xi| {
            let d = f.partials(xi, s);
            -d.p_tau_s / (2.0 * (-d.p_tau).sqrt())
        },
        tau,
        tol,
    )
    .map_err(wrap("h_S", tau, f64::NAN))?
    .value;
    let h_ss = integrate_tail(
        |xi| {
            let d = f.partials(xi, s);
            let c = (-d.p_tau).sqrt();
            -d.p_tau_s_s / (2.0 * c) - d.p_tau_s * d.p_tau_s / (4.0 * c * c * c)
        },
        tau,
        tol,
    )
    .map_err(wrap("h_SS", tau, f64::NAN))?
    .value;
    Ok(HTail { h, h_s, h_ss })
}

/// Closed form when the law has one, quadrature otherwise.
pub fn h_tail(law: &PressureLaw, tau: f64, s: f64, tol: QuadTolerance) -> Result<HTail, ThermoError> {
    match law.function.riemann_h(tau, s) {
        Some(t) => Ok(t),
        None => h_tail_quadrature(law, tau, s, tol),
    }
}

/// Entropy jet `(S, S′, S″)` at the point where the integrals are evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub s: f64,
    pub s1: f64,
    pub s2: f64,
}

fn tail_or_nan(law: &PressureLaw, xi: f64, s: f64, tol: QuadTolerance, convention: MuConvention) -> Option<HTail> {
    match convention {
        MuConvention::FixedTau => None,
        MuConvention::FixedH => h_tail(law, xi, s, tol).ok(),
    }
}

/// `I` by the `τ`-substituted `h`-line integrand.
pub fn i_direct(
    law: &PressureLaw,
    tau: f64,
    jet: Jet,
    convention: MuConvention,
    tol: QuadTolerance,
) -> Result<f64, ThermoError> {
    if jet.s1 == 0.0 {
        return Ok(0.0);
    }
    let f = &law.function;
    let integrand = |xi: f64| {
        let d = f.partials(xi, jet.s);
        let tail = tail_or_nan(law, xi, jet.s, tol, convention);
        let m = mu_partials(&d, tail.as_ref(), jet.s1, jet.s2, convention);
        let x = -d.p_tau;
        -0.25 * x.powf(-0.25) * m.p_tau_mu - 0.25 * x.powf(-1.25) * d.p_tau_tau * m.p_mu
    };
    integrate_tail(integrand, tau, tol)
        .map(|r| r.value)
        .map_err(wrap("I", tau, f64::NAN))
}

/// `I` after integration by parts: boundary term plus one tail integral.
pub fn i_by_parts(
    law: &PressureLaw,
    tau: f64,
    jet: Jet,
    convention: MuConvention,
    tol: QuadTolerance,
) -> Result<f64, ThermoError> {
    if jet.s1 == 0.0 {
        return Ok(0.0);
    }
    let f = &law.function;
    let mu_at = |xi: f64| {
        let d = f.partials(xi, jet.s);
        let tail = tail_or_nan(law, xi, jet.s, tol, convention);
        (d, mu_partials(&d, tail.as_ref(), jet.s1, jet.s2, convention))
    };
    let (d0, m0) = mu_at(tau);
    let boundary = 0.5 * (-d0.p_tau).powf(-0.25) * m0.p_mu;
    let integral = integrate_tail(
        |xi| {
            let (d, m) = mu_at(xi);
            (-d.p_tau).powf(-1.25) * d.p_tau_tau * m.p_mu
        },
        tau,
        tol,
    )
    .map_err(wrap("I", tau, f64::NAN))?
    .value;
    Ok(boundary - 0.125 * integral)
}

/// `I_μ`: boundary term plus the three-term tail integral.
pub fn i_mu_direct(
    law: &PressureLaw,
    tau: f64,
    jet: Jet,
    convention: MuConvention,
    tol: QuadTolerance,
) -> Result<f64, ThermoError> {
    if jet.s1 == 0.0 && jet.s2 == 0.0 {
        return Ok(0.0);
    }
    let f = &law.function;
    let mu_at = |xi: f64| {
        let d = f.partials(xi, jet.s);
        let tail = tail_or_nan(law, xi, jet.s, tol, convention);
        (d, mu_partials(&d, tail.as_ref(), jet.s1, jet.s2, convention))
    };
    let (d0, m0) = mu_at(tau);
    let x0 = -d0.p_tau;
    let boundary = 0.5 * (0.25 * x0.powf(-1.25) * m0.p_tau_mu * m0.p_mu + x0.powf(-0.25) * m0.p_mu_mu);
    let integral = integrate_tail(
        |xi| {
            let (d, m) = mu_at(xi);
            let x = -d.p_tau;
            let p = d.p_tau_tau;
            (1.75 * x.powf(-2.75) * m.p_tau_mu * p * m.p_mu
                + x.powf(-1.75) * m.p_tau_tau_mu * m.p_mu
                + x.powf(-1.75) * p * m.p_mu_mu)
                * x.sqrt()
        },
        tau,
        tol,
    )
    .map_err(wrap("I_mu", tau, f64::NAN))?
    .value;
    Ok(boundary - 0.125 * integral)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eos::{DeclaredConstants, GammaLaw};
    use std::sync::Arc;

    fn law(gamma: f64, c_v: f64) -> PressureLaw {
        PressureLaw::new(
            Arc::new(GammaLaw::new(1.0, gamma, c_v)),
            DeclaredConstants::default(),
        )
    }

    fn tol() -> QuadTolerance {
        QuadTolerance::default()
    }

    #[test]
    fn h_quadrature_matches_closed_form() {
        for g in [1.4, 2.0, 3.0] {
            let l = law(g, 1.0);
            for tau in [0.1, 0.37, 1.0, 4.0, 10.0] {
                let exact = l.function.riemann_h(tau, 0.2).unwrap();
                let q = h_tail_quadrature(&l, tau, 0.2, tol()).unwrap();
                assert!((q.h - exact.h).abs() < 1e-10 * exact.h);
                assert!((q.h_s - exact.h_s).abs() < 1e-10 * exact.h_s);
                assert!((q.h_ss - exact.h_ss).abs() < 1e-10 * exact.h_ss);
            }
        }
    }

    #[test]
    fn reference_values_gamma_two() {
        let l = law(2.0, 1.0);
        let jet = Jet { s: 0.0, s1: 1.0, s2: 0.0 };
        let i = i_direct(&l, 1.0, jet, MuConvention::FixedH, tol()).unwrap();
        let i2 = i_by_parts(&l, 1.0, jet, MuConvention::FixedH, tol()).unwrap();
        let im = i_mu_direct(&l, 1.0, jet, MuConvention::FixedH, tol()).unwrap();
        assert!((i + 0.168_179_283_050_742_9).abs() < 1e-12, "{i}");
        assert!((i2 - i).abs() < 1e-12);
        assert!((im - 0.084_089_641_525_371_45).abs() < 1e-12, "{im}");
    }

    #[test]
    fn reference_values_tanh() {
        let l = law(1.4, 2.0);
        let x = 0.5f64;
        let th = x.tanh();
        let jet = Jet {
            s: 0.3 * th,
            s1: 0.3 * (1.0 - th * th),
            s2: -0.6 * th * (1.0 - th * th),
        };
        let i = i_direct(&l, 0.7, jet, MuConvention::FixedH, tol()).unwrap();
        let im = i_mu_direct(&l, 0.7, jet, MuConvention::FixedH, tol()).unwrap();
        assert!((i + 0.047_487_453_844_438_04).abs() < 1e-12, "{i}");
        assert!((im - 0.050_891_984_431_018_21).abs() < 1e-12, "{im}");
    }

    #[test]
    fn i_is_linear_in_entropy_slope() {
        let l = law(2.0, 1.0);
        let at = |eps: f64| {
            i_direct(&l, 0.8, Jet { s: 0.0, s1: eps, s2: 0.0 }, MuConvention::FixedH, tol()).unwrap()
        };
        let ratio = at(1e-3) / at(5e-4);
        assert!((ratio - 2.0).abs() < 1e-4);
    }

    #[test]
    fn i_mu_matches_entropy_derivative_of_i() {
        // I_μ = d/dx I(τ(x), x) along fixed h; for S = εx the τ-shift is captured by
        // differentiating the h-parametrised integral: check with a central difference.
        let l = law(2.0, 1.0);
        let conv = MuConvention::FixedH;
        let h0 = l.function.riemann_h(1.0, 0.0).unwrap().h;
        let i_at = |x: f64| {
            let s = x;
            // τ with h(τ, s) = h0: h ∝ e^{s/2} τ^{-1/2}
            let tau = (s).exp() * (2.0 * 2f64.sqrt() / h0).powi(2);
            i_direct(&l, tau, Jet { s, s1: 1.0, s2: 0.0 }, conv, tol()).unwrap()
        };
        let fd = crate::numerics::central_derivative(i_at, 0.0, 1e-3);
        let im = i_mu_direct(&l, 1.0, Jet { s: 0.0, s1: 1.0, s2: 0.0 }, conv, tol()).unwrap();
        assert!((fd - im).abs() < 1e-7, "{fd} vs {im}");
    }

    #[test]
    fn isentropic_integrals_vanish() {
        let l = law(1.4, 1.0);
        let jet = Jet { s: 0.1, s1: 0.0, s2: 0.0 };
        assert_eq!(i_direct(&l, 0.5, jet, MuConvention::FixedH, tol()).unwrap(), 0.0);
        assert_eq!(i_mu_direct(&l, 0.5, jet, MuConvention::FixedH, tol()).unwrap(), 0.0);
    }
}
