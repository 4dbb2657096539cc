//! Riccati coefficients `a₀, a₁, a₂` of the gradient variables, their roots,
//! the threshold `N`, the envelopes `Y, Q`, the `a₂`-growth constants and the
//! analytic blow-up-time bound.

pub mod ode;

use rayon::prelude::*;
use serde::Serialize;

use crate::eos::{Partials, StateBox};
use crate::error::RiccatiError;
use crate::numerics::{central_derivative, integrate, QuadTolerance};
use crate::thermo::{h_quadrature, Thermo, ThermoPoint};

pub use ode::{integrate_riccati, Direction, RiccatiSolution};

/// Below this (relative) level a negative discriminant is treated as round-off.
pub const DISCRIMINANT_CLAMP: f64 = 1e-10;

/// Safety factor applied to the sampled supremum of root magnitudes.
pub const N_SAFETY_FACTOR: f64 = 1.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RiccatiCoefficients {
    pub a0: f64,
    pub a1: f64,
    pub a2: f64,
    pub ratio_a1: f64,
    pub ratio_a0: f64,
    /// `ratio_a1² + 4·ratio_a0`, after clamping round-off negatives to zero.
    pub discriminant: f64,
    pub clamped: bool,
    /// `(y₋, y₊)` when the discriminant is non-negative.
    pub roots: Option<(f64, f64)>,
}

/// `a₂ = ¼ (−p_τ)^{−5/4} p_ττ`.
pub fn a2_closed_form(d: &Partials) -> f64 {
    0.25 * (-d.p_tau).powf(-1.25) * d.p_tau_tau
}

/// Coefficients from a fully evaluated thermodynamic point.
pub fn coefficients_at(pt: &ThermoPoint) -> Result<RiccatiCoefficients, RiccatiError> {
    let d = &pt.partials;
    let x = -d.p_tau;
    let pp = d.p_tau_tau;
    let a2 = a2_closed_form(d);
    if !(a2 > 0.0) {
        return Err(RiccatiError::NonPositiveA2 {
            a2,
            tau: pt.tau,
            x: pt.x,
        });
    }
    let (p_mu, p_tau_mu) = (pt.mu.p_mu, pt.mu.p_tau_mu);
    let i = pt.i;
    let ratio_a1 = -2.0 * i + 2.0 * x.powf(0.75) * p_tau_mu / pp + 2.0 * x.powf(-0.25) * p_mu;
    let ratio_a0 = -4.0 * x.powf(1.75) / pp * (pt.i_mu - 0.5 * (p_tau_mu / x + pp * p_mu / (x * x)) * i)
        - x.sqrt() * p_tau_mu * p_mu / pp
        - p_mu * p_mu / x.sqrt()
        - i * i;
    Ok(from_ratios(ratio_a0, ratio_a1, a2))
}

/// Assembles coefficients from `a₀/a₂`, `a₁/a₂` and `a₂`.
pub fn from_ratios(ratio_a0: f64, ratio_a1: f64, a2: f64) -> RiccatiCoefficients {
    let raw = ratio_a1 * ratio_a1 + 4.0 * ratio_a0;
    let window = DISCRIMINANT_CLAMP * (ratio_a1 * ratio_a1).max(4.0 * ratio_a0.abs()).max(1.0);
    let (discriminant, clamped) = if raw < 0.0 && raw >= -window {
        (0.0, true)
    } else {
        (raw, false)
    };
    let roots = (discriminant >= 0.0).then(|| stable_roots(ratio_a1, discriminant));
    RiccatiCoefficients {
        a0: ratio_a0 * a2,
        a1: ratio_a1 * a2,
        a2,
        ratio_a1,
        ratio_a0,
        discriminant,
        clamped,
        roots,
    }
}

/// Roots of `y² − b·y − c = 0` given `b` and `D = b² + 4c ≥ 0`.
fn stable_roots(b: f64, disc: f64) -> (f64, f64) {
    let q = 0.5 * (b + b.signum() * disc.sqrt());
    let q = if b == 0.0 { 0.5 * disc.sqrt() } else { q };
    if q == 0.0 {
        return (0.0, 0.0);
    }
    // product of roots is −c = (b² − D)/4
    let big = q;
    let small = -((disc - b * b) / 4.0) / q;
    if big <= small {
        (big, small)
    } else {
        (small, big)
    }
}

pub fn coefficients(thermo: &Thermo, tau: f64, x: f64) -> Result<RiccatiCoefficients, RiccatiError> {
    coefficients_at(&thermo.point(tau, x)?)
}

/// Roots `y₋ ≤ y₊` of `a₀ + a₁y − a₂y² = 0`.
pub fn roots(a0: f64, a1: f64, a2: f64) -> Result<(f64, f64), RiccatiError> {
    if !(a2 > 0.0) {
        return Err(RiccatiError::NonPositiveA2 {
            a2,
            tau: f64::NAN,
            x: f64::NAN,
        });
    }
    let c = from_ratios(a0 / a2, a1 / a2, a2);
    c.roots
        .ok_or(RiccatiError::NegativeDiscriminant(c.discriminant))
}

/// `a₂ = c_h / (2√c)` with `c_h = c_τ / h_τ`, `h_τ` from differentiating the
/// quadrature value of `h`. Independent of [`a2_closed_form`].
pub fn a2_chain_rule(thermo: &Thermo, tau: f64, x: f64) -> Result<f64, RiccatiError> {
    let s = thermo.entropy(x);
    let c = thermo.sound_speed(tau, x)?;
    let step = 1e-3 * tau;
    let c_tau = central_derivative(|t| (-thermo.law.function.partials(t, s).p_tau).sqrt(), tau, step);
    let tol = QuadTolerance {
        rel: 1e-14,
        ..QuadTolerance::default()
    };
    let mut hs = [0.0; 4];
    for (slot, k) in hs.iter_mut().zip([-2.0, -1.0, 1.0, 2.0]) {
        *slot = h_quadrature(&thermo.law, tau + k * step, s, tol)?;
    }
    let h_tau = (hs[0] - 8.0 * hs[1] + 8.0 * hs[2] - hs[3]) / (12.0 * step);
    Ok(c_tau / h_tau / (2.0 * c.sqrt()))
}

/// Threshold `N` and the diagnostics of its estimation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdEstimate {
    /// `N` including the safety factor.
    pub n: f64,
    /// Sampled supremum of root magnitudes before the safety factor.
    pub n_raw: f64,
    pub sup_lower_root: f64,
    pub sup_upper_root: f64,
    pub negative_discriminants: usize,
    pub clamped_discriminants: usize,
    pub worst_discriminant: f64,
    pub state_box: StateBox,
    pub samples_per_axis: usize,
}

#[derive(Debug, Clone, Copy)]
struct RootStats {
    sup: f64,
    lower: f64,
    upper: f64,
    negative: usize,
    clamped: usize,
    worst_disc: f64,
}

impl RootStats {
    fn empty() -> Self {
        Self {
            sup: 0.0,
            lower: 0.0,
            upper: 0.0,
            negative: 0,
            clamped: 0,
            worst_disc: f64::INFINITY,
        }
    }

    fn merge(a: Self, b: Self) -> Self {
        Self {
            sup: a.sup.max(b.sup),
            lower: a.lower.max(b.lower),
            upper: a.upper.max(b.upper),
            negative: a.negative + b.negative,
            clamped: a.clamped + b.clamped,
            worst_disc: a.worst_disc.min(b.worst_disc),
        }
    }
}

/// `N = 1.05 · sup (½|a₁/a₂| + ½√(disc)₊)` over a τ-geometric, x-uniform sample of the box.
pub fn estimate_n(
    thermo: &Thermo,
    state_box: StateBox,
    n: usize,
    initial_tau_range: Option<(f64, f64)>,
) -> Result<ThresholdEstimate, RiccatiError> {
    if let Some((lo, hi)) = initial_tau_range {
        if lo < state_box.tau.0 || hi > state_box.tau.1 {
            return Err(RiccatiError::Precondition(format!(
                "box tau range [{}, {}] does not cover initial data [{lo}, {hi}]",
                state_box.tau.0, state_box.tau.1
            )));
        }
    }
    let samples = state_box.samples(n);
    let stats = samples
        .par_iter()
        .map(|&(tau, x)| {
            let c = coefficients(thermo, tau, x)?;
            let half = 0.5 * c.ratio_a1.abs();
            let mut s = RootStats::empty();
            s.worst_disc = c.discriminant;
            s.clamped = c.clamped as usize;
            match c.roots {
                Some((lo, hi)) => {
                    s.sup = half + 0.5 * c.discriminant.sqrt();
                    s.lower = lo.abs();
                    s.upper = hi.abs();
                }
                None => {
                    s.negative = 1;
                    s.sup = half;
                }
            }
            Ok::<RootStats, RiccatiError>(s)
        })
        .try_reduce(RootStats::empty, |a, b| Ok(RootStats::merge(a, b)))?;
    Ok(ThresholdEstimate {
        n: N_SAFETY_FACTOR * stats.sup,
        n_raw: stats.sup,
        sup_lower_root: stats.lower,
        sup_upper_root: stats.upper,
        negative_discriminants: stats.negative,
        clamped_discriminants: stats.clamped,
        worst_discriminant: stats.worst_disc,
        state_box,
        samples_per_axis: n,
    })
}

/// `(Y, Q) = (max{N, sup y₀}, max{N, sup q₀})`.
pub fn envelopes(n: f64, y0: &[f64], q0: &[f64]) -> (f64, f64) {
    let sup = |v: &[f64]| v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (n.max(sup(y0)), n.max(sup(q0)))
}

/// Constants of `a₂⁻¹ ≤ k₁₄t + k₁₅` and `∫_{τ_min}^{τ} (−p_ξ)^{1/4} dξ ≤ k₁₆t + k₁₇`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct A2Growth {
    pub k14: f64,
    pub k15: f64,
    pub k16: f64,
    pub k17: f64,
    pub a: f64,
    pub tau_min: f64,
}

impl A2Growth {
    pub fn inverse_a2_bound(&self, t: f64) -> f64 {
        self.k14 * t + self.k15
    }

    pub fn volume_bound(&self, t: f64) -> f64 {
        self.k16 * t + self.k17
    }
}

/// `∫_{τ_min}^{τ} √c dξ` (negative when `τ < τ_min`).
pub fn root_c_integral(thermo: &Thermo, tau_min: f64, tau: f64, x: f64) -> Result<f64, RiccatiError> {
    let s = thermo.entropy(x);
    let f = &thermo.law.function;
    let tol = QuadTolerance {
        rel: 1e-10,
        ..QuadTolerance::default()
    };
    integrate(|xi| (-f.partials(xi, s).p_tau).powf(0.25), tau_min, tau, tol)
        .map(|r| r.value)
        .map_err(|e| {
            RiccatiError::Thermo(crate::error::ThermoError::Integral {
                quantity: "int sqrt(c)",
                tau,
                x,
                source: e,
            })
        })
}

/// `k₁₆ = (Y+Q)/2`, `k₁₇ = sup_x ∫_{τ_min}^{τ₀(x)} (−p_ξ)^{1/4}`,
/// `k₁₄ = A·k₁₆`, `k₁₅ = A·k₁₇ + sup_x a₂⁻¹(τ_min, x)`.
pub fn a2_growth_constants(
    thermo: &Thermo,
    tau_min: f64,
    xs: &[f64],
    tau0: &[f64],
    y_env: f64,
    q_env: f64,
) -> Result<A2Growth, RiccatiError> {
    let a = thermo.law.constants.a;
    let k16 = 0.5 * (y_env + q_env);
    let k17 = xs
        .par_iter()
        .zip(tau0.par_iter())
        .map(|(&x, &t)| root_c_integral(thermo, tau_min, t, x))
        .try_reduce(|| 0.0, |a: f64, b: f64| Ok::<f64, RiccatiError>(a.max(b)))?;
    let inv = xs
        .par_iter()
        .map(|&x| Ok(1.0 / a2_closed_form(&thermo.partials(tau_min, x)?)))
        .try_reduce(|| 0.0, |a: f64, b: f64| Ok::<f64, RiccatiError>(a.max(b)))?;
    Ok(A2Growth {
        k14: a * k16,
        k15: a * k17 + inv,
        k16,
        k17,
        a,
        tau_min,
    })
}

/// Smallest `T` with `(ε/k₁₄) ln((k₁₄T + k₁₅)/k₁₅) ≥ −1/y₀`:
/// `T = (k₁₅/k₁₄)(exp(−k₁₄/(ε y₀)) − 1)`, or `−k₁₅/(ε y₀)` when `k₁₄ = 0`.
pub fn blowup_time_bound(y0: f64, eps: f64, k14: f64, k15: f64) -> Result<f64, RiccatiError> {
    if !(y0 < 0.0) {
        return Err(RiccatiError::Precondition(format!(
            "blow-up bound needs y0 < 0, got {y0}"
        )));
    }
    if !(eps > 0.0) || !(k15 > 0.0) || k14 < 0.0 {
        return Err(RiccatiError::Precondition(format!(
            "need eps > 0, k15 > 0, k14 >= 0 (eps={eps}, k14={k14}, k15={k15})"
        )));
    }
    if k14 == 0.0 {
        return Ok(-k15 / (eps * y0));
    }
    Ok(k15 / k14 * (-k14 / (eps * y0)).exp_m1())
}
