//! Entropy-direction derivatives `p_μ, p_τμ, p_ττμ, p_μμ`.
//!
//! `FixedTau` differentiates `p(τ, S(x))` in `x` holding `τ`; this is the literal
//! reading used by the hypothesis checker. `FixedH` holds the Riemann integral `h`
//! fixed, so `τ` moves with `S` at rate `τ_S = h_S / c`. The Riccati decomposition
//! of the gradient variables is exact only under `FixedH`, so the dynamics use it.

use serde::{Deserialize, Serialize};

use crate::eos::{HTail, Partials};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MuConvention {
    #[default]
    FixedTau,
    FixedH,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MuPartials {
    pub p_mu: f64,
    pub p_tau_mu: f64,
    pub p_tau_tau_mu: f64,
    pub p_mu_mu: f64,
}

/// `S`-derivatives of `(p, p_τ, p_ττ)` along the convention's direction, plus
/// the second derivative of `p`, all per unit `S′`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EntropyDirection {
    pub dp: f64,
    pub dp_tau: f64,
    pub dp_tau_tau: f64,
    pub d2p: f64,
}

pub fn entropy_direction(d: &Partials, tail: Option<&HTail>, convention: MuConvention) -> EntropyDirection {
    match convention {
        MuConvention::FixedTau => EntropyDirection {
            dp: d.p_s,
            dp_tau: d.p_tau_s,
            dp_tau_tau: d.p_tau_tau_s,
            d2p: d.p_s_s,
        },
        MuConvention::FixedH => {
            let Some(t) = tail else {
                return EntropyDirection {
                    dp: f64::NAN,
                    dp_tau: f64::NAN,
                    dp_tau_tau: f64::NAN,
                    d2p: f64::NAN,
                };
            };
            let c = (-d.p_tau).sqrt();
            let tau_s = t.h_s / c;
            // D = ∂_S + τ_S ∂_τ
            let h_s_tau = d.p_tau_s / (2.0 * c);
            let c_s = -d.p_tau_s / (2.0 * c);
            let c_tau = -d.p_tau_tau / (2.0 * c);
            let dh_s = t.h_ss + h_s_tau * tau_s;
            let dc = c_s + c_tau * tau_s;
            let dtau_s = dh_s / c - t.h_s * dc / (c * c);
            let dp_tau = d.p_tau_s + d.p_tau_tau * tau_s;
            let d2p = d.p_s_s + d.p_tau_s * tau_s + dp_tau * tau_s + d.p_tau * dtau_s;
            EntropyDirection {
                dp: d.p_s + d.p_tau * tau_s,
                dp_tau,
                dp_tau_tau: d.p_tau_tau_s + d.p_tau_tau_tau * tau_s,
                d2p,
            }
        }
    }
}

/// Assembles the μ-partials for entropy slope `S′ = s1` and curvature `S″ = s2`.
pub fn mu_partials(
    d: &Partials,
    tail: Option<&HTail>,
    s1: f64,
    s2: f64,
    convention: MuConvention,
) -> MuPartials {
    let e = entropy_direction(d, tail, convention);
    let p_mu_mu = match convention {
        MuConvention::FixedTau => e.d2p * s1 * s1,
        MuConvention::FixedH => e.d2p * s1 * s1 + e.dp * s2,
    };
    MuPartials {
        p_mu: e.dp * s1,
        p_tau_mu: e.dp_tau * s1,
        p_tau_tau_mu: e.dp_tau_tau * s1,
        p_mu_mu,
    }
}
