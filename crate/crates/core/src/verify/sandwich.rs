//! `p ≤ c·h ≤ k·p` over a state box.

use rayon::prelude::*;
use serde::Serialize;

use crate::eos::{EntropyProfile, PressureLaw, StateBox};
use crate::error::VerifyError;
use crate::thermo::{compute_h, sound_speed};

/// Relative round-off allowed in `p ≤ c·h` before it counts as a contradiction.
pub const CH_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SandwichReport {
    /// `min (c·h − p)/(c·h)` over the samples.
    pub lower_margin: f64,
    /// `min (k·p − c·h)/(k·p)` with the declared `k`.
    pub upper_margin: f64,
    /// Tightest admissible `k = sup c·h/p`.
    pub k_best: f64,
    /// `inf c·h/p`, for the spread of the pointwise ratio.
    pub k_inf: f64,
    pub declared_k: f64,
    /// `(τ, x)` attaining `k_best`.
    pub witness: (f64, f64),
    pub samples: usize,
}

impl SandwichReport {
    pub fn passed(&self) -> bool {
        self.lower_margin >= -CH_SLACK && self.upper_margin >= -CH_SLACK
    }
}

/// Samples `c·h/p` on `n × n` points of the box.
pub fn check_pressure_sandwich(
    law: &PressureLaw,
    profile: &EntropyProfile,
    state_box: &StateBox,
    n: usize,
) -> Result<SandwichReport, VerifyError> {
    let pts = state_box.samples(n);
    let k = law.constants.k;
    let vals: Vec<(f64, f64, f64, f64)> = pts
        .par_iter()
        .map(|&(tau, x)| {
            let s = profile.s(x);
            let c = sound_speed(law, tau, s)?;
            let h = compute_h(law, tau, s)?;
            let p = law.pressure(tau, s);
            let ch = c * h;
            if p > ch * (1.0 + CH_SLACK) {
                return Err(VerifyError::PressureExceedsCh { tau, x, p, ch });
            }
            if !(p > 0.0) {
                return Err(VerifyError::Precondition(format!(
                    "pressure {p} is not positive at tau={tau}, x={x}"
                )));
            }
            Ok((tau, x, p, ch))
        })
        .collect::<Result<_, _>>()?;
    let mut report = SandwichReport {
        lower_margin: f64::INFINITY,
        upper_margin: f64::INFINITY,
        k_best: f64::NEG_INFINITY,
        k_inf: f64::INFINITY,
        declared_k: k,
        witness: (f64::NAN, f64::NAN),
        samples: vals.len(),
    };
    for &(tau, x, p, ch) in &vals {
        report.lower_margin = report.lower_margin.min((ch - p) / ch);
        report.upper_margin = report.upper_margin.min((k * p - ch) / (k * p));
        let ratio = ch / p;
        if ratio > report.k_best {
            report.k_best = ratio;
            report.witness = (tau, x);
        }
        report.k_inf = report.k_inf.min(ratio);
    }
    Ok(report)
}
