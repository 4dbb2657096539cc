//! Pointwise certification of the structural hypotheses on compact state boxes.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::law::{Partials, PressureLaw};
use super::profile::EntropyProfile;
use crate::error::EosError;
use crate::numerics::{geometric_points, integrate, uniform_points, QuadTolerance};
use crate::thermo::mu::{mu_partials, MuConvention};
use crate::thermo::riemann_h_tail;

/// Floating-point slack below which a margin still counts as satisfied.
pub const MARGIN_SLACK: f64 = 1e-12;

/// Compact sampling box `[τ_lo, τ_hi] × [x_lo, x_hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StateBox {
    pub tau: (f64, f64),
    pub x: (f64, f64),
}

impl StateBox {
    pub fn new(tau: (f64, f64), x: (f64, f64)) -> Result<Self, EosError> {
        if !(tau.0 > 0.0 && tau.1 >= tau.0 && tau.1.is_finite()) {
            return Err(EosError::InvalidBox(format!(
                "tau interval [{}, {}] must be positive and ordered",
                tau.0, tau.1
            )));
        }
        if !(x.1 >= x.0) {
            return Err(EosError::InvalidBox(format!(
                "x interval [{}, {}] must be ordered",
                x.0, x.1
            )));
        }
        Ok(Self { tau, x })
    }

    /// Geometric in τ, uniform in x.
    pub fn samples(&self, n: usize) -> Vec<(f64, f64)> {
        let n = n.max(2);
        let taus = geometric_points(self.tau.0, self.tau.1, n);
        let xs = uniform_points(self.x.0, self.x.1, n);
        xs.iter()
            .flat_map(|&x| taus.iter().map(move |&t| (t, x)))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    VacuousPass,
    Inconclusive,
}

impl Verdict {
    pub fn is_pass(self) -> bool {
        matches!(self, Verdict::Pass | Verdict::VacuousPass)
    }
}

/// One checked inequality.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionRecord {
    pub id: String,
    pub statement: String,
    pub state_box: Option<StateBox>,
    pub verdict: Verdict,
    pub worst_margin: f64,
    /// `(τ, x)` of the worst margin.
    pub witness: Option<(f64, f64)>,
    pub best_constant: Option<f64>,
    /// Range of the pointwise-optimal constant over the samples.
    pub best_constant_range: Option<(f64, f64)>,
    pub growth_exponent: Option<f64>,
    pub notes: Vec<String>,
}

impl ConditionRecord {
    fn new(id: &str, statement: &str, state_box: Option<StateBox>) -> Self {
        Self {
            id: id.into(),
            statement: statement.into(),
            state_box,
            verdict: Verdict::Pass,
            worst_margin: f64::INFINITY,
            witness: None,
            best_constant: None,
            best_constant_range: None,
            growth_exponent: None,
            notes: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub conditions: Vec<ConditionRecord>,
}

impl HypothesisReport {
    pub fn passed(&self) -> bool {
        self.conditions.iter().all(|c| c.verdict.is_pass())
    }

    pub fn get(&self, id: &str) -> Option<&ConditionRecord> {
        self.conditions.iter().find(|c| c.id == id)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ConditionRecord> {
        self.conditions.iter().filter(|c| !c.verdict.is_pass())
    }

    pub fn merge(mut self, other: HypothesisReport) -> Self {
        self.conditions.extend(other.conditions);
        self
    }
}

/// Worst margin and the sample it came from; the reduction is associative.
#[derive(Debug, Clone, Copy)]
struct Worst {
    margin: f64,
    at: (f64, f64),
    lo: f64,
    hi: f64,
}

impl Worst {
    fn identity() -> Self {
        Self {
            margin: f64::INFINITY,
            at: (f64::NAN, f64::NAN),
            lo: f64::INFINITY,
            hi: f64::NEG_INFINITY,
        }
    }

    fn point(margin: f64, at: (f64, f64), ratio: Option<f64>) -> Self {
        let (lo, hi) = ratio.map_or((f64::INFINITY, f64::NEG_INFINITY), |r| (r, r));
        Self { margin, at, lo, hi }
    }

    /// Keeps the first-sampled point among equal margins, so witnesses are stable.
    fn merge(a: Self, b: Self) -> Self {
        let pick_b = b.margin < a.margin || (a.margin.is_nan() && !b.margin.is_nan());
        let (margin, at) = if pick_b { (b.margin, b.at) } else { (a.margin, a.at) };
        Self {
            margin,
            at,
            lo: a.lo.min(b.lo),
            hi: a.hi.max(b.hi),
        }
    }
}

fn sweep<F>(samples: &[(f64, f64)], f: F) -> Result<Worst, EosError>
where
    F: Fn(f64, f64) -> Result<(f64, Option<f64>), EosError> + Sync,
{
    samples
        .par_iter()
        .map(|&(tau, x)| f(tau, x).map(|(m, r)| Worst::point(m, (tau, x), r)))
        .try_reduce(Worst::identity, |a, b| Ok(Worst::merge(a, b)))
}

fn finish(rec: &mut ConditionRecord, w: Worst) {
    rec.worst_margin = w.margin;
    rec.witness = Some(w.at);
    rec.verdict = if w.margin >= -MARGIN_SLACK {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    if w.lo <= w.hi {
        rec.best_constant_range = Some((w.lo, w.hi));
    }
}

fn partials_at(law: &PressureLaw, profile: &EntropyProfile, tau: f64, x: f64) -> Result<Partials, EosError> {
    law.partials(tau, profile.s(x))
}

/// Sign conditions `p_τ < 0`, `p_ττ > 0` and the limit behaviour of `p`.
///
/// Limits are judged by extrapolating six decades beyond the box edges and are
/// indicative only.
pub fn check_h1(
    law: &PressureLaw,
    profile: &EntropyProfile,
    state_box: StateBox,
    n: usize,
) -> Result<HypothesisReport, EosError> {
    let samples = state_box.samples(n);
    let mut report = HypothesisReport::default();

    let mut r = ConditionRecord::new("H1.1", "p_tau < 0", Some(state_box));
    let w = sweep(&samples, |t, x| Ok((-partials_at(law, profile, t, x)?.p_tau, None)))?;
    finish(&mut r, w);
    if w.margin <= 0.0 {
        r.verdict = Verdict::Fail;
    }
    report.conditions.push(r);

    let mut r = ConditionRecord::new("H1.2", "p_tau_tau > 0", Some(state_box));
    let w = sweep(&samples, |t, x| Ok((partials_at(law, profile, t, x)?.p_tau_tau, None)))?;
    finish(&mut r, w);
    if w.margin <= 0.0 {
        r.verdict = Verdict::Fail;
    }
    report.conditions.push(r);

    let xs = uniform_points(state_box.x.0, state_box.x.1, n.max(2));
    let decades: Vec<f64> = (0..=6).map(|j| 10f64.powi(j)).collect();

    let mut r = ConditionRecord::new("H1.3", "p -> +inf as tau -> 0", Some(state_box));
    let mut worst = f64::INFINITY;
    for &x in &xs {
        let s = profile.s(x);
        let ps: Vec<f64> = decades
            .iter()
            .map(|d| law.pressure(state_box.tau.0 / d, s))
            .collect();
        let monotone = ps.windows(2).all(|w| w[1] > w[0]);
        let growth = ps[6] / ps[0].abs().max(f64::MIN_POSITIVE);
        let margin = if monotone { growth.log10() - 3.0 } else { -1.0 };
        if margin < worst {
            worst = margin;
            r.witness = Some((state_box.tau.0 * 1e-6, x));
        }
    }
    r.worst_margin = worst;
    r.verdict = if worst >= 0.0 { Verdict::Pass } else { Verdict::Fail };
    r.notes
        .push("indicative only: monotone extrapolation over six decades below the box".into());
    report.conditions.push(r);

    let mut r = ConditionRecord::new("H1.4", "p -> 0 as tau -> inf", Some(state_box));
    let mut worst = f64::INFINITY;
    for &x in &xs {
        let s = profile.s(x);
        let ps: Vec<f64> = decades
            .iter()
            .map(|d| law.pressure(state_box.tau.1 * d, s))
            .collect();
        let monotone = ps.windows(2).all(|w| w[1] < w[0]);
        let decayed = ps[6] >= 0.0 && ps[6] <= 1e-3 * ps[0].abs();
        let margin = if monotone && decayed {
            (ps[0].abs() / ps[6].max(f64::MIN_POSITIVE)).log10() - 3.0
        } else {
            -1.0
        };
        if margin < worst {
            worst = margin;
            r.witness = Some((state_box.tau.1 * 1e6, x));
        }
    }
    r.worst_margin = worst;
    r.verdict = if worst >= 0.0 { Verdict::Pass } else { Verdict::Fail };
    r.notes
        .push("indicative only: monotone extrapolation over six decades above the box".into());
    report.conditions.push(r);

    Ok(report)
}

/// Decade increments of a partial integral, classified by their ratio.
#[derive(Debug, Clone, PartialEq)]
pub struct DecadeClassification {
    pub divergent: Option<bool>,
    /// `log₁₀` of the asymptotic increment ratio.
    pub exponent: f64,
    /// Partial sum plus geometric extrapolation (convergent case only).
    pub total: f64,
    pub partial_sums: Vec<f64>,
}

/// Classifies `Σ increments` as divergent (ratio ≥ 1) or convergent (ratio < 1).
pub fn classify_decades(increments: &[f64]) -> DecadeClassification {
    let mut partial_sums = Vec::with_capacity(increments.len());
    let mut acc = 0.0;
    for inc in increments {
        acc += inc;
        partial_sums.push(acc);
    }
    let monotone = increments.iter().all(|i| *i >= 0.0 && i.is_finite());
    let ratios: Vec<f64> = increments
        .windows(2)
        .map(|w| w[1] / w[0])
        .filter(|r| r.is_finite())
        .collect();
    let last = ratios.iter().rev().take(3).copied().collect::<Vec<_>>();
    let exponent = last.first().map_or(f64::NAN, |r| r.log10());
    let divergent = if !monotone || last.len() < 3 {
        None
    } else if last.iter().all(|r| *r >= 1.0 - 1e-9) {
        Some(true)
    } else if last.iter().all(|r| *r < 1.0 - 1e-9) {
        Some(false)
    } else {
        None
    };
    let total = match (divergent, last.first()) {
        (Some(false), Some(&r)) => acc + increments[increments.len() - 1] * r / (1.0 - r),
        (Some(true), _) => f64::INFINITY,
        _ => f64::NAN,
    };
    DecadeClassification {
        divergent,
        exponent,
        total,
        partial_sums,
    }
}

const H2_DECADES: i32 = 12;

/// Sound-speed integrability: `∫₀¹ c = ∞` and `∫₁^∞ c < ∞` at coordinate `x`.
pub fn check_h2(law: &PressureLaw, profile: &EntropyProfile, x: f64) -> Result<HypothesisReport, EosError> {
    let s = profile.s(x);
    let tol = QuadTolerance {
        rel: 1e-11,
        ..QuadTolerance::default()
    };
    let c = |tau: f64| (-law.function.partials(tau, s).p_tau).sqrt();
    let piece = |a: f64, b: f64| integrate(c, a, b, tol).map(|r| r.value).unwrap_or(f64::NAN);
    let mut report = HypothesisReport::default();

    let near: Vec<f64> = (0..H2_DECADES)
        .map(|j| piece(10f64.powi(-j - 1), 10f64.powi(-j)))
        .collect();
    let cls = classify_decades(&near);
    let mut r = ConditionRecord::new("H2.1", "int_0^1 sqrt(-p_tau) = +inf", None);
    r.witness = Some((10f64.powi(-H2_DECADES), x));
    r.growth_exponent = Some(cls.exponent);
    r.worst_margin = cls.exponent;
    r.verdict = match cls.divergent {
        Some(true) => Verdict::Pass,
        Some(false) => Verdict::Fail,
        None => Verdict::Inconclusive,
    };
    r.notes.push(format!(
        "partial integral down to 1e-{H2_DECADES}: {:.6e}",
        cls.partial_sums.last().copied().unwrap_or(f64::NAN)
    ));
    if cls.divergent == Some(false) {
        r.best_constant = Some(cls.total);
        r.notes.push("near-zero integral converges".into());
    }
    report.conditions.push(r);

    let far: Vec<f64> = (0..H2_DECADES)
        .map(|j| piece(10f64.powi(j), 10f64.powi(j + 1)))
        .collect();
    let cls = classify_decades(&far);
    let mut r = ConditionRecord::new("H2.2", "int_1^inf sqrt(-p_tau) < +inf", None);
    r.witness = Some((10f64.powi(H2_DECADES), x));
    r.growth_exponent = Some(cls.exponent);
    r.worst_margin = -cls.exponent;
    r.verdict = match cls.divergent {
        Some(false) => Verdict::Pass,
        Some(true) => Verdict::Fail,
        None => Verdict::Inconclusive,
    };
    if cls.divergent == Some(false) {
        r.best_constant = Some(cls.total);
    }
    report.conditions.push(r);
    Ok(report)
}

/// The four inequalities of the third hypothesis with the declared `l₁, l₂, k, A`,
/// plus the pointwise-optimal constants over the box.
pub fn check_h3(
    law: &PressureLaw,
    profile: &EntropyProfile,
    state_box: StateBox,
    n: usize,
) -> Result<HypothesisReport, EosError> {
    let samples = state_box.samples(n);
    let k = law.constants.k;
    let a = law.constants.a;
    let (l1, l2) = (law.constants.l[0], law.constants.l[1]);
    let mut report = HypothesisReport::default();

    let mut r = ConditionRecord::new("H3.1", "l2 * c^(7/2) <= p_tau_tau", Some(state_box));
    let w = sweep(&samples, |t, x| {
        let d = partials_at(law, profile, t, x)?;
        let ratio = d.p_tau_tau / (-d.p_tau).powf(1.75);
        Ok(((ratio - l2) / ratio.abs().max(l2), Some(ratio)))
    })?;
    finish(&mut r, w);
    r.best_constant = Some(w.lo);
    uniformity_note(&mut r, "p_tau_tau / c^(7/2)");
    report.conditions.push(r);

    let mut r = ConditionRecord::new("H3.2", "p * p_tau_tau <= l1 * c^(7/2)", Some(state_box));
    let w = sweep(&samples, |t, x| {
        let d = partials_at(law, profile, t, x)?;
        let ratio = d.p * d.p_tau_tau / (-d.p_tau).powf(1.75);
        Ok(((l1 - ratio) / ratio.abs().max(l1), Some(ratio)))
    })?;
    finish(&mut r, w);
    r.best_constant = Some(w.hi);
    uniformity_note(&mut r, "p * p_tau_tau / c^(7/2)");
    report.conditions.push(r);

    let mut r = ConditionRecord::new(
        "H3.3",
        "2(k-1) p_tau^2 >= k p p_tau_tau",
        Some(state_box),
    );
    let mut no_finite_k = None;
    let w = sweep(&samples, |t, x| {
        let d = partials_at(law, profile, t, x)?;
        let x2 = d.p_tau * d.p_tau;
        let y = d.p * d.p_tau_tau;
        let ratio = (2.0 * x2 > y).then(|| 2.0 * x2 / (2.0 * x2 - y));
        Ok(((2.0 * (k - 1.0) * x2 - k * y) / x2, ratio.or(Some(f64::INFINITY))))
    })?;
    finish(&mut r, w);
    if w.hi.is_infinite() {
        no_finite_k = Some(w.at);
        r.verdict = Verdict::Fail;
    }
    r.best_constant = Some(w.hi);
    if let Some(at) = no_finite_k {
        r.notes.push(format!(
            "no finite k exists on this box: 2 p_tau^2 <= p p_tau_tau near tau={}, x={}",
            at.0, at.1
        ));
    }
    report.conditions.push(r);

    let mut r = ConditionRecord::new(
        "H3.4",
        "(5+A) p_tau_tau^2 - 4 p_tau p_tau_tau_tau >= 0",
        Some(state_box),
    );
    let w = sweep(&samples, |t, x| {
        let d = partials_at(law, profile, t, x)?;
        let pp = d.p_tau_tau * d.p_tau_tau;
        let ratio = 4.0 * d.p_tau * d.p_tau_tau_tau / pp - 5.0;
        Ok((((5.0 + a) * pp - 4.0 * d.p_tau * d.p_tau_tau_tau) / pp, Some(ratio)))
    })?;
    finish(&mut r, w);
    r.best_constant = Some(w.hi);
    report.conditions.push(r);

    Ok(report)
}

fn uniformity_note(r: &mut ConditionRecord, what: &str) {
    if let Some((lo, hi)) = r.best_constant_range {
        if hi > lo * (1.0 + 1e-9) {
            r.notes.push(format!(
                "{what} varies by a factor {:.6} on the box; constants hold on this box only",
                hi / lo
            ));
        }
    }
}

/// Entropy-derivative sandwiches with the declared `k₁, k₂, l₃ … l₈`.
///
/// Each inequality `g·C/l_hi ≤ Q ≤ g·C/l_lo` (with `g = m′/m`) is checked in the
/// written orientation; where `g < 0` the flipped orientation's margin is also
/// recorded in the notes.
pub fn check_h4(
    law: &PressureLaw,
    profile: &EntropyProfile,
    state_box: StateBox,
    n: usize,
    convention: MuConvention,
) -> Result<HypothesisReport, EosError> {
    let samples = state_box.samples(n);
    let c = law.constants;
    let specs: [(&str, &str, f64, f64); 4] = [
        ("H4.1", "g p / k2 <= p_mu <= g p / k1", c.k2, c.k1),
        ("H4.2", "g p_tau / l4 <= p_tau_mu <= g p_tau / l3", c.l[3], c.l[2]),
        ("H4.3", "g p / l6 <= p_mu_mu <= g p / l5", c.l[5], c.l[4]),
        ("H4.4", "g p_tau_tau / l8 <= p_tau_tau_mu <= g p_tau_tau / l7", c.l[7], c.l[6]),
    ];
    let isentropic = samples.iter().all(|&(_, x)| profile.s_prime(x) == 0.0);
    let mut report = HypothesisReport::default();

    for (idx, (id, statement, l_hi, l_lo)) in specs.iter().enumerate() {
        let mut r = ConditionRecord::new(id, statement, Some(state_box));
        if isentropic {
            r.verdict = Verdict::VacuousPass;
            r.worst_margin = 0.0;
            r.notes.push("m' = 0 on the box: both bounds vanish".into());
            report.conditions.push(r);
            continue;
        }
        let eval = |t: f64, x: f64| -> Result<(f64, f64, f64), EosError> {
            let (s, s1, s2) = profile.jet(x);
            let d = law.partials(t, s)?;
            let tail = riemann_h_tail(law, t, s);
            let mu = mu_partials(&d, tail.as_ref(), s1, s2, convention);
            let g = profile.rate * s1;
            let (base, q) = match idx {
                0 => (d.p, mu.p_mu),
                1 => (d.p_tau, mu.p_tau_mu),
                2 => (d.p, mu.p_mu_mu),
                _ => (d.p_tau_tau, mu.p_tau_tau_mu),
            };
            Ok((g, base, q))
        };
        let written = sweep(&samples, |t, x| {
            let (g, base, q) = eval(t, x)?;
            let (lower, upper) = (g * base / l_hi, g * base / l_lo);
            let scale = q.abs() + lower.abs() + upper.abs();
            let margin = if scale == 0.0 {
                0.0
            } else {
                (q - lower).min(upper - q) / scale
            };
            let ratio = (q != 0.0).then(|| g * base / q);
            Ok((margin, ratio))
        })?;
        finish(&mut r, written);
        let flipped = sweep(&samples, |t, x| {
            let (g, base, q) = eval(t, x)?;
            if g >= 0.0 {
                return Ok((f64::INFINITY, None));
            }
            let (lower, upper) = (g * base / l_hi, g * base / l_lo);
            let scale = q.abs() + lower.abs() + upper.abs();
            Ok(((q - upper).min(lower - q) / scale, None))
        })?;
        if flipped.margin.is_finite() {
            r.notes.push(format!(
                "segments with m' < 0 present: flipped-orientation worst margin {:.6e} at tau={}, x={}",
                flipped.margin, flipped.at.0, flipped.at.1
            ));
        }
        if r.verdict == Verdict::Fail {
            if let Some((_, x)) = r.witness {
                r.notes
                    .push(format!("violation on a segment where sign(m') = {}", sign_label(profile.s_prime(x))));
            }
        }
        report.conditions.push(r);
    }
    Ok(report)
}

fn sign_label(v: f64) -> &'static str {
    if v > 0.0 {
        "+"
    } else if v < 0.0 {
        "-"
    } else {
        "0"
    }
}

/// Worst relative error between each declared partial and a five-point
/// central difference of its parent quantity, over interior samples.
pub fn derivative_consistency(
    law: &PressureLaw,
    profile: &EntropyProfile,
    state_box: StateBox,
    n: usize,
) -> f64 {
    let samples = state_box.samples(n.max(3));
    let f = &law.function;
    let rel = |declared: f64, fd: f64, parent: f64| {
        let diff = (declared - fd).abs();
        if diff == 0.0 {
            return 0.0;
        }
        let denom = declared.abs().max(fd.abs()).max(1e-12 * parent.abs());
        if denom == 0.0 {
            0.0
        } else {
            diff / denom
        }
    };
    samples
        .par_iter()
        .map(|&(tau, x)| {
            let s = profile.s(x);
            let d = f.partials(tau, s);
            let ht = 1e-3 * tau;
            let hs = 1e-3 * s.abs().max(1.0);
            let dt = |g: &dyn Fn(&Partials) -> f64| {
                crate::numerics::central_derivative(|t| g(&f.partials(t, s)), tau, ht)
            };
            let ds = |g: &dyn Fn(&Partials) -> f64| {
                crate::numerics::central_derivative(|e| g(&f.partials(tau, e)), s, hs)
            };
            [
                rel(d.p_tau, dt(&|q| q.p), d.p),
                rel(d.p_tau_tau, dt(&|q| q.p_tau), d.p_tau),
                rel(d.p_tau_tau_tau, dt(&|q| q.p_tau_tau), d.p_tau_tau),
                rel(d.p_s, ds(&|q| q.p), d.p),
                rel(d.p_tau_s, ds(&|q| q.p_tau), d.p_tau),
                rel(d.p_s_s, ds(&|q| q.p_s), d.p_s),
                rel(d.p_tau_tau_s, ds(&|q| q.p_tau_tau), d.p_tau_tau),
                rel(d.p_tau_s_s, ds(&|q| q.p_tau_s), d.p_tau_s),
            ]
            .into_iter()
            .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eos::law::{DeclaredConstants, GammaLaw, PressureFunction};
    use crate::eos::profile::ProfileShape;
    use std::sync::Arc;

    fn gamma(g: f64, k: f64) -> PressureLaw {
        PressureLaw::new(
            Arc::new(GammaLaw::new(1.0, g, 1.0)),
            DeclaredConstants {
                k,
                a: 1.0,
                k1: 0.5,
                k2: 0.5,
                l: [0.5, 0.01, 0.5, 0.5, 1.0, 1.0, 0.5, 0.5],
            },
        )
    }

    fn flat() -> EntropyProfile {
        EntropyProfile::constant(0.0, 0.5, (-1.0, 1.0))
    }

    #[derive(Debug)]
    struct Linear;
    impl PressureFunction for Linear {
        fn name(&self) -> &str {
            "linear"
        }
        fn partials(&self, tau: f64, _s: f64) -> Partials {
            Partials {
                p: tau,
                p_tau: 1.0,
                ..Partials::default()
            }
        }
    }

    #[derive(Debug)]
    struct Constant;
    impl PressureFunction for Constant {
        fn name(&self) -> &str {
            "constant"
        }
        fn partials(&self, _tau: f64, _s: f64) -> Partials {
            Partials {
                p: 1.0,
                ..Partials::default()
            }
        }
    }

    #[derive(Debug)]
    struct LogLaw;
    impl PressureFunction for LogLaw {
        fn name(&self) -> &str {
            "log"
        }
        fn partials(&self, tau: f64, _s: f64) -> Partials {
            Partials {
                p: -tau.ln(),
                p_tau: -1.0 / tau,
                p_tau_tau: 1.0 / (tau * tau),
                p_tau_tau_tau: -2.0 / (tau * tau * tau),
                ..Partials::default()
            }
        }
    }

    #[test]
    fn h1_gamma_two_passes() {
        let b = StateBox::new((0.5, 2.0), (0.0, 0.0)).unwrap();
        let r = check_h1(&gamma(2.0, 4.0), &flat(), b, 16).unwrap();
        assert!(r.passed(), "{r:?}");
        let b = StateBox::new((0.1, 10.0), (0.0, 0.0)).unwrap();
        assert!(check_h1(&gamma(1.4, 5.0), &flat(), b, 16).unwrap().passed());
    }

    #[test]
    fn h1_increasing_pressure_fails_at_left_edge() {
        let law = PressureLaw::new(Arc::new(Linear), DeclaredConstants::default());
        let b = StateBox::new((1.0, 2.0), (0.0, 0.0)).unwrap();
        let r = check_h1(&law, &flat(), b, 8).unwrap();
        let c = r.get("H1.1").unwrap();
        assert_eq!(c.verdict, Verdict::Fail);
        assert_eq!(c.witness.unwrap().0, 1.0);
    }

    #[test]
    fn h2_classifies_gamma_and_log_laws() {
        let r = check_h2(&gamma(2.0, 4.0), &flat(), 0.0).unwrap();
        assert!(r.passed());
        let tail = r.get("H2.2").unwrap().best_constant.unwrap();
        assert!((tail - 2.0 * 2f64.sqrt()).abs() < 1e-8, "{tail}");
        assert!((r.get("H2.1").unwrap().growth_exponent.unwrap() - 0.5).abs() < 1e-9);

        let r = check_h2(&gamma(3.0, 3.0), &flat(), 0.0).unwrap();
        let tail = r.get("H2.2").unwrap().best_constant.unwrap();
        assert!((tail - 3f64.sqrt()).abs() < 1e-8);

        let log = PressureLaw::new(Arc::new(LogLaw), DeclaredConstants::default());
        let r = check_h2(&log, &flat(), 0.0).unwrap();
        assert_eq!(r.get("H2.1").unwrap().verdict, Verdict::Fail);
    }

    #[test]
    fn h3_best_k_is_uniform_for_gamma_law() {
        for g in [1.4, 2.0, 3.0] {
            let k = 2.0 * g / (g - 1.0);
            let b = StateBox::new((0.1, 10.0), (0.0, 0.0)).unwrap();
            let r = check_h3(&gamma(g, k), &flat(), b, 24).unwrap();
            let h = r.get("H3.3").unwrap();
            let (lo, hi) = h.best_constant_range.unwrap();
            assert!((hi - k).abs() < 1e-10 * k && (lo - k).abs() < 1e-10 * k);
            assert!(h.verdict.is_pass());
            let a = r.get("H3.4").unwrap().best_constant.unwrap();
            assert!((a - (3.0 - g) / (g + 1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn h3_underdeclared_k_fails() {
        let b = StateBox::new((0.5, 2.0), (0.0, 0.0)).unwrap();
        let r = check_h3(&gamma(2.0, 2.0), &flat(), b, 8).unwrap();
        let h = r.get("H3.3").unwrap();
        assert_eq!(h.verdict, Verdict::Fail);
        assert!(h.witness.is_some());
    }

    #[test]
    fn h3_ratio_varies_on_gamma_two_box() {
        let b = StateBox::new((0.5, 2.0), (0.0, 0.0)).unwrap();
        let r = check_h3(&gamma(2.0, 4.0), &flat(), b, 16).unwrap();
        let (lo, hi) = r.get("H3.2").unwrap().best_constant_range.unwrap();
        assert!((hi / lo - 4f64.powf(0.75)).abs() < 1e-10);
        assert!(!r.get("H3.2").unwrap().notes.is_empty());
    }

    #[test]
    fn h4_fixed_tau_gamma_law_has_equality_constants() {
        let profile = EntropyProfile::new(
            ProfileShape::Tanh {
                amplitude: 1.0,
                center: 0.0,
                width: 1.0,
            },
            0.5,
            (-3.0, 3.0),
        )
        .unwrap();
        let b = StateBox::new((0.5, 2.0), (-3.0, 3.0)).unwrap();
        let r = check_h4(&gamma(2.0, 4.0), &profile, b, 12, MuConvention::FixedTau).unwrap();
        for id in ["H4.1", "H4.2", "H4.4"] {
            let c = r.get(id).unwrap();
            assert!(c.verdict.is_pass(), "{id}: {c:?}");
            let (lo, hi) = c.best_constant_range.unwrap();
            assert!((lo - 0.5).abs() < 1e-12 && (hi - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn h4_isentropic_is_vacuous() {
        let b = StateBox::new((0.5, 2.0), (-1.0, 1.0)).unwrap();
        let r = check_h4(&gamma(2.0, 4.0), &flat(), b, 8, MuConvention::FixedH).unwrap();
        assert!(r.conditions.iter().all(|c| c.verdict == Verdict::VacuousPass));
    }

    #[test]
    fn derivative_consistency_gamma_and_constant() {
        let b = StateBox::new((0.3, 1.0), (0.0, 0.0)).unwrap();
        assert!(derivative_consistency(&gamma(1.4, 5.0), &flat(), b, 8) < 1e-6);
        assert!(derivative_consistency(&gamma(2.0, 4.0), &flat(), b, 8) < 1e-6);
        let law = PressureLaw::new(Arc::new(Constant), DeclaredConstants::default());
        assert_eq!(derivative_consistency(&law, &flat(), b, 8), 0.0);
    }

    #[test]
    fn classify_handles_log_divergence_and_noise() {
        assert_eq!(classify_decades(&[1.0; 6]).divergent, Some(true));
        assert_eq!(classify_decades(&[1.0, -1.0, 1.0, 1.0]).divergent, None);
    }
}
