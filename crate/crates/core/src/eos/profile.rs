use serde::Serialize;

use crate::error::EosError;
use crate::numerics::{bisect, integrate, QuadTolerance};
use crate::params::{self, ParamMap};

/// Shape of the frozen entropy profile `S(x)`.
#[derive(Debug, Clone, PartialEq)]
pub enum ProfileShape {
    Constant {
        value: f64,
    },
    /// `A·tanh((x − center)/width)`.
    Tanh {
        amplitude: f64,
        center: f64,
        width: f64,
    },
    /// Raised cosine `A(1 − cos(2π(x + w/2)/P))/2` on `|x| ≤ w/2`, zero outside.
    /// The window must hold a whole number of periods so the bump is C¹.
    SineBump {
        amplitude: f64,
        period: f64,
        window: f64,
    },
    /// Piecewise-linear interpolant of `knots`, box-averaged over `[x − δ, x + δ]`.
    PiecewiseLinearSmoothed {
        knots: Vec<(f64, f64)>,
        smoothing: f64,
    },
}

impl ProfileShape {
    pub fn from_params(name: &str, p: &ParamMap) -> Result<Self, EosError> {
        match name {
            "constant" => Ok(Self::Constant {
                value: params::number_or(p, name, "value", 0.0)?,
            }),
            "tanh" => Ok(Self::Tanh {
                amplitude: params::number(p, name, "amplitude")?,
                center: params::number_or(p, name, "center", 0.0)?,
                width: params::positive(p, name, "width")?,
            }),
            "sine-bump" => {
                let period = params::positive(p, name, "period")?;
                let window = params::positive(p, name, "window")?;
                let cycles = window / period;
                if (cycles - cycles.round()).abs() > 1e-9 {
                    return Err(EosError::InvalidParameter {
                        owner: name.into(),
                        key: "window".into(),
                        reason: format!("window/period = {cycles} must be an integer for a C¹ profile"),
                    });
                }
                Ok(Self::SineBump {
                    amplitude: params::number(p, name, "amplitude")?,
                    period,
                    window,
                })
            }
            "piecewise-linear-smoothed" => {
                let rows = params::table(p, name, "knots")?;
                let mut knots = Vec::with_capacity(rows.len());
                for row in rows {
                    if row.len() != 2 {
                        return Err(EosError::InvalidParameter {
                            owner: name.into(),
                            key: "knots".into(),
                            reason: "each knot must be [x, S]".into(),
                        });
                    }
                    knots.push((row[0], row[1]));
                }
                if knots.len() < 2 || knots.windows(2).any(|w| w[1].0 <= w[0].0) {
                    return Err(EosError::InvalidParameter {
                        owner: name.into(),
                        key: "knots".into(),
                        reason: "need at least two knots with increasing x".into(),
                    });
                }
                Ok(Self::PiecewiseLinearSmoothed {
                    knots,
                    smoothing: params::positive(p, name, "smoothing")?,
                })
            }
            other => Err(EosError::UnknownProfile(other.to_string())),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Constant { .. } => "constant",
            Self::Tanh { .. } => "tanh",
            Self::SineBump { .. } => "sine-bump",
            Self::PiecewiseLinearSmoothed { .. } => "piecewise-linear-smoothed",
        }
    }

    /// Returns `(S, S′, S″)`.
    pub fn eval(&self, x: f64) -> (f64, f64, f64) {
        match self {
            Self::Constant { value } => (*value, 0.0, 0.0),
            Self::Tanh {
                amplitude,
                center,
                width,
            } => {
                let z = (x - center) / width;
                let t = z.tanh();
                let sech2 = 1.0 - t * t;
                (
                    amplitude * t,
                    amplitude * sech2 / width,
                    -2.0 * amplitude * t * sech2 / (width * width),
                )
            }
            Self::SineBump {
                amplitude,
                period,
                window,
            } => {
                if x.abs() > 0.5 * window {
                    return (0.0, 0.0, 0.0);
                }
                let k = 2.0 * std::f64::consts::PI / period;
                let phase = k * (x + 0.5 * window);
                (
                    0.5 * amplitude * (1.0 - phase.cos()),
                    0.5 * amplitude * k * phase.sin(),
                    0.5 * amplitude * k * k * phase.cos(),
                )
            }
            Self::PiecewiseLinearSmoothed { knots, smoothing } => {
                let d = *smoothing;
                let s = (linear_antiderivative(knots, x + d) - linear_antiderivative(knots, x - d))
                    / (2.0 * d);
                let s1 = (linear_value(knots, x + d) - linear_value(knots, x - d)) / (2.0 * d);
                let s2 = (linear_slope(knots, x + d) - linear_slope(knots, x - d)) / (2.0 * d);
                (s, s1, s2)
            }
        }
    }

    /// Points where `S′` is only piecewise smooth; quadrature splits there.
    fn kinks(&self) -> Vec<f64> {
        match self {
            Self::SineBump { window, .. } => vec![-0.5 * window, 0.5 * window],
            Self::PiecewiseLinearSmoothed { knots, smoothing } => knots
                .iter()
                .flat_map(|(x, _)| [x - smoothing, x + smoothing])
                .collect(),
            _ => Vec::new(),
        }
    }
}

fn linear_value(knots: &[(f64, f64)], x: f64) -> f64 {
    let n = knots.len();
    if x <= knots[0].0 {
        return knots[0].1;
    }
    if x >= knots[n - 1].0 {
        return knots[n - 1].1;
    }
    let i = knots.partition_point(|k| k.0 <= x) - 1;
    let (x0, y0) = knots[i];
    let (x1, y1) = knots[i + 1];
    y0 + (y1 - y0) * (x - x0) / (x1 - x0)
}

fn linear_slope(knots: &[(f64, f64)], x: f64) -> f64 {
    let n = knots.len();
    if x <= knots[0].0 || x >= knots[n - 1].0 {
        return 0.0;
    }
    let i = knots.partition_point(|k| k.0 <= x) - 1;
    (knots[i + 1].1 - knots[i].1) / (knots[i + 1].0 - knots[i].0)
}

/// `∫_{x₀}^{x} L`, with `L` extended by constants outside the knot range.
fn linear_antiderivative(knots: &[(f64, f64)], x: f64) -> f64 {
    let (x0, y0) = knots[0];
    if x <= x0 {
        return y0 * (x - x0);
    }
    let mut acc = 0.0;
    for w in knots.windows(2) {
        let ((xa, ya), (xb, yb)) = (w[0], w[1]);
        if x <= xb {
            let yx = ya + (yb - ya) * (x - xa) / (xb - xa);
            return acc + 0.5 * (ya + yx) * (x - xa);
        }
        acc += 0.5 * (ya + yb) * (xb - xa);
    }
    let (xn, yn) = knots[knots.len() - 1];
    acc + yn * (x - xn)
}

/// Interval of the domain on which `S′` keeps one sign (`0` for flat).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonotoneSegment {
    pub left: f64,
    pub right: f64,
    pub sign: i8,
}

/// Entropy profile on a finite Lagrangian domain with weight `m = exp(rate·S)`.
#[derive(Debug, Clone)]
pub struct EntropyProfile {
    pub shape: ProfileShape,
    pub rate: f64,
    pub domain: (f64, f64),
    segments: Vec<MonotoneSegment>,
    total_variation: f64,
    s_range: (f64, f64),
}

const SEGMENT_SAMPLES: usize = 4096;

impl EntropyProfile {
    pub fn new(shape: ProfileShape, rate: f64, domain: (f64, f64)) -> Result<Self, EosError> {
        if !(domain.1 > domain.0) {
            return Err(EosError::InvalidBox(format!(
                "profile domain [{}, {}] is empty",
                domain.0, domain.1
            )));
        }
        if !(rate > 0.0) {
            return Err(EosError::InvalidParameter {
                owner: "profile".into(),
                key: "weight_rate".into(),
                reason: format!("must be positive, got {rate}"),
            });
        }
        let mut profile = Self {
            shape,
            rate,
            domain,
            segments: Vec::new(),
            total_variation: 0.0,
            s_range: (0.0, 0.0),
        };
        profile.segments = profile.find_segments(SEGMENT_SAMPLES);
        profile.total_variation = profile.variation_by_quadrature(QuadTolerance::default());
        let ends: Vec<f64> = profile
            .segments
            .iter()
            .flat_map(|s| [s.left, s.right])
            .map(|x| profile.s(x))
            .collect();
        profile.s_range = (
            ends.iter().copied().fold(f64::INFINITY, f64::min),
            ends.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        );
        Ok(profile)
    }

    pub fn constant(value: f64, rate: f64, domain: (f64, f64)) -> Self {
        Self::new(ProfileShape::Constant { value }, rate, domain).expect("valid constant profile")
    }

    pub fn s(&self, x: f64) -> f64 {
        self.shape.eval(x).0
    }

    pub fn s_prime(&self, x: f64) -> f64 {
        self.shape.eval(x).1
    }

    /// `(S, S′, S″)` at `x`.
    pub fn jet(&self, x: f64) -> (f64, f64, f64) {
        self.shape.eval(x)
    }

    pub fn weight(&self, x: f64) -> f64 {
        (self.rate * self.s(x)).exp()
    }

    /// `m′/m = rate·S′`.
    pub fn log_weight_slope(&self, x: f64) -> f64 {
        self.rate * self.s_prime(x)
    }

    pub fn is_isentropic(&self) -> bool {
        self.segments.iter().all(|s| s.sign == 0)
    }

    pub fn monotone_segments(&self) -> &[MonotoneSegment] {
        &self.segments
    }

    /// Total variation `V = ∫|m′/m| dx` over the domain.
    pub fn total_variation(&self) -> f64 {
        self.total_variation
    }

    /// `Σ |rate·ΔS|` over monotone segments; equals `V` for a correct decomposition.
    pub fn variation_from_segments(&self) -> f64 {
        self.segments
            .iter()
            .map(|seg| (self.rate * (self.s(seg.right) - self.s(seg.left))).abs())
            .sum()
    }

    /// `(min S, max S)` over the domain.
    pub fn entropy_range(&self) -> (f64, f64) {
        self.s_range
    }

    /// `(k_ml, k_mr)`: extreme weights over the domain.
    pub fn weight_bounds(&self) -> (f64, f64) {
        (
            (self.rate * self.s_range.0).exp(),
            (self.rate * self.s_range.1).exp(),
        )
    }

    /// Recomputes `V` by adaptive quadrature, split at segment and kink boundaries.
    pub fn variation_by_quadrature(&self, tol: QuadTolerance) -> f64 {
        let mut cuts: Vec<f64> = self
            .segments
            .iter()
            .flat_map(|s| [s.left, s.right])
            .chain(self.shape.kinks())
            .filter(|x| *x >= self.domain.0 && *x <= self.domain.1)
            .collect();
        cuts.push(self.domain.0);
        cuts.push(self.domain.1);
        cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        cuts.dedup();
        cuts.windows(2)
            .map(|w| {
                integrate(|x| (self.rate * self.s_prime(x)).abs(), w[0], w[1], tol)
                    .map(|r| r.value)
                    .unwrap_or(f64::NAN)
            })
            .sum()
    }

    fn find_segments(&self, samples: usize) -> Vec<MonotoneSegment> {
        let (a, b) = self.domain;
        let dx = (b - a) / samples as f64;
        let scale = (0..=samples)
            .map(|i| self.s_prime(a + dx * i as f64).abs())
            .fold(0.0, f64::max);
        let sign_at = |x: f64| {
            let d = self.s_prime(x);
            if d.abs() <= 1e-13 * scale || scale == 0.0 {
                0
            } else if d > 0.0 {
                1
            } else {
                -1
            }
        };
        let mut segments = Vec::new();
        let mut left = a;
        let mut current: i8 = 0;
        let mut last_x = a;
        for i in 0..=samples {
            let x = if i == samples { b } else { a + dx * i as f64 };
            let sign = sign_at(x);
            if sign != 0 {
                if current != 0 && sign != current {
                    let cut = bisect(|z| self.s_prime(z), last_x, x, 1e-14).unwrap_or(0.5 * (last_x + x));
                    segments.push(MonotoneSegment {
                        left,
                        right: cut,
                        sign: current,
                    });
                    left = cut;
                }
                current = sign;
                last_x = x;
            }
        }
        segments.push(MonotoneSegment {
            left,
            right: b,
            sign: current,
        });
        segments
    }
}
