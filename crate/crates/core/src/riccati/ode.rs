//! Classical RK4 for a characteristic `dx/dt = ±c` coupled to the Riccati
//! equation of its gradient variable.
//!
//! Forward: `y′ = a₀ + a₁y − a₂y²`; backward: `q′ = a₀ − a₁q − a₂q²`. Once `|y|`
//! is large the state switches to `w = 1/y`, which obeys
//! `w′ = a₂ − (±a₁)w − a₀w²` and passes through zero at blow-up.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    Forward,
    Backward,
}

impl Direction {
    pub fn sign(self) -> f64 {
        match self {
            Direction::Forward => 1.0,
            Direction::Backward => -1.0,
        }
    }
}

/// Local sound speed and Riccati coefficients seen by a path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathEnv {
    pub c: f64,
    pub a0: f64,
    pub a1: f64,
    pub a2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathState {
    pub t: f64,
    pub x: f64,
    /// `y` (or `q`), or its reciprocal when `inverse`.
    pub v: f64,
    pub inverse: bool,
}

impl PathState {
    pub fn new(t: f64, x: f64, y: f64) -> Self {
        Self {
            t,
            x,
            v: y,
            inverse: false,
        }
    }

    /// The gradient variable; infinite at the blow-up instant.
    pub fn value(&self) -> f64 {
        if self.inverse {
            1.0 / self.v
        } else {
            self.v
        }
    }
}

/// Magnitude of `y` at which the integration switches to `w = 1/y`.
pub const Y_SWITCH: f64 = 1.0;

fn derivative(dir: Direction, inverse: bool, v: f64, e: &PathEnv) -> (f64, f64) {
    let a1 = dir.sign() * e.a1;
    let dv = if inverse {
        e.a2 - a1 * v - e.a0 * v * v
    } else {
        e.a0 + a1 * v - e.a2 * v * v
    };
    (dir.sign() * e.c, dv)
}

/// One RK4 step of size `dt` from `s`. `env(t, x)` supplies the local coefficients.
pub fn rk4_step<E, F>(s: &PathState, dt: f64, dir: Direction, env: &mut F) -> Result<PathState, E>
where
    F: FnMut(f64, f64) -> Result<PathEnv, E>,
{
    let (k1x, k1v) = derivative(dir, s.inverse, s.v, &env(s.t, s.x)?);
    let h = 0.5 * dt;
    let (k2x, k2v) = derivative(dir, s.inverse, s.v + h * k1v, &env(s.t + h, s.x + h * k1x)?);
    let (k3x, k3v) = derivative(dir, s.inverse, s.v + h * k2v, &env(s.t + h, s.x + h * k2x)?);
    let (k4x, k4v) = derivative(dir, s.inverse, s.v + dt * k3v, &env(s.t + dt, s.x + dt * k3x)?);
    Ok(PathState {
        t: s.t + dt,
        x: s.x + dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x),
        v: s.v + dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v),
        inverse: s.inverse,
    })
}

/// Result of advancing a path across one interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Advance {
    Continued(PathState),
    /// `w` reached zero at `t` (position `x`).
    BlewUp { t: f64, x: f64 },
}

/// Switches representation if needed, then advances by `dt`, locating a zero
/// of `w` inside the step by bisection over partial RK4 steps.
pub fn advance<E, F>(s: &PathState, dt: f64, dir: Direction, env: &mut F) -> Result<Advance, E>
where
    F: FnMut(f64, f64) -> Result<PathEnv, E>,
{
    let mut start = *s;
    if !start.inverse && start.v.abs() > Y_SWITCH {
        start.v = 1.0 / start.v;
        start.inverse = true;
    } else if start.inverse && start.v.abs() > 2.0 / Y_SWITCH {
        start.v = 1.0 / start.v;
        start.inverse = false;
    }
    let next = rk4_step(&start, dt, dir, env)?;
    let crossed = start.inverse && start.v < 0.0 && next.v >= 0.0;
    if !crossed {
        return Ok(Advance::Continued(next));
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    let mut x_hi = next.x;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        let part = rk4_step(&start, mid * dt, dir, env)?;
        if part.v >= 0.0 {
            hi = mid;
            x_hi = part.x;
        } else {
            lo = mid;
        }
        if hi - lo < 1e-13 {
            break;
        }
    }
    Ok(Advance::BlewUp {
        t: start.t + hi * dt,
        x: x_hi,
    })
}

/// Integrates a Riccati equation with time-dependent coefficients `coef(t) = (a₀, a₁, a₂)`
/// on a fixed step until `t_end` or blow-up.
pub fn integrate_riccati<F>(mut coef: F, y0: f64, dt: f64, t_end: f64, dir: Direction) -> RiccatiSolution
where
    F: FnMut(f64) -> (f64, f64, f64),
{
    let mut env = |t: f64, _x: f64| -> Result<PathEnv, std::convert::Infallible> {
        let (a0, a1, a2) = coef(t);
        Ok(PathEnv { c: 0.0, a0, a1, a2 })
    };
    let mut s = PathState::new(0.0, 0.0, y0);
    let mut times = vec![0.0];
    let mut values = vec![y0];
    while s.t < t_end {
        let h = dt.min(t_end - s.t);
        match advance(&s, h, dir, &mut env) {
            Ok(Advance::Continued(n)) => {
                s = n;
                times.push(s.t);
                values.push(s.value());
            }
            Ok(Advance::BlewUp { t, .. }) => {
                return RiccatiSolution {
                    times,
                    values,
                    blowup_time: Some(t),
                }
            }
            Err(e) => match e {},
        }
    }
    RiccatiSolution {
        times,
        values,
        blowup_time: None,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RiccatiSolution {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub blowup_time: Option<f64>,
}
