//! Characteristic paths with the Riccati ODE integrated alongside.

use serde::Serialize;

use super::field::Level;
use super::grid::{Boundary, Grid};
use super::Trajectory;
use crate::error::SolverError;
use crate::riccati::{
    self,
    ode::{advance, Advance, Direction, PathEnv, PathState},
};
use crate::thermo::Thermo;

/// Supplies `(a₀, a₁, a₂)` at a space-time point with interpolated `τ`.
pub trait CoefficientSource: Sync {
    fn coefficients(&self, t: f64, x: f64, tau: f64) -> Result<(f64, f64, f64), SolverError>;
}

/// Coefficients of the pressure law and entropy profile.
pub struct FieldCoefficients<'a> {
    pub thermo: &'a Thermo,
}

impl CoefficientSource for FieldCoefficients<'_> {
    fn coefficients(&self, _t: f64, x: f64, tau: f64) -> Result<(f64, f64, f64), SolverError> {
        let c = riccati::coefficients(self.thermo, tau, x)?;
        Ok((c.a0, c.a1, c.a2))
    }
}

/// Frozen coefficients, for exact-solution checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantCoefficients {
    pub a0: f64,
    pub a1: f64,
    pub a2: f64,
}

impl CoefficientSource for ConstantCoefficients {
    fn coefficients(&self, _t: f64, _x: f64, _tau: f64) -> Result<(f64, f64, f64), SolverError> {
        Ok((self.a0, self.a1, self.a2))
    }
}

/// Coefficients from a closure `(t, x, τ) → (a₀, a₁, a₂)`.
pub struct ClosureCoefficients<F>(pub F);

impl<F> CoefficientSource for ClosureCoefficients<F>
where
    F: Fn(f64, f64, f64) -> (f64, f64, f64) + Sync,
{
    fn coefficients(&self, t: f64, x: f64, tau: f64) -> Result<(f64, f64, f64), SolverError> {
        Ok((self.0)(t, x, tau))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PathSample {
    pub t: f64,
    pub x: f64,
    /// Riccati-integrated `y` (forward) or `q` (backward).
    pub y: f64,
    /// The same quantity read from the field differences.
    pub y_fd: f64,
    pub a0: f64,
    pub a1: f64,
    pub a2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CharacteristicPath {
    pub direction: Direction,
    pub seed: f64,
    pub samples: Vec<PathSample>,
    /// `(t, x)` where the integrated gradient diverged.
    pub blowup: Option<(f64, f64)>,
    /// The path left an outflow domain.
    pub truncated: bool,
}

enum Stop {
    Exit,
    Fail(SolverError),
}

/// A path being advanced level by level.
pub struct Tracer {
    state: PathState,
    pub path: CharacteristicPath,
}

fn gradient_field(level: &Level, dir: Direction) -> &[f64] {
    match dir {
        Direction::Forward => &level.y,
        Direction::Backward => &level.q,
    }
}

fn sample_at(
    grid: &Grid,
    level: &Level,
    dir: Direction,
    source: &dyn CoefficientSource,
    t: f64,
    x: f64,
    y: f64,
) -> Result<PathSample, SolverError> {
    let tau = grid.interpolate(&level.tau, x);
    let (a0, a1, a2) = source.coefficients(t, grid.wrap(x), tau)?;
    Ok(PathSample {
        t,
        x: grid.wrap(x),
        y,
        y_fd: grid.interpolate(gradient_field(level, dir), x),
        a0,
        a1,
        a2,
    })
}

impl Tracer {
    pub fn start(
        grid: &Grid,
        level: &Level,
        x0: f64,
        dir: Direction,
        source: &dyn CoefficientSource,
    ) -> Result<Self, SolverError> {
        if !grid.contains(x0) || !x0.is_finite() {
            return Err(SolverError::SeedOutsideDomain {
                x: x0,
                left: grid.x_left,
                right: grid.x_right,
            });
        }
        let y0 = grid.interpolate(gradient_field(level, dir), x0);
        let first = sample_at(grid, level, dir, source, level.t, x0, y0)?;
        Ok(Self {
            state: PathState::new(level.t, x0, y0),
            path: CharacteristicPath {
                direction: dir,
                seed: x0,
                samples: vec![first],
                blowup: None,
                truncated: false,
            },
        })
    }

    pub fn finished(&self) -> bool {
        self.path.blowup.is_some() || self.path.truncated
    }

    /// Advances across `[a.t, b.t]` with `c` and `τ` bilinear in `(x, t)`.
    pub fn step(&mut self, grid: &Grid, a: &Level, b: &Level, source: &dyn CoefficientSource) -> Result<(), SolverError> {
        if self.finished() {
            return Ok(());
        }
        let dir = self.path.direction;
        let span = b.t - a.t;
        let mut env = |t: f64, x: f64| -> Result<PathEnv, Stop> {
            if grid.boundary == Boundary::Outflow && !grid.contains(x) {
                return Err(Stop::Exit);
            }
            let theta = ((t - a.t) / span).clamp(0.0, 1.0);
            let lerp = |fa: &[f64], fb: &[f64]| {
                (1.0 - theta) * grid.interpolate(fa, x) + theta * grid.interpolate(fb, x)
            };
            let c = lerp(&a.c, &b.c);
            let tau = lerp(&a.tau, &b.tau);
            let (a0, a1, a2) = source.coefficients(t, grid.wrap(x), tau).map_err(Stop::Fail)?;
            Ok(PathEnv { c, a0, a1, a2 })
        };
        match advance(&self.state, span, dir, &mut env) {
            Ok(Advance::Continued(next)) => {
                if grid.boundary == Boundary::Outflow && !grid.contains(next.x) {
                    self.path.truncated = true;
                    return Ok(());
                }
                self.state = next;
                let s = sample_at(grid, b, dir, source, b.t, next.x, next.value())?;
                self.path.samples.push(s);
                Ok(())
            }
            Ok(Advance::BlewUp { t, x }) => {
                self.path.blowup = Some((t, grid.wrap(x)));
                Ok(())
            }
            Err(Stop::Exit) => {
                self.path.truncated = true;
                Ok(())
            }
            Err(Stop::Fail(e)) => Err(e),
        }
    }
}

/// Traces one characteristic through every stored level.
pub fn trace_characteristic(
    trajectory: &Trajectory,
    source: &dyn CoefficientSource,
    x0: f64,
    dir: Direction,
) -> Result<CharacteristicPath, SolverError> {
    let grid = &trajectory.grid;
    let levels = &trajectory.levels;
    let first = levels
        .first()
        .ok_or_else(|| SolverError::InitialData("empty trajectory".into()))?;
    let mut tracer = Tracer::start(grid, first, x0, dir, source)?;
    for pair in levels.windows(2) {
        tracer.step(grid, &pair[0], &pair[1], source)?;
        if tracer.finished() {
            break;
        }
    }
    Ok(tracer.path)
}
