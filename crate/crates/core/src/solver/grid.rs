use serde::{Deserialize, Serialize};

use crate::error::SolverError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Boundary {
    Periodic,
    Outflow,
}

/// Uniform cell-centred grid on `[x_left, x_right]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub x_left: f64,
    pub x_right: f64,
    pub n_cells: usize,
    pub boundary: Boundary,
}

pub const MIN_CELLS: usize = 16;

impl Grid {
    pub fn new(x_left: f64, x_right: f64, n_cells: usize, boundary: Boundary) -> Result<Self, SolverError> {
        if n_cells < MIN_CELLS {
            return Err(SolverError::InvalidGrid(format!(
                "need at least {MIN_CELLS} cells, got {n_cells}"
            )));
        }
        if !(x_right > x_left) || !x_left.is_finite() || !x_right.is_finite() {
            return Err(SolverError::InvalidGrid(format!(
                "domain [{x_left}, {x_right}] is empty"
            )));
        }
        Ok(Self {
            x_left,
            x_right,
            n_cells,
            boundary,
        })
    }

    pub fn dx(&self) -> f64 {
        (self.x_right - self.x_left) / self.n_cells as f64
    }

    pub fn length(&self) -> f64 {
        self.x_right - self.x_left
    }

    pub fn center(&self, i: usize) -> f64 {
        self.x_left + (i as f64 + 0.5) * self.dx()
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.n_cells).map(|i| self.center(i)).collect()
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.x_left && x <= self.x_right
    }

    /// Maps `x` into the domain for periodic grids.
    pub fn wrap(&self, x: f64) -> f64 {
        match self.boundary {
            Boundary::Periodic => self.x_left + (x - self.x_left).rem_euclid(self.length()),
            Boundary::Outflow => x,
        }
    }

    /// Linear-interpolation stencil `(i, j, θ)` between cell centres `i` and `j`.
    /// Outflow grids clamp to the edge cells.
    pub fn stencil(&self, x: f64) -> (usize, usize, f64) {
        let n = self.n_cells;
        let x = self.wrap(x);
        let s = (x - self.x_left) / self.dx() - 0.5;
        match self.boundary {
            Boundary::Periodic => {
                let f = s.floor();
                let theta = s - f;
                let i = (f as i64).rem_euclid(n as i64) as usize;
                (i, (i + 1) % n, theta)
            }
            Boundary::Outflow => {
                if s <= 0.0 {
                    (0, 0, 0.0)
                } else if s >= (n - 1) as f64 {
                    (n - 1, n - 1, 0.0)
                } else {
                    let i = s.floor() as usize;
                    (i, i + 1, s - i as f64)
                }
            }
        }
    }

    pub fn interpolate(&self, values: &[f64], x: f64) -> f64 {
        let (i, j, theta) = self.stencil(x);
        (1.0 - theta) * values[i] + theta * values[j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_small_grids() {
        assert!(Grid::new(0.0, 1.0, 8, Boundary::Periodic).is_err());
        assert!(Grid::new(1.0, 1.0, 32, Boundary::Periodic).is_err());
    }

    #[test]
    fn periodic_interpolation_wraps() {
        let g = Grid::new(0.0, 1.0, 16, Boundary::Periodic).unwrap();
        let v: Vec<f64> = (0..16).map(|i| i as f64).collect();
        // halfway between the last and first centre
        assert!((g.interpolate(&v, 1.0) - 7.5).abs() < 1e-12);
        assert!((g.interpolate(&v, g.center(3)) - 3.0).abs() < 1e-12);
        assert!((g.interpolate(&v, g.center(3) + 2.0) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn outflow_clamps() {
        let g = Grid::new(0.0, 1.0, 16, Boundary::Outflow).unwrap();
        let v: Vec<f64> = (0..16).map(|i| i as f64).collect();
        assert_eq!(g.interpolate(&v, 0.0), 0.0);
        assert_eq!(g.interpolate(&v, 1.0), 15.0);
    }
}
