/// Shape-preserving piecewise cubic Hermite interpolant (Fritsch–Carlson slopes).
#[derive(Debug, Clone)]
pub struct Pchip {
    knots: Vec<f64>,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl Pchip {
    /// `knots` must be strictly increasing with at least two entries.
    pub fn new(knots: Vec<f64>, values: Vec<f64>) -> Self {
        assert!(knots.len() >= 2 && knots.len() == values.len());
        let n = knots.len();
        let secants: Vec<f64> = (0..n - 1)
            .map(|i| (values[i + 1] - values[i]) / (knots[i + 1] - knots[i]))
            .collect();
        let mut slopes = vec![0.0; n];
        slopes[0] = secants[0];
        slopes[n - 1] = secants[n - 2];
        for i in 1..n - 1 {
            let (d0, d1) = (secants[i - 1], secants[i]);
            if d0 * d1 <= 0.0 {
                slopes[i] = 0.0;
            } else {
                let h0 = knots[i] - knots[i - 1];
                let h1 = knots[i + 1] - knots[i];
                let w1 = 2.0 * h1 + h0;
                let w2 = h1 + 2.0 * h0;
                slopes[i] = (w1 + w2) / (w1 / d0 + w2 / d1);
            }
        }
        Self { knots, values, slopes }
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.knots[0], *self.knots.last().unwrap())
    }

    /// Evaluates the interpolant; clamps to the end values outside the knot range.
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.knots.len();
        if x <= self.knots[0] {
            return self.values[0];
        }
        if x >= self.knots[n - 1] {
            return self.values[n - 1];
        }
        let i = match self
            .knots
            .binary_search_by(|k| k.partial_cmp(&x).unwrap())
        {
            Ok(i) => return self.values[i],
            Err(i) => i - 1,
        };
        let h = self.knots[i + 1] - self.knots[i];
        let t = (x - self.knots[i]) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.values[i]
            + h10 * h * self.slopes[i]
            + h01 * self.values[i + 1]
            + h11 * h * self.slopes[i + 1]
    }
}

/// Linear interpolation weights for `x` on a uniform grid `x0 + i·dx`, `i ∈ [0, n)`.
///
/// Returns `(i, θ)` with `x ≈ (1-θ)·x_i + θ·x_{i+1}`, clamped to the grid.
pub fn uniform_bracket(x: f64, x0: f64, dx: f64, n: usize) -> (usize, f64) {
    debug_assert!(n >= 2);
    let s = (x - x0) / dx;
    if s <= 0.0 {
        return (0, 0.0);
    }
    let max = (n - 1) as f64;
    if s >= max {
        return (n - 2, 1.0);
    }
    let i = s.floor() as usize;
    (i, s - i as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn reproduces_knots_and_cubic_accuracy() {
        let xs: Vec<f64> = (0..41).map(|i| i as f64 * 0.05).collect();
        let ys: Vec<f64> = xs.iter().map(|x| (-x).exp()).collect();
        let p = Pchip::new(xs, ys);
        assert_eq!(p.eval(0.5), (-0.5f64).exp());
        assert!((p.eval(0.525) - (-0.525f64).exp()).abs() < 1e-5);
    }

    proptest! {
        #[test]
        fn monotone_data_gives_monotone_interpolant(
            steps in prop::collection::vec(0.0f64..1.0, 3..12),
            a in 0.0f64..1.0,
            b in 0.0f64..1.0,
        ) {
            let knots: Vec<f64> = (0..steps.len()).map(|i| i as f64).collect();
            let mut acc = 0.0;
            let values: Vec<f64> = steps.iter().map(|s| { acc += s; acc }).collect();
            let p = Pchip::new(knots, values);
            let n = (steps.len() - 1) as f64;
            let (x0, x1) = if a < b { (a * n, b * n) } else { (b * n, a * n) };
            prop_assert!(p.eval(x0) <= p.eval(x1) + 1e-12);
        }
    }
}
