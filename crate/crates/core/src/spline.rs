//! Natural cubic spline through tabulated samples.

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct CubicSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    // second derivatives at the knots
    m: Vec<f64>,
}

impl CubicSpline {
    /// Builds the natural spline (zero second derivative at both ends).
    /// Knots must be finite and strictly increasing; at least four are required.
    pub fn natural(x: &[f64], y: &[f64]) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::DimensionMismatch(format!("{} knots but {} values", x.len(), y.len())));
        }
        let n = x.len();
        if n < 4 {
            return Err(Error::InvalidInput(format!("a spline needs at least 4 knots, got {n}")));
        }
        if x.iter().chain(y).any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("spline samples must be finite".into()));
        }
        if x.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput("spline knots must be strictly increasing".into()));
        }
        // Tridiagonal solve for the interior second derivatives.
        let mut m = vec![0.0; n];
        let mut diag = vec![0.0; n];
        let mut rhs = vec![0.0; n];
        let mut upper = vec![0.0; n];
        for i in 1..n - 1 {
            let h0 = x[i] - x[i - 1];
            let h1 = x[i + 1] - x[i];
            diag[i] = 2.0 * (h0 + h1);
            upper[i] = h1;
            rhs[i] = 6.0 * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0);
        }
        for i in 2..n - 1 {
            let lower = x[i] - x[i - 1];
            let w = lower / diag[i - 1];
            diag[i] -= w * upper[i - 1];
            rhs[i] -= w * rhs[i - 1];
        }
        for i in (1..n - 1).rev() {
            m[i] = (rhs[i] - upper[i] * m[i + 1]) / diag[i];
        }
        Ok(Self { x: x.to_vec(), y: y.to_vec(), m })
    }

    pub fn lo(&self) -> f64 {
        self.x[0]
    }

    pub fn hi(&self) -> f64 {
        self.x[self.x.len() - 1]
    }

    fn segment(&self, t: f64) -> usize {
        let k = self.x.partition_point(|&v| v <= t);
        k.clamp(1, self.x.len() - 1) - 1
    }

    /// Value, first and second derivative at `t`. Outside the knot range the
    /// end cubic is extended.
    pub fn eval_all(&self, t: f64) -> (f64, f64, f64) {
        let i = self.segment(t);
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - t) / h;
        let b = (t - self.x[i]) / h;
        let (m0, m1) = (self.m[i], self.m[i + 1]);
        let (y0, y1) = (self.y[i], self.y[i + 1]);
        let value = a * y0 + b * y1 + ((a * a * a - a) * m0 + (b * b * b - b) * m1) * h * h / 6.0;
        let d1 = (y1 - y0) / h - (3.0 * a * a - 1.0) * h * m0 / 6.0 + (3.0 * b * b - 1.0) * h * m1 / 6.0;
        let d2 = a * m0 + b * m1;
        (value, d1, d2)
    }

    pub fn value(&self, t: f64) -> f64 {
        self.eval_all(t).0
    }

    pub fn deriv(&self, t: f64) -> f64 {
        self.eval_all(t).1
    }

    pub fn second_deriv(&self, t: f64) -> f64 {
        self.eval_all(t).2
    }
}
