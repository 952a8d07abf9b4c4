//! Clamped cubic splines on strictly increasing knots.
//!
//! End slopes are taken from the cubic through the first (last) four knots,
//! which makes the spline reproduce any cubic polynomial exactly.

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct CubicSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    /// Second derivatives at the knots.
    m: Vec<f64>,
}

/// Derivative at `x[0]` of the Lagrange polynomial through four points.
fn end_slope(x: [f64; 4], y: [f64; 4]) -> f64 {
    let t = x[0];
    let mut d = 0.0;
    for i in 0..4 {
        // d/dt of prod_{j != i} (t - x_j) / (x_i - x_j), evaluated at t = x[0].
        let denom: f64 = (0..4).filter(|&j| j != i).map(|j| x[i] - x[j]).product();
        let mut sum = 0.0;
        for k in (0..4).filter(|&k| k != i) {
            sum += (0..4)
                .filter(|&j| j != i && j != k)
                .map(|j| t - x[j])
                .product::<f64>();
        }
        d += y[i] * sum / denom;
    }
    d
}

impl CubicSpline {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        let n = x.len();
        if n != y.len() {
            return Err(Error::Config(
                "spline knots and values differ in length".into(),
            ));
        }
        if n < 4 {
            return Err(Error::DegenerateInput(format!(
                "cubic spline needs 4 knots, got {n}"
            )));
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::DegenerateInput(
                "spline knots must be strictly increasing".into(),
            ));
        }
        let s0 = end_slope([x[0], x[1], x[2], x[3]], [y[0], y[1], y[2], y[3]]);
        let sn = end_slope(
            [x[n - 1], x[n - 2], x[n - 3], x[n - 4]],
            [y[n - 1], y[n - 2], y[n - 3], y[n - 4]],
        );

        // Tridiagonal system for the moments, solved with the Thomas algorithm.
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let mut sub = vec![0.0; n];
        let mut diag = vec![0.0; n];
        let mut sup = vec![0.0; n];
        let mut rhs = vec![0.0; n];
        diag[0] = 2.0 * h[0];
        sup[0] = h[0];
        rhs[0] = 6.0 * ((y[1] - y[0]) / h[0] - s0);
        for i in 1..n - 1 {
            sub[i] = h[i - 1];
            diag[i] = 2.0 * (h[i - 1] + h[i]);
            sup[i] = h[i];
            rhs[i] = 6.0 * ((y[i + 1] - y[i]) / h[i] - (y[i] - y[i - 1]) / h[i - 1]);
        }
        sub[n - 1] = h[n - 2];
        diag[n - 1] = 2.0 * h[n - 2];
        rhs[n - 1] = 6.0 * (sn - (y[n - 1] - y[n - 2]) / h[n - 2]);

        for i in 1..n {
            let f = sub[i] / diag[i - 1];
            diag[i] -= f * sup[i - 1];
            rhs[i] -= f * rhs[i - 1];
        }
        let mut m = vec![0.0; n];
        m[n - 1] = rhs[n - 1] / diag[n - 1];
        for i in (0..n - 1).rev() {
            m[i] = (rhs[i] - sup[i] * m[i + 1]) / diag[i];
        }
        Ok(CubicSpline { x, y, m })
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.x[0], self.x[self.x.len() - 1])
    }

    /// Value at `t`; `t` is clamped to the knot range.
    pub fn eval(&self, t: f64) -> f64 {
        let n = self.x.len();
        let t = t.clamp(self.x[0], self.x[n - 1]);
        let i = match self.x.partition_point(|&v| v <= t) {
            0 => 0,
            k if k >= n => n - 2,
            k => k - 1,
        };
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - t) / h;
        let b = (t - self.x[i]) / h;
        a * self.y[i]
            + b * self.y[i + 1]
            + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1]) * h * h / 6.0
    }
}
