//! Natural cubic splines on strictly increasing nodes.

use crate::error::{Error, Result};

/// Interpolating cubic with vanishing second derivative at both ends.
#[derive(Debug, Clone, PartialEq)]
pub struct CubicSpline {
    xs: Vec<f64>,
    ys: Vec<f64>,
    m: Vec<f64>,
}

impl CubicSpline {
    pub fn natural(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() || xs.len() < 2 {
            return Err(Error::domain("CubicSpline", "need at least two nodes with matching values"));
        }
        if xs.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::domain("CubicSpline", "nodes must be strictly increasing"));
        }
        if ys.iter().chain(&xs).any(|v| !v.is_finite()) {
            return Err(Error::domain("CubicSpline", "non-finite data"));
        }
        let n = xs.len();
        let mut m = vec![0.0; n];
        if n > 2 {
            // tridiagonal solve for interior second derivatives
            let k = n - 2;
            let mut diag = vec![0.0; k];
            let mut rhs = vec![0.0; k];
            let mut upper = vec![0.0; k];
            for i in 0..k {
                let h0 = xs[i + 1] - xs[i];
                let h1 = xs[i + 2] - xs[i + 1];
                diag[i] = 2.0 * (h0 + h1);
                upper[i] = h1;
                rhs[i] = 6.0 * ((ys[i + 2] - ys[i + 1]) / h1 - (ys[i + 1] - ys[i]) / h0);
            }
            for i in 1..k {
                let lower = xs[i + 1] - xs[i];
                let w = lower / diag[i - 1];
                diag[i] -= w * upper[i - 1];
                rhs[i] -= w * rhs[i - 1];
            }
            m[k] = rhs[k - 1] / diag[k - 1];
            for i in (0..k - 1).rev() {
                m[i + 1] = (rhs[i] - upper[i] * m[i + 2]) / diag[i];
            }
        }
        Ok(Self { xs, ys, m })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.xs
    }

    pub fn values(&self) -> &[f64] {
        &self.ys
    }

    fn segment(&self, x: f64) -> usize {
        let i = self.xs.partition_point(|&v| v <= x);
        i.clamp(1, self.xs.len() - 1) - 1
    }

    /// Value at `x`; outside the nodes the end cubics are extended.
    pub fn eval(&self, x: f64) -> f64 {
        let i = self.segment(x);
        let h = self.xs[i + 1] - self.xs[i];
        let a = (self.xs[i + 1] - x) / h;
        let b = (x - self.xs[i]) / h;
        a * self.ys[i]
            + b * self.ys[i + 1]
            + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1]) * h * h / 6.0
    }

    /// First derivative at `x`.
    pub fn derivative(&self, x: f64) -> f64 {
        let i = self.segment(x);
        let h = self.xs[i + 1] - self.xs[i];
        let a = (self.xs[i + 1] - x) / h;
        let b = (x - self.xs[i]) / h;
        (self.ys[i + 1] - self.ys[i]) / h
            + ((1.0 - 3.0 * a * a) * self.m[i] + (3.0 * b * b - 1.0) * self.m[i + 1]) * h / 6.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_linear_data_exactly() {
        let xs: Vec<f64> = (0..7).map(|i| i as f64 * 0.7).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x - 1.0).collect();
        let s = CubicSpline::natural(xs, ys).unwrap();
        for i in 0..40 {
            let x = -0.5 + 0.13 * i as f64;
            assert!((s.eval(x) - (3.0 * x - 1.0)).abs() < 1e-12);
            assert!((s.derivative(x) - 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn interior_accuracy_is_fourth_order() {
        let err = |m: usize| {
            let xs: Vec<f64> = (0..m).map(|i| i as f64 / (m - 1) as f64 * 3.0).collect();
            let ys: Vec<f64> = xs.iter().map(|x| x.sin()).collect();
            let s = CubicSpline::natural(xs, ys).unwrap();
            (0..200).map(|i| 1.0 + i as f64 / 200.0).map(|x| (s.eval(x) - x.sin()).abs()).fold(0.0, f64::max)
        };
        let (e1, e2) = (err(41), err(81));
        assert!(e2 < e1 / 10.0, "{e1} {e2}");
    }

    #[test]
    fn rejects_bad_nodes() {
        assert!(CubicSpline::natural(vec![0.0], vec![1.0]).is_err());
        assert!(CubicSpline::natural(vec![0.0, 0.0], vec![1.0, 2.0]).is_err());
        assert!(CubicSpline::natural(vec![0.0, 1.0], vec![1.0]).is_err());
    }
}
