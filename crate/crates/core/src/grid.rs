//! Radial evaluation grids.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How a [`Grid`] was produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    LogUniform { r_min: f64, r_max: f64, m: usize },
    Explicit,
}

/// Strictly increasing positive radii.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    radii: Vec<f64>,
    spacing: Spacing,
}

impl Grid {
    pub fn log_uniform(r_min: f64, r_max: f64, m: usize) -> Result<Self> {
        if !(r_min > 0.0 && r_max > r_min && r_max.is_finite()) || m < 2 {
            return Err(Error::domain("Grid::log_uniform", format!("need 0 < r_min < r_max and m >= 2, got ({r_min}, {r_max}, {m})")));
        }
        let step = (r_max / r_min).ln() / (m - 1) as f64;
        let mut radii: Vec<f64> = (0..m).map(|i| r_min * (step * i as f64).exp()).collect();
        radii[0] = r_min;
        radii[m - 1] = r_max;
        Ok(Self { radii, spacing: Spacing::LogUniform { r_min, r_max, m } })
    }

    pub fn explicit(radii: Vec<f64>) -> Result<Self> {
        if radii.is_empty() {
            return Err(Error::domain("Grid::explicit", "empty grid"));
        }
        if radii.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return Err(Error::domain("Grid::explicit", "radii must be positive and finite"));
        }
        if radii.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::domain("Grid::explicit", "radii must be strictly increasing"));
        }
        Ok(Self { radii, spacing: Spacing::Explicit })
    }

    /// `m` equally spaced points on `[a, b]`, `a > 0`.
    pub fn linear(a: f64, b: f64, m: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::domain("Grid::linear", "need at least two points"));
        }
        Self::explicit((0..m).map(|i| a + (b - a) * i as f64 / (m - 1) as f64).collect())
    }

    /// Log-uniform grid on `[r_min, r_max]` with `m` points below `r_mid` and
    /// uniform spacing (matched at `r_mid`) above it.
    pub fn hybrid(r_min: f64, r_mid: f64, r_max: f64, m: usize) -> Result<Self> {
        let log = Self::log_uniform(r_min, r_mid, m)?;
        let h = r_mid - log.radii[m - 2];
        let mut radii = log.radii;
        let mut r = r_mid + h;
        while r < r_max {
            radii.push(r);
            r += h;
        }
        if *radii.last().expect("nonempty") < r_max {
            radii.push(r_max);
        }
        Self::explicit(radii)
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn spacing(&self) -> &Spacing {
        &self.spacing
    }

    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }

    pub fn r_min(&self) -> f64 {
        self.radii[0]
    }

    pub fn r_max(&self) -> f64 {
        self.radii[self.radii.len() - 1]
    }

    /// Every radius multiplied by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Self {
        let radii: Vec<f64> = self.radii.iter().map(|r| r * factor).collect();
        let spacing = match self.spacing {
            Spacing::LogUniform { r_min, r_max, m } => Spacing::LogUniform { r_min: r_min * factor, r_max: r_max * factor, m },
            Spacing::Explicit => Spacing::Explicit,
        };
        Self { radii, spacing }
    }

    /// Grid with `2m - 1` points: the old nodes plus geometric midpoints.
    pub fn refined(&self) -> Self {
        let mut radii = Vec::with_capacity(2 * self.radii.len());
        for w in self.radii.windows(2) {
            radii.push(w[0]);
            radii.push((w[0] * w[1]).sqrt());
        }
        radii.push(self.r_max());
        let spacing = match self.spacing {
            Spacing::LogUniform { r_min, r_max, m } => Spacing::LogUniform { r_min, r_max, m: 2 * m - 1 },
            Spacing::Explicit => Spacing::Explicit,
        };
        Self { radii, spacing }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_uniform_endpoints_and_ratio() {
        let g = Grid::log_uniform(0.01, 100.0, 5).unwrap();
        assert_eq!(g.r_min(), 0.01);
        assert_eq!(g.r_max(), 100.0);
        for w in g.radii().windows(2) {
            assert!((w[1] / w[0] - 10.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(Grid::log_uniform(0.0, 1.0, 4).is_err());
        assert!(Grid::log_uniform(1.0, 1.0, 4).is_err());
        assert!(Grid::explicit(vec![1.0, 1.0]).is_err());
        assert!(Grid::explicit(vec![-1.0, 1.0]).is_err());
        assert!(Grid::explicit(vec![]).is_err());
    }

    #[test]
    fn hybrid_is_increasing_and_reaches_end() {
        let g = Grid::hybrid(1e-3, 1.0, 10.0, 40).unwrap();
        assert_eq!(g.r_max(), 10.0);
        assert!(g.radii().windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn refinement_keeps_nodes() {
        let g = Grid::log_uniform(0.1, 10.0, 5).unwrap();
        let f = g.refined();
        assert_eq!(f.len(), 9);
        for (i, r) in g.radii().iter().enumerate() {
            assert_eq!(f.radii()[2 * i], *r);
        }
    }
}
