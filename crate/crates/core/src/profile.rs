//! Radial profiles `u(x) = u₀(|x|)` on ℝⁿ.
//!
//! Analytic families carry an amplitude so that dilation `u ↦ u(λ·)` and
//! scaling stay inside the family. Sampled profiles interpolate with a
//! natural cubic spline in `ln r` (of `ln |u|` when every sample is positive,
//! of `u` otherwise), continue by the first value below the grid and by a
//! declared power tail above it.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::interp::CubicSpline;

/// Closed-form profile families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum Family {
    /// `e^{-r²/(2σ²)}`.
    Gaussian { sigma: f64 },
    /// `exp(1 - 1/(1 - x²))` with `x = (r - center)/width`, zero for `|x| ≥ 1`.
    SmoothBump { center: f64, width: f64 },
    /// `r^a` for `r ≤ R`, smoothly switched off on `[R, 2R]`.
    PowerCutoff { exponent: f64, cutoff: f64 },
    /// Indicator of `r₁ ≤ r ≤ r₂`.
    AnnulusIndicator { inner: f64, outer: f64 },
    /// The constant 1 (not decaying; only for means and mass checks).
    Constant,
}

impl Family {
    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::domain("RadialProfile", m));
        match *self {
            Family::Gaussian { sigma } if !(sigma > 0.0 && sigma.is_finite()) => bad(format!("sigma {sigma} must be positive")),
            Family::SmoothBump { center, width } => {
                if !(width > 0.0 && width.is_finite() && center >= 0.0 && center.is_finite()) {
                    bad(format!("bump ({center}, {width}) needs center >= 0, width > 0"))
                } else if center != 0.0 && center < width {
                    bad(format!("bump ({center}, {width}) would have a kink at the origin; use center 0 or center >= width"))
                } else {
                    Ok(())
                }
            }
            Family::PowerCutoff { exponent, cutoff } if !(exponent.is_finite() && cutoff > 0.0 && cutoff.is_finite()) => {
                bad(format!("power cutoff ({exponent}, {cutoff}) needs a finite exponent and positive radius"))
            }
            Family::AnnulusIndicator { inner, outer } if !(inner >= 0.0 && outer > inner && outer.is_finite()) => {
                bad(format!("annulus ({inner}, {outer}) needs 0 <= inner < outer"))
            }
            _ => Ok(()),
        }
    }

    fn dilated(&self, lambda: f64) -> (Family, f64) {
        match *self {
            Family::Gaussian { sigma } => (Family::Gaussian { sigma: sigma / lambda }, 1.0),
            Family::SmoothBump { center, width } => (Family::SmoothBump { center: center / lambda, width: width / lambda }, 1.0),
            Family::PowerCutoff { exponent, cutoff } => (Family::PowerCutoff { exponent, cutoff: cutoff / lambda }, lambda.powf(exponent)),
            Family::AnnulusIndicator { inner, outer } => (Family::AnnulusIndicator { inner: inner / lambda, outer: outer / lambda }, 1.0),
            Family::Constant => (Family::Constant, 1.0),
        }
    }

    fn value(&self, r: f64) -> f64 {
        match *self {
            Family::Gaussian { sigma } => (-0.5 * (r / sigma) * (r / sigma)).exp(),
            Family::SmoothBump { center, width } => {
                let x = (r - center) / width;
                if x.abs() >= 1.0 {
                    0.0
                } else {
                    (1.0 - 1.0 / (1.0 - x * x)).exp()
                }
            }
            Family::PowerCutoff { exponent, cutoff } => {
                let c = switch_off(r / cutoff);
                if c == 0.0 {
                    0.0
                } else {
                    r.powf(exponent) * c
                }
            }
            Family::AnnulusIndicator { inner, outer } => {
                if r >= inner && r <= outer {
                    1.0
                } else {
                    0.0
                }
            }
            Family::Constant => 1.0,
        }
    }

    fn derivative(&self, r: f64) -> f64 {
        match *self {
            Family::Gaussian { sigma } => -r / (sigma * sigma) * self.value(r),
            Family::SmoothBump { center, width } => {
                let x = (r - center) / width;
                if x.abs() >= 1.0 {
                    0.0
                } else {
                    let d = 1.0 - x * x;
                    -2.0 * x / (d * d) / width * self.value(r)
                }
            }
            Family::PowerCutoff { exponent, cutoff } => {
                let t = r / cutoff;
                let c = switch_off(t);
                if c == 0.0 {
                    0.0
                } else {
                    exponent * r.powf(exponent - 1.0) * c + r.powf(exponent) * switch_off_derivative(t) / cutoff
                }
            }
            Family::AnnulusIndicator { .. } | Family::Constant => 0.0,
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        let mut b = match *self {
            Family::SmoothBump { center, width } => vec![center - width, center + width],
            Family::PowerCutoff { cutoff, .. } => vec![cutoff, 2.0 * cutoff],
            Family::AnnulusIndicator { inner, outer } => vec![inner, outer],
            _ => vec![],
        };
        b.retain(|&x| x > 0.0);
        b
    }

    fn support_radius(&self) -> Option<f64> {
        match *self {
            // e^{-x²/2} < 1e-300 beyond x = 37.2
            Family::Gaussian { sigma } => Some(37.2 * sigma),
            Family::SmoothBump { center, width } => Some(center + width),
            Family::PowerCutoff { cutoff, .. } => Some(2.0 * cutoff),
            Family::AnnulusIndicator { outer, .. } => Some(outer),
            Family::Constant => None,
        }
    }

    fn is_smooth(&self) -> bool {
        match *self {
            Family::Gaussian { .. } | Family::SmoothBump { .. } | Family::Constant => true,
            Family::PowerCutoff { exponent, .. } => exponent >= 0.0 && exponent.fract() == 0.0 && (exponent as i64) % 2 == 0,
            Family::AnnulusIndicator { .. } => false,
        }
    }
}

// Smooth step: 1 for t ≤ 1, 0 for t ≥ 2.
fn switch_off(t: f64) -> f64 {
    if t <= 1.0 {
        1.0
    } else if t >= 2.0 {
        0.0
    } else {
        let x = 2.0 - t;
        let a = (-1.0 / x).exp();
        let b = (-1.0 / (1.0 - x)).exp();
        a / (a + b)
    }
}

fn switch_off_derivative(t: f64) -> f64 {
    if t <= 1.0 || t >= 2.0 {
        return 0.0;
    }
    let x = 2.0 - t;
    let a = (-1.0 / x).exp();
    let b = (-1.0 / (1.0 - x)).exp();
    let da = a / (x * x);
    let db = -b / ((1.0 - x) * (1.0 - x));
    // d/dt = -d/dx
    -(da * b - a * db) / ((a + b) * (a + b))
}

#[derive(Debug, Clone, PartialEq)]
struct Samples {
    grid: Grid,
    values: Vec<f64>,
    tail_exponent: f64,
    log_values: bool,
    spline: CubicSpline,
}

/// Either a closed-form family or sampled data.
#[derive(Debug, Clone, PartialEq)]
pub enum ProfileKind {
    Analytic { family: Family, amplitude: f64 },
    Sampled(Arc<SampledData>),
}

/// Public view of sampled data.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledData {
    inner: Samples,
}

impl SampledData {
    pub fn grid(&self) -> &Grid {
        &self.inner.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.inner.values
    }

    pub fn tail_exponent(&self) -> f64 {
        self.inner.tail_exponent
    }
}

/// A radial function on ℝⁿ; immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    dim: u32,
    kind: ProfileKind,
}

impl RadialProfile {
    pub fn analytic(dim: u32, family: Family) -> Result<Self> {
        Self::analytic_scaled(dim, family, 1.0)
    }

    pub fn analytic_scaled(dim: u32, family: Family, amplitude: f64) -> Result<Self> {
        check_dim(dim)?;
        family.validate()?;
        if !amplitude.is_finite() {
            return Err(Error::domain("RadialProfile", "non-finite amplitude"));
        }
        Ok(Self { dim, kind: ProfileKind::Analytic { family, amplitude } })
    }

    pub fn gaussian(dim: u32, sigma: f64) -> Result<Self> {
        Self::analytic(dim, Family::Gaussian { sigma })
    }

    pub fn smooth_bump(dim: u32, center: f64, width: f64) -> Result<Self> {
        Self::analytic(dim, Family::SmoothBump { center, width })
    }

    pub fn power_cutoff(dim: u32, exponent: f64, cutoff: f64) -> Result<Self> {
        Self::analytic(dim, Family::PowerCutoff { exponent, cutoff })
    }

    pub fn annulus(dim: u32, inner: f64, outer: f64) -> Result<Self> {
        Self::analytic(dim, Family::AnnulusIndicator { inner, outer })
    }

    pub fn constant(dim: u32, value: f64) -> Result<Self> {
        Self::analytic_scaled(dim, Family::Constant, value)
    }

    /// The zero function.
    pub fn zero(dim: u32) -> Result<Self> {
        Self::constant(dim, 0.0)
    }

    pub fn sampled(dim: u32, grid: Grid, values: Vec<f64>, tail_exponent: f64) -> Result<Self> {
        check_dim(dim)?;
        if values.len() != grid.len() {
            return Err(Error::domain("RadialProfile::sampled", format!("{} values for {} radii", values.len(), grid.len())));
        }
        if values.iter().any(|v| !v.is_finite()) || !tail_exponent.is_finite() {
            return Err(Error::domain("RadialProfile::sampled", "values and tail exponent must be finite"));
        }
        let xs: Vec<f64> = grid.radii().iter().map(|r| r.ln()).collect();
        let log_values = values.iter().all(|&v| v > 0.0);
        let ys: Vec<f64> = if log_values { values.iter().map(|v| v.ln()).collect() } else { values.clone() };
        let spline = if xs.len() == 1 {
            CubicSpline::natural(vec![xs[0], xs[0] + 1.0], vec![ys[0], ys[0]])?
        } else {
            CubicSpline::natural(xs, ys)?
        };
        let inner = Samples { grid, values, tail_exponent, log_values, spline };
        Ok(Self { dim, kind: ProfileKind::Sampled(Arc::new(SampledData { inner })) })
    }

    /// Samples `self` on `grid`, declaring `tail_exponent` for the far field.
    pub fn resample(&self, grid: &Grid, tail_exponent: f64) -> Result<Self> {
        let values = grid.radii().iter().map(|&r| self.value(r)).collect();
        Self::sampled(self.dim, grid.clone(), values, tail_exponent)
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    pub fn kind(&self) -> &ProfileKind {
        &self.kind
    }

    /// `u₀(r)`.
    pub fn eval(&self, r: f64) -> Result<f64> {
        if !r.is_finite() || r < 0.0 {
            return Err(Error::domain("eval_profile", format!("radius {r} must be finite and nonnegative")));
        }
        Ok(self.value(r))
    }

    /// Unchecked evaluation for internal loops.
    pub(crate) fn value(&self, r: f64) -> f64 {
        match &self.kind {
            ProfileKind::Analytic { family, amplitude } => {
                if *amplitude == 0.0 {
                    0.0
                } else {
                    amplitude * family.value(r)
                }
            }
            ProfileKind::Sampled(d) => {
                let s = &d.inner;
                let radii = s.grid.radii();
                let (first, last) = (radii[0], radii[radii.len() - 1]);
                if r <= first {
                    s.values[0]
                } else if r >= last {
                    s.values[s.values.len() - 1] * (r / last).powf(s.tail_exponent)
                } else {
                    let y = s.spline.eval(r.ln());
                    if s.log_values {
                        y.exp()
                    } else {
                        y
                    }
                }
            }
        }
    }

    /// `u₀'(r)` (zero a.e. for indicators).
    pub fn derivative(&self, r: f64) -> f64 {
        match &self.kind {
            ProfileKind::Analytic { family, amplitude } => amplitude * family.derivative(r),
            ProfileKind::Sampled(d) => {
                let s = &d.inner;
                let radii = s.grid.radii();
                let (first, last) = (radii[0], radii[radii.len() - 1]);
                if r <= first {
                    0.0
                } else if r >= last {
                    s.tail_exponent * self.value(r) / r
                } else {
                    let dy = s.spline.derivative(r.ln()) / r;
                    if s.log_values {
                        dy * self.value(r)
                    } else {
                        dy
                    }
                }
            }
        }
    }

    /// `x ↦ u(λx)`.
    pub fn dilate(&self, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::domain("dilate", format!("factor {lambda} must be positive")));
        }
        match &self.kind {
            ProfileKind::Analytic { family, amplitude } => {
                let (f, a) = family.dilated(lambda);
                Self::analytic_scaled(self.dim, f, amplitude * a)
            }
            ProfileKind::Sampled(d) => {
                let s = &d.inner;
                Self::sampled(self.dim, s.grid.scaled(1.0 / lambda), s.values.clone(), s.tail_exponent)
            }
        }
    }

    /// `c·u`.
    pub fn scale(&self, c: f64) -> Result<Self> {
        match &self.kind {
            ProfileKind::Analytic { family, amplitude } => Self::analytic_scaled(self.dim, family.clone(), amplitude * c),
            ProfileKind::Sampled(d) => {
                let s = &d.inner;
                Self::sampled(self.dim, s.grid.clone(), s.values.iter().map(|v| v * c).collect(), s.tail_exponent)
            }
        }
    }

    /// `|u|`. Every closed-form family is nonnegative, so only the amplitude
    /// changes; sampled values are replaced by their moduli.
    pub fn abs(&self) -> Result<Self> {
        match &self.kind {
            ProfileKind::Analytic { family, amplitude } => Self::analytic_scaled(self.dim, family.clone(), amplitude.abs()),
            ProfileKind::Sampled(d) => {
                let s = &d.inner;
                Self::sampled(self.dim, s.grid.clone(), s.values.iter().map(|v| v.abs()).collect(), s.tail_exponent)
            }
        }
    }

    /// Same profile regarded in another dimension.
    pub fn with_dim(&self, dim: u32) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self { dim, kind: self.kind.clone() })
    }

    pub fn is_zero(&self) -> bool {
        match &self.kind {
            ProfileKind::Analytic { amplitude, .. } => *amplitude == 0.0,
            ProfileKind::Sampled(d) => d.inner.values.iter().all(|&v| v == 0.0),
        }
    }

    /// Radius beyond which the profile vanishes in double precision, if any.
    pub fn support_radius(&self) -> Option<f64> {
        match &self.kind {
            ProfileKind::Analytic { family, amplitude } => {
                if *amplitude == 0.0 {
                    Some(0.0)
                } else {
                    family.support_radius()
                }
            }
            ProfileKind::Sampled(_) => None,
        }
    }

    /// Radius beyond which `|u₀|` is below `1e-19` of its peak (the support
    /// radius for compactly supported families).
    pub fn effective_radius(&self) -> Option<f64> {
        match &self.kind {
            ProfileKind::Analytic { family: Family::Gaussian { sigma }, amplitude } if *amplitude != 0.0 => Some(9.5 * sigma),
            _ => self.support_radius(),
        }
    }

    /// `(bandwidth, length)` for profiles whose transform decays faster than
    /// any power: beyond `bandwidth` the transform is negligible (`≲ 1e-10`
    /// relative), and `length` is the spatial extent that sets its
    /// oscillation scale. `None` when the transform decays only
    /// algebraically or is unknown.
    pub fn spectral_extent(&self) -> Option<(f64, f64)> {
        match &self.kind {
            ProfileKind::Analytic { family, amplitude } => {
                if *amplitude == 0.0 {
                    return Some((1.0, 1.0));
                }
                match *family {
                    Family::Gaussian { sigma } => Some((9.0 / sigma, 3.0 * sigma)),
                    Family::SmoothBump { center, width } => Some((800.0 / width, center + width)),
                    Family::PowerCutoff { cutoff, .. } if family.is_smooth() => Some((300.0 / cutoff, 2.0 * cutoff)),
                    _ => None,
                }
            }
            ProfileKind::Sampled(_) => None,
        }
    }

    /// Characteristic length: the width of the profile's main feature.
    pub fn length_scale(&self) -> f64 {
        match &self.kind {
            ProfileKind::Analytic { family, .. } => match *family {
                Family::Gaussian { sigma } => sigma,
                Family::SmoothBump { width, .. } => width,
                Family::PowerCutoff { cutoff, .. } => cutoff,
                Family::AnnulusIndicator { inner, outer } => outer - inner,
                Family::Constant => 1.0,
            },
            ProfileKind::Sampled(d) => d.inner.grid.r_max() / 100.0,
        }
    }

    /// Radii where the profile or its derivatives jump; used to split integrals.
    pub fn breakpoints(&self) -> Vec<f64> {
        match &self.kind {
            ProfileKind::Analytic { family, .. } => family.breakpoints(),
            ProfileKind::Sampled(d) => vec![d.inner.grid.r_max()],
        }
    }

    /// Tail exponent `τ` with `u₀(r) = O(r^τ)` as `r → ∞`; `-∞` for
    /// compactly supported or Gaussian profiles.
    pub fn tail_exponent(&self) -> f64 {
        match &self.kind {
            ProfileKind::Analytic { family: Family::Constant, amplitude } if *amplitude != 0.0 => 0.0,
            ProfileKind::Analytic { .. } => f64::NEG_INFINITY,
            ProfileKind::Sampled(d) => {
                if d.inner.values[d.inner.values.len() - 1] == 0.0 {
                    f64::NEG_INFINITY
                } else {
                    d.inner.tail_exponent
                }
            }
        }
    }

    /// Exponent `κ` with `u₀(r) ~ r^κ` as `r → 0` (0 unless a power profile).
    pub fn origin_exponent(&self) -> f64 {
        match &self.kind {
            ProfileKind::Analytic { family: Family::PowerCutoff { exponent, .. }, amplitude } if *amplitude != 0.0 => *exponent,
            ProfileKind::Analytic { family: Family::AnnulusIndicator { inner, .. }, .. } if *inner > 0.0 => f64::INFINITY,
            ProfileKind::Analytic { family: Family::SmoothBump { center, .. }, .. } if *center > 0.0 => f64::INFINITY,
            _ => 0.0,
        }
    }

    /// Whether the profile is `C^∞` as a function on ℝⁿ.
    pub fn is_smooth(&self) -> bool {
        match &self.kind {
            ProfileKind::Analytic { family, .. } => family.is_smooth(),
            ProfileKind::Sampled(_) => false,
        }
    }

    /// Short human-readable descriptor, stable across runs.
    pub fn descriptor(&self) -> String {
        match &self.kind {
            ProfileKind::Analytic { family, amplitude } => {
                let body = match family {
                    Family::Gaussian { sigma } => format!("gaussian(sigma={sigma})"),
                    Family::SmoothBump { center, width } => format!("smooth_bump(center={center},width={width})"),
                    Family::PowerCutoff { exponent, cutoff } => format!("power_cutoff(a={exponent},R={cutoff})"),
                    Family::AnnulusIndicator { inner, outer } => format!("annulus({inner},{outer})"),
                    Family::Constant => "constant".to_string(),
                };
                if *amplitude == 1.0 {
                    format!("n{}:{body}", self.dim)
                } else {
                    format!("n{}:{amplitude}*{body}", self.dim)
                }
            }
            ProfileKind::Sampled(d) => {
                format!("n{}:sampled(m={},r=[{},{}],tail={})", self.dim, d.inner.grid.len(), d.inner.grid.r_min(), d.inner.grid.r_max(), d.inner.tail_exponent)
            }
        }
    }
}

fn check_dim(dim: u32) -> Result<()> {
    if dim == 0 {
        return Err(Error::domain("RadialProfile", "dimension must be at least 1"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn contract_examples() {
        let g = RadialProfile::gaussian(3, 1.0).unwrap();
        assert_eq!(g.eval(0.0).unwrap(), 1.0);
        let a = RadialProfile::annulus(3, 1.0, 2.0).unwrap();
        assert_eq!(a.eval(3.0).unwrap(), 0.0);
        let grid = Grid::explicit(vec![1.0, 2.0]).unwrap();
        let s = RadialProfile::sampled(3, grid, vec![1.0, 0.5], -1.0).unwrap();
        assert!((s.eval(4.0).unwrap() - 0.25).abs() < 1e-15);
        assert_eq!(s.eval(0.5).unwrap(), 1.0);
        assert!(g.eval(f64::NAN).is_err());
        assert!(g.eval(-1.0).is_err());
    }

    #[test]
    fn sampled_reproduces_nodes() {
        let grid = Grid::log_uniform(0.01, 10.0, 50).unwrap();
        let g = RadialProfile::gaussian(2, 1.5).unwrap();
        let s = g.resample(&grid, -8.0).unwrap();
        for &r in grid.radii() {
            assert!((s.eval(r).unwrap() / g.eval(r).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn sampled_interpolation_is_accurate_between_nodes() {
        let grid = Grid::log_uniform(1e-3, 12.0, 400).unwrap();
        let g = RadialProfile::gaussian(3, 1.0).unwrap();
        let s = g.resample(&grid, -20.0).unwrap();
        for i in 0..500 {
            let r = 0.02 * i as f64 + 0.001;
            assert!((s.eval(r).unwrap() - g.eval(r).unwrap()).abs() < 1e-8, "r={r}");
        }
    }

    #[test]
    fn sign_changing_samples_fall_back_to_linear_values() {
        let grid = Grid::linear(0.5, 5.0, 200).unwrap();
        let vals: Vec<f64> = grid.radii().iter().map(|r| r.cos()).collect();
        let s = RadialProfile::sampled(2, grid, vals, -3.0).unwrap();
        assert!((s.eval(2.0).unwrap() - 2f64.cos()).abs() < 1e-6);
    }

    #[test]
    fn dilation_stays_in_family() {
        let lam = 2.5;
        for u in [
            RadialProfile::gaussian(3, 1.3).unwrap(),
            RadialProfile::smooth_bump(3, 0.0, 2.0).unwrap(),
            RadialProfile::power_cutoff(3, 1.5, 1.0).unwrap(),
            RadialProfile::annulus(3, 1.0, 2.0).unwrap(),
        ] {
            let v = u.dilate(lam).unwrap();
            for i in 0..40 {
                let r = 0.05 + 0.1 * i as f64;
                let a = v.eval(r).unwrap();
                let b = u.eval(lam * r).unwrap();
                assert!((a - b).abs() <= 1e-13 * b.abs().max(1.0), "{} at {r}", u.descriptor());
            }
        }
    }

    #[test]
    fn analytic_derivatives_match_differences() {
        let h = 1e-6;
        for u in [
            RadialProfile::gaussian(3, 0.7).unwrap(),
            RadialProfile::smooth_bump(3, 3.0, 1.0).unwrap(),
            RadialProfile::power_cutoff(3, 1.5, 1.0).unwrap(),
        ] {
            for i in 1..60 {
                let r = 0.07 * i as f64;
                let fd = (u.value(r + h) - u.value(r - h)) / (2.0 * h);
                assert!((u.derivative(r) - fd).abs() < 1e-6, "{} at {r}", u.descriptor());
            }
        }
    }

    #[test]
    fn cutoff_is_smooth_step() {
        assert_eq!(switch_off(0.5), 1.0);
        assert_eq!(switch_off(2.5), 0.0);
        assert!((switch_off(1.5) - 0.5).abs() < 1e-15);
        let mut prev = 1.0;
        for i in 0..100 {
            let v = switch_off(1.0 + i as f64 / 100.0);
            assert!(v <= prev);
            prev = v;
        }
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(RadialProfile::gaussian(3, 0.0).is_err());
        assert!(RadialProfile::gaussian(0, 1.0).is_err());
        assert!(RadialProfile::smooth_bump(3, 0.5, 1.0).is_err());
        assert!(RadialProfile::annulus(3, 2.0, 1.0).is_err());
        let grid = Grid::explicit(vec![1.0, 2.0]).unwrap();
        assert!(RadialProfile::sampled(3, grid.clone(), vec![1.0], -1.0).is_err());
        assert!(RadialProfile::sampled(3, grid, vec![1.0, f64::NAN], -1.0).is_err());
    }

    #[test]
    fn evaluation_is_bitwise_repeatable() {
        let grid = Grid::log_uniform(0.1, 5.0, 30).unwrap();
        let s = RadialProfile::gaussian(3, 1.0).unwrap().resample(&grid, -6.0).unwrap();
        for i in 0..100 {
            let r = 0.061 * i as f64;
            assert_eq!(s.eval(r).unwrap().to_bits(), s.eval(r).unwrap().to_bits());
        }
    }
}
