//! Power-weighted Lebesgue norms of radial functions and the `H^{s,p}`
//! norms built from them.
//!
//! `‖|x|^a f‖_{L^p(ℝⁿ)} = (|S^{n-1}| ∫₀^∞ |f₀(r)|^p r^{ap+n-1} dr)^{1/p}`.
//! Divergence is decided from the declared behaviour at `0` and `∞` before
//! any quadrature, and reported as a value rather than an error.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::potentials::{default_grid, frac_derivative_on, DerivMethod, FracDiffScheme};
use crate::profile::{ProfileKind, RadialProfile};
use crate::quadrature::{integrate, sum_estimates, EndpointRule, Estimate, QuadratureSpec};
use crate::specfun::sphere_area;
use crate::transforms::{spectral_grid, spectrum};

/// `‖|x|^a f‖_{L^p}` over ℝⁿ, or over the ball `|x| < radius`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedNormSpec {
    pub p: f64,
    pub a: f64,
    pub n: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
}

impl WeightedNormSpec {
    pub fn new(p: f64, a: f64, n: u32) -> Result<Self> {
        let s = Self { p, a, n, radius: None };
        s.validate()?;
        Ok(s)
    }

    /// Plain `L^p`.
    pub fn lp(p: f64, n: u32) -> Result<Self> {
        Self::new(p, 0.0, n)
    }

    pub fn on_ball(mut self, radius: f64) -> Result<Self> {
        self.radius = Some(radius);
        self.validate()?;
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        if !(self.p >= 1.0) {
            return Err(Error::domain("weighted_lp_norm", format!("exponent p = {} must be at least 1", self.p)));
        }
        if !self.a.is_finite() || self.n == 0 {
            return Err(Error::domain("weighted_lp_norm", format!("weight exponent {} and dimension {} must be finite and positive", self.a, self.n)));
        }
        if let Some(r) = self.radius {
            if !(r > 0.0 && r.is_finite()) {
                return Err(Error::domain("weighted_lp_norm", format!("ball radius {r} must be positive")));
            }
        }
        Ok(())
    }
}

/// Why a norm is infinite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Divergence {
    NonIntegrableAtOrigin,
    NonIntegrableAtInfinity,
}

impl std::fmt::Display for Divergence {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Divergence::NonIntegrableAtOrigin => "non-integrable at origin",
            Divergence::NonIntegrableAtInfinity => "non-integrable at infinity",
        })
    }
}

/// A norm value: finite with a quadrature error bound, or `+∞` with a reason.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormValue {
    pub value: f64,
    pub error: f64,
    pub divergence: Option<Divergence>,
    /// For `p = ∞`: largest relative gap of the sampling grid, a caveat on
    /// the supremum.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_resolution: Option<f64>,
}

impl NormValue {
    pub const ZERO: Self = Self { value: 0.0, error: 0.0, divergence: None, grid_resolution: None };

    fn divergent(d: Divergence) -> Self {
        Self { value: f64::INFINITY, error: 0.0, divergence: Some(d), grid_resolution: None }
    }

    pub fn is_finite(&self) -> bool {
        self.divergence.is_none()
    }
}

impl std::fmt::Display for NormValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.divergence {
            Some(d) => write!(f, "inf ({d})"),
            None => write!(f, "{}", self.value),
        }
    }
}

/// Upper end of the region where the profile is represented explicitly.
fn explicit_extent(f: &RadialProfile) -> Option<f64> {
    match f.kind() {
        ProfileKind::Sampled(d) => Some(d.grid().r_max()),
        ProfileKind::Analytic { .. } => f.effective_radius(),
    }
}

/// `‖|x|^a f‖_{L^p}` (over the ball if `norm.radius` is set).
pub fn weighted_lp_norm(f: &RadialProfile, norm: &WeightedNormSpec, spec: &QuadratureSpec) -> Result<NormValue> {
    norm.validate()?;
    if norm.n != f.dim() {
        return Err(Error::domain("weighted_lp_norm", format!("norm dimension {} differs from profile dimension {}", norm.n, f.dim())));
    }
    if f.is_zero() {
        return Ok(NormValue::ZERO);
    }
    if norm.p.is_infinite() {
        return sup_norm(f, norm);
    }
    let (p, a, n) = (norm.p, norm.a, norm.n as f64);
    let origin = f.origin_exponent();
    // integrand ~ r^{(κ+a)p + n - 1} at 0
    if origin.is_finite() && (origin + a) * p + n <= 0.0 {
        return Ok(NormValue::divergent(Divergence::NonIntegrableAtOrigin));
    }
    let tau = f.tail_exponent();
    let bounded = norm.radius.is_some();
    if !bounded && tau.is_finite() && (tau + a) * p + n >= 0.0 {
        return Ok(NormValue::divergent(Divergence::NonIntegrableAtInfinity));
    }
    let extent = explicit_extent(f);
    let top = match (norm.radius, extent) {
        (Some(r), Some(e)) => r.min(e),
        (Some(r), None) => r,
        (None, Some(e)) => e,
        (None, None) => return Ok(NormValue::divergent(Divergence::NonIntegrableAtInfinity)),
    };
    let w = a * p + n - 1.0;
    // integrate in natural units, t = r/l and |f|/M, so that the absolute
    // tolerance does not swamp profiles that are small or narrow
    let l = f.length_scale();
    let peak = (-6..=6).map(|k| f.value(l * 2f64.powi(k)).abs()).fold(0.0, f64::max);
    let m = if peak > 0.0 && peak.is_finite() { peak } else { 1.0 };
    let body = |t: f64| {
        let v = f.value(l * t).abs();
        if v == 0.0 {
            0.0
        } else {
            (v / m).powf(p) * t.powf(w)
        }
    };
    let mut cuts = vec![0.0, top];
    if let ProfileKind::Sampled(d) = f.kind() {
        cuts.push(d.grid().r_min());
    }
    cuts.extend(f.breakpoints());
    cuts.retain(|&c| c >= 0.0 && c <= top);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut parts = Vec::with_capacity(cuts.len() + 1);
    for win in cuts.windows(2) {
        // power behaviour at the origin is an endpoint singularity
        let rule = if win[0] == 0.0 { EndpointRule::DoubleExponential } else { spec.endpoint_rule };
        parts.push(integrate(body, win[0] / l, win[1] / l, &(*spec).with_rule(rule))?);
    }
    if let (ProfileKind::Sampled(d), None) = (f.kind(), norm.radius) {
        let last = d.values()[d.values().len() - 1].abs();
        if last != 0.0 {
            // ∫_R^∞ (last (r/R)^τ)^p r^w dr, in the same units
            let big_t = d.grid().r_max() / l;
            let e = tau * p + w + 1.0;
            parts.push(Estimate { value: (last / m).powf(p) * big_t.powf(w + 1.0) / -e, error: 0.0 });
        }
    } else if let (ProfileKind::Sampled(d), Some(r)) = (f.kind(), norm.radius) {
        if r > d.grid().r_max() {
            parts.push(integrate(body, d.grid().r_max() / l, r / l, spec)?);
        }
    }
    let total = sum_estimates(&parts);
    let area = sphere_area(norm.n) * m.powf(p) * l.powf(w + 1.0);
    let integral = area * total.value;
    let value = integral.max(0.0).powf(1.0 / p);
    // d(I^{1/p}) = I^{1/p - 1} dI / p
    let error = if integral > 0.0 { value / integral * area * total.error / p } else { 0.0 };
    Ok(NormValue { value, error, divergence: None, grid_resolution: None })
}

fn sup_norm(f: &RadialProfile, norm: &WeightedNormSpec) -> Result<NormValue> {
    let a = norm.a;
    let origin = f.origin_exponent();
    if origin.is_finite() && origin + a < 0.0 {
        return Ok(NormValue::divergent(Divergence::NonIntegrableAtOrigin));
    }
    let tau = f.tail_exponent();
    if norm.radius.is_none() && tau.is_finite() && tau + a > 0.0 {
        return Ok(NormValue::divergent(Divergence::NonIntegrableAtInfinity));
    }
    let top = match (norm.radius, explicit_extent(f)) {
        (Some(r), Some(e)) => r.min(e),
        (Some(r), None) => r,
        (None, Some(e)) => e,
        (None, None) => return Ok(NormValue::divergent(Divergence::NonIntegrableAtInfinity)),
    };
    let l = f.length_scale().min(top);
    let grid = Grid::hybrid(1e-6 * l, l, top.max(1.000001 * l), 121)?;
    let mut radii: Vec<f64> = grid.radii().iter().copied().filter(|&r| r <= top).collect();
    for b in f.breakpoints() {
        if b <= top {
            radii.extend([b * (1.0 - 1e-12), b]);
        }
    }
    if let ProfileKind::Sampled(d) = f.kind() {
        radii.extend(d.grid().radii().iter().copied().filter(|&r| r <= top));
    }
    radii.sort_by(f64::total_cmp);
    radii.dedup();
    let mut best: f64 = 0.0;
    for &r in &radii {
        best = best.max(r.powf(a) * f.value(r).abs());
    }
    if origin == 0.0 && a == 0.0 {
        best = best.max(f.value(0.0).abs());
    }
    if norm.radius.is_none() && tau.is_finite() && tau + a == 0.0 {
        // r^a |f| tends to a constant; the grid end is representative
        best = best.max(top.powf(a) * f.value(top).abs());
    }
    let gap = radii.windows(2).map(|w| (w[1] - w[0]) / w[1]).fold(0.0, f64::max);
    Ok(NormValue { value: best, error: 0.0, divergence: None, grid_resolution: Some(gap) })
}

/// `‖u‖_{L^p} + ‖Dˢu‖_{L^p}`, with `Dˢu` sampled on the default grid of `u`.
pub fn hsp_norm(u: &RadialProfile, s: f64, p: f64, scheme: &FracDiffScheme, method: DerivMethod, spec: &QuadratureSpec) -> Result<NormValue> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::domain("hsp_norm", format!("need 1 < p < ∞, got {p}")));
    }
    if u.is_zero() {
        return Ok(NormValue::ZERO);
    }
    let n = u.dim();
    let lp = WeightedNormSpec::lp(p, n)?;
    let base = weighted_lp_norm(u, &lp, spec)?;
    let grid = derivative_grid(u)?;
    let d = frac_derivative_on(u, s, scheme, method, &grid, spec)?;
    let top = weighted_lp_norm(&d, &lp, spec)?;
    if !base.is_finite() {
        return Ok(base);
    }
    if !top.is_finite() {
        return Ok(top);
    }
    Ok(NormValue { value: base.value + top.value, error: base.error + top.error, divergence: None, grid_resolution: None })
}

/// Output grid for derivatives whose norms are taken: log-uniform over
/// `[10⁻³L, 30L]` with about 37 points per decade.
pub fn derivative_grid(u: &RadialProfile) -> Result<Grid> {
    let g = default_grid(u)?;
    Grid::log_uniform(g.r_min(), g.r_max(), 169)
}

/// `(∫ |û(ω)|² |ω|^{2s} dω)^{1/2}`.
pub fn h_s2_fourier_seminorm(u: &RadialProfile, s: f64, spec: &QuadratureSpec) -> Result<f64> {
    if !(s >= 0.0 && s.is_finite()) {
        return Err(Error::domain("h_s2_fourier_seminorm", format!("order {s} must be nonnegative")));
    }
    if u.is_zero() {
        return Ok(0.0);
    }
    let n = u.dim();
    let hat = spectrum(u, spec)?;
    let knots = spectral_grid(u)?;
    let w = 2.0 * s + n as f64 - 1.0;
    let body = |rho: f64| hat.value(rho).powi(2) * rho.powf(w);
    let mut cuts = vec![0.0];
    cuts.extend(knots.radii().iter().copied());
    let parts = cuts
        .windows(2)
        .map(|c| integrate(body, c[0], c[1], spec))
        .collect::<Result<Vec<_>>>()?;
    Ok((sphere_area(n) * sum_estimates(&parts).value).sqrt())
}
