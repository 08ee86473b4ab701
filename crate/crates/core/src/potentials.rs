//! Potential operators on radial functions.
//!
//! Every operator has a position-space route built on the ring reduction
//!
//! ```text
//! (k ∗ f)(ρ) = ∫₀^∞ f₀(r) r^{n-1} W(ρ, r) dr,   W(ρ, r) = |S^{n-1}| · mean_{|y|=r} k(|x - y|)
//! ```
//!
//! and a spectral route through [`crate::transforms`]; the two are the
//! mutual oracles of this module.
//!
//! The hypersingular derivative is written in polar form
//!
//! ```text
//! Dˢu(ρ) = (|S^{n-1}|/d) ∫₀^∞ t^{-1-s} Σ_k c_k M(u; ρ, r_k t) dt
//! ```
//!
//! with `M` the sphere mean and `(c_k, r_k)` the finite-difference stencil.
//! The normalising constant `d` is fitted against the spectral route.

use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::profile::{ProfileKind, RadialProfile};
use crate::quadrature::{integrate, sum_estimates, EndpointRule, Estimate, QuadratureSpec};
use crate::specfun::{gamma, sphere_area, KernelGs};
use crate::sphere::shell_mean;
use crate::transforms::{spectrum, synthesize};

/// Local behaviour of a ring kernel at the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Singularity {
    Bounded,
    /// `k(t) ~ t^{-σ}` as `t → 0`.
    Power(f64),
}

type KernelFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A radial convolution kernel `k(|z|)` on ℝⁿ.
#[derive(Clone)]
pub struct RingKernel {
    n: u32,
    k: KernelFn,
    singularity: Singularity,
    breaks: Vec<f64>,
    support: Option<f64>,
    tail_exponent: f64,
    label: String,
}

impl std::fmt::Debug for RingKernel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RingKernel").field("n", &self.n).field("label", &self.label).field("singularity", &self.singularity).finish()
    }
}

impl RingKernel {
    /// General kernel. `tail_exponent` bounds `k(t) = O(t^τ)` at infinity
    /// (`-∞` for compact support) and is used for integrability checks.
    pub fn new(
        n: u32,
        k: impl Fn(f64) -> f64 + Send + Sync + 'static,
        singularity: Singularity,
        breaks: Vec<f64>,
        support: Option<f64>,
        tail_exponent: f64,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("RingKernel", "dimension must be positive"));
        }
        if let Singularity::Power(sigma) = singularity {
            if !(sigma < n as f64) {
                return Err(Error::domain("RingKernel", format!("singularity t^-{sigma} is not locally integrable in dimension {n}")));
            }
        }
        Ok(Self { n, k: Arc::new(k), singularity, breaks, support, tail_exponent, label: "custom".into() })
    }

    /// `c(n,s)|z|^{s-n}`, the Riesz kernel with symbol `|ω|^{-s}`.
    pub fn riesz(n: u32, s: f64) -> Result<Self> {
        check_order(n, s, "riesz_potential")?;
        let c = riesz_constant(n, s);
        let e = s - n as f64;
        let mut k = Self::new(n, move |t: f64| c * t.powf(e), Singularity::Power(n as f64 - s), vec![], None, e)?;
        k.label = format!("riesz(s={s})");
        Ok(k)
    }

    /// The Bessel potential kernel `G_s`, tabulated.
    pub fn bessel(n: u32, s: f64) -> Result<Self> {
        check_order(n, s, "bessel_convolve")?;
        let table = Arc::new(KernelGs::new(n, s)?);
        let support = table.support_radius();
        let mut k = Self::new(n, move |t: f64| table.eval(t), Singularity::Power(n as f64 - s), vec![], Some(support), f64::NEG_INFINITY)?;
        k.label = format!("bessel(s={s})");
        Ok(k)
    }

    /// `χ_{B(0,R)}`.
    pub fn indicator(n: u32, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::domain("indicator_convolve", format!("radius {radius} must be positive")));
        }
        let mut k = Self::new(n, move |t: f64| if t <= radius { 1.0 } else { 0.0 }, Singularity::Bounded, vec![radius], Some(radius), f64::NEG_INFINITY)?;
        k.label = format!("indicator(R={radius})");
        Ok(k)
    }

    /// The constant kernel 1 (convolution gives the total integral).
    pub fn constant(n: u32) -> Result<Self> {
        let mut k = Self::new(n, |_| 1.0, Singularity::Bounded, vec![], None, 0.0)?;
        k.label = "constant".into();
        Ok(k)
    }

    pub fn dim(&self) -> u32 {
        self.n
    }

    pub fn singularity(&self) -> Singularity {
        self.singularity
    }

    pub fn eval(&self, t: f64) -> f64 {
        (self.k)(t)
    }

    /// `W(ρ, r)`: the kernel integrated over the sphere `|y| = r`, divided
    /// by `r^{n-1}`.
    pub fn ring(&self, rho: f64, r: f64, spec: &QuadratureSpec) -> Result<f64> {
        let spec = match self.singularity {
            Singularity::Power(_) => (*spec).with_rule(EndpointRule::DoubleExponential),
            Singularity::Bounded => *spec,
        };
        let g = |t: f64| (self.k)(t);
        Ok(sphere_area(self.n) * shell_mean(&g, self.n, rho, r, &self.breaks, &spec)?)
    }
}

/// `Γ((n-s)/2) / (2^s π^{n/2} Γ(s/2))`.
pub fn riesz_constant(n: u32, s: f64) -> f64 {
    let nf = n as f64;
    gamma(0.5 * (nf - s)) / (2f64.powf(s) * PI.powf(0.5 * nf) * gamma(0.5 * s))
}

fn check_order(n: u32, s: f64, op: &'static str) -> Result<()> {
    if !(s > 0.0 && s < n as f64) {
        return Err(Error::domain(op, format!("order s = {s} must satisfy 0 < s < n = {n}")));
    }
    Ok(())
}

fn check_dims(k: &RingKernel, f: &RadialProfile) -> Result<()> {
    if k.n != f.dim() {
        return Err(Error::domain("radial_convolve", format!("kernel dimension {} differs from profile dimension {}", k.n, f.dim())));
    }
    Ok(())
}

/// Tolerances used for the inner sphere integrals of nested quadratures.
fn inner_spec(spec: &QuadratureSpec) -> QuadratureSpec {
    (*spec).with_tol((spec.rel_tol * 1e-2).max(1e-13), spec.abs_tol * 1e-3)
}

/// `(k ∗ f)(ρ)` at a single radius. Kernels whose ring `W(ρ, ·)` blows up
/// at `r = ρ` (singularity order `σ ≥ n - 1`) use the equivalent polar form
/// centred at `x`, [`convolve_polar_at`]; all others use [`convolve_ring_at`].
pub fn convolve_at(k: &RingKernel, f: &RadialProfile, rho: f64, spec: &QuadratureSpec) -> Result<Estimate> {
    match k.singularity {
        Singularity::Power(sigma) if sigma >= k.n as f64 - 1.0 && rho > 0.0 => convolve_polar_at(k, f, rho, spec),
        _ => convolve_ring_at(k, f, rho, spec),
    }
}

fn check_tails(k: &RingKernel, f: &RadialProfile) -> Result<()> {
    let tau = f.tail_exponent();
    if tau.is_finite() && tau + k.tail_exponent.max(-1e300) + f.dim() as f64 >= 0.0 {
        return Err(Error::domain("radial_convolve", format!("profile tail r^{tau} against kernel tail t^{} is not integrable", k.tail_exponent)));
    }
    Ok(())
}

fn profile_extent(f: &RadialProfile) -> Result<f64> {
    match f.kind() {
        ProfileKind::Analytic { .. } => f.effective_radius().ok_or_else(|| Error::domain("radial_convolve", "profile does not decay")),
        ProfileKind::Sampled(d) => Ok(d.grid().r_max()),
    }
}

/// Whether a sampled profile continues past its grid.
fn has_tail(f: &RadialProfile) -> bool {
    match f.kind() {
        ProfileKind::Sampled(d) => d.values()[d.values().len() - 1] != 0.0,
        ProfileKind::Analytic { .. } => false,
    }
}

/// `|S^{n-1}| ∫₀^∞ k(t) t^{n-1} M(f; ρ, t) dt`, with `M` the mean of `f` over
/// the sphere of radius `t` about a point at distance `ρ` from the origin.
pub fn convolve_polar_at(k: &RingKernel, f: &RadialProfile, rho: f64, spec: &QuadratureSpec) -> Result<Estimate> {
    check_dims(k, f)?;
    if f.is_zero() {
        return Ok(Estimate::ZERO);
    }
    check_tails(k, f)?;
    let n = f.dim();
    let inner = inner_spec(spec);
    let fb = f.breakpoints();
    let body = |t: f64| -> f64 {
        let kv = (k.k)(t);
        if kv == 0.0 {
            return 0.0;
        }
        match shell_mean(&|x| f.value(x), n, rho, t, &fb, &inner) {
            Ok(m) => kv * t.powi(n as i32 - 1) * m,
            Err(_) => f64::NAN,
        }
    };
    let upper = profile_extent(f)?;
    let tail = has_tail(f);
    let top = match (tail, k.support) {
        (true, None) => f64::INFINITY,
        (true, Some(sup)) => sup,
        (false, Some(sup)) => sup.min(rho + upper),
        (false, None) => rho + upper,
    };
    let mut cuts = vec![0.0];
    for b in fb.iter().copied().chain([upper]) {
        cuts.extend([(rho - b).abs(), rho + b]);
    }
    cuts.extend(k.breaks.iter().copied());
    cuts.push(rho);
    cuts.retain(|&c| c >= 0.0 && c < top);
    cuts.push(top);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut parts = Vec::with_capacity(cuts.len());
    for w in cuts.windows(2) {
        let piece_spec = if w[0] == 0.0 { (*spec).with_rule(EndpointRule::DoubleExponential) } else { *spec };
        parts.push(integrate(body, w[0], w[1], &piece_spec)?);
    }
    let total = sum_estimates(&parts);
    if !total.value.is_finite() {
        return Err(Error::numeric("radial_convolve", format!("non-finite result at rho = {rho}")));
    }
    let area = sphere_area(n);
    Ok(Estimate { value: area * total.value, error: area * total.error })
}

/// `∫₀^∞ f₀(r) r^{n-1} W(ρ, r) dr` with the sphere-reduced kernel `W`.
pub fn convolve_ring_at(k: &RingKernel, f: &RadialProfile, rho: f64, spec: &QuadratureSpec) -> Result<Estimate> {
    check_dims(k, f)?;
    if f.is_zero() {
        return Ok(Estimate::ZERO);
    }
    check_tails(k, f)?;
    let n = f.dim();
    let inner = inner_spec(spec);
    let outer_power = n as i32 - 1;
    let body = |r: f64| -> f64 {
        let v = f.value(r);
        if v == 0.0 {
            return 0.0;
        }
        match k.ring(rho, r, &inner) {
            Ok(w) => v * r.powi(outer_power) * w,
            Err(_) => f64::NAN,
        }
    };
    let upper = profile_extent(f)?;
    let mut cuts = vec![0.0, upper];
    cuts.extend(f.breakpoints());
    if rho > 0.0 {
        cuts.push(rho);
        for &b in &k.breaks {
            cuts.extend([rho - b, rho + b, b - rho]);
        }
    }
    if let Some(sup) = k.support {
        cuts.push(rho + sup);
    }
    cuts.retain(|&c| c >= 0.0 && c <= upper);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let singular = matches!(k.singularity, Singularity::Power(_));
    let mut parts = Vec::with_capacity(cuts.len());
    for w in cuts.windows(2) {
        let near = singular && (w[0] == rho || w[1] == rho);
        let piece_spec = if near { (*spec).with_rule(EndpointRule::DoubleExponential) } else { *spec };
        let e = integrate(body, w[0], w[1], &piece_spec)?;
        if !e.value.is_finite() {
            return Err(Error::numeric("radial_convolve", format!("ring integral failed at rho = {rho}")));
        }
        parts.push(e);
    }
    if has_tail(f) {
        {
            let tail_spec = if singular && rho > upper { (*spec).with_rule(EndpointRule::DoubleExponential) } else { *spec };
            if rho > upper {
                parts.push(integrate(body, upper, rho, &tail_spec)?);
                parts.push(integrate(body, rho, f64::INFINITY, &tail_spec)?);
            } else {
                parts.push(integrate(body, upper, f64::INFINITY, spec)?);
            }
        }
    }
    let total = sum_estimates(&parts);
    if !total.value.is_finite() {
        return Err(Error::numeric("radial_convolve", format!("non-finite result at rho = {rho}")));
    }
    Ok(total)
}

/// `k ∗ f` sampled on `out_grid`, with a declared far-field exponent.
pub fn radial_convolve_with(k: &RingKernel, f: &RadialProfile, out_grid: &Grid, spec: &QuadratureSpec, tail_exponent: f64) -> Result<RadialProfile> {
    spec.validate()?;
    check_dims(k, f)?;
    let values = out_grid
        .radii()
        .par_iter()
        .map(|&rho| convolve_at(k, f, rho, spec).map(|e| e.value))
        .collect::<Result<Vec<f64>>>()?;
    RadialProfile::sampled(f.dim(), out_grid.clone(), values, tail_exponent)
}

/// `k ∗ f` on `out_grid`; the far field inherits the kernel's tail.
pub fn radial_convolve(k: &RingKernel, f: &RadialProfile, out_grid: &Grid, spec: &QuadratureSpec) -> Result<RadialProfile> {
    let tail = if k.tail_exponent.is_finite() { k.tail_exponent } else { -2.0 * f.dim() as f64 - 4.0 };
    radial_convolve_with(k, f, out_grid, spec, tail)
}

/// Log-uniform output grid spanning `[10⁻³ L, 30 L]` for the profile's
/// extent `L`, 25 points per decade.
pub fn default_grid(f: &RadialProfile) -> Result<Grid> {
    let l = match f.kind() {
        ProfileKind::Sampled(d) => d.grid().r_max(),
        ProfileKind::Analytic { .. } => f.effective_radius().unwrap_or(1.0).max(1e-300),
    };
    let l = if l > 0.0 { l } else { 1.0 };
    Grid::log_uniform(1e-3 * l, 30.0 * l, 113)
}

/// Which computation route an operator uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    /// Position space (ring reduction or hypersingular integral).
    Ring,
    /// Fourier multiplier.
    Spectral,
}

fn riesz_tail_check(f: &RadialProfile, s: f64) -> Result<()> {
    let tau = f.tail_exponent();
    if tau.is_finite() && tau + s >= 0.0 {
        return Err(Error::domain("riesz_potential", format!("∫|f| r^(s-1) dr diverges at infinity for tail r^{tau}, s = {s}")));
    }
    Ok(())
}

/// `Iˢf` on `out_grid` by the chosen route.
pub fn riesz_potential_on(f: &RadialProfile, s: f64, out_grid: &Grid, route: Route, spec: &QuadratureSpec) -> Result<RadialProfile> {
    let n = f.dim();
    check_order(n, s, "riesz_potential")?;
    riesz_tail_check(f, s)?;
    let tail = s - n as f64;
    match route {
        Route::Ring => radial_convolve_with(&RingKernel::riesz(n, s)?, f, out_grid, spec, tail),
        Route::Spectral => multiplier_on(f, &move |rho: f64| rho.powf(-s), out_grid, spec, tail),
    }
}

/// `Iˢf` by the ring route on [`default_grid`].
pub fn riesz_potential(f: &RadialProfile, s: f64, spec: &QuadratureSpec) -> Result<RadialProfile> {
    riesz_potential_on(f, s, &default_grid(f)?, Route::Ring, spec)
}

/// `G_s ∗ f` on `out_grid` by the chosen route.
pub fn bessel_convolve_on(f: &RadialProfile, s: f64, out_grid: &Grid, route: Route, spec: &QuadratureSpec) -> Result<RadialProfile> {
    let n = f.dim();
    check_order(n, s, "bessel_convolve")?;
    let tail = -2.0 * n as f64 - 4.0;
    match route {
        Route::Ring => radial_convolve_with(&RingKernel::bessel(n, s)?, f, out_grid, spec, tail),
        Route::Spectral => multiplier_on(f, &move |rho: f64| (1.0 + rho * rho).powf(-0.5 * s), out_grid, spec, tail),
    }
}

/// `G_s ∗ f` by the ring route on [`default_grid`].
pub fn bessel_convolve(f: &RadialProfile, s: f64, spec: &QuadratureSpec) -> Result<RadialProfile> {
    bessel_convolve_on(f, s, &default_grid(f)?, Route::Ring, spec)
}

/// The smallest `C` with `|G_s ∗ f| ≤ C · Iˢ|f|` on `grid`, both sides by
/// the position route.
pub fn bessel_domination(f: &RadialProfile, s: f64, grid: &Grid, spec: &QuadratureSpec) -> Result<f64> {
    let abs = f.abs()?;
    let g = bessel_convolve_on(f, s, grid, Route::Ring, spec)?;
    let i = riesz_potential_on(&abs, s, grid, Route::Ring, spec)?;
    let mut c: f64 = 0.0;
    for &r in grid.radii() {
        let (gv, iv) = (g.value(r).abs(), i.value(r));
        if gv > 0.0 {
            if !(iv > 0.0) {
                return Err(Error::numeric("bessel_domination", format!("Riesz potential of |f| vanishes at {r}")));
            }
            c = c.max(gv / iv);
        }
    }
    Ok(c)
}

/// `(f ∗ χ_{B(0,R)})(x)` at `|x| = ρ`.
pub fn indicator_convolve(f: &RadialProfile, radius: f64, rho: f64, spec: &QuadratureSpec) -> Result<f64> {
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(Error::domain("indicator_convolve", format!("radius of evaluation {rho} must be positive")));
    }
    Ok(convolve_at(&RingKernel::indicator(f.dim(), radius)?, f, rho, spec)?.value)
}

fn multiplier_on(f: &RadialProfile, m: &(dyn Fn(f64) -> f64 + Sync), out_grid: &Grid, spec: &QuadratureSpec, tail: f64) -> Result<RadialProfile> {
    if f.is_zero() {
        return RadialProfile::sampled(f.dim(), out_grid.clone(), vec![0.0; out_grid.len()], tail);
    }
    let s = spectrum(f, spec)?;
    let est = synthesize(&s, m, out_grid, spec)?;
    RadialProfile::sampled(f.dim(), out_grid.clone(), est.iter().map(|e| e.value).collect(), tail)
}

/// Finite-difference stencil family for the hypersingular integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stencil {
    /// `Σ_k (-1)^{l-k} C(l,k) u(x + k y)`.
    Forward,
    /// `Σ_k (-1)^k C(l,k) u(x + (l/2 - k) y)`, `l` even.
    Centered,
}

/// The fitted normalisation of a hypersingular scheme.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub n: u32,
    pub s: f64,
    /// `1/d`.
    pub inverse_d: f64,
    /// Relative least-squares residual of the fit.
    pub residual: f64,
}

/// Parameters of the hypersingular derivative `Dˢ` and its truncations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FracDiffScheme {
    l: u32,
    stencil: Stencil,
    eps_sequence: Vec<f64>,
    /// Lower cut of the `t`-integral, relative to the profile length scale.
    eps_min_rel: f64,
    calibration: Option<Calibration>,
}

impl FracDiffScheme {
    pub fn new(l: u32, stencil: Stencil, eps_sequence: Vec<f64>) -> Result<Self> {
        if l == 0 {
            return Err(Error::domain("FracDiffScheme", "difference order must be positive"));
        }
        if stencil == Stencil::Centered && l % 2 == 1 {
            return Err(Error::domain("FracDiffScheme", "centered stencils need even order"));
        }
        if eps_sequence.iter().any(|e| !(*e > 0.0 && e.is_finite())) || eps_sequence.windows(2).any(|w| !(w[1] < w[0])) {
            return Err(Error::domain("FracDiffScheme", "epsilon sequence must be positive and strictly decreasing"));
        }
        Ok(Self { l, stencil, eps_sequence, eps_min_rel: 1e-3, calibration: None })
    }

    /// Default scheme for order `s`: forward differences of order
    /// `max(3, ⌊s⌋+1)`, except at odd integers where the forward constant
    /// vanishes and centered differences of even order `≥ 4` are used.
    pub fn for_order(s: f64) -> Result<Self> {
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::domain("FracDiffScheme", format!("order {s} must be positive")));
        }
        let eps = vec![1e-1, 3e-2, 1e-2];
        if s.fract() == 0.0 && (s as u64) % 2 == 1 {
            let l = ((s as u32 + 2) / 2 * 2).max(4);
            Self::new(l, Stencil::Centered, eps)
        } else {
            Self::new((s.floor() as u32 + 1).max(3), Stencil::Forward, eps)
        }
    }

    pub fn order(&self) -> u32 {
        self.l
    }

    pub fn stencil(&self) -> Stencil {
        self.stencil
    }

    pub fn eps_sequence(&self) -> &[f64] {
        &self.eps_sequence
    }

    pub fn calibration(&self) -> Option<Calibration> {
        self.calibration
    }

    /// `1/d` once calibrated.
    pub fn calibration_constant(&self) -> Option<f64> {
        self.calibration.map(|c| c.inverse_d)
    }

    /// Scheme with a given `1/d` (e.g. from a closed form), bypassing the fit.
    pub fn with_constant(mut self, n: u32, s: f64, inverse_d: f64) -> Self {
        self.calibration = Some(Calibration { n, s, inverse_d, residual: f64::NAN });
        self
    }

    pub fn with_eps_min(mut self, rel: f64) -> Self {
        self.eps_min_rel = rel;
        self
    }

    /// `(radius multiplier, coefficient)` pairs, equal radii merged.
    pub fn coefficients(&self) -> Vec<(f64, f64)> {
        let l = self.l as i64;
        let mut out: Vec<(f64, f64)> = Vec::new();
        let mut binom = 1.0;
        for k in 0..=l {
            if k > 0 {
                binom = binom * (l - k + 1) as f64 / k as f64;
            }
            let (radius, sign) = match self.stencil {
                Stencil::Forward => (k as f64, if (l - k) % 2 == 0 { 1.0 } else { -1.0 }),
                Stencil::Centered => (((l / 2) - k).abs() as f64, if k % 2 == 0 { 1.0 } else { -1.0 }),
            };
            match out.iter_mut().find(|(r, _)| *r == radius) {
                Some(e) => e.1 += sign * binom,
                None => out.push((radius, sign * binom)),
            }
        }
        out.sort_by(|a, b| a.0.total_cmp(&b.0));
        out
    }

    /// Lowest even power `p` with `Σ c_k r_k^p ≠ 0`; the stencil sum behaves
    /// like `t^p` at small `t`.
    pub fn vanishing_order(&self) -> u32 {
        let c = self.coefficients();
        let mut p = 2;
        loop {
            let sum: f64 = c.iter().map(|(r, a)| a * r.powi(p as i32)).sum();
            let scale: f64 = c.iter().map(|(r, a)| (a * r.powi(p as i32)).abs()).sum();
            if sum.abs() > 1e-9 * scale {
                return p;
            }
            p += 2;
        }
    }

    /// Fits `1/d` for `(n, s)` by least squares against the spectral route on
    /// the Gaussian `e^{-r²/2}`.
    pub fn calibrate(&self, n: u32, s: f64, spec: &QuadratureSpec) -> Result<Self> {
        self.check(s)?;
        let u = RadialProfile::gaussian(n, 1.0)?;
        let nodes = Grid::explicit(vec![0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 2.0, 2.5])?;
        let spectral = multiplier_on(&u, &move |rho: f64| rho.powf(s), &nodes, spec, -(n as f64) - s)?;
        let raw = nodes.radii().iter().map(|&rho| hypersingular_raw(&u, rho, s, self, None, spec)).collect::<Result<Vec<f64>>>()?;
        let target: Vec<f64> = nodes.radii().iter().map(|&r| spectral.value(r)).collect();
        let num: f64 = raw.iter().zip(&target).map(|(h, t)| h * t).sum();
        let den: f64 = raw.iter().map(|h| h * h).sum();
        if !(den > 0.0) || !num.is_finite() {
            return Err(Error::numeric("calibrate", "degenerate hypersingular integral; the stencil constant vanishes for this order"));
        }
        let inverse_d = num / den;
        let res: f64 = raw.iter().zip(&target).map(|(h, t)| (inverse_d * h - t).powi(2)).sum::<f64>().sqrt();
        let norm: f64 = target.iter().map(|t| t * t).sum::<f64>().sqrt();
        if !(res <= 1e-4 * norm) {
            return Err(Error::numeric(
                "calibrate",
                format!("least-squares residual {:.1e}: the {:?} stencil of order {} has a vanishing constant at s = {s}", res / norm, self.stencil, self.l),
            ));
        }
        let mut out = self.clone();
        out.calibration = Some(Calibration { n, s, inverse_d, residual: res / norm });
        Ok(out)
    }

    fn check(&self, s: f64) -> Result<()> {
        if !(s > 0.0 && s < self.l as f64) {
            return Err(Error::domain("frac_derivative", format!("order s = {s} must satisfy 0 < s < l = {}", self.l)));
        }
        Ok(())
    }

    fn constant_for(&self, n: u32, s: f64) -> Result<f64> {
        match self.calibration {
            None => Err(Error::State { op: "frac_derivative", reason: "scheme is not calibrated; call FracDiffScheme::calibrate".into() }),
            Some(c) if c.n != n || c.s != s => Err(Error::State {
                op: "frac_derivative",
                reason: format!("scheme calibrated for (n, s) = ({}, {}), requested ({n}, {s})", c.n, c.s),
            }),
            Some(c) => Ok(c.inverse_d),
        }
    }
}

/// `|S^{n-1}| ∫_{ε}^∞ t^{-1-s} Σ_k c_k M(u; ρ, r_k t) dt`. With `eps = None`
/// the integral starts at `ε_min` and the piece below it is added from the
/// leading small-`t` behaviour `Σ c_k M ≈ C t^p`.
fn hypersingular_raw(u: &RadialProfile, rho: f64, s: f64, scheme: &FracDiffScheme, eps: Option<f64>, spec: &QuadratureSpec) -> Result<f64> {
    let n = u.dim();
    let coeffs = scheme.coefficients();
    // the stencil sum cancels to O(t^p): sphere means need far more accuracy
    // than the result; splines are only C², so sampled input gets less
    let inner_rel = match u.kind() {
        ProfileKind::Analytic { .. } => 1e-13,
        ProfileKind::Sampled(_) => 1e-10,
    };
    let inner = inner_spec(spec).with_tol(inner_rel, spec.abs_tol * 1e-3);
    let breaks = u.breakpoints();
    let centre = u.value(rho);
    let stencil_sum = |t: f64| -> Result<f64> {
        let mut acc = 0.0;
        for &(r, c) in &coeffs {
            let m = if r == 0.0 { centre } else { shell_mean(&|x| u.value(x), n, rho, r * t, &breaks, &inner)? };
            acc += c * m;
        }
        Ok(acc)
    };
    let scale = u.length_scale();
    let lo = eps.unwrap_or(scheme.eps_min_rel * scale);
    let body = |t: f64| match stencil_sum(t) {
        Ok(v) => v * t.powf(-1.0 - s),
        Err(_) => f64::NAN,
    };
    let mut cuts = vec![lo];
    let mut c = lo;
    let top = 64.0 * (scale + rho);
    while c < top {
        c *= 2.0;
        cuts.push(c);
    }
    // panel tolerances are relative to the size of the whole integral
    let magnitude = coeffs.iter().map(|(_, a)| a.abs()).sum::<f64>() * u.value(0.0).abs().max(centre.abs()) * lo.powf(-s) / s;
    let spec = &(*spec).with_tol(spec.rel_tol, spec.abs_tol.max(1e-2 * spec.rel_tol * magnitude));
    let mut parts = Vec::with_capacity(cuts.len() + 1);
    for w in cuts.windows(2) {
        parts.push(integrate(body, w[0], w[1], spec)?);
    }
    // beyond `c` the centre term integrates in closed form
    let c0: f64 = coeffs.iter().filter(|(r, _)| *r == 0.0).map(|(_, a)| a).sum();
    let far = |t: f64| {
        let mut acc = 0.0;
        for &(r, a) in coeffs.iter().filter(|(r, _)| *r > 0.0) {
            match shell_mean(&|x| u.value(x), n, rho, r * t, &breaks, &inner) {
                Ok(m) => acc += a * m,
                Err(_) => return f64::NAN,
            }
        }
        acc * t.powf(-1.0 - s)
    };
    parts.push(integrate(far, c, f64::INFINITY, spec)?);
    parts.push(Estimate { value: c0 * centre * c.powf(-s) / s, error: 0.0 });
    let mut total = sum_estimates(&parts).value;
    if !total.is_finite() {
        return Err(Error::numeric("frac_derivative", format!("hypersingular integral failed at rho = {rho}")));
    }
    if eps.is_none() {
        let p = scheme.vanishing_order() as f64;
        total += stencil_sum(lo)? * lo.powf(-s) / (p - s);
    }
    Ok(sphere_area(n) * total)
}

/// Route selector for [`frac_derivative`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DerivMethod {
    /// Multiplier `ρ^s`.
    Spectral,
    /// Calibrated hypersingular integral.
    Hypersingular,
    /// `-u'' - (n-1)u'/r`, only for `s = 2`.
    LocalLaplacian,
}

/// `Dˢu` on `out_grid`.
pub fn frac_derivative_on(
    u: &RadialProfile,
    s: f64,
    scheme: &FracDiffScheme,
    method: DerivMethod,
    out_grid: &Grid,
    spec: &QuadratureSpec,
) -> Result<RadialProfile> {
    let n = u.dim();
    let tail = -(n as f64) - s;
    match method {
        DerivMethod::Spectral => {
            if !(s >= 0.0) {
                return Err(Error::domain("frac_derivative", format!("order {s} must be nonnegative")));
            }
            multiplier_on(u, &move |rho: f64| rho.powf(s), out_grid, spec, tail)
        }
        DerivMethod::Hypersingular => {
            scheme.check(s)?;
            let inv_d = scheme.constant_for(n, s)?;
            if u.is_zero() {
                return RadialProfile::sampled(n, out_grid.clone(), vec![0.0; out_grid.len()], tail);
            }
            let values = out_grid
                .radii()
                .par_iter()
                .map(|&rho| hypersingular_raw(u, rho, s, scheme, None, spec).map(|h| inv_d * h))
                .collect::<Result<Vec<f64>>>()?;
            RadialProfile::sampled(n, out_grid.clone(), values, tail)
        }
        DerivMethod::LocalLaplacian => {
            if s != 2.0 {
                return Err(Error::domain("frac_derivative", format!("the local Laplacian route computes s = 2 only, got {s}")));
            }
            let values = out_grid.radii().iter().map(|&r| radial_laplacian(u, r)).collect();
            RadialProfile::sampled(n, out_grid.clone(), values, tail)
        }
    }
}

/// `Dˢu` on [`default_grid`].
pub fn frac_derivative(u: &RadialProfile, s: f64, scheme: &FracDiffScheme, method: DerivMethod, spec: &QuadratureSpec) -> Result<RadialProfile> {
    frac_derivative_on(u, s, scheme, method, &default_grid(u)?, spec)
}

/// `-u₀''(r) - (n-1)u₀'(r)/r` by fourth-order central differences of the
/// even extension.
pub fn radial_laplacian(u: &RadialProfile, r: f64) -> f64 {
    let h = 1e-3 * u.length_scale();
    let v = |x: f64| u.value(x.abs());
    let d1 = (v(r - 2.0 * h) - 8.0 * v(r - h) + 8.0 * v(r + h) - v(r + 2.0 * h)) / (12.0 * h);
    let d2 = (-v(r - 2.0 * h) + 16.0 * v(r - h) - 30.0 * v(r) + 16.0 * v(r + h) - v(r + 2.0 * h)) / (12.0 * h * h);
    let n = u.dim() as f64;
    let radial = if r > 0.0 { d1 / r } else { d2 };
    -d2 - (n - 1.0) * radial
}

/// `D^s_ε u`: the hypersingular integral restricted to `|y| > ε`.
pub fn truncated_derivative_on(u: &RadialProfile, s: f64, eps: f64, scheme: &FracDiffScheme, out_grid: &Grid, spec: &QuadratureSpec) -> Result<RadialProfile> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::domain("truncated_inversion", format!("epsilon {eps} must be positive")));
    }
    scheme.check(s)?;
    let n = u.dim();
    let inv_d = scheme.constant_for(n, s)?;
    let tail = -(n as f64) - s;
    if u.is_zero() {
        return RadialProfile::sampled(n, out_grid.clone(), vec![0.0; out_grid.len()], tail);
    }
    let values = out_grid
        .radii()
        .par_iter()
        .map(|&rho| hypersingular_raw(u, rho, s, scheme, Some(eps), spec).map(|h| inv_d * h))
        .collect::<Result<Vec<f64>>>()?;
    RadialProfile::sampled(n, out_grid.clone(), values, tail)
}

/// `Iˢu` sampled densely enough to serve as input to the hypersingular
/// integral: spectral route when `u` has a rapidly decaying spectrum, ring
/// route otherwise.
pub fn riesz_potential_dense(u: &RadialProfile, s: f64, spec: &QuadratureSpec) -> Result<RadialProfile> {
    let l = u.effective_radius().unwrap_or_else(|| u.length_scale());
    let grid = Grid::log_uniform(1e-5 * l, 30.0 * l, 400)?;
    let route = if u.spectral_extent().is_some() { Route::Spectral } else { Route::Ring };
    riesz_potential_on(u, s, &grid, route, spec)
}

/// `D^s_ε(Iˢu)` on `out_grid`; tends to `u` as `ε ↓ 0`.
pub fn truncated_inversion_on(u: &RadialProfile, s: f64, eps: f64, scheme: &FracDiffScheme, out_grid: &Grid, spec: &QuadratureSpec) -> Result<RadialProfile> {
    Ok(truncated_inversion_sweep(u, s, &[eps], scheme, out_grid, spec)?.remove(0))
}

/// [`truncated_inversion_on`] for several `ε`, sharing one potential.
pub fn truncated_inversion_sweep(u: &RadialProfile, s: f64, eps: &[f64], scheme: &FracDiffScheme, out_grid: &Grid, spec: &QuadratureSpec) -> Result<Vec<RadialProfile>> {
    let n = u.dim();
    if u.is_zero() {
        return eps.iter().map(|_| RadialProfile::sampled(n, out_grid.clone(), vec![0.0; out_grid.len()], -(n as f64) - s)).collect();
    }
    scheme.check(s)?;
    scheme.constant_for(n, s)?;
    let potential = riesz_potential_dense(u, s, spec)?;
    eps.iter().map(|&e| truncated_derivative_on(&potential, s, e, scheme, out_grid, spec)).collect()
}

/// [`truncated_inversion_on`] on the input's [`default_grid`].
pub fn truncated_inversion(u: &RadialProfile, s: f64, eps: f64, scheme: &FracDiffScheme, spec: &QuadratureSpec) -> Result<RadialProfile> {
    truncated_inversion_on(u, s, eps, scheme, &default_grid(u)?, spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default().with_tol(1e-9, 1e-13)
    }

    #[test]
    fn riesz_constant_values() {
        // n = 3, s = 2: 1/(4π)
        assert!((riesz_constant(3, 2.0) - 1.0 / (4.0 * PI)).abs() < 1e-15);
        // n = 3, s = 1: 1/(2π²)
        assert!((riesz_constant(3, 1.0) - 1.0 / (2.0 * PI * PI)).abs() < 1e-15);
    }

    #[test]
    fn ring_of_newton_kernel_matches_closed_form() {
        // n = 3, k = 1/(4π t): W(ρ, r) = 1/max(ρ, r)
        let k = RingKernel::riesz(3, 2.0).unwrap();
        for &(rho, r) in &[(1.0f64, 0.5f64), (0.5, 1.0), (2.0, 2.1), (1.0, 3.0)] {
            let w = k.ring(rho, r, &spec()).unwrap();
            let exact = 1.0 / f64::max(rho, r);
            assert!((w / exact - 1.0).abs() < 1e-9, "{rho} {r}: {w}");
        }
    }

    #[test]
    fn newton_potential_of_ball() {
        // I²χ_{B(0,1)} in ℝ³ = (3 - ρ²)/6 inside, 1/(3ρ) outside
        let f = RadialProfile::annulus(3, 0.0, 1.0).unwrap();
        let k = RingKernel::riesz(3, 2.0).unwrap();
        for &rho in &[0.2f64, 0.7, 1.0, 1.5, 4.0] {
            let v = convolve_at(&k, &f, rho, &spec()).unwrap().value;
            let exact = if rho <= 1.0 { (3.0 - rho * rho) / 6.0 } else { 1.0 / (3.0 * rho) };
            assert!((v - exact).abs() < 1e-7, "rho={rho}: {v} vs {exact}");
        }
    }

    #[test]
    fn constant_kernel_gives_mass() {
        let f = RadialProfile::annulus(3, 1.0, 2.0).unwrap();
        let k = RingKernel::constant(3).unwrap();
        let mass = 4.0 * PI / 3.0 * 7.0;
        for &rho in &[0.1, 1.5, 5.0] {
            let v = convolve_at(&k, &f, rho, &spec()).unwrap().value;
            assert!((v / mass - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn indicator_examples() {
        let f = RadialProfile::annulus(3, 0.0, 1.0).unwrap();
        assert_eq!(indicator_convolve(&f, 1.0, 5.0, &spec()).unwrap(), 0.0);
        let big = RadialProfile::annulus(3, 0.0, 100.0).unwrap();
        let v = indicator_convolve(&big, 2.0, 0.5, &spec()).unwrap();
        assert!((v / (4.0 * PI / 3.0 * 8.0) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn singular_kernel_rejected() {
        assert!(RingKernel::new(3, |t: f64| t.powi(-3), Singularity::Power(3.0), vec![], None, -3.0).is_err());
        assert!(RingKernel::riesz(3, 3.0).is_err());
    }

    #[test]
    fn stencil_coefficients() {
        let fwd = FracDiffScheme::new(3, Stencil::Forward, vec![]).unwrap();
        assert_eq!(fwd.coefficients(), vec![(0.0, -1.0), (1.0, 3.0), (2.0, -3.0), (3.0, 1.0)]);
        assert_eq!(fwd.vanishing_order(), 4);
        let cen = FracDiffScheme::new(4, Stencil::Centered, vec![]).unwrap();
        assert_eq!(cen.coefficients(), vec![(0.0, 6.0), (1.0, -8.0), (2.0, 2.0)]);
        assert_eq!(cen.vanishing_order(), 4);
        assert_eq!(FracDiffScheme::new(2, Stencil::Forward, vec![]).unwrap().vanishing_order(), 2);
        assert!(FracDiffScheme::new(3, Stencil::Centered, vec![]).is_err());
        assert!(FracDiffScheme::new(3, Stencil::Forward, vec![0.1, 0.2]).is_err());
        assert_eq!(FracDiffScheme::for_order(2.0).unwrap().stencil(), Stencil::Forward);
        assert_eq!(FracDiffScheme::for_order(3.0).unwrap().order(), 4);
        assert_eq!(FracDiffScheme::for_order(1.0).unwrap().stencil(), Stencil::Centered);
        assert_eq!(FracDiffScheme::for_order(0.5).unwrap().order(), 3);
    }

    #[test]
    fn uncalibrated_scheme_is_a_state_error() {
        let u = RadialProfile::gaussian(3, 1.0).unwrap();
        let scheme = FracDiffScheme::for_order(1.5).unwrap();
        let g = Grid::explicit(vec![1.0]).unwrap();
        let err = frac_derivative_on(&u, 1.5, &scheme, DerivMethod::Hypersingular, &g, &spec()).unwrap_err();
        assert!(matches!(err, Error::State { .. }));
        let bad = FracDiffScheme::new(1, Stencil::Forward, vec![]).unwrap();
        assert!(matches!(frac_derivative_on(&u, 1.5, &bad, DerivMethod::Hypersingular, &g, &spec()), Err(Error::Domain { .. })));
    }

    #[test]
    fn local_laplacian_of_gaussian() {
        // -Δ e^{-r²/2} = (n - r²) e^{-r²/2}
        let u = RadialProfile::gaussian(3, 1.0).unwrap();
        for &r in &[0.0f64, 0.3, 1.0, 2.5] {
            let exact = (3.0 - r * r) * (-0.5 * r * r).exp();
            assert!((radial_laplacian(&u, r) - exact).abs() < 1e-8, "r={r}");
        }
    }

    #[test]
    fn gaussian_self_convolution() {
        // e^{-r²/2} ∗ e^{-r²/2} = π^{3/2} e^{-r²/4} in ℝ³
        let f = RadialProfile::gaussian(3, 1.0).unwrap();
        let g = f.clone();
        let k = RingKernel::new(3, move |t: f64| g.eval(t).unwrap(), Singularity::Bounded, vec![], None, f64::NEG_INFINITY).unwrap();
        for &rho in &[0.0f64, 0.5, 2.0, 4.0] {
            let v = convolve_at(&k, &f, rho, &spec()).unwrap().value;
            let exact = PI.powf(1.5) * (-0.25 * rho * rho).exp();
            assert!((v - exact).abs() < 1e-8, "rho={rho}: {v} vs {exact}");
        }
    }

    #[test]
    fn polar_and_ring_forms_agree() {
        let f = RadialProfile::smooth_bump(3, 0.0, 1.5).unwrap();
        for s in [1.0, 1.5, 2.5] {
            let k = RingKernel::riesz(3, s).unwrap();
            for &rho in &[0.3, 1.0, 2.0] {
                let a = convolve_ring_at(&k, &f, rho, &spec()).unwrap().value;
                let b = convolve_polar_at(&k, &f, rho, &spec()).unwrap().value;
                assert!((a / b - 1.0).abs() < 1e-7, "s={s} rho={rho}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn riesz_of_gaussian_at_origin() {
        // Iˢ e^{-r²/2}(0) = (2π)^{-n/2} |S^{n-1}| 2^{(n-s)/2-1} Γ((n-s)/2)
        let (n, s) = (3u32, 1.0);
        let f = RadialProfile::gaussian(n, 1.0).unwrap();
        let k = RingKernel::riesz(n, s).unwrap();
        let v = convolve_at(&k, &f, 0.0, &spec()).unwrap().value;
        let exact = (2.0 * PI).powf(-1.5) * 4.0 * PI * 2f64.powf(0.5 * (3.0 - s) - 1.0) * gamma(0.5 * (3.0 - s));
        assert!((v / exact - 1.0).abs() < 1e-8);
    }

    /// `d` for forward differences of order `l` and non-integer `s`.
    fn forward_d(n: u32, s: f64, l: u32) -> f64 {
        let mut a = 0.0;
        let mut binom = 1.0;
        for k in 1..=l {
            binom = binom * (l - k + 1) as f64 / k as f64;
            let sign = if (k - 1) % 2 == 0 { 1.0 } else { -1.0 };
            a += sign * binom * (k as f64).powf(s);
        }
        let sign = if l.is_multiple_of(2) { 1.0 } else { -1.0 };
        sign * PI.powf(1.0 + 0.5 * n as f64) * a / (2f64.powf(s) * gamma(1.0 + 0.5 * s) * gamma(0.5 * (n as f64 + s)) * (0.5 * PI * s).sin())
    }

    #[test]
    fn calibration_matches_closed_form_constant() {
        for &(n, s) in &[(3u32, 0.5f64), (3, 1.5), (2, 0.7)] {
            let scheme = FracDiffScheme::for_order(s).unwrap().calibrate(n, s, &spec()).unwrap();
            let fitted = scheme.calibration_constant().unwrap();
            let exact = 1.0 / forward_d(n, s, scheme.order());
            assert!((fitted / exact - 1.0).abs() < 1e-6, "n={n} s={s}: {fitted} vs {exact}");
        }
        // centered fourth differences, s = 1, n = 3: 1/d = 1/(4π²)
        let scheme = FracDiffScheme::for_order(1.0).unwrap().calibrate(3, 1.0, &spec()).unwrap();
        assert!((scheme.calibration_constant().unwrap() * 4.0 * PI * PI - 1.0).abs() < 1e-7);
        // forward differences at an odd integer: the constant vanishes
        let fwd = FracDiffScheme::new(3, Stencil::Forward, vec![]).unwrap();
        assert!(matches!(fwd.calibrate(3, 1.0, &spec()), Err(Error::Numeric { .. })));
    }
}
