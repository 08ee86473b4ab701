//! Fourier transform of radial functions and radial Fourier multipliers.
//!
//! Convention: `f̂(ω) = (2π)^{-n/2} ∫ f(x) e^{-iω·x} dx`. For radial `f` this is
//! `f̂(ρ) = ∫₀^∞ f₀(r) (rρ)^{-ν} J_ν(rρ) r^{n-1} dr` with `ν = n/2 - 1`; the
//! map is unitary and coincides with its inverse on radial functions, and the
//! Gaussian `e^{-r²/2}` is fixed.
//!
//! The oscillatory integral is split at the zeros of `J_ν(rρ)`; a declared
//! power tail beyond the last sample is summed panel by panel and
//! extrapolated with Wynn's epsilon algorithm.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::profile::{Family, ProfileKind, RadialProfile};
use crate::quadrature::{integrate, sum_estimates, wynn_epsilon, Estimate, QuadratureSpec};
use crate::specfun::{bessel_zeros, gamma, j_scaled, BesselOrder};

/// Human-readable statement of the fixed convention.
pub const CONVENTION: &str = "unitary: f^(w) = (2 pi)^(-n/2) int f(x) exp(-i w.x) dx";

const EXACT_ZEROS: usize = 64;
const MAX_PANELS: usize = 400_000;

/// Radial integrand source: `g` on `[0, upper]`, plus an optional power tail
/// `coeff·(r/start)^exponent` for `r > start = upper`.
pub(crate) struct RadialSource<'a> {
    pub g: &'a (dyn Fn(f64) -> f64 + Sync),
    pub upper: f64,
    pub breaks: Vec<f64>,
    pub knots: &'a [f64],
    pub tail: Option<(f64, f64)>,
}

/// Zeros of `J_ν`, exact for the first few and McMahon beyond.
pub(crate) struct Zeros {
    nu: f64,
    exact: Vec<f64>,
}

impl Zeros {
    pub fn new(n: u32) -> Result<Self> {
        let order = BesselOrder::for_dimension(n);
        Ok(Self { nu: order.value(), exact: bessel_zeros(order, EXACT_ZEROS)? })
    }

    pub fn get(&self, k: usize) -> f64 {
        if k < self.exact.len() {
            self.exact[k]
        } else {
            let beta = (k as f64 + 1.0 + 0.5 * self.nu - 0.25) * std::f64::consts::PI;
            beta - (4.0 * self.nu * self.nu - 1.0) / (8.0 * beta)
        }
    }
}

pub(crate) fn kernel_at_zero(n: u32) -> f64 {
    let nu = n as f64 / 2.0 - 1.0;
    2f64.powf(-nu) / gamma(nu + 1.0)
}

/// `∫₀^∞ g(r) (rρ)^{-ν} J_ν(rρ) r^{n-1} dr`.
pub(crate) fn hankel_integral(src: &RadialSource<'_>, n: u32, rho: f64, zeros: &Zeros, spec: &QuadratureSpec) -> Result<Estimate> {
    let nu = n as f64 / 2.0 - 1.0;
    let pow = (n - 1) as i32;
    let body = |r: f64| {
        let v = (src.g)(r);
        if v == 0.0 {
            0.0
        } else {
            v * j_scaled(nu, r * rho) * r.powi(pow)
        }
    };
    let mut edges = vec![0.0];
    if rho > 0.0 {
        let mut k = 0;
        loop {
            let z = zeros.get(k) / rho;
            if z >= src.upper {
                break;
            }
            edges.push(z);
            k += 1;
            if k > MAX_PANELS {
                return Err(Error::numeric("hankel_fourier", format!("more than {MAX_PANELS} oscillation panels at rho = {rho}")));
            }
        }
    }
    edges.extend(src.breaks.iter().copied().filter(|&b| b > 0.0 && b < src.upper));
    edges.extend(src.knots.iter().copied().filter(|&b| b > 0.0 && b < src.upper));
    edges.push(src.upper);
    edges.sort_by(f64::total_cmp);
    edges.dedup();
    let mut parts = Vec::with_capacity(edges.len() + 1);
    for w in edges.windows(2) {
        parts.push(integrate(body, w[0], w[1], spec)?);
    }
    if let Some((coeff, exponent)) = src.tail {
        if coeff != 0.0 {
            parts.push(power_tail(coeff, exponent, src.upper, n, rho, zeros, spec)?);
        }
    }
    Ok(sum_estimates(&parts))
}

fn power_tail(coeff: f64, exponent: f64, start: f64, n: u32, rho: f64, zeros: &Zeros, spec: &QuadratureSpec) -> Result<Estimate> {
    let nf = n as f64;
    if rho == 0.0 {
        if exponent >= -nf {
            return Err(Error::domain("hankel_fourier", format!("tail r^{exponent} is not integrable at zero frequency in dimension {n}")));
        }
        let v = coeff * kernel_at_zero(n) * start.powi(n as i32) / -(exponent + nf);
        return Ok(Estimate { value: v, error: 0.0 });
    }
    let nu = nf / 2.0 - 1.0;
    let body = |r: f64| coeff * (r / start).powf(exponent) * j_scaled(nu, r * rho) * r.powi(n as i32 - 1);
    let mut k = 0;
    while zeros.get(k) / rho <= start {
        k += 1;
    }
    let first = integrate(body, start, zeros.get(k) / rho, spec)?;
    let mut partial = vec![first.value];
    let mut err = first.error;
    let mut last_est = f64::NAN;
    for step in 0..4000 {
        let (a, b) = (zeros.get(k + step) / rho, zeros.get(k + step + 1) / rho);
        let piece = integrate(body, a, b, spec)?;
        err += piece.error;
        partial.push(partial[partial.len() - 1] + piece.value);
        if piece.value.abs() <= spec.abs_tol * 1e-3 {
            return Ok(Estimate { value: partial[partial.len() - 1], error: err });
        }
        if partial.len() >= 21 && step % 4 == 0 {
            let window = &partial[partial.len() - 21..];
            let est = wynn_epsilon(window);
            if (est - last_est).abs() <= spec.target(est).max(4.0 * f64::EPSILON * est.abs()) {
                return Ok(Estimate { value: est, error: err + (est - last_est).abs() });
            }
            last_est = est;
        }
    }
    Err(Error::Quadrature { estimate: partial[partial.len() - 1], error: f64::INFINITY })
}

fn source_for(u: &RadialProfile) -> Result<(Box<dyn Fn(f64) -> f64 + Sync + '_>, f64, Vec<f64>, Option<(f64, f64)>)> {
    let n = u.dim() as f64;
    match u.kind() {
        ProfileKind::Analytic { family: Family::Constant, amplitude } if *amplitude != 0.0 => {
            Err(Error::domain("hankel_fourier", "constant profile has no integrable transform"))
        }
        ProfileKind::Analytic { .. } => {
            let upper = u.effective_radius().expect("decaying analytic family");
            Ok((Box::new(move |r| u.value(r)), upper, u.breakpoints(), None))
        }
        ProfileKind::Sampled(d) => {
            let tau = d.tail_exponent();
            let last = d.values()[d.values().len() - 1];
            if last != 0.0 && tau >= -(n + 1.0) / 2.0 {
                return Err(Error::domain(
                    "hankel_fourier",
                    format!("tail exponent {tau} must be below -(n+1)/2 = {} for absolute convergence", -(n + 1.0) / 2.0),
                ));
            }
            let upper = d.grid().r_max();
            Ok((Box::new(move |r| u.value(r)), upper, vec![], Some((last, tau))))
        }
    }
}

/// `û(ρ)` with its quadrature error estimate.
pub fn hankel_at(u: &RadialProfile, rho: f64, spec: &QuadratureSpec) -> Result<Estimate> {
    if !(rho >= 0.0 && rho.is_finite()) {
        return Err(Error::domain("hankel_fourier", format!("frequency {rho} must be finite and nonnegative")));
    }
    if u.is_zero() {
        return Ok(Estimate::ZERO);
    }
    let (g, upper, breaks, tail) = source_for(u)?;
    let zeros = Zeros::new(u.dim())?;
    hankel_integral(&RadialSource { g: &*g, upper, breaks, knots: &[], tail }, u.dim(), rho, &zeros, spec)
}

/// Tail exponent attached to transforms by default: fast decay for smooth
/// inputs, the generic `-(n+1)/2` otherwise.
pub fn default_tail_exponent(u: &RadialProfile) -> f64 {
    let n = u.dim() as f64;
    if u.spectral_extent().is_some() {
        -2.0 * n - 4.0
    } else {
        -(n + 1.0) / 2.0
    }
}

/// Transform sampled on `out_grid`, with per-node error estimates.
pub fn hankel_fourier_detailed(u: &RadialProfile, out_grid: &Grid, spec: &QuadratureSpec, tail_exponent: f64) -> Result<(RadialProfile, Vec<Estimate>)> {
    spec.validate()?;
    let est: Vec<Estimate> = if u.is_zero() {
        vec![Estimate::ZERO; out_grid.len()]
    } else {
        let (g, upper, breaks, tail) = source_for(u)?;
        let zeros = Zeros::new(u.dim())?;
        let src = RadialSource { g: &*g, upper, breaks, knots: &[], tail };
        out_grid.radii().par_iter().map(|&rho| hankel_integral(&src, u.dim(), rho, &zeros, spec)).collect::<Result<Vec<_>>>()?
    };
    let values = est.iter().map(|e| e.value).collect();
    Ok((RadialProfile::sampled(u.dim(), out_grid.clone(), values, tail_exponent)?, est))
}

/// The radial Fourier transform of `u`, sampled on `out_grid`.
pub fn hankel_fourier(u: &RadialProfile, out_grid: &Grid, spec: &QuadratureSpec) -> Result<RadialProfile> {
    Ok(hankel_fourier_detailed(u, out_grid, spec, default_tail_exponent(u))?.0)
}

/// Frequency grid resolving the transform of a profile with rapidly
/// decaying spectrum: log-spaced near zero, uniform up to the bandwidth.
pub fn spectral_grid(u: &RadialProfile) -> Result<Grid> {
    let (band, length) = u
        .spectral_extent()
        .ok_or_else(|| Error::domain("apply_multiplier", format!("{} has no rapidly decaying spectrum", u.descriptor())))?;
    spectral_grid_for(band, length)
}

pub(crate) fn spectral_grid_for(band: f64, length: f64) -> Result<Grid> {
    let lo = 1e-4 / length;
    let mid = (1.0 / length).min(0.5 * band);
    let log = Grid::log_uniform(lo, mid, 80)?;
    let h = (0.08 / length).min(mid - log.radii()[78]);
    let mut radii = log.radii().to_vec();
    let mut r = mid + h;
    while r < band {
        radii.push(r);
        r += h;
    }
    radii.push(r);
    Grid::explicit(radii)
}

/// Transform of `u` on its own [`spectral_grid`].
///
/// Spectra of closed-form profiles are memoised per process (keyed by the
/// profile descriptor and the quadrature settings), since several operators
/// are routinely applied to the same input.
pub fn spectrum(u: &RadialProfile, spec: &QuadratureSpec) -> Result<RadialProfile> {
    type Cache = Mutex<HashMap<String, RadialProfile>>;
    static CACHE: OnceLock<Cache> = OnceLock::new();
    let key = match u.kind() {
        ProfileKind::Analytic { .. } => Some(format!("{}|{:?}", u.descriptor(), spec)),
        ProfileKind::Sampled(_) => None,
    };
    let cache = CACHE.get_or_init(Default::default);
    if let Some(k) = &key {
        if let Some(hit) = cache.lock().unwrap_or_else(|e| e.into_inner()).get(k) {
            return Ok(hit.clone());
        }
    }
    let grid = spectral_grid(u)?;
    let out = hankel_fourier_detailed(u, &grid, spec, -2.0 * u.dim() as f64 - 4.0)?.0;
    if let Some(k) = key {
        let mut map = cache.lock().unwrap_or_else(|e| e.into_inner());
        if map.len() >= 64 {
            map.clear();
        }
        map.insert(k, out.clone());
    }
    Ok(out)
}

/// Inverse transform of `m(ρ)·S(ρ)` where `S` is a sampled spectrum that is
/// negligible beyond its grid.
pub(crate) fn synthesize(spectrum: &RadialProfile, m: &(dyn Fn(f64) -> f64 + Sync), out_grid: &Grid, spec: &QuadratureSpec) -> Result<Vec<Estimate>> {
    let n = spectrum.dim();
    let (band, knots): (f64, &[f64]) = match spectrum.kind() {
        ProfileKind::Sampled(d) => (d.grid().r_max(), d.grid().radii()),
        ProfileKind::Analytic { .. } => (spectrum.effective_radius().unwrap_or(f64::INFINITY), &[]),
    };
    let g = |rho: f64| {
        let v = spectrum.value(rho);
        if v == 0.0 {
            0.0
        } else {
            m(rho) * v
        }
    };
    let src = RadialSource { g: &g, upper: band, breaks: vec![], knots, tail: None };
    let zeros = Zeros::new(n)?;
    out_grid.radii().par_iter().map(|&r| hankel_integral(&src, n, r, &zeros, spec)).collect()
}

/// Profile whose transform is `m(ρ)·û(ρ)`, sampled on `out_grid` with the
/// given far-field exponent.
pub fn apply_multiplier_with(
    u: &RadialProfile,
    m: &(dyn Fn(f64) -> f64 + Sync),
    out_grid: &Grid,
    spec: &QuadratureSpec,
    tail_exponent: f64,
) -> Result<RadialProfile> {
    if u.is_zero() {
        return RadialProfile::sampled(u.dim(), out_grid.clone(), vec![0.0; out_grid.len()], tail_exponent);
    }
    let s = spectrum(u, spec)?;
    let est = synthesize(&s, m, out_grid, spec)?;
    RadialProfile::sampled(u.dim(), out_grid.clone(), est.iter().map(|e| e.value).collect(), tail_exponent)
}

/// [`apply_multiplier_with`] with a rapidly decaying declared tail.
pub fn apply_multiplier(u: &RadialProfile, m: &(dyn Fn(f64) -> f64 + Sync), out_grid: &Grid, spec: &QuadratureSpec) -> Result<RadialProfile> {
    apply_multiplier_with(u, m, out_grid, spec, -2.0 * u.dim() as f64 - 4.0)
}
