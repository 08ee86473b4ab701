//! Means over spheres that do not contain the origin at their centre.
//!
//! For `|x| = ρ` and a sphere of radius `h` about `x`, the points of the
//! sphere have norm `s ∈ [|ρ-h|, ρ+h]`, and the mean of a radial function
//! reduces to a one-dimensional integral in `s` whose weight carries the
//! factor `[(s²-(ρ-h)²)((ρ+h)²-s²)]^{(n-3)/2}`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::profile::RadialProfile;
use crate::quadrature::{integrate, integrate_with_offsets, sum_estimates, QuadratureSpec};
use crate::specfun::gamma;

/// `∫_{-1}^{1} (1-τ²)^{(n-3)/2} dτ`.
pub(crate) fn beta_weight(n: u32) -> f64 {
    let h = 0.5 * (n as f64 - 1.0);
    PI.sqrt() * gamma(h) / gamma(h + 0.5)
}

/// Mean of the radial function `g` over the sphere of radius `h` centred at
/// distance `ρ` from the origin in ℝⁿ. `breaks` are radii where `g` is not
/// smooth.
pub fn shell_mean(g: &dyn Fn(f64) -> f64, n: u32, rho: f64, h: f64, breaks: &[f64], spec: &QuadratureSpec) -> Result<f64> {
    if n == 0 || !(rho >= 0.0 && h >= 0.0 && rho.is_finite() && h.is_finite()) {
        return Err(Error::domain("sphere_mean", format!("need n >= 1 and finite rho, h >= 0; got n={n}, rho={rho}, h={h}")));
    }
    if h == 0.0 {
        return Ok(g(rho));
    }
    if rho == 0.0 {
        return Ok(g(h));
    }
    let a = (rho - h).abs();
    let b = rho + h;
    if n == 1 {
        return Ok(0.5 * (g(a) + g(b)));
    }
    if n == 2 {
        return circle_mean(g, rho, h, a, b, breaks, spec);
    }
    let e = 0.5 * (n as f64 - 3.0);
    let norm = (2.0 * rho * h).powf(3.0 - n as f64) / (rho * h * beta_weight(n));
    let mut cuts = vec![a];
    cuts.extend(breaks.iter().copied().filter(|&x| x > a && x < b));
    cuts.push(b);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut parts = Vec::with_capacity(cuts.len());
    for w in cuts.windows(2) {
        let (p0, p1) = (w[0], w[1]);
        let body = |s: f64, da: f64, db: f64| {
            let ua = if p0 == a { da } else { s - a };
            let ub = if p1 == b { db } else { b - s };
            let weight = if e == 0.0 { 1.0 } else { (ua * (s + a)).powf(e) * (ub * (b + s)).powf(e) };
            g(s) * s * weight
        };
        parts.push(integrate_with_offsets(body, p0, p1, spec)?);
    }
    Ok(sum_estimates(&parts).value * norm)
}

/// In the plane the angular form `(1/π)∫₀^π g(|x - h e^{iθ}|) dθ` has a smooth
/// integrand, unlike the radial form with its inverse square-root weight.
fn circle_mean(g: &dyn Fn(f64) -> f64, rho: f64, h: f64, a: f64, b: f64, breaks: &[f64], spec: &QuadratureSpec) -> Result<f64> {
    let d = rho - h;
    let q = 4.0 * rho * h;
    let dist = |theta: f64| (d * d + q * (0.5 * theta).sin().powi(2)).sqrt();
    let mut cuts = vec![0.0, PI];
    for &r in breaks.iter().filter(|&&r| r > a && r < b) {
        // |x - h e^{iθ}| = r  ⇔  sin²(θ/2) = (r² - d²)/q
        cuts.push(2.0 * ((r * r - d * d) / q).sqrt().min(1.0).asin());
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut parts = Vec::with_capacity(cuts.len());
    for w in cuts.windows(2) {
        parts.push(integrate(|t: f64| g(dist(t)), w[0], w[1], spec)?);
    }
    Ok(sum_estimates(&parts).value / PI)
}

/// Spherical mean of `u` over the sphere of radius `h` centred at a point at
/// distance `ρ` from the origin.
pub fn sphere_mean(u: &RadialProfile, rho: f64, h: f64, spec: &QuadratureSpec) -> Result<f64> {
    shell_mean(&|s| u.value(s), u.dim(), rho, h, &u.breakpoints(), spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default().with_tol(1e-12, 1e-15)
    }

    #[test]
    fn constant_mean_is_one_in_every_dimension() {
        for n in 1..7 {
            let u = RadialProfile::constant(n, 1.0).unwrap();
            for &(rho, h) in &[(0.3, 1.1), (1.0, 1.0), (2.0, 0.5), (0.0, 2.0)] {
                let m = sphere_mean(&u, rho, h, &spec()).unwrap();
                assert!((m - 1.0).abs() < 1e-10, "n={n} rho={rho} h={h}: {m}");
            }
        }
    }

    #[test]
    fn degenerate_sphere_returns_centre_value() {
        let u = RadialProfile::gaussian(3, 1.0).unwrap();
        assert_eq!(sphere_mean(&u, 0.7, 0.0, &spec()).unwrap(), u.eval(0.7).unwrap());
    }

    #[test]
    fn gaussian_mean_in_three_dimensions() {
        let u = RadialProfile::analytic(3, crate::profile::Family::Gaussian { sigma: std::f64::consts::FRAC_1_SQRT_2 }).unwrap();
        for &(rho, h) in &[(1.0f64, 1.0f64), (0.5, 2.0), (3.0, 0.1)] {
            let exact = (-(rho * rho + h * h)).exp() * (2.0 * rho * h).sinh() / (2.0 * rho * h);
            let m = sphere_mean(&u, rho, h, &spec()).unwrap();
            assert!((m - exact).abs() < 1e-12, "{rho} {h}: {m} vs {exact}");
        }
    }

    #[test]
    fn harmonic_functions_have_the_mean_value_property() {
        // 1/r^{n-2} is harmonic off the origin: the mean over a sphere not
        // enclosing the origin equals the centre value.
        for n in 3..7u32 {
            let g = |s: f64| s.powf(2.0 - n as f64);
            for &(rho, h) in &[(2.0, 0.5), (1.0, 0.9), (5.0, 4.0)] {
                let m = shell_mean(&g, n, rho, h, &[], &spec()).unwrap();
                assert!((m / g(rho) - 1.0).abs() < 1e-10, "n={n}");
            }
            // enclosing the origin: the mean is the value on the sphere itself
            let m = shell_mean(&g, n, 0.5, 2.0, &[], &spec()).unwrap();
            assert!((m / g(2.0) - 1.0).abs() < 1e-9, "n={n}");
        }
        let log = |s: f64| s.ln();
        let m = shell_mean(&log, 2, 3.0, 1.5, &[], &spec()).unwrap();
        assert!((m - 3f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn monotone_under_pointwise_ordering() {
        let small = RadialProfile::gaussian(3, 1.0).unwrap();
        let big = RadialProfile::gaussian(3, 1.2).unwrap();
        for i in 0..10 {
            for j in 0..10 {
                let (rho, h) = (0.3 * i as f64, 0.25 * j as f64);
                assert!(sphere_mean(&small, rho, h, &spec()).unwrap() <= sphere_mean(&big, rho, h, &spec()).unwrap() + 1e-15);
            }
        }
    }

    #[test]
    fn annulus_mean_uses_breakpoints() {
        // n=3: mean of χ_{[1,2]} over sphere (ρ=1.5, h=1) = ∫_1^2 s ds /(2ρh)
        let u = RadialProfile::annulus(3, 1.0, 2.0).unwrap();
        let m = sphere_mean(&u, 1.5, 1.0, &spec()).unwrap();
        assert!((m - 1.5 / 3.0).abs() < 1e-12);
    }
}
