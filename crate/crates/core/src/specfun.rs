//! Special functions used by the kernels: Gamma, Bessel functions of the first
//! kind for real order `ν ≥ -1/2`, their positive zeros, and the Bessel
//! potential kernel `G_s`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interp::CubicSpline;
use crate::quadrature::{integrate, QuadratureSpec};

/// Γ(x). Poles at the nonpositive integers are domain errors.
pub fn gamma_fn(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::domain("gamma_fn", "non-finite argument"));
    }
    if x <= 0.0 && x == x.floor() {
        return Err(Error::domain("gamma_fn", format!("pole at {x}")));
    }
    Ok(statrs::function::gamma::gamma(x))
}

pub(crate) fn gamma(x: f64) -> f64 {
    statrs::function::gamma::gamma(x)
}

/// Area of the unit sphere `S^{n-1} ⊂ ℝⁿ`, `2π^{n/2}/Γ(n/2)`.
pub fn surface_area(n: i64) -> Result<f64> {
    if n <= 0 {
        return Err(Error::domain("surface_area", format!("dimension {n} must be positive")));
    }
    Ok(sphere_area(n as u32))
}

pub(crate) fn sphere_area(n: u32) -> f64 {
    let h = n as f64 / 2.0;
    2.0 * PI.powf(h) / gamma(h)
}

/// Order of a Bessel function, restricted to `ν ≥ -1/2`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct BesselOrder(f64);

impl BesselOrder {
    pub fn new(nu: f64) -> Result<Self> {
        if !nu.is_finite() || nu < -0.5 {
            return Err(Error::domain("BesselOrder", format!("order {nu} must be >= -1/2")));
        }
        Ok(Self(nu))
    }

    /// `ν = n/2 - 1`, the order attached to radial functions on ℝⁿ.
    pub fn for_dimension(n: u32) -> Self {
        Self(n as f64 / 2.0 - 1.0)
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// `J_ν(x)` for `x ≥ 0`.
pub fn bessel_j(nu: BesselOrder, x: f64) -> Result<f64> {
    if !x.is_finite() || x < 0.0 {
        return Err(Error::domain("bessel_j", format!("argument {x} must be finite and nonnegative")));
    }
    Ok(j_nu(nu.0, x))
}

/// `x^{-ν} J_ν(x)`, an entire function of `x²` equal to `2^{-ν}/Γ(ν+1)` at 0.
pub fn bessel_j_scaled(nu: BesselOrder, x: f64) -> f64 {
    j_scaled(nu.0, x.abs())
}

pub(crate) fn j_scaled(nu: f64, x: f64) -> f64 {
    if x < 5.0 {
        series_scaled(nu, x)
    } else {
        j_nu(nu, x) / x.powf(nu)
    }
}

fn series_scaled(nu: f64, x: f64) -> f64 {
    let q = -0.25 * x * x;
    let mut term = 1.0 / gamma(nu + 1.0);
    let mut sum = term;
    let mut k = 1.0;
    loop {
        term *= q / (k * (k + nu));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() || k > 200.0 {
            break;
        }
        k += 1.0;
    }
    sum * 2f64.powf(-nu)
}

pub(crate) fn j_nu(nu: f64, x: f64) -> f64 {
    if x == 0.0 {
        return if nu == 0.0 {
            1.0
        } else if nu > 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
    }
    if nu == -0.5 {
        return (2.0 / (PI * x)).sqrt() * x.cos();
    }
    if x < 5.0 || x * x < 4.0 * (nu + 1.0) {
        return series_scaled(nu, x) * x.powf(nu);
    }
    if x >= asymptotic_threshold(nu) {
        return hankel_asymptotic(nu, x);
    }
    miller(nu, x)
}

fn asymptotic_threshold(nu: f64) -> f64 {
    (25.0f64).max(0.5 * nu * nu + 10.0)
}

fn hankel_asymptotic(nu: f64, x: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..60 {
        let kk = k as f64;
        let odd = 2.0 * kk - 1.0;
        term *= (mu - odd * odd) / (kk * 8.0 * x);
        if term.abs() > last {
            break;
        }
        last = term.abs();
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
        if term.abs() < 1e-17 {
            break;
        }
    }
    let chi = x - (0.5 * nu + 0.25) * PI;
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

/// Backward recurrence normalised by
/// `(x/2)^μ = Σ_k (μ+2k) Γ(μ+k)/k! J_{μ+2k}(x)`.
fn miller(nu: f64, x: f64) -> f64 {
    let mu = if nu >= 0.0 { nu - nu.floor() } else { nu };
    let m = (nu - mu).round() as usize;
    let mut top = m.max(x.ceil() as usize) + 30 + (4.0 * x.cbrt()).ceil() as usize;
    if top % 2 == 1 {
        top += 1;
    }
    // g[i] = Γ(μ+i)/i! for i >= 1
    let half = top / 2;
    let mut g = vec![0.0; half + 1];
    if half >= 1 {
        g[1] = gamma(mu + 1.0);
        for i in 2..=half {
            g[i] = g[i - 1] * (mu + i as f64 - 1.0) / i as f64;
        }
    }
    let mut j_next = 0.0;
    let mut j_cur = 1e-30;
    let mut norm = 0.0;
    let mut wanted = if top == m { j_cur } else { 0.0 };
    let mut k = top;
    while k > 0 {
        if k.is_multiple_of(2) {
            let i = k / 2;
            norm += (mu + k as f64) * g[i] * j_cur;
        }
        let j_prev = 2.0 * (mu + k as f64) / x * j_cur - j_next;
        j_next = j_cur;
        j_cur = j_prev;
        k -= 1;
        if k == m {
            wanted = j_cur;
        }
        if j_cur.abs() > 1e250 {
            j_cur *= 1e-250;
            j_next *= 1e-250;
            norm *= 1e-250;
            wanted *= 1e-250;
        }
    }
    norm += gamma(mu + 1.0) * j_cur;
    wanted * (0.5 * x).powf(mu) / norm
}

/// The `k`-th positive zero `j_{ν,k}` of `J_ν`.
pub fn bessel_zero(nu: BesselOrder, k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::domain("bessel_zero", "zero index starts at 1"));
    }
    Ok(*bessel_zeros(nu, k)?.last().expect("k >= 1 zeros"))
}

/// The first `count` positive zeros of `J_ν`, increasing.
pub fn bessel_zeros(nu: BesselOrder, count: usize) -> Result<Vec<f64>> {
    let nu = nu.0;
    let mut zeros = Vec::with_capacity(count);
    let mut x = nu.max(0.0).max(0.5);
    let step = 0.5;
    for _ in 0..count {
        let mut lo = x;
        let mut flo = j_nu(nu, lo);
        let mut found = None;
        for _ in 0..100_000 {
            let hi = lo + step;
            let fhi = j_nu(nu, hi);
            if flo == 0.0 {
                found = Some((lo, lo));
                break;
            }
            if flo.signum() != fhi.signum() {
                found = Some((lo, hi));
                break;
            }
            lo = hi;
            flo = fhi;
        }
        let (mut a, mut b) = found.ok_or_else(|| Error::numeric("bessel_zero", "no sign change found"))?;
        let mut fa = j_nu(nu, a);
        while b - a > 1e-15 * b {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                break;
            }
            let fm = j_nu(nu, mid);
            if fm == 0.0 {
                a = mid;
                b = mid;
                break;
            }
            if fm.signum() == fa.signum() {
                a = mid;
                fa = fm;
            } else {
                b = mid;
            }
        }
        let z = 0.5 * (a + b);
        zeros.push(z);
        x = z + 1.0;
    }
    Ok(zeros)
}

fn check_gs_range(n: u32, s: f64) -> Result<()> {
    if !(s > 0.0 && s < n as f64) {
        return Err(Error::domain("kernel_gs", format!("order s = {s} must satisfy 0 < s < n = {n}")));
    }
    Ok(())
}

/// The Bessel potential kernel `G_s(r)` on ℝⁿ, the kernel of `(I-Δ)^{-s/2}`,
/// evaluated from its subordination integral in the variable `t = e^u`.
pub fn kernel_gs(n: u32, s: f64, r: f64) -> Result<f64> {
    check_gs_range(n, s)?;
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::domain("kernel_gs", format!("radius {r} must be positive")));
    }
    let a = 0.5 * (s - n as f64);
    let r2 = 0.25 * r * r;
    let phi = |u: f64| -u.exp() - r2 * (-u).exp() + a * u;
    // peak of the log-concave integrand: t^2 - a t - r^2/4 = 0
    let disc = (0.25 * a * a + r2).sqrt();
    // for a < 0 the sum cancels at small r; use the product of the roots instead
    let t_star = if a >= 0.0 { 0.5 * a + disc } else { r2 / (disc - 0.5 * a) };
    let u_star = t_star.ln();
    let peak = phi(u_star);
    let mut lo = 1.0;
    while phi(u_star - lo) - peak > -745.0 {
        lo *= 1.5;
    }
    let mut hi = 1.0;
    while phi(u_star + hi) - peak > -745.0 {
        hi *= 1.5;
    }
    let spec = QuadratureSpec::default().with_tol(1e-13, 1e-300);
    let body = |u: f64| (phi(u) - peak).exp();
    let left = integrate(body, u_star - lo, u_star, &spec)?;
    let right = integrate(body, u_star, u_star + hi, &spec)?;
    let prefactor = (4.0 * PI).powf(-(n as f64) / 2.0) / gamma(0.5 * s);
    Ok(prefactor * (left.value + right.value) * peak.exp())
}

/// `G_s` tabulated once on a log-uniform grid and interpolated.
///
/// The cached quantity is `ln(r^{n-s} G_s(r))`, which tends to a constant as
/// `r → 0` and is smooth in `ln r`; below the grid the leading power law is
/// continued, beyond it the kernel is treated as zero.
#[derive(Debug, Clone)]
pub struct KernelGs {
    n: u32,
    s: f64,
    r_min: f64,
    r_max: f64,
    spline: CubicSpline,
}

impl KernelGs {
    pub fn new(n: u32, s: f64) -> Result<Self> {
        Self::with_grid(n, s, 1e-6, 80.0, 0.01)
    }

    pub fn with_grid(n: u32, s: f64, r_min: f64, r_max: f64, log_step: f64) -> Result<Self> {
        check_gs_range(n, s)?;
        let m = ((r_max / r_min).ln() / log_step).ceil() as usize + 1;
        let step = (r_max / r_min).ln() / (m - 1) as f64;
        let xs: Vec<f64> = (0..m).map(|i| r_min.ln() + step * i as f64).collect();
        let ys = xs
            .iter()
            .map(|&x| {
                let r = x.exp();
                kernel_gs(n, s, r).map(|g| g.ln() + (n as f64 - s) * x)
            })
            .collect::<Result<Vec<f64>>>()?;
        Ok(Self { n, s, r_min, r_max, spline: CubicSpline::natural(xs, ys)? })
    }

    pub fn dimension(&self) -> u32 {
        self.n
    }

    pub fn order(&self) -> f64 {
        self.s
    }

    pub fn eval(&self, r: f64) -> f64 {
        if r >= self.r_max {
            return 0.0;
        }
        let x = r.max(self.r_min).ln();
        (self.spline.eval(x)).exp() * r.powf(self.s - self.n as f64)
    }

    pub fn support_radius(&self) -> f64 {
        self.r_max
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Power series with an explicit remainder bound; used as the oracle.
    fn series_oracle(nu: f64, x: f64) -> f64 {
        let mut term = (0.5 * x).powf(nu) / gamma(nu + 1.0);
        let mut sum = 0.0;
        let mut k = 0.0;
        while k < 400.0 {
            sum += term;
            k += 1.0;
            term *= -0.25 * x * x / (k * (k + nu));
            if term.abs() < 1e-18 && k > x {
                break;
            }
        }
        sum
    }

    #[test]
    fn gamma_values() {
        assert!((gamma_fn(1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((gamma_fn(5.0).unwrap() - 24.0).abs() < 1e-12);
        assert!((gamma_fn(0.5).unwrap() - PI.sqrt()).abs() < 1e-13);
        assert!(gamma_fn(0.0).is_err());
        assert!(gamma_fn(-3.0).is_err());
    }

    #[test]
    fn gamma_relative_accuracy_on_integers_and_half_integers() {
        let mut fact = 1.0f64;
        for k in 1..50 {
            let g = gamma_fn(k as f64).unwrap();
            assert!((g / fact - 1.0).abs() < 1e-12, "k={k}");
            fact *= k as f64;
        }
        // Γ(k+1/2) = (2k)! √π / (4^k k!)
        let mut v = PI.sqrt();
        for k in 0..40 {
            let g = gamma_fn(k as f64 + 0.5).unwrap();
            assert!((g / v - 1.0).abs() < 1e-12, "k={k}");
            v *= k as f64 + 0.5;
        }
    }

    #[test]
    fn surface_areas() {
        assert!((surface_area(2).unwrap() - 2.0 * PI).abs() < 1e-14);
        assert!((surface_area(3).unwrap() - 4.0 * PI).abs() < 1e-13);
        assert!((surface_area(4).unwrap() - 2.0 * PI * PI).abs() < 1e-13);
        assert!(surface_area(0).is_err());
    }

    #[test]
    fn surface_area_matches_recursive_integration() {
        // |S^{n-1}| = |S^{n-2}| ∫_0^π sin^{n-2}θ dθ
        let spec = QuadratureSpec::default().with_tol(1e-13, 1e-15);
        for n in 2..8u32 {
            let inner = integrate(|t: f64| t.sin().powi(n as i32 - 2), 0.0, PI, &spec).unwrap().value;
            let rec = sphere_area(n - 1) * inner;
            assert!((rec / sphere_area(n) - 1.0).abs() < 1e-12, "n={n}");
        }
    }

    #[test]
    fn bessel_special_values() {
        let o0 = BesselOrder::new(0.0).unwrap();
        let oh = BesselOrder::new(0.5).unwrap();
        assert_eq!(bessel_j(o0, 0.0).unwrap(), 1.0);
        assert!(bessel_j(oh, PI).unwrap().abs() < 1e-15);
        assert!(bessel_j(o0, 2.404_825_557_695_773).unwrap().abs() < 1e-10);
        assert!(BesselOrder::new(-0.6).is_err());
        assert!(bessel_j(o0, -1.0).is_err());
    }

    #[test]
    fn bessel_matches_series_oracle_across_regimes() {
        for &nu in &[-0.5, 0.0, 0.5, 1.0, 1.5, 2.0, 3.5] {
            for i in 1..80 {
                let x = 0.1 * i as f64;
                let exact = series_oracle(nu, x);
                let got = j_nu(nu, x);
                assert!((got - exact).abs() < 1e-12, "nu={nu} x={x} got={got} exact={exact}");
            }
        }
    }

    // Poisson's integral, J_ν(x) = (x/2)^ν/(√π Γ(ν+1/2)) ∫_{-1}^{1} (1-t²)^{ν-1/2} cos(xt) dt.
    fn poisson_oracle(nu: f64, x: f64) -> f64 {
        let rule = if nu < 0.5 {
            crate::quadrature::EndpointRule::DoubleExponential
        } else {
            crate::quadrature::EndpointRule::Gauss
        };
        let spec = QuadratureSpec::default().with_rule(rule).with_tol(1e-13, 1e-13);
        let body = crate::quadrature::integrate_with_offsets(
            |t: f64, da: f64, db: f64| (da * db).powf(nu - 0.5) * (x * t).cos(),
            -1.0,
            1.0,
            &spec,
        )
        .unwrap()
        .value;
        (0.5 * x).powf(nu) / (PI.sqrt() * gamma(nu + 0.5)) * body
    }

    #[test]
    fn bessel_matches_poisson_integral_at_moderate_argument() {
        for &nu in &[0.0, 0.3, 1.0, 1.5, 2.0, 3.5] {
            for i in 0..120 {
                let x = 4.0 + 0.37 * i as f64;
                let exact = poisson_oracle(nu, x);
                let got = j_nu(nu, x);
                assert!((got - exact).abs() < 5e-12, "nu={nu} x={x} got={got} exact={exact}");
            }
        }
    }

    #[test]
    fn half_integer_closed_forms_at_large_argument() {
        for i in 0..200 {
            let x = 5.0 + 1.37 * i as f64;
            let j_half = (2.0 / (PI * x)).sqrt() * x.sin();
            let j_three_halves = (2.0 / (PI * x)).sqrt() * (x.sin() / x - x.cos());
            assert!((j_nu(0.5, x) - j_half).abs() < 1e-14, "x={x}");
            assert!((j_nu(1.5, x) - j_three_halves).abs() < 1e-14, "x={x}");
        }
    }

    #[test]
    fn miller_and_asymptotic_agree_at_the_switch() {
        for &nu in &[0.0, 1.0, 2.0] {
            let x = asymptotic_threshold(nu);
            let a = miller(nu, x + 0.3);
            let b = hankel_asymptotic(nu, x + 0.3);
            assert!((a - b).abs() < 1e-13, "nu={nu}: {a} vs {b}");
        }
    }

    #[test]
    fn scaled_kernel_is_continuous_at_switch() {
        for &nu in &[0.0, 0.5, 1.0] {
            let lo = series_scaled(nu, 5.0);
            let hi = miller(nu, 5.0) / 5f64.powf(nu);
            assert!((lo - hi).abs() < 1e-12, "nu={nu}: {lo} {hi}");
        }
        assert!((j_scaled(0.5, 0.0) - (2.0 / PI).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn zeros_of_half_order_are_multiples_of_pi() {
        let oh = BesselOrder::new(0.5).unwrap();
        assert!((bessel_zero(oh, 1).unwrap() - PI).abs() < 1e-12 * PI);
        assert!((bessel_zero(oh, 3).unwrap() - 3.0 * PI).abs() < 1e-12 * 3.0 * PI);
        let z0 = bessel_zero(BesselOrder::new(0.0).unwrap(), 1).unwrap();
        assert!((z0 - 2.404_825_557_695_773).abs() < 1e-12 * z0);
        assert!(bessel_zero(oh, 0).is_err());
    }

    #[test]
    fn zeros_interlace() {
        let orders = [0.0, 0.5, 1.0, 1.5, 2.0];
        for &nu in &orders[..4] {
            let a = bessel_zeros(BesselOrder::new(nu).unwrap(), 30).unwrap();
            let b = bessel_zeros(BesselOrder::new(nu + 1.0).unwrap(), 30).unwrap();
            for k in 0..29 {
                assert!(a[k] < b[k] && b[k] < a[k + 1], "nu={nu} k={k}");
            }
        }
    }

    #[test]
    fn many_zeros_stay_increasing_for_large_order() {
        let z = bessel_zeros(BesselOrder::new(50.0).unwrap(), 40).unwrap();
        assert!(z.windows(2).all(|w| w[1] > w[0] + 3.0));
        assert!(z[0] > 50.0);
        for &x in &z {
            assert!(j_nu(50.0, x).abs() < 1e-12);
        }
    }

    #[test]
    fn bessel_decay_bound_is_grid_stable() {
        for &nu in &[0.0, 0.5, 1.0, 1.5, 2.0] {
            let sup = |m: usize| {
                (0..m)
                    .map(|i| 0.5 + (1000.0 - 0.5) * i as f64 / (m - 1) as f64)
                    .map(|x| x.sqrt() * j_nu(nu, x).abs())
                    .fold(0.0, f64::max)
            };
            let (a, b) = (sup(20_000), sup(40_000));
            assert!(a.is_finite() && a < 1.0);
            assert!((a - b).abs() / b < 1e-3, "nu={nu}: {a} {b}");
        }
    }

    #[test]
    fn yukawa_kernel_in_three_dimensions() {
        for i in 0..60 {
            let r = 0.01 * 10f64.powf(3.0 * i as f64 / 59.0);
            let exact = (-r).exp() / (4.0 * PI * r);
            let g = kernel_gs(3, 2.0, r).unwrap();
            assert!((g / exact - 1.0).abs() < 1e-10, "r={r}");
        }
        assert!((kernel_gs(3, 2.0, 1.0).unwrap() - 0.029_274_92).abs() < 1e-8);
    }

    #[test]
    fn kernel_gs_near_the_origin() {
        // r^{n-s} G_s(r) → Γ((n-s)/2) / (2^s π^{n/2} Γ(s/2))
        for (n, s) in [(3u32, 2.0), (3, 1.0), (2, 1.0), (4, 3.0), (2, 0.5)] {
            let limit = gamma_fn(0.5 * (n as f64 - s)).unwrap() / (2f64.powf(s) * PI.powf(0.5 * n as f64) * gamma_fn(0.5 * s).unwrap());
            for r in [1e-14, 1e-10, 1e-8] {
                let g = kernel_gs(n, s, r).unwrap() * r.powf(n as f64 - s);
                assert!((g / limit - 1.0).abs() < 1e-4, "({n},{s}) r={r}: {g} vs {limit}");
            }
        }
    }

    #[test]
    fn kernel_gs_range_checks() {
        assert!(kernel_gs(3, 3.0, 1.0).is_err());
        assert!(kernel_gs(3, 0.0, 1.0).is_err());
        assert!(kernel_gs(3, 1.0, 0.0).is_err());
    }

    #[test]
    fn tabulated_kernel_tracks_direct_evaluation() {
        let k = KernelGs::new(3, 1.0).unwrap();
        for i in 0..50 {
            let r = 1e-5 * 10f64.powf(6.5 * i as f64 / 49.0);
            let g = kernel_gs(3, 1.0, r).unwrap();
            assert!((k.eval(r) / g - 1.0).abs() < 1e-8, "r={r} {} {g}", k.eval(r));
        }
    }
}
