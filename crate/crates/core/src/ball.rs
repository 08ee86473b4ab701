//! Radial Dirichlet spectral theory on the ball `B(0,R)`.
//!
//! The radial Dirichlet eigenfunctions are
//! `φ_k(x) = a_k |x|^{-ν} J_ν(j_{ν,k}|x|/R)`, `ν = n/2 - 1`, with eigenvalues
//! `λ_k = (j_{ν,k}/R)²`. The fractional inverse `(-Δ_B)^{-s/2}` acts on radial
//! data by `Σ_k λ_k^{-s/2} ⟨f,φ_k⟩ φ_k`, truncated at `K` modes.
//!
//! Only the radial sector is represented: non-radial modes have zero
//! coefficients against radial data.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::norms::{weighted_lp_norm, WeightedNormSpec};
use crate::profile::RadialProfile;
use crate::quadrature::{composite_rule, integrate, QuadratureSpec};
use crate::specfun::{bessel_zeros, j_scaled, sphere_area, BesselOrder};
use crate::sphere::shell_mean;

/// Radial Dirichlet eigenpairs of `-Δ` on `B(0,R)`, truncated at `K` modes.
#[derive(Debug, Clone, PartialEq)]
pub struct BallSpectrum {
    n: u32,
    radius: f64,
    nu: f64,
    zeros: Vec<f64>,
    eigenvalues: Vec<f64>,
    normalizers: Vec<f64>,
    // b_k = a_k (j_k/R)^ν, so that φ_k(r) = b_k · j_scaled(ν, j_k r/R)
    scaled: Vec<f64>,
    normalizer_drift: f64,
    orthonormality: f64,
    tail_tolerance: f64,
}

/// Summary of the numerical checks run by [`build_spectrum`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumChecks {
    /// `max |⟨φ_i,φ_j⟩ - δ_ij|` over `i, j ≤ K`.
    pub orthonormality: f64,
    /// Largest relative change of a normalizer when the quadrature panels are halved.
    pub normalizer_drift: f64,
    /// `max_k` of the finite-difference eigen-residual, relative to `λ_k ‖φ_k‖_∞`.
    pub eigen_residual: f64,
}

const ORTHONORMALITY_TOL: f64 = 1e-8;
const EIGEN_RESIDUAL_TOL: f64 = 1e-5;

/// Builds the first `k` radial eigenpairs on `B(0, radius)` in ℝⁿ and checks
/// orthonormality and the eigen-equation.
pub fn build_spectrum(n: u32, radius: f64, k: usize) -> Result<BallSpectrum> {
    if n < 2 {
        return Err(Error::domain("build_spectrum", format!("dimension {n} must be at least 2")));
    }
    if !(radius > 0.0 && radius.is_finite()) || k == 0 {
        return Err(Error::domain("build_spectrum", format!("need R > 0 and K >= 1, got R={radius}, K={k}")));
    }
    let nu = 0.5 * n as f64 - 1.0;
    let zeros = bessel_zeros(BesselOrder::new(nu)?, k)?;
    let eigenvalues: Vec<f64> = zeros.iter().map(|j| (j / radius).powi(2)).collect();
    if !(eigenvalues[0] > 0.0) || eigenvalues.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::numeric("build_spectrum", "eigenvalues are not positive and strictly increasing"));
    }

    let coarse = raw_norms(n, radius, nu, &zeros, 4 * k.max(16));
    let fine = raw_norms(n, radius, nu, &zeros, 8 * k.max(16));
    let normalizer_drift = coarse.iter().zip(&fine).map(|(c, f)| (c / f - 1.0).abs()).fold(0.0, f64::max);
    let scaled: Vec<f64> = fine.iter().map(|m| 1.0 / m.sqrt()).collect();
    let normalizers = scaled.iter().zip(&zeros).map(|(b, j)| b * (j / radius).powf(-nu)).collect();

    let mut spectrum = BallSpectrum {
        n,
        radius,
        nu,
        zeros,
        eigenvalues,
        normalizers,
        scaled,
        normalizer_drift,
        orthonormality: f64::NAN,
        tail_tolerance: 1e-6,
    };
    spectrum.orthonormality = spectrum.gram_defect();
    if !(spectrum.orthonormality < ORTHONORMALITY_TOL) {
        return Err(Error::numeric("build_spectrum", format!("orthonormality defect {:e} exceeds {ORTHONORMALITY_TOL:e}", spectrum.orthonormality)));
    }
    let residual = spectrum.eigen_residual();
    if !(residual < EIGEN_RESIDUAL_TOL) {
        return Err(Error::numeric("build_spectrum", format!("eigen-residual {residual:e} exceeds {EIGEN_RESIDUAL_TOL:e}")));
    }
    Ok(spectrum)
}

/// `|S^{n-1}| ∫₀^R ψ_k(r)² r^{n-1} dr` with `ψ_k(r) = j_scaled(ν, j_k r/R)`.
fn raw_norms(n: u32, radius: f64, nu: f64, zeros: &[f64], panels: usize) -> Vec<f64> {
    let (xs, ws) = composite_rule(&uniform_breaks(radius, panels));
    let area = sphere_area(n);
    zeros
        .iter()
        .map(|&j| {
            let terms: Vec<f64> = xs
                .iter()
                .zip(&ws)
                .map(|(&r, &w)| {
                    let v = j_scaled(nu, j * r / radius);
                    w * v * v * r.powi(n as i32 - 1)
                })
                .collect();
            area * crate::quadrature::pairwise_sum(&terms)
        })
        .collect()
}

fn uniform_breaks(radius: f64, panels: usize) -> Vec<f64> {
    (0..=panels).map(|i| radius * i as f64 / panels as f64).collect()
}

impl BallSpectrum {
    pub fn dim(&self) -> u32 {
        self.n
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Number of modes `K`.
    pub fn modes(&self) -> usize {
        self.zeros.len()
    }

    /// Bessel order `ν = n/2 - 1`.
    pub fn order(&self) -> f64 {
        self.nu
    }

    /// `λ_1, …, λ_K`.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// `a_1, …, a_K`.
    pub fn normalizers(&self) -> &[f64] {
        &self.normalizers
    }

    /// Relative tolerance on `(tail estimate)^{1/2} / ‖u_K‖₂` above which
    /// [`ball_frac_inverse`] attaches a truncation warning.
    pub fn tail_tolerance(&self) -> f64 {
        self.tail_tolerance
    }

    pub fn with_tail_tolerance(mut self, tol: f64) -> Result<Self> {
        if !(tol > 0.0) {
            return Err(Error::domain("BallSpectrum", "tail tolerance must be positive"));
        }
        self.tail_tolerance = tol;
        Ok(self)
    }

    pub fn checks(&self) -> SpectrumChecks {
        SpectrumChecks { orthonormality: self.orthonormality, normalizer_drift: self.normalizer_drift, eigen_residual: self.eigen_residual() }
    }

    /// `φ_k(r)` for `1 ≤ k ≤ K`; zero outside the ball.
    pub fn eigenfunction(&self, k: usize, r: f64) -> Result<f64> {
        if k == 0 || k > self.modes() {
            return Err(Error::domain("eigenfunction", format!("mode {k} outside 1..={}", self.modes())));
        }
        if !(r >= 0.0 && r.is_finite()) {
            return Err(Error::domain("eigenfunction", format!("radius {r} must be finite and nonnegative")));
        }
        Ok(self.phi(k - 1, r))
    }

    fn phi(&self, i: usize, r: f64) -> f64 {
        if r >= self.radius {
            return 0.0;
        }
        self.scaled[i] * j_scaled(self.nu, self.zeros[i] * r / self.radius)
    }

    /// `φ_k` sampled on [`Self::output_grid`], as a profile on ℝⁿ vanishing
    /// outside the ball.
    pub fn eigenfunction_profile(&self, k: usize) -> Result<RadialProfile> {
        self.eigenfunction(k, 0.0)?;
        let grid = self.output_grid()?;
        let values = grid.radii().iter().map(|&r| self.phi(k - 1, r)).collect();
        sampled_on_ball(self.n, grid, values)
    }

    /// Grid on `(0, R]` fine enough to resolve `φ_K`: log-spaced near the
    /// origin, then uniform with about ten points per half-oscillation.
    pub fn output_grid(&self) -> Result<Grid> {
        let r = self.radius;
        let m = (10 * self.modes()).max(400);
        let mut radii: Vec<f64> = Grid::log_uniform(1e-4 * r, 0.01 * r, 24)?.radii()[..23].to_vec();
        let h = 0.99 * r / m as f64;
        radii.extend((0..=m).map(|i| 0.01 * r + h * i as f64));
        *radii.last_mut().expect("nonempty") = r;
        Grid::explicit(radii)
    }

    /// Coefficients `⟨f, φ_k⟩_{L²(B)}`, `k = 1..K`.
    pub fn coefficients(&self, f: &RadialProfile) -> Result<Vec<f64>> {
        if f.dim() != self.n {
            return Err(Error::domain("ball coefficients", format!("profile dimension {} differs from ball dimension {}", f.dim(), self.n)));
        }
        let (xs, ws) = composite_rule(&self.projection_breaks(&f.breakpoints()));
        let area = sphere_area(self.n);
        let fw: Vec<f64> = xs.iter().zip(&ws).map(|(&r, &w)| w * f.value(r) * r.powi(self.n as i32 - 1)).collect();
        if fw.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("ball coefficients", "profile is not finite on the ball"));
        }
        Ok((0..self.modes())
            .map(|i| {
                let terms: Vec<f64> = xs.iter().zip(&fw).map(|(&r, &v)| v * self.phi(i, r)).collect();
                area * crate::quadrature::pairwise_sum(&terms)
            })
            .collect())
    }

    /// Uniform panels of width `R/(4K)` (at most), refined geometrically
    /// towards the origin, plus the profile's own break radii.
    fn projection_breaks(&self, extra: &[f64]) -> Vec<f64> {
        let r = self.radius;
        let panels = 4 * self.modes().max(16);
        let first = r / panels as f64;
        let mut breaks: Vec<f64> = (0..40).map(|i| first * 0.5f64.powi(40 - i)).collect();
        breaks.insert(0, 0.0);
        breaks.extend(uniform_breaks(r, panels).into_iter().skip(1));
        breaks.extend(extra.iter().copied().filter(|&b| b > 0.0 && b < r));
        breaks.sort_by(f64::total_cmp);
        breaks.dedup();
        breaks
    }

    fn gram_defect(&self) -> f64 {
        let (xs, ws) = composite_rule(&self.projection_breaks(&[]));
        let area = sphere_area(self.n);
        let rows: Vec<Vec<f64>> = (0..self.modes()).map(|i| xs.iter().map(|&r| self.phi(i, r)).collect()).collect();
        let weights: Vec<f64> = xs.iter().zip(&ws).map(|(&r, &w)| area * w * r.powi(self.n as i32 - 1)).collect();
        let mut worst = 0.0f64;
        for i in 0..rows.len() {
            for j in 0..=i {
                let terms: Vec<f64> = (0..xs.len()).map(|m| weights[m] * rows[i][m] * rows[j][m]).collect();
                let g = crate::quadrature::pairwise_sum(&terms);
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g - target).abs());
            }
        }
        worst
    }

    /// `max_k max_r |-φ_k'' - (n-1)φ_k'/r - λ_k φ_k| / (λ_k max|φ_k|)` over
    /// interior nodes, with fourth-order central differences.
    pub fn eigen_residual(&self) -> f64 {
        let nodes = 200;
        let mut worst = 0.0f64;
        for i in 0..self.modes() {
            let lambda = self.eigenvalues[i];
            let h = 0.02 / lambda.sqrt();
            let f = |r: f64| self.scaled[i] * j_scaled(self.nu, self.zeros[i] * r / self.radius);
            let mut res = 0.0f64;
            let mut peak = 0.0f64;
            for m in 1..nodes {
                let r = self.radius * m as f64 / nodes as f64;
                let (fm2, fm1, f0, fp1, fp2) = (f(r - 2.0 * h), f(r - h), f(r), f(r + h), f(r + 2.0 * h));
                let d1 = (fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * h);
                let d2 = (-fm2 + 16.0 * fm1 - 30.0 * f0 + 16.0 * fp1 - fp2) / (12.0 * h * h);
                let lap = d2 + (self.n as f64 - 1.0) / r * d1;
                res = res.max((lap + lambda * f0).abs());
                peak = peak.max(f0.abs());
            }
            worst = worst.max(res / (lambda * peak));
        }
        worst
    }
}

fn sampled_on_ball(n: u32, grid: Grid, mut values: Vec<f64>) -> Result<RadialProfile> {
    // the last node is R, where every mode vanishes; an exact zero there makes
    // the profile vanish outside the ball
    *values.last_mut().expect("nonempty grid") = 0.0;
    RadialProfile::sampled(n, grid, values, -1.0)
}

/// Truncated eigen-expansion of `(-Δ_B)^{-s/2} f`.
#[derive(Debug, Clone, PartialEq)]
pub struct BallInverse {
    spectrum: BallSpectrum,
    s: f64,
    coefficients: Vec<f64>,
    /// `Σ_{k>K} λ_k^{-s} |⟨f,φ_k⟩|²`, extrapolated from the decay of the
    /// computed coefficients; `+∞` when the extrapolated series diverges.
    pub tail_estimate: f64,
    /// `‖u_K‖²_{L²(B)} = Σ_{k≤K} λ_k^{-s} |⟨f,φ_k⟩|²`.
    pub truncated_norm_sq: f64,
    /// Set when `√tail / ‖u_K‖₂` exceeds the spectrum's tail tolerance.
    pub truncation_warning: Option<String>,
}

impl BallInverse {
    pub fn order(&self) -> f64 {
        self.s
    }

    /// `⟨f, φ_k⟩`, `k = 1..K`.
    pub fn data_coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// Value of the truncated expansion at radius `r` (zero for `r ≥ R`).
    pub fn eval(&self, r: f64) -> f64 {
        let sp = &self.spectrum;
        let terms: Vec<f64> = (0..sp.modes()).map(|i| sp.eigenvalues[i].powf(-0.5 * self.s) * self.coefficients[i] * sp.phi(i, r)).collect();
        crate::quadrature::pairwise_sum(&terms)
    }

    /// The expansion sampled on the spectrum's output grid.
    pub fn profile(&self) -> Result<RadialProfile> {
        let grid = self.spectrum.output_grid()?;
        let values = grid.radii().iter().map(|&r| self.eval(r)).collect();
        sampled_on_ball(self.spectrum.n, grid, values)
    }

    /// `‖∇u_K‖²₂ = Σ_k λ_k^{1-s} |⟨f,φ_k⟩|²`.
    pub fn gradient_norm_sq(&self) -> f64 {
        let sp = &self.spectrum;
        let terms: Vec<f64> = (0..sp.modes()).map(|i| sp.eigenvalues[i].powf(1.0 - self.s) * self.coefficients[i].powi(2)).collect();
        crate::quadrature::pairwise_sum(&terms)
    }
}

/// `(-Δ_B)^{-s/2} f` by the truncated eigen-expansion, `s > 0`.
pub fn ball_frac_inverse(f: &RadialProfile, s: f64, spectrum: &BallSpectrum) -> Result<BallInverse> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::domain("ball_frac_inverse", format!("order s = {s} must be positive")));
    }
    let coefficients = spectrum.coefficients(f)?;
    let lam = &spectrum.eigenvalues;
    let head: Vec<f64> = coefficients.iter().zip(lam).map(|(c, l)| l.powf(-s) * c * c).collect();
    let truncated_norm_sq = crate::quadrature::pairwise_sum(&head);
    let tail_estimate = extrapolated_tail(&coefficients, spectrum, s);
    let ratio = (tail_estimate / truncated_norm_sq).sqrt();
    let truncation_warning = if truncated_norm_sq > 0.0 && !(ratio <= spectrum.tail_tolerance) {
        Some(format!(
            "K = {} modes leave an estimated relative L2 tail of {ratio:.2e} (tolerance {:.1e}); increase K",
            spectrum.modes(),
            spectrum.tail_tolerance
        ))
    } else {
        None
    };
    Ok(BallInverse { spectrum: spectrum.clone(), s, coefficients, tail_estimate, truncated_norm_sq, truncation_warning })
}

/// Fits `|c_k| ≈ C k^{-β}` on the upper half of the computed modes and sums
/// `λ_k^{-s} C² k^{-2β}` over `k > K`, with `λ_k` from McMahon's expansion
/// `j_{ν,k} ≈ (k + ν/2 - 1/4)π`.
fn extrapolated_tail(c: &[f64], spectrum: &BallSpectrum, s: f64) -> f64 {
    let k = c.len();
    let peak = c.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if peak == 0.0 {
        return 0.0;
    }
    let lo = (k / 2).max(1);
    let window: Vec<(f64, f64)> = (lo..k)
        .filter(|&i| c[i].abs() > 1e-13 * peak)
        .map(|i| (((i + 1) as f64).ln(), c[i].abs().ln()))
        .collect();
    if window.len() < 2 {
        // coefficients beyond K/2 are at rounding level
        return 0.0;
    }
    let m = window.len() as f64;
    let (sx, sy) = window.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / m, sy / m);
    let (sxy, sxx) = window.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + (x - mx) * (y - my), b + (x - mx) * (x - mx)));
    let slope = sxy / sxx;
    // envelope through the largest coefficient of the window, so oscillating
    // magnitudes are bounded rather than averaged
    let offset = window.iter().map(|(x, y)| y - slope * x).fold(f64::NEG_INFINITY, f64::max);
    let decay = 2.0 * slope - 2.0 * s;
    if decay >= -1.0 {
        return f64::INFINITY;
    }
    let lambda = |j: f64| ((j + 0.5 * spectrum.nu - 0.25) * std::f64::consts::PI / spectrum.radius).powi(2);
    let term = |j: f64| lambda(j).powf(-s) * (2.0 * (offset + slope * j.ln())).exp();
    let stop = 20 * k;
    let terms: Vec<f64> = (k + 1..=stop).map(|j| term(j as f64)).collect();
    let last = stop as f64;
    crate::quadrature::pairwise_sum(&terms) + term(last) * last / (-decay - 1.0)
}

/// Outcome of a Ni-type ratio measurement on the ball.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NiBallReport {
    pub n: u32,
    pub s: f64,
    pub p: f64,
    /// `sup_r r^{n/p-s} |u(r)| / ‖f‖_{L^p(B)}`; `None` for zero data.
    pub ratio: Option<f64>,
    /// Radius where the supremum was attained.
    pub argmax: Option<f64>,
    /// Set when `f ≡ 0`, for which the ratio is undefined.
    pub degenerate: bool,
    /// For `p = 2`, `s = 1`, `n ≥ 3`: `sup r^{(n-2)/2}|u| / ‖∇u‖₂`.
    pub gradient_ratio: Option<f64>,
    /// `(ω_n (n-2))^{-1/2}`, with `ω_n = |S^{n-1}|`, when `gradient_ratio` is set.
    pub gradient_bound: Option<f64>,
    pub truncation_warning: Option<String>,
}

/// `(|S^{n-1}|(n-2))^{-1/2}`, the constant of the `H¹₀` form of Ni's inequality.
pub fn ni_gradient_constant(n: u32) -> Result<f64> {
    if n < 3 {
        return Err(Error::domain("ni_gradient_constant", format!("dimension {n} must be at least 3")));
    }
    Ok((sphere_area(n) * (n as f64 - 2.0)).powf(-0.5))
}

/// Measures `sup |x|^{n/p-s} |u(x)| / ‖f‖_{L^p(B)}` for `u = (-Δ_B)^{-s/2} f`.
///
/// Requires `1 < p < ∞` and `1/p < s < n/p`. For `p < 2` the data must also lie in `L²(B)`,
/// which the eigen-expansion needs.
pub fn ni_ball_ratio(f: &RadialProfile, s: f64, p: f64, spectrum: &BallSpectrum) -> Result<NiBallReport> {
    let n = spectrum.n;
    let mut violated = Vec::new();
    if !(p > 1.0 && p.is_finite()) {
        violated.push(format!("1 < p < inf (p = {p})"));
    } else {
        if !(1.0 / p < s) {
            violated.push(format!("1/p < s (1/p = {}, s = {s})", 1.0 / p));
        }
        if !(s < n as f64 / p) {
            violated.push(format!("s < n/p (n/p = {}, s = {s})", n as f64 / p));
        }
    }
    if !violated.is_empty() {
        return Err(Error::Inadmissible { theorem: "NiBall_8_1".into(), violated });
    }
    let qspec = QuadratureSpec::default().with_tol(1e-10, 1e-300);
    let ball = |q: f64| WeightedNormSpec::lp(q, n).and_then(|w| w.on_ball(spectrum.radius));
    let f_norm = weighted_lp_norm(f, &ball(p)?, &qspec)?;
    if !f_norm.is_finite() {
        return Err(Error::domain("ni_ball_ratio", format!("data is not in L^{p}(B)")));
    }
    if p < 2.0 && !weighted_lp_norm(f, &ball(2.0)?, &qspec)?.is_finite() {
        return Err(Error::domain("ni_ball_ratio", "data must lie in L2(B) for the eigen-expansion"));
    }
    let gradient = p == 2.0 && s == 1.0 && n >= 3;
    let empty = NiBallReport {
        n,
        s,
        p,
        ratio: None,
        argmax: None,
        degenerate: true,
        gradient_ratio: None,
        gradient_bound: if gradient { Some(ni_gradient_constant(n)?) } else { None },
        truncation_warning: None,
    };
    if f.is_zero() || f_norm.value == 0.0 {
        return Ok(empty);
    }
    let u = ball_frac_inverse(f, s, spectrum)?;
    let grid = spectrum.output_grid()?;
    let weighted_sup = |a: f64| {
        grid.radii().iter().map(|&r| (r, r.powf(a) * u.eval(r).abs())).fold((0.0, 0.0), |best, cur| if cur.1 > best.1 { cur } else { best })
    };
    let (argmax, sup) = weighted_sup(n as f64 / p - s);
    let gradient_ratio = if gradient { Some(weighted_sup(0.5 * (n as f64 - 2.0)).1 / u.gradient_norm_sq().sqrt()) } else { None };
    Ok(NiBallReport {
        ratio: Some(sup / f_norm.value),
        argmax: Some(argmax),
        degenerate: false,
        gradient_ratio,
        truncation_warning: u.truncation_warning.clone(),
        ..empty
    })
}

/// `sup_r r^{(n-2)/2}|u(r)| / ‖∇u‖_{L²(B)}` for a profile `u` vanishing on
/// the boundary of `B(0, radius)`, `n ≥ 3`.
pub fn gradient_form_ratio(u: &RadialProfile, radius: f64) -> Result<f64> {
    let n = u.dim();
    ni_gradient_constant(n)?;
    if !(radius > 0.0) {
        return Err(Error::domain("gradient_form_ratio", "radius must be positive"));
    }
    let spec = QuadratureSpec::default().with_tol(1e-11, 1e-300);
    let mut breaks: Vec<f64> = u.breakpoints().into_iter().filter(|&b| b > 0.0 && b < radius).collect();
    breaks.push(radius);
    breaks.sort_by(f64::total_cmp);
    let mut energy = 0.0;
    let mut lo = 0.0;
    for b in breaks {
        energy += integrate(|r: f64| u.derivative(r).powi(2) * r.powi(n as i32 - 1), lo, b, &spec)?.value;
        lo = b;
    }
    let energy = (sphere_area(n) * energy).sqrt();
    if energy == 0.0 {
        return Err(Error::domain("gradient_form_ratio", "zero Dirichlet energy"));
    }
    let m = 4000;
    let e = 0.5 * (n as f64 - 2.0);
    let sup = (1..=m).map(|i| radius * i as f64 / m as f64).map(|r| r.powf(e) * u.value(r).abs()).fold(0.0, f64::max);
    Ok(sup / energy)
}

/// One spot-check of the truncated kernel against `C|x-y|^{s-n}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSample {
    pub x: f64,
    pub y: f64,
    /// Radial part of the truncated kernel `Σ_{k≤K} λ_k^{-s/2} φ_k(x)φ_k(y)`.
    pub kernel: f64,
    /// Mean of `|x-y'|^{s-n}` over `|y'| = |y|`.
    pub riesz: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelDomination {
    pub s: f64,
    pub samples: Vec<KernelSample>,
    /// `max kernel/riesz` over the samples with all `K` modes.
    pub constant: f64,
    /// Same with only the first `K/2` modes.
    pub half_constant: f64,
    pub caveat: String,
}

/// Spot-checks `0 ≤ K^s(x,y) ≤ C|x-y|^{s-n}` at the radius pairs given.
///
/// Only the radial sector of the kernel is available, which is the spherical
/// average of `K^s(x,·)` over `|y'| = |y|`; it is compared with the same
/// average of `|x-y'|^{s-n}`.
pub fn kernel_domination(spectrum: &BallSpectrum, s: f64, pairs: &[(f64, f64)]) -> Result<KernelDomination> {
    let n = spectrum.n;
    if !(s > 0.0 && s < n as f64) {
        return Err(Error::domain("kernel_domination", format!("order s = {s} must lie in (0, n)")));
    }
    let qspec = QuadratureSpec::default().with_tol(1e-10, 1e-300);
    let kernel = |modes: usize, x: f64, y: f64| {
        let terms: Vec<f64> = (0..modes).map(|i| spectrum.eigenvalues[i].powf(-0.5 * s) * spectrum.phi(i, x) * spectrum.phi(i, y)).collect();
        crate::quadrature::pairwise_sum(&terms)
    };
    let half = (spectrum.modes() / 2).max(1);
    let mut samples = Vec::with_capacity(pairs.len());
    let (mut constant, mut half_constant) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for &(x, y) in pairs {
        if !(x > 0.0 && y > 0.0 && x < spectrum.radius && y < spectrum.radius && x != y) {
            return Err(Error::domain("kernel_domination", format!("pair ({x}, {y}) must be distinct interior radii")));
        }
        let riesz = shell_mean(&|t: f64| t.powf(s - n as f64), n, x, y, &[], &qspec)?;
        let k = kernel(spectrum.modes(), x, y);
        constant = constant.max(k / riesz);
        half_constant = half_constant.max(kernel(half, x, y) / riesz);
        samples.push(KernelSample { x, y, kernel: k, riesz });
    }
    let caveat = format!(
        "radial sector only, truncated at K = {} modes; halving K moves C from {constant:.4e} to {half_constant:.4e}",
        spectrum.modes()
    );
    Ok(KernelDomination { s, samples, constant, half_constant, caveat })
}
