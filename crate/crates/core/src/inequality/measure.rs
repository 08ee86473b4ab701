//! Numerical LHS/RHS ratio sweeps.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::conditions::{check_conditions, Admissibility};
use super::params::{ParamSet, TheoremId};
use crate::ball::{ball_frac_inverse, build_spectrum, BallSpectrum};
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::norms::{derivative_grid, weighted_lp_norm, NormValue, WeightedNormSpec};
use crate::potentials::{default_grid, frac_derivative_on, radial_convolve_with, riesz_potential_on, DerivMethod, FracDiffScheme, Route, RingKernel, Singularity};
use crate::profile::RadialProfile;
use crate::quadrature::QuadratureSpec;
use crate::transforms::{apply_multiplier_with, spectrum};

/// Numerical settings shared by every sample of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MeasureOptions {
    pub quadrature: QuadratureSpec,
    /// Each sampling grid is refined `refinement - 1` times (1 = default grids).
    pub refinement: u32,
    pub ball_radius: f64,
    pub ball_modes: usize,
    /// Cap on `(f, g)` pairs for the convolution inequality.
    pub max_pairs: usize,
}

impl Default for MeasureOptions {
    fn default() -> Self {
        Self { quadrature: QuadratureSpec::default().with_tol(1e-10, 1e-15), refinement: 1, ball_radius: 1.0, ball_modes: 64, max_pairs: 16 }
    }
}

impl MeasureOptions {
    fn refine(&self, grid: Grid) -> Grid {
        (1..self.refinement).fold(grid, |g, _| g.refined())
    }
}

/// Why a sample carries no ratio.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "reason")]
pub enum SampleFlag {
    /// Both sides vanish (0/0).
    Degenerate,
    /// The right-hand side is infinite: the profile is outside the space.
    DivergentRhs(String),
    /// The left-hand side is infinite (or the right-hand side vanishes)
    /// while the right-hand side is finite.
    DivergentLhs(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub descriptor: String,
    pub lhs: Option<f64>,
    pub rhs: Option<f64>,
    pub ratio: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flag: Option<SampleFlag>,
}

impl Sample {
    fn new(descriptor: String, lhs: NormValue, rhs: NormValue) -> Self {
        let value = |v: &NormValue| v.is_finite().then_some(v.value);
        let (l, r) = (value(&lhs), value(&rhs));
        let flag = match (lhs.divergence, rhs.divergence) {
            (_, Some(d)) => Some(SampleFlag::DivergentRhs(d.to_string())),
            (Some(d), None) => Some(SampleFlag::DivergentLhs(d.to_string())),
            (None, None) if rhs.value == 0.0 && lhs.value == 0.0 => Some(SampleFlag::Degenerate),
            (None, None) if rhs.value == 0.0 => Some(SampleFlag::DivergentLhs("right-hand side vanishes".into())),
            _ => None,
        };
        let ratio = if flag.is_none() { Some(lhs.value / rhs.value) } else { None };
        Self { descriptor, lhs: l, rhs: r, ratio, flag }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridMeta {
    pub refinement: u32,
    pub derivative_points: usize,
    pub potential_points: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ball_modes: Option<usize>,
}

/// Result of a sweep: per-sample ratios and their supremum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioReport {
    pub theorem: TheoremId,
    pub params: ParamSet,
    pub admissibility: Admissibility,
    /// Samples in canonical order (sorted by descriptor).
    pub samples: Vec<Sample>,
    /// Largest ratio over unflagged samples.
    pub sup_ratio: Option<f64>,
    pub argmax: Option<String>,
    pub grid: GridMeta,
    /// Set when some sample has a finite right-hand side but an infinite left-hand side.
    pub unexpected_divergence: bool,
}

impl RatioReport {
    pub fn ratios(&self) -> Vec<f64> {
        self.samples.iter().filter_map(|s| s.ratio).collect()
    }
}

/// Measures the empirical constant of `t` over `family`, after checking its
/// hypotheses; inadmissible parameters are a contract error.
pub fn measure_ratio(t: TheoremId, params: &ParamSet, family: &[RadialProfile], opts: &MeasureOptions) -> Result<RatioReport> {
    let adm = check_conditions(t, params)?;
    if !adm.admissible {
        return Err(Error::Inadmissible { theorem: t.name().to_string(), violated: adm.violated });
    }
    measure_with(t, params, adm, family, opts)
}

/// As [`measure_ratio`], but runs whatever the verdict; used to observe how
/// ratios behave when a hypothesis is broken.
pub fn measure_ratio_unchecked(t: TheoremId, params: &ParamSet, family: &[RadialProfile], opts: &MeasureOptions) -> Result<RatioReport> {
    let adm = check_conditions(t, params)?;
    measure_with(t, params, adm, family, opts)
}

struct Values {
    n: u32,
    s: f64,
    p: f64,
    q: f64,
    r: f64,
    alpha: f64,
    beta: f64,
    gamma: f64,
    c: f64,
}

fn values(t: TheoremId, params: &ParamSet) -> Result<Values> {
    let n = params.require_n(t)?;
    let nan = f64::NAN;
    let v = Values {
        n,
        s: params.s_f64().unwrap_or(nan),
        p: params.p_f64().unwrap_or(nan),
        q: params.q_f64().unwrap_or(nan),
        r: params.r_f64().unwrap_or(nan),
        alpha: params.alpha_f64().unwrap_or(0.0),
        beta: params.beta_f64().unwrap_or(0.0),
        gamma: params.gamma_f64().unwrap_or(0.0),
        c: params.c_f64().unwrap_or(nan),
    };
    Ok(v)
}

struct Ctx<'a> {
    v: Values,
    opts: &'a MeasureOptions,
    scheme: Option<FracDiffScheme>,
    ball: Option<BallSpectrum>,
}

fn uses_hsp(t: TheoremId) -> bool {
    use TheoremId::*;
    matches!(t, Sobolev_1_1 | Strauss_5_2 | Ni_6_1 | Critical_6_2 | WeightedEmb_6_4)
}

fn measure_with(t: TheoremId, params: &ParamSet, adm: Admissibility, family: &[RadialProfile], opts: &MeasureOptions) -> Result<RatioReport> {
    use TheoremId::*;
    if family.is_empty() {
        return Err(Error::domain("measure_ratio", "empty profile family"));
    }
    let v = values(t, params)?;
    if let Some(bad) = family.iter().find(|f| f.dim() != v.n) {
        return Err(Error::domain("measure_ratio", format!("profile {} has dimension {}, parameters have n = {}", bad.descriptor(), bad.dim(), v.n)));
    }
    let needs_scheme = uses_hsp(t) && family.iter().any(|u| u.spectral_extent().is_none());
    let scheme = if needs_scheme { Some(FracDiffScheme::for_order(v.s)?.calibrate(v.n, v.s, &opts.quadrature)?) } else { None };
    let ball = if matches!(t, NiBall_8_1 | CriticalBall_8_2) { Some(build_spectrum(v.n, opts.ball_radius, opts.ball_modes)?) } else { None };
    let ctx = Ctx { v, opts, scheme, ball };

    let mut samples: Vec<Sample> = if t == WeightedConv_6_3 {
        let pairs = select_pairs(family.len(), opts.max_pairs);
        pairs
            .par_iter()
            .map(|&(i, j)| {
                let (f, g) = (&family[i], &family[j]);
                let (lhs, rhs) = convolution_sides(f, g, &ctx)?;
                Ok(Sample::new(format!("f={};g={}", f.descriptor(), g.descriptor()), lhs, rhs))
            })
            .collect::<Result<_>>()?
    } else {
        family
            .par_iter()
            .map(|u| {
                let (lhs, rhs) = sides(t, u, &ctx)?;
                Ok(Sample::new(u.descriptor(), lhs, rhs))
            })
            .collect::<Result<_>>()?
    };
    samples.sort_by(|a, b| a.descriptor.cmp(&b.descriptor));
    let (mut sup_ratio, mut argmax) = (None::<f64>, None);
    for s in &samples {
        if let Some(r) = s.ratio {
            if sup_ratio.is_none_or(|m| r > m) {
                sup_ratio = Some(r);
                argmax = Some(s.descriptor.clone());
            }
        }
    }
    let unexpected_divergence = samples.iter().any(|s| matches!(s.flag, Some(SampleFlag::DivergentLhs(_))));
    let grid = GridMeta {
        refinement: opts.refinement,
        derivative_points: opts.refine(derivative_grid(&family[0])?).len(),
        potential_points: opts.refine(default_grid(&family[0])?).len(),
        ball_modes: ctx.ball.as_ref().map(|b| b.modes()),
    };
    Ok(RatioReport { theorem: t, params: params.clone(), admissibility: adm, samples, sup_ratio, argmax, grid, unexpected_divergence })
}

/// Up to `cap` pairs spread evenly over the Cartesian square, in row-major order.
fn select_pairs(len: usize, cap: usize) -> Vec<(usize, usize)> {
    let total = len * len;
    let take = cap.min(total).max(1);
    let mut picked: Vec<usize> = (0..take).map(|k| k * total / take).collect();
    picked.dedup();
    picked.into_iter().map(|k| (k / len, k % len)).collect()
}

fn norm(f: &RadialProfile, p: f64, a: f64, ctx: &Ctx) -> Result<NormValue> {
    weighted_lp_norm(f, &WeightedNormSpec::new(p, a, f.dim())?, &ctx.opts.quadrature)
}

fn ball_norm(f: &RadialProfile, p: f64, a: f64, ctx: &Ctx) -> Result<NormValue> {
    weighted_lp_norm(f, &WeightedNormSpec::new(p, a, f.dim())?.on_ball(ctx.opts.ball_radius)?, &ctx.opts.quadrature)
}

fn deriv_method(u: &RadialProfile) -> DerivMethod {
    if u.spectral_extent().is_some() {
        DerivMethod::Spectral
    } else {
        DerivMethod::Hypersingular
    }
}

/// `Dˢu` on the (refined) derivative grid.
pub(crate) fn derivative(u: &RadialProfile, s: f64, scheme: Option<&FracDiffScheme>, opts: &MeasureOptions) -> Result<RadialProfile> {
    let grid = opts.refine(derivative_grid(u)?);
    let method = deriv_method(u);
    let owned;
    let scheme = match (scheme, method) {
        (Some(sc), _) => sc,
        (None, DerivMethod::Hypersingular) => {
            owned = FracDiffScheme::for_order(s)?.calibrate(u.dim(), s, &opts.quadrature)?;
            &owned
        }
        (None, _) => {
            owned = FracDiffScheme::for_order(s)?;
            &owned
        }
    };
    frac_derivative_on(u, s, scheme, method, &grid, &opts.quadrature)
}

/// `‖u‖_p + ‖Dˢu‖_p`.
fn hsp(u: &RadialProfile, ctx: &Ctx) -> Result<NormValue> {
    hsp_value(u, ctx.v.s, ctx.v.p, ctx.scheme.as_ref(), ctx.opts)
}

/// `‖u‖_p + ‖Dˢu‖_p`, the representative of the `H^{s,p}` norm used for
/// every measured constant.
pub fn hsp_value(u: &RadialProfile, s: f64, p: f64, scheme: Option<&FracDiffScheme>, opts: &MeasureOptions) -> Result<NormValue> {
    if u.is_zero() {
        return Ok(NormValue::ZERO);
    }
    let q = &opts.quadrature;
    let base = weighted_lp_norm(u, &WeightedNormSpec::lp(p, u.dim())?, q)?;
    if !base.is_finite() {
        return Ok(base);
    }
    let d = derivative(u, s, scheme, opts)?;
    let top = weighted_lp_norm(&d, &WeightedNormSpec::lp(p, u.dim())?, q)?;
    if !top.is_finite() {
        return Ok(top);
    }
    Ok(NormValue { value: base.value + top.value, error: base.error + top.error, divergence: None, grid_resolution: None })
}

fn riesz(f: &RadialProfile, ctx: &Ctx) -> Result<RadialProfile> {
    let grid = ctx.opts.refine(default_grid(f)?);
    let route = if f.spectral_extent().is_some() { Route::Spectral } else { Route::Ring };
    riesz_potential_on(f, ctx.v.s, &grid, route, &ctx.opts.quadrature)
}

fn sides(t: TheoremId, u: &RadialProfile, ctx: &Ctx) -> Result<(NormValue, NormValue)> {
    use TheoremId::*;
    let v = &ctx.v;
    let nf = v.n as f64;
    if u.is_zero() {
        return Ok((NormValue::ZERO, NormValue::ZERO));
    }
    Ok(match t {
        Sobolev_1_1 => (norm(u, v.q, 0.0, ctx)?, hsp(u, ctx)?),
        HLS_2_1 => (norm(&riesz(u, ctx)?, v.q, 0.0, ctx)?, norm(u, v.p, 0.0, ctx)?),
        SteinWeiss_2_2 | RadialSW_2_3 | RadialSW_qinf_2_4 => {
            let rhs = norm(u, v.p, v.alpha, ctx)?;
            if !rhs.is_finite() {
                return Ok((NormValue::ZERO, rhs));
            }
            let q = if t == RadialSW_qinf_2_4 { f64::INFINITY } else { v.q };
            (norm(&riesz(u, ctx)?, q, -v.beta, ctx)?, rhs)
        }
        Strauss_5_2 => (norm(u, f64::INFINITY, (nf - 1.0) / v.p, ctx)?, hsp(u, ctx)?),
        Ni_6_1 => (norm(u, f64::INFINITY, nf / v.p - v.s, ctx)?, hsp(u, ctx)?),
        Critical_6_2 => {
            let psc = v.p * (nf + v.c) / (nf - v.s * v.p);
            (norm(u, psc, v.c / psc, ctx)?, hsp(u, ctx)?)
        }
        WeightedEmb_6_4 => (norm(u, v.r, v.c / v.r, ctx)?, hsp(u, ctx)?),
        NiBall_8_1 | CriticalBall_8_2 => {
            let spectrum = ctx.ball.as_ref().expect("ball spectrum built for ball theorems");
            let rhs = ball_norm(u, v.p, 0.0, ctx)?;
            if !rhs.is_finite() {
                return Ok((NormValue::ZERO, rhs));
            }
            if v.p < 2.0 && !ball_norm(u, 2.0, 0.0, ctx)?.is_finite() {
                return Err(Error::domain("measure_ratio", format!("{} is not in L2 of the ball; the eigen-expansion needs L2 data", u.descriptor())));
            }
            let sol = ball_frac_inverse(u, v.s, spectrum)?.profile()?;
            let lhs = if t == NiBall_8_1 {
                ball_norm(&sol, f64::INFINITY, nf / v.p - v.s, ctx)?
            } else {
                let psc = v.p * (nf + v.c) / (nf - v.s * v.p);
                ball_norm(&sol, psc, v.c / psc, ctx)?
            };
            (lhs, rhs)
        }
        WeightedConv_6_3 => unreachable!("pairs are measured by convolution_sides"),
    })
}

fn convolution_sides(f: &RadialProfile, g: &RadialProfile, ctx: &Ctx) -> Result<(NormValue, NormValue)> {
    let v = &ctx.v;
    if f.is_zero() || g.is_zero() {
        return Ok((NormValue::ZERO, NormValue::ZERO));
    }
    let (nf, ng) = (norm(f, v.p, v.alpha, ctx)?, norm(g, v.q, v.beta, ctx)?);
    if !nf.is_finite() {
        return Ok((NormValue::ZERO, nf));
    }
    if !ng.is_finite() {
        return Ok((NormValue::ZERO, ng));
    }
    let rhs = NormValue { value: nf.value * ng.value, error: nf.error * ng.value + ng.error * nf.value, divergence: None, grid_resolution: None };
    let conv = convolve_profiles(f, g, ctx)?;
    Ok((norm(&conv, v.r, -v.gamma, ctx)?, rhs))
}

/// `f ∗ g` on the refined default grid of `f`: by the product of spectra
/// when both transforms decay rapidly, by the ring reduction otherwise.
fn convolve_profiles(f: &RadialProfile, g: &RadialProfile, ctx: &Ctx) -> Result<RadialProfile> {
    let n = f.dim();
    let fast = -2.0 * n as f64 - 4.0;
    let tail = match (f.tail_exponent(), g.tail_exponent()) {
        (a, b) if a.is_finite() || b.is_finite() => a.max(b).max(fast),
        _ => fast,
    };
    let (lf, lg) = (f.effective_radius().unwrap_or(1.0), g.effective_radius().unwrap_or(1.0));
    let base = if lg > lf { default_grid(g)? } else { default_grid(f)? };
    let grid = ctx.opts.refine(base);
    if f.spectral_extent().is_some() && g.spectral_extent().is_some() {
        let ghat = spectrum(g, &ctx.opts.quadrature)?;
        let scale = (2.0 * PI).powf(0.5 * n as f64);
        let m = move |rho: f64| scale * ghat.value(rho);
        return apply_multiplier_with(f, &m, &grid, &ctx.opts.quadrature, tail);
    }
    let kappa = g.origin_exponent();
    let singularity = if kappa < 0.0 { Singularity::Power(-kappa) } else { Singularity::Bounded };
    let g_tail = if g.tail_exponent().is_finite() { g.tail_exponent() } else { f64::NEG_INFINITY };
    let gc = g.clone();
    let kernel = RingKernel::new(n, move |t: f64| gc.value(t), singularity, g.breakpoints(), g.support_radius(), g_tail)?;
    radial_convolve_with(&kernel, f, &grid, &ctx.opts.quadrature, tail)
}

/// Default verification family for `t`: Gaussians of width `2^k`,
/// `k = -3..3`, two smooth bumps and two power profiles `|x|^a` cut off
/// smoothly, with even `a` chosen so that every weighted norm in the
/// theorem is finite at the origin. For the ball theorems the bumps and
/// power profiles are scaled into the ball.
pub fn default_family(t: TheoremId, params: &ParamSet) -> Result<Vec<RadialProfile>> {
    use TheoremId::*;
    let n = params.require_n(t)?;
    let v = values(t, params)?;
    let mut out: Vec<RadialProfile> = (-3..=3).map(|k| RadialProfile::gaussian(n, 2f64.powi(k))).collect::<Result<_>>()?;
    let ball = matches!(t, NiBall_8_1 | CriticalBall_8_2);
    let (w1, w2, cut) = if ball { (0.5, 0.9, 0.4) } else { (0.5, 2.0, 1.0) };
    out.push(RadialProfile::smooth_bump(n, 0.0, w1)?);
    out.push(RadialProfile::smooth_bump(n, 0.0, w2)?);
    // weighted L^p norms of |x|^a near 0 need (a + w) p + n > 0
    let weights: Vec<(f64, f64)> = match t {
        SteinWeiss_2_2 | RadialSW_2_3 | RadialSW_qinf_2_4 => vec![(v.alpha, v.p)],
        WeightedConv_6_3 => vec![(v.alpha, v.p), (v.beta, v.q)],
        _ => vec![],
    };
    let ok = |a: f64| weights.iter().all(|&(w, p)| !((a + w) * p + n as f64 <= 0.0));
    let a0 = (1..=20).map(|k| 2.0 * k as f64).find(|&a| ok(a)).unwrap_or(2.0);
    out.push(RadialProfile::power_cutoff(n, a0, cut)?);
    out.push(RadialProfile::power_cutoff(n, a0 + 2.0, cut)?);
    Ok(out)
}

/// A dilation-invariant quotient evaluated on one profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaledRatio {
    /// The quotient; `None` when numerator and denominator both vanish.
    pub value: Option<f64>,
    pub numerator: f64,
    pub denominator: f64,
    pub degenerate: bool,
}

impl ScaledRatio {
    fn new(numerator: f64, denominator: f64) -> Result<Self> {
        if denominator == 0.0 {
            if numerator == 0.0 {
                return Ok(Self { value: None, numerator, denominator, degenerate: true });
            }
            return Err(Error::numeric("scaled_ratio", "denominator vanishes for a nonzero profile"));
        }
        Ok(Self { value: Some(numerator / denominator), numerator, denominator, degenerate: false })
    }
}

fn finite(v: NormValue, what: &str) -> Result<f64> {
    match v.divergence {
        None => Ok(v.value),
        Some(d) => Err(Error::domain("scaled_ratio", format!("{what} is infinite: {d}"))),
    }
}

/// `sup_y |y|^{(n-1)/p}|u(y)| / (‖u‖_p^{1-1/(sp)} ‖Dˢu‖_p^{1/(sp)})`,
/// exactly invariant under `u ↦ u(λ·)`.
pub fn strauss_scaled_ratio(u: &RadialProfile, s: f64, p: f64, opts: &MeasureOptions) -> Result<ScaledRatio> {
    if !(p > 1.0 && p.is_finite() && s > 1.0 / p) {
        return Err(Error::domain("strauss_scaled_ratio", format!("need 1 < p < ∞ and s > 1/p, got s = {s}, p = {p}")));
    }
    if u.is_zero() {
        return ScaledRatio::new(0.0, 0.0);
    }
    let n = u.dim() as f64;
    let q = &opts.quadrature;
    let sup = finite(weighted_lp_norm(u, &WeightedNormSpec::new(f64::INFINITY, (n - 1.0) / p, u.dim())?, q)?, "weighted supremum")?;
    let lp = finite(weighted_lp_norm(u, &WeightedNormSpec::lp(p, u.dim())?, q)?, "L^p norm")?;
    let d = derivative(u, s, None, opts)?;
    let dp = finite(weighted_lp_norm(&d, &WeightedNormSpec::lp(p, u.dim())?, q)?, "L^p norm of the derivative")?;
    let theta = 1.0 / (s * p);
    ScaledRatio::new(sup, lp.powf(1.0 - theta) * dp.powf(theta))
}

/// `sup |x|^{n/p-s}|u| / ‖Dˢu‖_p`, the homogeneous Ni quotient.
pub fn ni_homogeneous_ratio(u: &RadialProfile, s: f64, p: f64, opts: &MeasureOptions) -> Result<ScaledRatio> {
    let n = u.dim() as f64;
    if !(p > 1.0 && p.is_finite() && s > 1.0 / p && s < n / p) {
        return Err(Error::domain("ni_homogeneous_ratio", format!("need 1 < p < ∞ and 1/p < s < n/p, got s = {s}, p = {p}")));
    }
    if u.is_zero() {
        return ScaledRatio::new(0.0, 0.0);
    }
    let q = &opts.quadrature;
    let sup = finite(weighted_lp_norm(u, &WeightedNormSpec::new(f64::INFINITY, n / p - s, u.dim())?, q)?, "weighted supremum")?;
    let d = derivative(u, s, None, opts)?;
    let dp = finite(weighted_lp_norm(&d, &WeightedNormSpec::lp(p, u.dim())?, q)?, "L^p norm of the derivative")?;
    ScaledRatio::new(sup, dp)
}

/// Dilation family `Gaussian(2^k)` for `k` in `ks`.
pub fn gaussian_dilations(n: u32, ks: std::ops::RangeInclusive<i32>) -> Result<Vec<RadialProfile>> {
    ks.map(|k| RadialProfile::gaussian(n, 2f64.powi(k))).collect()
}
