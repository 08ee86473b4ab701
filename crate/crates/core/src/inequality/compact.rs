//! Computable ingredients of the compactness arguments: the scaling
//! minimisation, translated bumps, tail mass, the Hölder interpolation step
//! and the ball-average decay estimate.

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::measure::{hsp_value, measure_ratio_unchecked, MeasureOptions, RatioReport};
use super::params::{Exponent, ParamSet, TheoremId};
use crate::error::{Error, Result};
use crate::norms::{weighted_lp_norm, WeightedNormSpec};
use crate::potentials::indicator_convolve;
use crate::profile::RadialProfile;
use crate::quadrature::{integrate, integrate_panels, QuadratureSpec};
use crate::specfun::sphere_area;

/// Minimiser of `f(t) = a t + b t^{-γ}` on `t > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimalScaling {
    pub t0: f64,
    pub f_min: f64,
}

/// Closed-form minimiser `t₀ = (bγ/a)^{1/(γ+1)}`,
/// `f(t₀) = (γ+1)γ^{-γ/(γ+1)} a^{γ/(γ+1)} b^{1/(γ+1)}`, checked against
/// `f(t₀/2)` and `f(2t₀)`.
pub fn optimal_scaling(a: f64, b: f64, gamma: f64) -> Result<OptimalScaling> {
    if !(a > 0.0 && b > 0.0 && gamma > 0.0 && a.is_finite() && b.is_finite() && gamma.is_finite()) {
        return Err(Error::domain("optimal_scaling", format!("a, b, gamma must be positive and finite, got {a}, {b}, {gamma}")));
    }
    let e = 1.0 / (gamma + 1.0);
    let t0 = (b * gamma / a).powf(e);
    let f_min = (gamma + 1.0) * gamma.powf(-gamma * e) * a.powf(gamma * e) * b.powf(e);
    let f = |t: f64| a * t + b * t.powf(-gamma);
    for t in [0.5 * t0, 2.0 * t0] {
        if f(t) < f_min * (1.0 - 1e-12) {
            return Err(Error::numeric("optimal_scaling", format!("f({t}) = {} is below the closed-form minimum {f_min}", f(t))));
        }
    }
    Ok(OptimalScaling { t0, f_min })
}

/// `L^q` distances between translates `u(· + k v e₁)`, `k = 0..N-1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranslateDistances {
    pub distances: Vec<Vec<f64>>,
    /// `2^{1/q}‖u‖_q`, the distance of translates with disjoint supports.
    pub disjoint_value: f64,
    /// Whether some pair of translates has overlapping supports.
    pub overlapping: bool,
}

/// Pairwise `‖u_i - u_j‖_q` for `u_k(x) = u(x + k v e₁)`. Each distance is a
/// genuine two-dimensional integral in cylindrical coordinates around the
/// translation axis; disjointness is only reported, never assumed.
pub fn noncompactness_demo(u: &RadialProfile, v: f64, q: f64, count: usize, spec: &QuadratureSpec) -> Result<TranslateDistances> {
    let support = u
        .support_radius()
        .ok_or_else(|| Error::domain("noncompactness_demo", format!("{} is not compactly supported", u.descriptor())))?;
    if !(v > 0.0 && v.is_finite() && q >= 1.0 && q.is_finite() && count >= 1) {
        return Err(Error::domain("noncompactness_demo", format!("need v > 0, 1 <= q < inf, N >= 1; got v = {v}, q = {q}, N = {count}")));
    }
    let norm = weighted_lp_norm(u, &WeightedNormSpec::lp(q, u.dim())?, spec)?;
    let by_offset: Vec<f64> = (1..count).into_par_iter().map(|k| translate_distance(u, support, k as f64 * v, q, spec)).collect::<Result<_>>()?;
    let distances = (0..count)
        .map(|i| (0..count).map(|j| if i == j { 0.0 } else { by_offset[i.abs_diff(j) - 1] }).collect())
        .collect();
    Ok(TranslateDistances { distances, disjoint_value: 2f64.powf(1.0 / q) * norm.value, overlapping: count > 1 && v < 2.0 * support })
}

/// `‖u - u(· + d e₁)‖_q`.
fn translate_distance(u: &RadialProfile, support: f64, d: f64, q: f64, spec: &QuadratureSpec) -> Result<f64> {
    let n = u.dim();
    let pt = |z: f64, t: f64| (u.value((z * z + t * t).sqrt()) - u.value(((z + d) * (z + d) + t * t).sqrt())).abs().powf(q);
    // half-chord of each support ball at axial position z
    let chord = |z: f64| (support * support - z * z).max(0.0).sqrt();
    let mut zs = vec![-d - support, -d + support, -support, support];
    zs.sort_by(f64::total_cmp);
    let total = if n == 1 {
        integrate_panels(|z| pt(z, 0.0), &zs, spec)?.value
    } else {
        let weight = sphere_area(n - 1);
        let inner = |z: f64| -> f64 {
            let (a, b) = (chord(z), chord(z + d));
            let (lo, hi) = (a.min(b), a.max(b));
            let mut pts = vec![0.0, hi];
            if lo > 0.0 && lo < hi {
                pts.insert(1, lo);
            }
            integrate_panels(|t| pt(z, t) * t.powi(n as i32 - 2), &pts, spec).map(|e| e.value).unwrap_or(f64::NAN)
        };
        weight * integrate_panels(inner, &zs, spec)?.value
    };
    if !total.is_finite() {
        return Err(Error::numeric("noncompactness_demo", "inner quadrature failed"));
    }
    Ok(total.powf(1.0 / q))
}

/// Exterior mass and its weighted-embedding bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailMass {
    /// `∫_{|x|>R} |u|^q`.
    pub tail: f64,
    /// `C R^{γq} ‖u‖_{H^{s,p}}^q`.
    pub bound: f64,
    /// `γ = (n-1)(1/q - 1/p)`.
    pub gamma: f64,
    pub hsp_norm: f64,
}

/// `∫_{|x|>R} |u|^q dx` against `C R^{γq}‖u‖_{H^{s,p}}^q`, where `C` is the
/// constant of `‖|x|^{-γ}u‖_q ≤ C‖u‖_{H^{s,p}}` (see [`tail_embedding_constant`]).
pub fn tail_mass(u: &RadialProfile, q: f64, radius: f64, p: f64, s: f64, constant: f64, opts: &MeasureOptions) -> Result<TailMass> {
    if !(p > 1.0 && q > p && q.is_finite() && s > 1.0 / p - 1.0 / q && radius > 0.0 && constant >= 0.0) {
        return Err(Error::domain("tail_mass", format!("need 1 < p < q < inf, s > 1/p - 1/q, R > 0, C >= 0; got p = {p}, q = {q}, s = {s}, R = {radius}")));
    }
    let n = u.dim();
    let gamma = (n as f64 - 1.0) * (1.0 / q - 1.0 / p);
    let hsp = hsp_value(u, s, p, None, opts)?;
    if !hsp.is_finite() {
        return Err(Error::domain("tail_mass", format!("{} is not in H^(s,p)", u.descriptor())));
    }
    let tail = match u.support_radius() {
        Some(sr) if sr <= radius => 0.0,
        _ => {
            let mut pts = vec![radius];
            pts.extend(u.breakpoints().into_iter().filter(|&b| b > radius));
            pts.push(f64::INFINITY);
            let f = |r: f64| u.value(r).abs().powf(q) * r.powi(n as i32 - 1);
            sphere_area(n) * integrate_panels(f, &pts, &opts.quadrature)?.value
        }
    };
    let bound = constant.powf(q) * radius.powf(gamma * q) * hsp.value.powf(q);
    Ok(TailMass { tail, bound, gamma, hsp_norm: hsp.value })
}

/// Parameters of the weighted embedding behind the tail bound: `r = q`,
/// `c = -γq = (n-1)(q-p)/p`, computed exactly.
///
/// This `c` is the excluded endpoint of `c < (n-1)(r-p)/p`, so the tuple is
/// never admissible for `WeightedEmb_6_4`; the inequality itself still
/// follows from the Strauss bound when `s > 1/p`.
pub fn tail_embedding_params(n: u32, s: &BigRational, p: &BigRational, q: &BigRational) -> ParamSet {
    let c = BigRational::from_integer(BigInt::from(n - 1)) * (q - p) / p;
    ParamSet {
        n: Some(n),
        s: Some(s.clone()),
        p: Some(Exponent::Finite(p.clone())),
        r: Some(Exponent::Finite(q.clone())),
        c: Some(c),
        ..ParamSet::default()
    }
}

/// Measured `C` for [`tail_mass`]: the ratio sweep of `WeightedEmb_6_4` at
/// [`tail_embedding_params`], run regardless of the endpoint verdict.
pub fn tail_embedding_constant(n: u32, s: &BigRational, p: &BigRational, q: &BigRational, family: &[RadialProfile], opts: &MeasureOptions) -> Result<RatioReport> {
    measure_ratio_unchecked(TheoremId::WeightedEmb_6_4, &tail_embedding_params(n, s, p, q), family, opts)
}

/// Both sides of `∫|x|^c|u|^r ≤ (∫|u|^q)^θ (∫|x|^{c̃}|u|^{r̃})^{1-θ}` with
/// `r = θq + (1-θ)r̃`, `c̃ = c/(1-θ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HolderCheck {
    pub theta: f64,
    pub c_tilde: f64,
    pub lhs: f64,
    pub rhs: f64,
    /// `(rhs - lhs)/rhs`; nonnegative when the inequality holds.
    pub slack: f64,
}

pub fn holder_interpolation(u: &RadialProfile, c: f64, q: f64, r: f64, r_tilde: f64, spec: &QuadratureSpec) -> Result<HolderCheck> {
    if !(1.0 <= q && q < r && r < r_tilde && r_tilde.is_finite()) {
        return Err(Error::domain("holder_interpolation", format!("need 1 <= q < r < r~ < inf, got q = {q}, r = {r}, r~ = {r_tilde}")));
    }
    let n = u.dim();
    let theta = (r_tilde - r) / (r_tilde - q);
    let c_tilde = c / (1.0 - theta);
    // ∫|x|^c|u|^r = ‖|x|^{c/r}u‖_r^r
    let moment = |c: f64, r: f64| -> Result<f64> {
        let v = weighted_lp_norm(u, &WeightedNormSpec::new(r, c / r, n)?, spec)?;
        if !v.is_finite() {
            return Err(Error::domain("holder_interpolation", format!("∫|x|^{c}|u|^{r} diverges for {}", u.descriptor())));
        }
        Ok(v.value.powf(r))
    };
    let lhs = moment(c, r)?;
    let rhs = moment(0.0, q)?.powf(theta) * moment(c_tilde, r_tilde)?.powf(1.0 - theta);
    let slack = if rhs > 0.0 { (rhs - lhs) / rhs } else { 0.0 };
    Ok(HolderCheck { theta, c_tilde, lhs, rhs, slack })
}

/// Supremum of `|f ∗ χ_{B(0,R)}|(ρ) ρ^{(n-1)/p} R^{1/p-n} / ‖f‖_p` over a
/// grid of `(R, ρ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallAverageSweep {
    pub sup: f64,
    pub argmax: (f64, f64),
    /// Supremum restricted to `ρ > 2R`.
    pub sup_far: f64,
    /// Supremum restricted to `ρ ≤ 2R`.
    pub sup_near: f64,
    pub points: usize,
}

/// `m` points `lo·(hi/lo)^{i/(m-1)}`.
pub fn log_points(lo: f64, hi: f64, m: usize) -> Vec<f64> {
    if m == 1 {
        return vec![lo];
    }
    (0..m).map(|i| lo * (hi / lo).powf(i as f64 / (m - 1) as f64)).collect()
}

pub fn lemma51_sweep(f: &RadialProfile, p: f64, radii: &[f64], rhos: &[f64], spec: &QuadratureSpec) -> Result<BallAverageSweep> {
    if !(p >= 1.0 && p.is_finite()) || radii.is_empty() || rhos.is_empty() {
        return Err(Error::domain("lemma51_sweep", "need 1 <= p < inf and nonempty grids"));
    }
    let n = f.dim() as f64;
    let norm = weighted_lp_norm(f, &WeightedNormSpec::lp(p, f.dim())?, spec)?;
    if !norm.is_finite() || norm.value == 0.0 {
        return Err(Error::domain("lemma51_sweep", format!("‖f‖_p of {} must be finite and nonzero", f.descriptor())));
    }
    let pairs: Vec<(f64, f64)> = radii.iter().flat_map(|&r| rhos.iter().map(move |&rho| (r, rho))).collect();
    let vals: Vec<f64> = pairs
        .par_iter()
        .map(|&(r, rho)| Ok(indicator_convolve(f, r, rho, spec)?.abs() * rho.powf((n - 1.0) / p) * r.powf(1.0 / p - n) / norm.value))
        .collect::<Result<_>>()?;
    let mut out = BallAverageSweep { sup: 0.0, argmax: pairs[0], sup_far: 0.0, sup_near: 0.0, points: pairs.len() };
    for (&(r, rho), &v) in pairs.iter().zip(&vals) {
        if v > out.sup {
            out.sup = v;
            out.argmax = (r, rho);
        }
        if rho > 2.0 * r {
            out.sup_far = out.sup_far.max(v);
        } else {
            out.sup_near = out.sup_near.max(v);
        }
    }
    Ok(out)
}

/// `∫_a^b |u|^q r^{n-1} dr`, exposed for checks of the radial reduction.
pub fn shell_moment(u: &RadialProfile, q: f64, a: f64, b: f64, spec: &QuadratureSpec) -> Result<f64> {
    let n = u.dim() as i32;
    Ok(sphere_area(u.dim()) * integrate(|r| u.value(r).abs().powf(q) * r.powi(n - 1), a, b, spec)?.value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scaling_examples() {
        let o = optimal_scaling(1.0, 1.0, 1.0).unwrap();
        assert!((o.t0 - 1.0).abs() < 1e-15 && (o.f_min - 2.0).abs() < 1e-15);
        let o = optimal_scaling(1.0, 8.0, 1.0).unwrap();
        assert!((o.t0 - 8f64.sqrt()).abs() < 1e-14 && (o.f_min - 2.0 * 8f64.sqrt()).abs() < 1e-13);
        assert!(optimal_scaling(0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn compact_support_has_no_tail() {
        let u = RadialProfile::smooth_bump(3, 0.0, 1.0).unwrap();
        let t = tail_mass(&u, 3.0, 1.5, 2.0, 1.0, 1.0, &MeasureOptions::default()).unwrap();
        assert_eq!(t.tail, 0.0);
        assert!((t.gamma + 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn tail_parameters_sit_on_the_weight_endpoint() {
        let r = |a: i64| BigRational::from_integer(BigInt::from(a));
        let ps = tail_embedding_params(3, &r(1), &r(2), &r(3));
        assert_eq!(ps.c, Some(r(1)));
        let adm = crate::inequality::check_conditions(TheoremId::WeightedEmb_6_4, &ps).unwrap();
        assert_eq!(adm.violated, vec!["c < (n-1)(r-p)/p".to_string()]);
    }
}
