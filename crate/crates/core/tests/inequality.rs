use num_bigint::BigInt;
use num_rational::BigRational;
use radlab::inequality::compact::{
    holder_interpolation, lemma51_sweep, log_points, noncompactness_demo, optimal_scaling, tail_embedding_constant, tail_mass,
};
use radlab::inequality::measure::{gaussian_dilations, ni_homogeneous_ratio, strauss_scaled_ratio};
use radlab::inequality::{check_conditions, default_family, measure_ratio, measure_ratio_unchecked, MeasureOptions, ParamSet, SampleFlag, TheoremId};
use radlab::norms::{weighted_lp_norm, WeightedNormSpec};
use radlab::{Error, QuadratureSpec, RadialProfile};

fn opts() -> MeasureOptions {
    MeasureOptions::default()
}

fn int(a: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(a))
}

const DDD2: &str = "n=3, s=1, p=2, q=10, alpha=-9/20, beta=1/4";

#[test]
fn scaled_quotients_are_dilation_invariant() {
    let g = RadialProfile::gaussian(3, 1.0).unwrap();
    let base_s = strauss_scaled_ratio(&g, 1.0, 2.0, &opts()).unwrap().value.unwrap();
    let base_n = ni_homogeneous_ratio(&g, 1.0, 2.0, &opts()).unwrap().value.unwrap();
    for lambda in [0.25, 4.0] {
        let d = g.dilate(lambda).unwrap();
        let s = strauss_scaled_ratio(&d, 1.0, 2.0, &opts()).unwrap().value.unwrap();
        let n = ni_homogeneous_ratio(&d, 1.0, 2.0, &opts()).unwrap().value.unwrap();
        assert!((s / base_s - 1.0).abs() < 1e-4, "strauss λ={lambda}: {s} vs {base_s}");
        assert!((n / base_n - 1.0).abs() < 1e-4, "ni λ={lambda}: {n} vs {base_n}");
    }
    // p = 2, s = 1: ‖D¹u‖₂ = ‖∇u‖₂, so this is the gradient form with its explicit constant
    assert!(base_n <= (4.0 * std::f64::consts::PI).powf(-0.5));
    let s15 = |l: f64| strauss_scaled_ratio(&g.dilate(l).unwrap(), 1.5, 2.0, &opts()).unwrap().value.unwrap();
    assert!((s15(4.0) / s15(1.0) - 1.0).abs() < 1e-4);
}

#[test]
fn bump_and_gaussian_give_comparable_strauss_constants() {
    let b = RadialProfile::smooth_bump(3, 0.0, 1.0).unwrap();
    let g = RadialProfile::gaussian(3, 1.0).unwrap();
    let rb = strauss_scaled_ratio(&b, 1.0, 2.0, &opts()).unwrap().value.unwrap();
    let rg = strauss_scaled_ratio(&g, 1.0, 2.0, &opts()).unwrap().value.unwrap();
    assert!(rb.is_finite() && rg.is_finite() && rb > 0.1 && rg > 0.1);
    let rb4 = strauss_scaled_ratio(&b.dilate(4.0).unwrap(), 1.0, 2.0, &opts()).unwrap().value.unwrap();
    assert!((rb4 / rb - 1.0).abs() < 1e-4);
    let z = strauss_scaled_ratio(&RadialProfile::zero(3).unwrap(), 1.0, 2.0, &opts()).unwrap();
    assert!(z.degenerate && z.value.is_none());
}

#[test]
fn ni_sweep_on_gaussians_is_finite() {
    let ps = ParamSet::parse("n=3 s=1 p=2").unwrap();
    let rep = measure_ratio(TheoremId::Ni_6_1, &ps, &gaussian_dilations(3, -2..=2).unwrap(), &opts()).unwrap();
    let sup = rep.sup_ratio.unwrap();
    assert!(sup.is_finite() && sup > 0.0);
    assert_eq!(rep.samples.len(), 5);
    // canonical order is lexicographic in the descriptor
    assert!(rep.samples.windows(2).all(|w| w[0].descriptor < w[1].descriptor));
}

#[test]
fn radial_improvement_sweep_is_bounded_and_stable() {
    let ps = ParamSet::parse(DDD2).unwrap();
    assert!(!check_conditions(TheoremId::SteinWeiss_2_2, &ps).unwrap().admissible);
    let core = measure_ratio(TheoremId::RadialSW_2_3, &ps, &gaussian_dilations(3, -6..=6).unwrap(), &opts()).unwrap();
    let wide = measure_ratio(TheoremId::RadialSW_2_3, &ps, &gaussian_dilations(3, -8..=8).unwrap(), &opts()).unwrap();
    assert_eq!(core.ratios().len(), 13);
    let (a, b) = (core.sup_ratio.unwrap(), wide.sup_ratio.unwrap());
    assert!(a.is_finite() && b >= a && (b - a) / a < 0.05, "{a} -> {b}");
    // the scaling relation holds, so the quotient is the same for every dilate
    let r = core.ratios();
    assert!(r.iter().all(|x| (x / r[0] - 1.0).abs() < 1e-6), "{r:?}");
}

#[test]
fn default_family_passes_at_the_radial_tuple() {
    let ps = ParamSet::parse(DDD2).unwrap();
    let fam = default_family(TheoremId::RadialSW_2_3, &ps).unwrap();
    assert_eq!(fam.len(), 11);
    let rep = measure_ratio(TheoremId::RadialSW_2_3, &ps, &fam, &opts()).unwrap();
    assert_eq!(rep.ratios().len(), 11, "{:?}", rep.samples);
    assert!(!rep.unexpected_divergence);
}

#[test]
fn broken_scaling_makes_the_ratio_monotone() {
    // 1/q = 1/p + (α+β-s)/n needs q = 6 here
    let ps = ParamSet::parse("n=3 s=1 p=2 q=3 alpha=0 beta=0").unwrap();
    let adm = check_conditions(TheoremId::SteinWeiss_2_2, &ps).unwrap();
    assert!(adm.violated.contains(&"1/q = 1/p + (alpha + beta - s)/n".to_string()));
    assert!(matches!(
        measure_ratio(TheoremId::SteinWeiss_2_2, &ps, &gaussian_dilations(3, 0..=0).unwrap(), &opts()),
        Err(Error::Inadmissible { .. })
    ));
    let fam = gaussian_dilations(3, -4..=4).unwrap();
    let rep = measure_ratio_unchecked(TheoremId::SteinWeiss_2_2, &ps, &fam, &opts()).unwrap();
    // ratios in order of k
    let by_k: Vec<f64> = fam.iter().map(|f| rep.samples.iter().find(|s| s.descriptor == f.descriptor()).unwrap().ratio.unwrap()).collect();
    let up = by_k.windows(2).all(|w| w[1] > w[0]);
    let down = by_k.windows(2).all(|w| w[1] < w[0]);
    assert!(up || down, "{by_k:?}");
}

#[test]
fn divergent_rhs_is_flagged_not_counted() {
    // |x|^{-2} cut off is not in L²(ℝ³) at the origin
    let ps = ParamSet::parse("n=3 s=1 p=2 q=6 alpha=0 beta=0").unwrap();
    let fam = vec![RadialProfile::power_cutoff(3, -1.6, 1.0).unwrap(), RadialProfile::gaussian(3, 1.0).unwrap()];
    let rep = measure_ratio(TheoremId::SteinWeiss_2_2, &ps, &fam, &opts()).unwrap();
    let flagged = rep.samples.iter().filter(|s| matches!(s.flag, Some(SampleFlag::DivergentRhs(_)))).count();
    assert_eq!(flagged, 1);
    assert_eq!(rep.ratios().len(), 1);
    assert!(!rep.unexpected_divergence);
}

#[test]
fn sup_ratio_is_stable_under_grid_refinement() {
    let ps = ParamSet::parse("n=3 s=1/2 p=2 q=3").unwrap();
    let fam = vec![
        RadialProfile::gaussian(3, 0.5).unwrap(),
        RadialProfile::gaussian(3, 2.0).unwrap(),
        RadialProfile::power_cutoff(3, 2.0, 1.0).unwrap(),
    ];
    let coarse = measure_ratio(TheoremId::Sobolev_1_1, &ps, &fam, &opts()).unwrap();
    let fine = measure_ratio(TheoremId::Sobolev_1_1, &ps, &fam, &MeasureOptions { refinement: 2, ..opts() }).unwrap();
    let (a, b) = (coarse.sup_ratio.unwrap(), fine.sup_ratio.unwrap());
    assert!(((b - a) / a).abs() < 0.05, "{a} vs {b}");
    assert!(fine.grid.derivative_points > coarse.grid.derivative_points);
}

#[test]
fn weighted_convolution_pairs() {
    let ps = ParamSet::parse("n=3 p=3/2 q=3/2 r=3 alpha=1/3 beta=0 gamma=-1/3").unwrap();
    assert!(check_conditions(TheoremId::WeightedConv_6_3, &ps).unwrap().admissible);
    let fam = vec![RadialProfile::gaussian(3, 0.5).unwrap(), RadialProfile::gaussian(3, 1.0).unwrap(), RadialProfile::power_cutoff(3, 2.0, 1.0).unwrap()];
    let rep = measure_ratio(TheoremId::WeightedConv_6_3, &ps, &fam, &opts()).unwrap();
    assert_eq!(rep.samples.len(), 9);
    assert!(rep.samples.iter().all(|s| s.descriptor.starts_with("f=") && s.ratio.is_some_and(|r| r.is_finite() && r > 0.0)));
}

#[test]
fn gaussian_convolution_matches_closed_form() {
    // G_a ∗ G_b is a Gaussian with variance a² + b²: (2π)^{3/2}(ab/c)³ e^{-r²/2c²}
    let ps = ParamSet::parse("n=3 p=2 q=1 r=2 alpha=0 beta=0 gamma=0").unwrap();
    let (a, b) = (1.0f64, 0.5f64);
    let c = (a * a + b * b).sqrt();
    let f = RadialProfile::gaussian(3, a).unwrap();
    let g = RadialProfile::gaussian(3, b).unwrap();
    let rep = measure_ratio_unchecked(TheoremId::WeightedConv_6_3, &ps, &[f.clone(), g.clone()], &MeasureOptions { max_pairs: 4, ..opts() }).unwrap();
    let conv = RadialProfile::gaussian(3, c).unwrap().scale((2.0 * std::f64::consts::PI).powf(1.5) * (a * b / c).powi(3)).unwrap();
    let q = QuadratureSpec::default();
    let l2 = |u: &RadialProfile, p: f64| weighted_lp_norm(u, &WeightedNormSpec::lp(p, 3).unwrap(), &q).unwrap().value;
    let expect = l2(&conv, 2.0) / (l2(&f, 2.0) * l2(&g, 1.0));
    let got = rep.samples.iter().find(|s| s.descriptor == format!("f={};g={}", f.descriptor(), g.descriptor())).unwrap().ratio.unwrap();
    assert!((got / expect - 1.0).abs() < 1e-6, "{got} vs {expect}");
}

#[test]
fn optimal_scaling_against_grid_search() {
    let o = optimal_scaling(2.0, 1.0, 3.0).unwrap();
    assert!((o.t0 - 1.5f64.powf(0.25)).abs() < 1e-14);
    let f = |t: f64| 2.0 * t + t.powi(-3);
    let (mut best_t, mut best) = (0.0, f64::INFINITY);
    for i in 0..=600_000 {
        let t = 1e-3 * 1e6f64.powf(i as f64 / 600_000.0);
        if f(t) < best {
            best = f(t);
            best_t = t;
        }
    }
    assert!((best - o.f_min).abs() < 1e-9 * o.f_min);
    assert!((best_t - o.t0).abs() < 1e-4);
}

#[test]
fn translates_are_equidistant_when_disjoint() {
    let u = RadialProfile::smooth_bump(3, 0.0, 1.0).unwrap();
    let spec = QuadratureSpec::default().with_tol(1e-13, 1e-300);
    let d = noncompactness_demo(&u, 2.5, 3.0, 3, &spec).unwrap();
    assert!(!d.overlapping);
    for i in 0..3 {
        assert_eq!(d.distances[i][i], 0.0);
        for j in 0..3 {
            if i != j {
                assert!((d.distances[i][j] - d.disjoint_value).abs() < 1e-10 * d.disjoint_value, "{} vs {}", d.distances[i][j], d.disjoint_value);
            }
        }
    }
    let close = noncompactness_demo(&u, 0.5, 3.0, 3, &spec).unwrap();
    assert!(close.overlapping);
    assert!(close.distances[0][1] < close.disjoint_value && close.distances[0][2] < close.disjoint_value);
    assert!(close.distances[0][1] < close.distances[0][2]);
}

#[test]
fn tail_mass_is_below_its_bound() {
    let (n, s, p, q) = (3, int(1), int(2), int(3));
    let fam = default_family(TheoremId::WeightedEmb_6_4, &radlab::inequality::compact::tail_embedding_params(n, &s, &p, &q)).unwrap();
    let rep = tail_embedding_constant(n, &s, &p, &q, &fam, &opts()).unwrap();
    assert!(!rep.admissibility.admissible);
    let c = rep.sup_ratio.unwrap();
    assert!(c.is_finite() && c > 0.0);
    for u in &fam {
        let tails: Vec<_> = [2.0, 4.0, 8.0].iter().map(|&r| tail_mass(u, 3.0, r, 2.0, 1.0, c, &opts()).unwrap()).collect();
        for t in &tails {
            assert!(t.tail <= t.bound, "{}: {t:?}", u.descriptor());
        }
        assert!(tails.windows(2).all(|w| w[1].tail <= w[0].tail));
    }
    let g = RadialProfile::gaussian(3, 1.0).unwrap();
    let full = weighted_lp_norm(&g, &WeightedNormSpec::lp(3.0, 3).unwrap(), &QuadratureSpec::default()).unwrap().value.powi(3);
    let near_zero = tail_mass(&g, 3.0, 1e-9, 2.0, 1.0, c, &opts()).unwrap().tail;
    assert!((near_zero / full - 1.0).abs() < 1e-8);
    let t = tail_mass(&g, 3.0, 2.0, 2.0, 1.0, c, &opts()).unwrap();
    assert!(t.tail > 0.0 && t.tail < full);
}

#[test]
fn holder_interpolation_has_nonnegative_slack() {
    let ps = ParamSet::parse("n=3 s=1 p=2 r=3 c=1/2").unwrap();
    for u in default_family(TheoremId::WeightedEmb_6_4, &ps).unwrap() {
        let h = holder_interpolation(&u, 0.5, 2.5, 3.0, 4.0, &QuadratureSpec::default()).unwrap();
        assert!(h.slack >= 0.0, "{}: {h:?}", u.descriptor());
        assert!((h.theta - 2.0 / 3.0).abs() < 1e-15 && (h.c_tilde - 1.5).abs() < 1e-12);
    }
}

#[test]
fn ball_average_decay_is_grid_stable() {
    let spec = QuadratureSpec::default();
    for f in [RadialProfile::gaussian(3, 1.0).unwrap(), RadialProfile::smooth_bump(3, 0.0, 1.0).unwrap()] {
        let coarse = lemma51_sweep(&f, 2.0, &log_points(0.125, 8.0, 13), &log_points(1.0 / 16.0, 64.0, 21), &spec).unwrap();
        let fine = lemma51_sweep(&f, 2.0, &log_points(0.125, 8.0, 25), &log_points(1.0 / 16.0, 64.0, 41), &spec).unwrap();
        assert!(coarse.sup.is_finite() && coarse.sup_far > 0.0 && coarse.sup_near > 0.0);
        assert!((fine.sup / coarse.sup - 1.0).abs() < 0.05, "{} {coarse:?} {fine:?}", f.descriptor());
    }
}
