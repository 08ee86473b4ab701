use proptest::prelude::*;
use radlab::norms::*;
use radlab::potentials::{frac_derivative_on, DerivMethod, FracDiffScheme};
use radlab::*;

fn spec() -> QuadratureSpec {
    QuadratureSpec::default().with_tol(1e-9, 1e-14)
}

#[test]
fn hsp_norm_matches_fourier_side() {
    let u = RadialProfile::gaussian(3, 1.0).unwrap();
    let scheme = FracDiffScheme::for_order(1.0).unwrap().calibrate(3, 1.0, &spec()).unwrap();
    let h = hsp_norm(&u, 1.0, 2.0, &scheme, DerivMethod::Hypersingular, &spec()).unwrap();
    let oracle = h_s2_fourier_seminorm(&u, 0.0, &spec()).unwrap() + h_s2_fourier_seminorm(&u, 1.0, &spec()).unwrap();
    assert!((h.value / oracle - 1.0).abs() < 1e-4, "{} vs {oracle}", h.value);
    assert_eq!(hsp_norm(&RadialProfile::zero(3).unwrap(), 1.0, 2.0, &scheme, DerivMethod::Spectral, &spec()).unwrap().value, 0.0);
}

#[test]
fn hsp_norm_scaling_identities() {
    // ‖u_λ‖_p = λ^{-n/p}‖u‖_p, ‖Dˢu_λ‖_p = λ^{s-n/p}‖Dˢu‖_p
    let (n, s, p, lambda) = (3u32, 1.5, 2.0, 2.0f64);
    let u = RadialProfile::gaussian(n, 1.0).unwrap();
    let ul = u.dilate(lambda).unwrap();
    let lp = WeightedNormSpec::lp(p, n).unwrap();
    let scheme = FracDiffScheme::for_order(s).unwrap();
    let d = |v: &RadialProfile| {
        let g = derivative_grid(v).unwrap();
        weighted_lp_norm(&frac_derivative_on(v, s, &scheme, DerivMethod::Spectral, &g, &spec()).unwrap(), &lp, &spec()).unwrap().value
    };
    let (a0, a1) = (weighted_lp_norm(&u, &lp, &spec()).unwrap().value, d(&u));
    let direct = hsp_norm(&ul, s, p, &scheme, DerivMethod::Spectral, &spec()).unwrap().value;
    let via = lambda.powf(-(n as f64) / p) * a0 + lambda.powf(s - n as f64 / p) * a1;
    assert!((direct / via - 1.0).abs() < 1e-4, "{direct} vs {via}");
}

#[test]
fn fourier_seminorm_equals_l2_of_derivative() {
    let u = RadialProfile::smooth_bump(3, 0.0, 1.5).unwrap();
    let s = 0.75;
    let scheme = FracDiffScheme::for_order(s).unwrap();
    let g = derivative_grid(&u).unwrap();
    let d = frac_derivative_on(&u, s, &scheme, DerivMethod::Spectral, &g, &spec()).unwrap();
    let a = weighted_lp_norm(&d, &WeightedNormSpec::lp(2.0, 3).unwrap(), &spec()).unwrap().value;
    let b = h_s2_fourier_seminorm(&u, s, &spec()).unwrap();
    assert!((a / b - 1.0).abs() < 1e-4, "{a} vs {b}");
}

#[test]
fn monotone_in_weight_away_from_origin() {
    let f = RadialProfile::annulus(3, 1.0, 2.0).unwrap();
    let mut last = 0.0;
    for a in [-1.0, 0.0, 0.5, 2.0] {
        let v = weighted_lp_norm(&f, &WeightedNormSpec::new(2.0, a, 3).unwrap(), &spec()).unwrap().value;
        assert!(v >= last);
        last = v;
    }
}

fn profile(kind: u8, x: f64) -> RadialProfile {
    match kind % 3 {
        0 => RadialProfile::gaussian(3, 0.5 + x).unwrap(),
        1 => RadialProfile::smooth_bump(3, 0.0, 0.5 + x).unwrap(),
        _ => RadialProfile::annulus(3, 0.2 * x, 0.5 + x).unwrap(),
    }
}

fn sum(f: &RadialProfile, g: &RadialProfile) -> RadialProfile {
    let grid = Grid::hybrid(1e-4, 1.0, 20.0, 200).unwrap();
    let v = grid.radii().iter().map(|&r| f.eval(r).unwrap() + g.eval(r).unwrap()).collect();
    RadialProfile::sampled(3, grid, v, -20.0).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]
    #[test]
    fn triangle_inequality_and_homogeneity(k1 in 0u8..3, k2 in 0u8..3, x1 in 0.0..2.0f64, x2 in 0.0..2.0f64, c in -3.0..3.0f64, p in 1.0..4.0f64) {
        let (f, g) = (profile(k1, x1), profile(k2, x2));
        let ns = WeightedNormSpec::new(p, 0.5, 3).unwrap();
        let s = QuadratureSpec::default().with_tol(1e-8, 1e-13);
        let a = weighted_lp_norm(&f, &ns, &s).unwrap().value;
        let b = weighted_lp_norm(&g, &ns, &s).unwrap().value;
        let fg = weighted_lp_norm(&sum(&f, &g), &ns, &s).unwrap().value;
        // the sum is a spline through samples: allow its interpolation error
        prop_assert!(fg <= (a + b) * (1.0 + 1e-3));
        let cf = weighted_lp_norm(&f.scale(c).unwrap(), &ns, &s).unwrap().value;
        prop_assert!((cf - c.abs() * a).abs() <= 1e-10 * a.max(1.0));
    }
}
