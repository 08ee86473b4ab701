use radlab::ball::{ball_frac_inverse, build_spectrum, gradient_form_ratio, kernel_domination, ni_ball_ratio, ni_gradient_constant};
use radlab::{integrate, Error, QuadratureSpec, RadialProfile};

fn spec() -> QuadratureSpec {
    QuadratureSpec::default().with_tol(1e-12, 1e-300)
}

/// Solution of `-u'' - (n-1)u'/r = f`, `u(R) = 0`, regular at the origin:
/// `u(r) = ∫_r^R t^{1-n} ∫_0^t τ^{n-1} f(τ) dτ dt`.
fn poisson_oracle(f: &RadialProfile, radius: f64, r: f64) -> f64 {
    let n = f.dim() as i32;
    let inner = |t: f64| integrate(|x: f64| x.powi(n - 1) * f.eval(x).unwrap(), 0.0, t, &spec()).unwrap().value;
    integrate(|t: f64| t.powi(1 - n) * inner(t), r, radius, &spec()).unwrap().value
}

#[test]
fn s_two_matches_the_boundary_value_problem() {
    let sp = build_spectrum(3, 1.0, 64).unwrap();
    let f = RadialProfile::smooth_bump(3, 0.0, 0.6).unwrap();
    let u = ball_frac_inverse(&f, 2.0, &sp).unwrap();
    for r in [0.05, 0.3, 0.55, 0.9] {
        let exact = poisson_oracle(&f, 1.0, r);
        assert!((u.eval(r) - exact).abs() < 1e-7 * exact.abs().max(1e-3), "r={r}: {} vs {exact}", u.eval(r));
    }
}

#[test]
fn s_one_is_stable_under_doubling_k() {
    let one = RadialProfile::constant(3, 1.0).unwrap();
    let a = ball_frac_inverse(&one, 1.0, &build_spectrum(3, 1.0, 64).unwrap()).unwrap();
    let b = ball_frac_inverse(&one, 1.0, &build_spectrum(3, 1.0, 128).unwrap()).unwrap();
    assert!((a.eval(0.5) - b.eval(0.5)).abs() < 1e-4);
    // with |c_k| ~ 1/k the L² tail ~ K^{-3} is far above the default tolerance
    assert!(a.truncation_warning.is_some());
    assert!(b.tail_estimate < a.tail_estimate);
}

#[test]
fn expansion_is_continuous_in_the_order() {
    let sp = build_spectrum(3, 1.0, 64).unwrap();
    let f = RadialProfile::smooth_bump(3, 0.0, 0.8).unwrap();
    for r in [0.2, 0.6] {
        let at = |s: f64| ball_frac_inverse(&f, s, &sp).unwrap().eval(r);
        for s in [0.5, 1.0, 1.5, 2.0] {
            let (lo, mid, hi) = (at(s - 1e-3), at(s), at(s + 1e-3));
            assert!(lo > 0.0 && mid > 0.0 && hi > 0.0);
            // the midpoint agrees with linear interpolation to second order
            assert!((mid - 0.5 * (lo + hi)).abs() < 1e-5 * mid, "s={s} r={r}");
            assert!((hi - lo).abs() < 1e-2 * mid);
        }
    }
}

#[test]
fn ni_gradient_form_holds_for_first_mode_and_bumps() {
    let bound = ni_gradient_constant(3).unwrap();
    assert!((bound - (4.0 * std::f64::consts::PI).powf(-0.5)).abs() < 1e-15);
    let sp = build_spectrum(3, 1.0, 32).unwrap();
    let phi1 = sp.eigenfunction_profile(1).unwrap();
    let rep = ni_ball_ratio(&phi1, 1.0, 2.0, &sp).unwrap();
    let g = rep.gradient_ratio.unwrap();
    // u = λ₁^{-1/2}φ₁: ratio = max_r sin(πr)/√r / (π√(2π))
    let exact = (1..100_000).map(|i| i as f64 * 1e-5).map(|r| (std::f64::consts::PI * r).sin() / r.sqrt()).fold(0.0, f64::max)
        / (std::f64::consts::PI * (2.0 * std::f64::consts::PI).sqrt());
    assert!((g - exact).abs() < 1e-6, "{g} vs {exact}");
    assert!(g <= bound && rep.ratio.unwrap().is_finite());
    for w in [0.3, 0.6, 1.0] {
        let bump = RadialProfile::smooth_bump(3, 0.0, w).unwrap();
        assert!(gradient_form_ratio(&bump, 1.0).unwrap() <= bound);
    }
    let shell = RadialProfile::smooth_bump(3, 0.5, 0.3).unwrap();
    assert!(gradient_form_ratio(&shell, 1.0).unwrap() <= bound);
}

#[test]
fn gradient_ratio_is_dilation_invariant() {
    let a = gradient_form_ratio(&RadialProfile::smooth_bump(4, 0.0, 0.5).unwrap(), 1.0).unwrap();
    let b = gradient_form_ratio(&RadialProfile::smooth_bump(4, 0.0, 1.0).unwrap(), 2.0).unwrap();
    assert!((a / b - 1.0).abs() < 1e-6);
}

#[test]
fn admissibility_and_l2_restriction() {
    let sp = build_spectrum(3, 1.0, 16).unwrap();
    let one = RadialProfile::constant(3, 1.0).unwrap();
    match ni_ball_ratio(&one, 2.0, 2.0, &sp) {
        Err(Error::Inadmissible { violated, .. }) => assert!(violated[0].contains("s < n/p")),
        other => panic!("{other:?}"),
    }
    assert!(ni_ball_ratio(&one, 0.4, 2.0, &sp).is_err());
    // |x|^{-2} is in L^{3/2-} but not in L²(B)
    let singular = RadialProfile::power_cutoff(3, -1.6, 2.0).unwrap();
    assert!(ni_ball_ratio(&singular, 1.0, 1.2, &sp).is_err());
    let rep = ni_ball_ratio(&one, 1.0, 1.5, &sp).unwrap();
    assert!(rep.ratio.unwrap() > 0.0 && rep.gradient_ratio.is_none());
}

#[test]
fn truncated_kernel_is_dominated_by_riesz_kernel() {
    let sp = build_spectrum(3, 1.0, 64).unwrap();
    let pairs = [(0.2, 0.6), (0.3, 0.8), (0.5, 0.1), (0.4, 0.7)];
    let d = kernel_domination(&sp, 1.0, &pairs).unwrap();
    assert!(d.samples.iter().all(|s| s.kernel >= 0.0));
    // the heat-kernel argument gives C = c(n,s)·(const); the whole-space
    // Riesz kernel c(3,1)|x-y|^{-2} = |x-y|^{-2}/(2π²) dominates the Dirichlet one
    assert!(d.constant > 0.0 && d.constant <= 1.0 / (2.0 * std::f64::consts::PI.powi(2)) + 1e-3, "{}", d.constant);
    assert!(d.caveat.contains("K = 64"));
}
