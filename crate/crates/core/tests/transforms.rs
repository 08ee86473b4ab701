use radlab::quadrature::integrate_panels;
use radlab::transforms::*;
use radlab::*;

fn spec() -> QuadratureSpec {
    QuadratureSpec::default().with_tol(1e-10, 1e-14)
}

#[test]
fn gaussian_is_a_fixed_point() {
    for n in 2..=4 {
        let u = RadialProfile::gaussian(n, 1.0).unwrap();
        let g = Grid::linear(1e-3, 10.0, 60).unwrap();
        let t = hankel_fourier(&u, &g, &spec()).unwrap();
        for &r in g.radii() {
            assert!((t.eval(r).unwrap() - (-0.5 * r * r).exp()).abs() < 1e-9, "n={n} r={r}");
        }
        assert!((hankel_at(&u, 0.0, &spec()).unwrap().value - 1.0).abs() < 1e-10);
    }
}

#[test]
fn dilation_of_gaussian() {
    // e^{-r²/(2σ²)} ↦ σⁿ e^{-σ²ρ²/2}
    let (n, sigma) = (3, 2.0f64);
    let u = RadialProfile::gaussian(n, sigma).unwrap();
    for &rho in &[0.1, 0.7, 1.5] {
        let v = hankel_at(&u, rho, &spec()).unwrap().value;
        let exact = sigma.powi(3) * (-0.5 * sigma * sigma * rho * rho).exp();
        assert!((v - exact).abs() < 1e-9 * exact.max(1e-3));
    }
}

#[test]
fn ball_indicator_transform() {
    // n=3: χ_{B(0,1)} ↦ √(2/π)(sin ρ - ρ cos ρ)/ρ³
    let u = RadialProfile::annulus(3, 0.0, 1.0).unwrap();
    for &rho in &[0.5, 2.0, 7.3, 20.0] {
        let v = hankel_at(&u, rho, &spec()).unwrap().value;
        let exact = (2.0 / std::f64::consts::PI).sqrt() * (rho.sin() - rho * rho.cos()) / rho.powi(3);
        assert!((v - exact).abs() < 1e-10, "rho={rho}");
    }
}

#[test]
fn plancherel_and_roundtrip_on_smooth_profiles() {
    for u in [
        RadialProfile::gaussian(2, 0.5).unwrap(),
        RadialProfile::smooth_bump(3, 0.0, 1.0).unwrap(),
        RadialProfile::power_cutoff(4, 2.0, 1.0).unwrap(),
    ] {
        let n = u.dim() as i32;
        let s = spectrum(&u, &spec()).unwrap();
        let mut knots = vec![0.0];
        knots.extend(spectral_grid(&u).unwrap().radii().iter().copied());
        let l2s = integrate_panels(|r| s.eval(r).unwrap().powi(2) * r.powi(n - 1), &knots, &spec()).unwrap().value;
        let mut ub = vec![0.0];
        ub.extend(u.breakpoints());
        ub.push(u.effective_radius().unwrap());
        ub.sort_by(f64::total_cmp);
        ub.dedup();
        let l2u = integrate_panels(|r| u.eval(r).unwrap().powi(2) * r.powi(n - 1), &ub, &spec()).unwrap().value;
        assert!(((l2s / l2u).sqrt() - 1.0).abs() < 1e-6, "{}", u.descriptor());
        let g = Grid::linear(0.01, u.effective_radius().unwrap(), 50).unwrap();
        let back = apply_multiplier(&u, &|_| 1.0, &g, &spec()).unwrap();
        for &r in g.radii() {
            assert!((back.eval(r).unwrap() - u.eval(r).unwrap()).abs() < 1e-6, "{} r={r}", u.descriptor());
        }
    }
}

#[test]
fn non_decaying_input_is_rejected() {
    let c = RadialProfile::constant(3, 1.0).unwrap();
    assert!(matches!(hankel_at(&c, 1.0, &spec()), Err(Error::Domain { .. })));
}
