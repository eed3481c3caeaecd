mod common;

use common::{bessel_k_integral, bessel_potential_transform, rel};
use dbu::specfun::{bessel_k, bessel_potential_constant, BesselProfile};

#[test]
fn bessel_k_matches_integral_on_lattice() {
    let mut worst = 0.0f64;
    for i in 0..20 {
        let nu = 3.0 * i as f64 / 19.0;
        for j in 0..20 {
            let x = 1e-2 * (2000f64).powf(j as f64 / 19.0);
            let e = rel(bessel_k(nu, x).unwrap(), bessel_k_integral(nu, x));
            worst = worst.max(e);
            assert!(e < 1e-10, "nu={nu} x={x} rel={e:e}");
        }
    }
    println!("worst relative error {worst:e}");
}

#[test]
fn half_order_closed_form() {
    for &x in &[1e-3, 0.1, 1.0, 2.0, 2.5, 10.0, 30.0] {
        let exact = (std::f64::consts::FRAC_PI_2 / x).sqrt() * (-x).exp();
        assert!(rel(bessel_k(0.5, x).unwrap(), exact) < 1e-12, "x={x}");
    }
}

#[test]
fn recurrence_across_orders() {
    for i in 0..=6 {
        let nu = 0.5 + 0.25 * i as f64;
        for j in 0..=10 {
            let x = 0.5 + 0.95 * j as f64;
            let lhs = bessel_k(nu + 1.0, x).unwrap();
            let rhs = bessel_k((nu - 1.0).abs(), x).unwrap() + 2.0 * nu / x * bessel_k(nu, x).unwrap();
            assert!(rel(lhs, rhs) < 1e-8);
        }
    }
}

#[test]
fn fourier_pair_with_one_fitted_constant() {
    for dim in 1..=3usize {
        let d = dim as f64;
        for k in 1..=3 {
            let m = d / 4.0 + (d / 4.0) * k as f64 / 3.0;
            let profile = BesselProfile::calibrated(dim, m, 1.0, bessel_potential_transform(dim, m, 1.0)).unwrap();
            for j in 0..=20 {
                let xi = 0.1 * 50f64.powf(j as f64 / 20.0);
                let e = rel(profile.transform(xi).unwrap(), bessel_potential_transform(dim, m, xi));
                assert!(e < 1e-4, "d={dim} m={m} xi={xi} rel={e:e}");
            }
            let c = bessel_potential_constant(dim, m);
            assert!(rel(profile.fourier_constant, c) < 1e-10, "d={dim} m={m}");
        }
    }
}

#[test]
fn profile_tail_decays_exponentially() {
    let half = BesselProfile::new(2, 0.5).unwrap();
    let ratio = half.profile(20.0).unwrap() / half.profile(10.0).unwrap();
    assert!(ratio < (-9.0f64).exp());
    let log = BesselProfile::new(2, 1.0).unwrap();
    let r = (-5.0f64).exp();
    assert!((log.profile(r).unwrap() / 5.0 - 1.0).abs() < 0.1);
}
