//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use dbu::quadrature::{integrate, Tolerance};
use statrs::function::gamma::gamma;

/// `K_ν(x) = ∫_0^∞ exp(−x cosh t) cosh(ν t) dt`, truncated where the integrand
/// has dropped 50 e-folds below its maximum.
pub fn bessel_k_integral(nu: f64, x: f64) -> f64 {
    let log_f = |t: f64| -x * t.cosh() + nu * t;
    let mut peak = log_f(0.0);
    let mut t = 0.0;
    loop {
        t += 0.05;
        let v = log_f(t);
        peak = peak.max(v);
        if v < peak - 50.0 {
            break;
        }
    }
    // Split at the integrand's peak so each piece is unimodal.
    let t_peak = if nu > x { (nu / x).asinh() } else { 0.0 };
    let f = |s: f64| (-x * s.cosh()).exp() * (nu * s).cosh();
    let tol = Tolerance { abs: 0.0, rel: 1e-14, max_intervals: 5000 };
    let a = integrate(f, 0.0, t_peak, tol).unwrap().value;
    let b = integrate(f, t_peak, t, tol).unwrap().value;
    a + b
}

/// Fourier transform of `(1+|y|²)^(−m)` in `dim` dimensions at `|ξ| = xi`,
/// through `(1+|y|²)^(−m) = Γ(m)^(−1) ∫ s^(m−1) e^(−s(1+|y|²)) ds` and the
/// Gaussian transform, integrated in `u = ln s`.
pub fn bessel_potential_transform(dim: usize, m: f64, xi: f64) -> f64 {
    let d = dim as f64;
    let f = |u: f64| {
        let s = u.exp();
        let log = m * u - s + 0.5 * d * (std::f64::consts::PI / s).ln() - xi * xi / (4.0 * s);
        log.exp()
    };
    let tol = Tolerance { abs: 0.0, rel: 1e-13, max_intervals: 5000 };
    integrate(f, -60.0, 5.0, tol).unwrap().value / gamma(m)
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}
