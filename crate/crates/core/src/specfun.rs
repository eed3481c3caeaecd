//! Modified Bessel functions of the second kind and the Bessel-potential
//! radial profile `r^(-ν) K_ν(r)`.
//!
//! `K_ν` is evaluated by Temme's method: the order is split as `ν = n + μ` with
//! `|μ| ≤ 1/2`, the pair `K_μ, K_{μ+1}` is computed directly and then recurred
//! upward in `n`. For `x ≤ 2` the pair comes from Temme's series, which stays
//! regular as `μ → 0` (the `−log x` behaviour of `K_0` emerges from the
//! `sinh(μ d)/(μ d)` factor). For `x > 2` it comes from Steed's continued
//! fraction. Both branches agree to about 1e-15 at the switch point `x = 2`.
//! Order zero uses its own log-form series below the switch.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;
use thiserror::Error;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const SWITCH_X: f64 = 2.0;
const EPS: f64 = 1e-16;
const MAX_ITER: usize = 10_000;
/// Orders below this are treated as exactly zero.
pub const NU_ZERO: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpecFunError {
    #[error("argument out of domain: {0}")]
    Domain(String),
    #[error("K_{nu}({x}) exceeds the representable range")]
    Overflow { nu: f64, x: f64 },
    #[error("series for K_{nu}({x}) did not converge")]
    NoConvergence { nu: f64, x: f64 },
}

fn chebev(c: &[f64], y: f64) -> f64 {
    let y2 = 2.0 * y;
    let (mut d, mut dd) = (0.0, 0.0);
    for &cj in c[1..].iter().rev() {
        let sv = d;
        d = y2 * d - dd + cj;
        dd = sv;
    }
    y * d - dd + 0.5 * c[0]
}

/// Returns `(Γ1, Γ2, 1/Γ(1+μ), 1/Γ(1−μ))` for `|μ| ≤ 1/2`, where
/// `Γ1 = (1/Γ(1−μ) − 1/Γ(1+μ)) / (2μ)` and `Γ2 = (1/Γ(1−μ) + 1/Γ(1+μ)) / 2`.
fn temme_gammas(mu: f64) -> (f64, f64, f64, f64) {
    const C1: [f64; 7] = [
        -1.142_022_680_371_168,
        6.516_511_267_073_7e-3,
        3.087_090_173_086e-4,
        -3.470_626_964_9e-6,
        6.943_766_4e-9,
        3.677_95e-11,
        -1.356e-13,
    ];
    const C2: [f64; 8] = [
        1.843_740_587_300_905,
        -7.685_284_084_478_67e-2,
        1.271_927_136_654_6e-3,
        -4.971_736_704_2e-6,
        -3.312_611_98e-8,
        2.423_096e-10,
        -1.702e-13,
        -1.49e-15,
    ];
    let xx = 8.0 * mu * mu - 1.0;
    let g1 = chebev(&C1, xx);
    let g2 = chebev(&C2, xx);
    (g1, g2, g2 - mu * g1, g2 + mu * g1)
}

/// `(K_μ(x), K_{μ+1}(x))` for `|μ| ≤ 1/2`, `0 < x ≤ 2`.
fn temme_series(mu: f64, x: f64) -> Result<(f64, f64), SpecFunError> {
    let x2 = 0.5 * x;
    let pimu = PI * mu;
    let fact = if pimu.abs() < EPS { 1.0 } else { pimu / pimu.sin() };
    let d = -x2.ln();
    let e = mu * d;
    let fact2 = if e.abs() < EPS { 1.0 } else { e.sinh() / e };
    let (g1, g2, gampl, gammi) = temme_gammas(mu);
    let mut ff = fact * (g1 * e.cosh() + g2 * fact2 * d);
    let mut sum = ff;
    let ee = e.exp();
    let mut p = 0.5 * ee / gampl;
    let mut q = 0.5 / (ee * gammi);
    let mut c = 1.0;
    let dd = x2 * x2;
    let mut sum1 = p;
    let mu2 = mu * mu;
    for i in 1..MAX_ITER {
        let fi = i as f64;
        ff = (fi * ff + p + q) / (fi * fi - mu2);
        c *= dd / fi;
        p /= fi - mu;
        q /= fi + mu;
        let del = c * ff;
        sum += del;
        sum1 += c * (p - fi * ff);
        if del.abs() < sum.abs() * EPS {
            return Ok((sum, sum1 * 2.0 / x));
        }
    }
    Err(SpecFunError::NoConvergence { nu: mu, x })
}

/// `(K_μ(x), K_{μ+1}(x))` for `|μ| ≤ 1/2`, `x > 2`, by Steed's algorithm.
fn steed_fraction(mu: f64, x: f64) -> Result<(f64, f64), SpecFunError> {
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut delh = d;
    let mut h = d;
    let (mut q1, mut q2) = (0.0, 1.0);
    let a1 = 0.25 - mu * mu;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    let mut done = false;
    for i in 2..MAX_ITER {
        let fi = i as f64;
        a -= 2.0 * (fi - 1.0);
        c = -a * c / fi;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < EPS {
            done = true;
            break;
        }
    }
    if !done {
        return Err(SpecFunError::NoConvergence { nu: mu, x });
    }
    h *= a1;
    let k_mu = (PI / (2.0 * x)).sqrt() * (-x).exp() / s;
    let k_mu1 = k_mu * (mu + x + 0.5 - h) / x;
    Ok((k_mu, k_mu1))
}

/// `K_0(x)` for `0 < x ≤ 2` from the log-form series
/// `K_0 = −(ln(x/2) + γ) I_0(x) + Σ_k (x²/4)^k H_k / (k!)²`.
fn k0_log_series(x: f64) -> f64 {
    let y = 0.25 * x * x;
    let mut term = 1.0;
    let mut i0 = 1.0;
    let mut harmonic = 0.0;
    let mut tail = 0.0;
    for k in 1..200 {
        let fk = k as f64;
        term *= y / (fk * fk);
        harmonic += 1.0 / fk;
        i0 += term;
        tail += term * harmonic;
        if term < EPS * i0 && term * harmonic < EPS * tail.abs().max(EPS) {
            break;
        }
    }
    -((0.5 * x).ln() + EULER_GAMMA) * i0 + tail
}

/// Modified Bessel function of the second kind `K_ν(x)` for real `ν ≥ 0`, `x > 0`.
pub fn bessel_k(nu: f64, x: f64) -> Result<f64, SpecFunError> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(SpecFunError::Domain(format!("K_nu requires finite x > 0, got {x}")));
    }
    if !(nu >= 0.0) || !nu.is_finite() {
        return Err(SpecFunError::Domain(format!("K_nu requires finite nu >= 0, got {nu}")));
    }
    if nu < NU_ZERO && x <= SWITCH_X {
        return Ok(k0_log_series(x));
    }
    let nu = if nu < NU_ZERO { 0.0 } else { nu };
    let n = (nu + 0.5).floor();
    let mu = nu - n;
    let (mut k_mu, mut k_mu1) = if x <= SWITCH_X { temme_series(mu, x)? } else { steed_fraction(mu, x)? };
    let two_over_x = 2.0 / x;
    for i in 1..=(n as usize) {
        let next = (mu + i as f64) * two_over_x * k_mu1 + k_mu;
        k_mu = k_mu1;
        k_mu1 = next;
    }
    if !k_mu.is_finite() {
        return Err(SpecFunError::Overflow { nu, x });
    }
    Ok(k_mu)
}

/// Closed form of the constant `C` in `((1+|y|²)^(-m))^(ξ) = C |ξ|^(-ν) K_ν(|ξ|)`
/// under `f̂(ξ) = ∫ f(y) e^(−iξ·y) dy` in `dim` dimensions:
/// `C = (2π)^(d/2) 2^(1−m) / Γ(m)`.
pub fn bessel_potential_constant(dim: usize, m: f64) -> f64 {
    (2.0 * PI).powf(dim as f64 / 2.0) * 2f64.powf(1.0 - m) / gamma(m)
}

/// The Fourier pair `(1+|y|²)^(−m) ↔ C |ξ|^(−ν) K_ν(|ξ|)`, `ν = dim/2 − m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BesselProfile {
    pub dim: usize,
    pub m: f64,
    pub nu: f64,
    pub fourier_constant: f64,
}

impl BesselProfile {
    pub fn new(dim: usize, m: f64) -> Result<Self, SpecFunError> {
        if dim == 0 {
            return Err(SpecFunError::Domain("dimension must be at least 1".into()));
        }
        if !(m > 0.0) || !m.is_finite() {
            return Err(SpecFunError::Domain(format!("potential exponent must be positive, got {m}")));
        }
        let nu = dim as f64 / 2.0 - m;
        if nu < -NU_ZERO {
            return Err(SpecFunError::Domain(format!("m = {m} exceeds dim/2 = {}", dim as f64 / 2.0)));
        }
        let nu = if nu.abs() < NU_ZERO { 0.0 } else { nu };
        Ok(Self { dim, m, nu, fourier_constant: bessel_potential_constant(dim, m) })
    }

    /// Replaces the closed-form constant by one fitted from a single transform
    /// value `transform_at_xi` at frequency `xi`.
    pub fn calibrated(dim: usize, m: f64, xi: f64, transform_at_xi: f64) -> Result<Self, SpecFunError> {
        let mut out = Self::new(dim, m)?;
        out.fourier_constant = transform_at_xi / out.profile(xi)?;
        Ok(out)
    }

    pub fn is_log_case(&self) -> bool {
        self.nu == 0.0
    }

    /// `r^(−ν) K_ν(r)`.
    pub fn profile(&self, r: f64) -> Result<f64, SpecFunError> {
        potential_profile(self, r)
    }

    /// Fourier transform of the Bessel potential at `|ξ| = xi`.
    pub fn transform(&self, xi: f64) -> Result<f64, SpecFunError> {
        Ok(self.fourier_constant * self.profile(xi)?)
    }
}

/// `r^(−ν) K_ν(r)` for the profile's order.
pub fn potential_profile(profile: &BesselProfile, r: f64) -> Result<f64, SpecFunError> {
    if !(r > 0.0) {
        return Err(SpecFunError::Domain(format!("profile radius must be positive, got {r}")));
    }
    let k = bessel_k(profile.nu, r)?;
    let out = if profile.nu == 0.0 { k } else { r.powf(-profile.nu) * k };
    if !out.is_finite() {
        return Err(SpecFunError::Overflow { nu: profile.nu, x: r });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_order_closed_form() {
        let k = bessel_k(0.5, 1.0).unwrap();
        let exact = (PI / 2.0).sqrt() * (-1f64).exp();
        assert!((k / exact - 1.0).abs() < 1e-13, "{k} vs {exact}");
        for &x in &[0.01, 0.3, 1.9, 2.1, 7.5, 25.0] {
            let k = bessel_k(1.5, x).unwrap();
            let exact = (PI / (2.0 * x)).sqrt() * (-x).exp() * (1.0 + 1.0 / x);
            assert!((k / exact - 1.0).abs() < 1e-13, "x={x}");
        }
    }

    #[test]
    fn order_zero_log_asymptote() {
        for &x in &[1e-4, 1e-6, 1e-9] {
            let ratio = bessel_k(0.0, x).unwrap() / (-(x as f64).ln());
            assert!((ratio - 1.0).abs() < 0.1, "x={x} ratio={ratio}");
        }
        // tabulated K0(1), K1(1)
        assert!((bessel_k(0.0, 1.0).unwrap() - 0.421_024_438_240_708_3).abs() < 1e-15);
        assert!((bessel_k(1.0, 1.0).unwrap() - 0.601_907_230_197_234_6).abs() < 1e-15);
    }

    #[test]
    fn branches_agree_at_switch() {
        for &mu in &[0.0, 0.1, -0.3, 0.5] {
            let below = temme_series(mu, SWITCH_X).unwrap();
            let above = steed_fraction(mu, SWITCH_X).unwrap();
            assert!((below.0 / above.0 - 1.0).abs() < 1e-12, "mu={mu}");
            assert!((below.1 / above.1 - 1.0).abs() < 1e-12, "mu={mu}");
        }
        assert!((k0_log_series(SWITCH_X) / steed_fraction(0.0, SWITCH_X).unwrap().0 - 1.0).abs() < 1e-13);
    }

    #[test]
    fn recurrence_holds() {
        for i in 0..=6 {
            let nu = 0.5 + 0.25 * i as f64;
            for j in 0..=10 {
                let x = 0.5 + 0.95 * j as f64;
                // K_{-ν} = K_ν
                let lhs = bessel_k(nu + 1.0, x).unwrap();
                let rhs = bessel_k((nu - 1.0).abs(), x).unwrap() + 2.0 * nu / x * bessel_k(nu, x).unwrap();
                assert!((lhs / rhs - 1.0).abs() < 1e-8, "nu={nu} x={x}");
            }
        }
    }

    #[test]
    fn monotone_decreasing() {
        assert!(bessel_k(1.0, 1.0).unwrap() > bessel_k(1.0, 2.0).unwrap());
        for &nu in &[0.0, 0.05, 0.5, 1.3, 2.9] {
            let mut prev = f64::INFINITY;
            for j in 0..400 {
                let x = 1e-3 * (1.03f64).powi(j);
                let k = bessel_k(nu, x).unwrap();
                assert!(k > 0.0 && k < prev, "nu={nu} x={x}");
                prev = k;
            }
        }
    }

    #[test]
    fn domain_and_overflow_errors() {
        assert!(matches!(bessel_k(1.0, 0.0), Err(SpecFunError::Domain(_))));
        assert!(matches!(bessel_k(1.0, -1.0), Err(SpecFunError::Domain(_))));
        assert!(matches!(bessel_k(-0.5, 1.0), Err(SpecFunError::Domain(_))));
        assert!(matches!(bessel_k(60.0, 1e-300), Err(SpecFunError::Overflow { .. })));
    }

    #[test]
    fn profile_limits() {
        let p = BesselProfile::new(1, 0.0).map(|_| ()).unwrap_err();
        assert!(matches!(p, SpecFunError::Domain(_)));
        let p = BesselProfile::new(2, 0.75).unwrap();
        assert!((p.nu - 0.25).abs() < 1e-15);
        // ν = 0.5: r^(-ν) K_ν(r) ~ r^(-2ν), so profile(r)·r^(2ν) → constant;
        // ratios at 1e-2, 1e-3, 1e-4 within 2%
        let half = BesselProfile::new(2, 0.5).unwrap();
        let vals: Vec<f64> = [1e-2, 1e-3, 1e-4].iter().map(|&r: &f64| half.profile(r).unwrap() * r).collect();
        assert!((vals[0] / vals[1] - 1.0).abs() < 0.02 && (vals[1] / vals[2] - 1.0).abs() < 0.02);
        let zero = BesselProfile::new(2, 1.0).unwrap();
        assert!(zero.is_log_case());
        let r = (-5f64).exp();
        assert!((zero.profile(r).unwrap() / 5.0 - 1.0).abs() < 0.1);
        assert!(half.profile(20.0).unwrap() / half.profile(10.0).unwrap() < (-9f64).exp());
        assert!(half.profile(0.0).is_err());
    }

    #[test]
    fn calibration_recovers_constant() {
        let p = BesselProfile::new(3, 1.1).unwrap();
        let q = BesselProfile::calibrated(3, 1.1, 0.7, p.transform(0.7).unwrap()).unwrap();
        assert!((q.fourier_constant / p.fourier_constant - 1.0).abs() < 1e-14);
    }
}
