use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use statrs::function::gamma::gamma;

use super::{schrodinger_prefactor, LinPropError};
use crate::fields::{LineData, Parity, PointData, V0Data};
use crate::parallel::{self, Execution};
use crate::quadrature::{integrate, QuadError, Tolerance};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
const TAIL_EXPONENT: f64 = 45.0;
const TRUNCATION_TOL: f64 = 1e-8;

/// `exp(c + Σ_k (−a_k z_k² + b_k z_k))` with `z = x − center`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianTerm {
    pub center: Vec<f64>,
    pub a: Vec<Complex64>,
    pub b: Vec<Complex64>,
    pub c: Complex64,
}

impl GaussianTerm {
    pub fn isotropic(center: Vec<f64>, a: Complex64) -> Self {
        let d = center.len();
        Self { center, a: vec![a; d], b: vec![Complex64::new(0.0, 0.0); d], c: Complex64::new(0.0, 0.0) }
    }

    /// Free evolution to time `t` evaluated at `x`, with `shift` added to `a_k`
    /// on the axes flagged in `mixed`. Each axis evolves independently:
    /// `D^(−1/2) exp((−a z² + b z + i t b²)/D)`, `D = 1 + 4iat`.
    fn evolve(&self, t: f64, x: &[f64], shift: f64, mixed: &[bool]) -> Complex64 {
        let mut pre = Complex64::new(1.0, 0.0);
        let mut expo = self.c;
        for k in 0..self.a.len() {
            let a = if mixed[k] { self.a[k] + shift } else { self.a[k] };
            let b = self.b[k];
            let z = x[k] - self.center[k];
            let d = 1.0 + 4.0 * I * a * t;
            pre /= d.sqrt();
            expo += (-a * z * z + b * z + I * t * b * b) / d;
        }
        pre * expo.exp()
    }
}

/// One summand of a [`GaussianMixture`].
#[derive(Debug, Clone, PartialEq)]
pub enum Component {
    /// `weight · term`; every `a_k` needs a positive real part.
    Gaussian { weight: Complex64, term: GaussianTerm },
    /// `weight/Γ(m) ∫₀^∞ s^(m−1) e^(−s) term_s ds`, where `term_s` has `s` added
    /// to `a_k` on the `mixed` axes. With chirp coefficients this represents
    /// `e^(−i|z|²/4t*) (1 + |z|²)^(−m)` and friends.
    Subordinated { weight: Complex64, m: f64, mixed: Vec<bool>, term: GaussianTerm },
}

/// Initial data written as a finite sum of (subordinated) Gaussians, so that
/// the free flow of every summand is known in closed form.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianMixture {
    pub dim: usize,
    pub components: Vec<Component>,
}

impl GaussianMixture {
    /// `e^(−|x − center|²)`.
    pub fn gaussian(center: Vec<f64>) -> Self {
        let dim = center.len();
        let term = GaussianTerm::isotropic(center, Complex64::new(1.0, 0.0));
        Self { dim, components: vec![Component::Gaussian { weight: Complex64::new(1.0, 0.0), term }] }
    }

    pub fn point(data: &PointData) -> Self {
        let dim = data.center.len();
        let term = GaussianTerm::isotropic(data.center.clone(), I / (4.0 * data.t_star));
        let c = Component::Subordinated {
            weight: Complex64::new(data.alpha, 0.0),
            m: data.m,
            mixed: vec![true; dim],
            term,
        };
        Self { dim, components: vec![c] }
    }

    pub fn line(data: &LineData) -> Self {
        let mut term = GaussianTerm::isotropic(vec![0.0; data.dim], I / (4.0 * data.t_star));
        term.a[0] += 0.25;
        let mut mixed = vec![true; data.dim];
        mixed[0] = false;
        let c = Component::Subordinated {
            weight: Complex64::new(data.alpha / (2.0 * PI.sqrt()), 0.0),
            m: data.m,
            mixed,
            term,
        };
        Self { dim: data.dim, components: vec![c] }
    }

    /// The even one-dimensional datum `v₀`; the odd extension has a sign jump
    /// at the origin and no mixture representation.
    pub fn v0(data: &V0Data) -> Result<Self, LinPropError> {
        if data.parity != Parity::Even {
            return Err(LinPropError::Geometry("only the even extension of v0 is a Gaussian mixture".into()));
        }
        let a = I / (4.0 * data.t_star);
        let components = [1.0, -1.0]
            .iter()
            .map(|&sign| Component::Subordinated {
                weight: Complex64::new(data.alpha, 0.0),
                m: data.m,
                mixed: vec![true],
                term: GaussianTerm {
                    center: vec![0.0],
                    a: vec![a],
                    b: vec![sign * I / (2.0 * data.t_star)],
                    c: -I / (4.0 * data.t_star),
                },
            })
            .collect();
        Ok(Self { dim: 1, components })
    }

    pub fn scaled(mut self, factor: Complex64) -> Self {
        for c in &mut self.components {
            match c {
                Component::Gaussian { weight, .. } | Component::Subordinated { weight, .. } => *weight *= factor,
            }
        }
        self
    }

    pub fn plus(mut self, other: GaussianMixture) -> Self {
        assert_eq!(self.dim, other.dim, "mixtures of different dimension");
        self.components.extend(other.components);
        self
    }

    /// Free evolution at `(t, x)`. `t = 0` returns the initial datum.
    pub fn evolve(&self, t: f64, x: &[f64]) -> Result<QuadratureValue, QuadError> {
        let mut out = QuadratureValue::default();
        for c in &self.components {
            let v = match c {
                Component::Gaussian { weight, term } => {
                    let value = *weight * term.evolve(t, x, 0.0, &vec![false; self.dim]);
                    QuadratureValue { value, error: 0.0, truncation: 0.0 }
                }
                Component::Subordinated { weight, m, mixed, term } => {
                    subordinated(t, x, *m, mixed, term).map(|v| v.scaled(*weight))?
                }
            };
            out.value += v.value;
            out.error += v.error;
            out.truncation += v.truncation;
        }
        Ok(out)
    }
}

fn subordinated(t: f64, x: &[f64], m: f64, mixed: &[bool], term: &GaussianTerm) -> Result<QuadratureValue, QuadError> {
    // Integrate over u = ln s: s^m e^(−s) term_s du.
    let g = |s: f64| term.evolve(t, x, s, mixed);
    let f = |u: f64| {
        let s = u.exp();
        g(s) * (m * u - s).exp()
    };
    let norm = 1.0 / gamma(m);
    let mut hi = 1.0_f64;
    while m * hi.ln() - hi > -TAIL_EXPONENT {
        hi *= 1.5;
    }
    let tol = Tolerance { abs: 1e-300, rel: 1e-12, max_intervals: 4000 };
    let mut lo = 1e-3_f64;
    let mut est = integrate(f, lo.ln(), hi.ln(), tol)?;
    let mut value = est.value;
    let mut error = est.error;
    // Lower tail: ∫₀^lo s^(m−1) |term_s| ds ≤ sup|term_s| lo^m / m.
    let tail = |lo: f64| {
        let sup = (0..=8).map(|k| g(lo * 10f64.powi(-k)).norm()).fold(0.0, f64::max);
        sup * lo.powf(m) / m
    };
    let mut trunc = tail(lo);
    while trunc > 1e-3 * TRUNCATION_TOL * value.norm().max(1e-300) && lo > 1e-250 {
        let next = lo * 1e-4;
        est = integrate(f, next.ln(), lo.ln(), tol)?;
        value += est.value;
        error += est.error;
        lo = next;
        trunc = tail(lo);
    }
    let upper = g(hi).norm() * (-TAIL_EXPONENT).exp();
    Ok(QuadratureValue { value: value * norm, error: error * norm, truncation: (trunc + upper) * norm })
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct QuadratureValue {
    pub value: Complex64,
    /// Accumulated quadrature error estimate.
    pub error: f64,
    /// Estimated contribution of the discarded integration domain.
    pub truncation: f64,
}

impl QuadratureValue {
    fn scaled(self, w: Complex64) -> Self {
        Self { value: self.value * w, error: self.error * w.norm(), truncation: self.truncation * w.norm() }
    }
}

/// Initial data for [`quadrature_at`].
#[derive(Clone)]
pub enum QuadratureData {
    Mixture(GaussianMixture),
    /// An analytic datum integrated directly against the Schrödinger kernel on
    /// `[−radius, radius]^dim` (nested adaptive quadrature, `dim ≤ 2`).
    Direct { dim: usize, radius: f64, f: Arc<dyn Fn(&[f64]) -> Complex64 + Send + Sync> },
}

impl std::fmt::Debug for QuadratureData {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Mixture(m) => f.debug_tuple("Mixture").field(m).finish(),
            Self::Direct { dim, radius, .. } => f.debug_struct("Direct").field("dim", dim).field("radius", radius).finish(),
        }
    }
}

/// `e^(itΔ)u₀` at the given points, independent of any grid.
pub fn quadrature_at(
    t: f64,
    data: &QuadratureData,
    points: &[Vec<f64>],
    exec: Execution,
) -> Result<Vec<QuadratureValue>, LinPropError> {
    if t == 0.0 {
        return Err(LinPropError::ZeroTime);
    }
    let results = parallel::map(exec, points, |x| {
        let r = match data {
            QuadratureData::Mixture(mix) => mix.evolve(t, x),
            QuadratureData::Direct { dim, radius, f } => direct(t, *dim, *radius, f.as_ref(), x),
        };
        r.map_err(|source| LinPropError::Quadrature { point: x.clone(), source })
    });
    let results: Vec<QuadratureValue> = results.into_iter().collect::<Result<_, _>>()?;
    for r in &results {
        if r.truncation > TRUNCATION_TOL * r.value.norm().max(1e-12) {
            return Err(LinPropError::Truncation { estimate: r.truncation });
        }
    }
    Ok(results)
}

fn direct(
    t: f64,
    dim: usize,
    radius: f64,
    f: &(dyn Fn(&[f64]) -> Complex64 + Send + Sync),
    x: &[f64],
) -> Result<QuadratureValue, QuadError> {
    let pre = schrodinger_prefactor(t, dim);
    let kernel = |y: &[f64]| {
        let r2: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
        Complex64::from_polar(1.0, r2 / (4.0 * t)) * f(y)
    };
    let tol = Tolerance { abs: 1e-13, rel: 1e-11, max_intervals: 4000 };
    let (value, error) = match dim {
        1 => {
            let e = integrate(|y: f64| kernel(&[y]), -radius, radius, tol)?;
            (e.value, e.error)
        }
        2 => {
            let inner_err = std::cell::Cell::new(0.0_f64);
            let failure = std::cell::Cell::new(None);
            let e = integrate(
                |y0: f64| match integrate(|y1: f64| kernel(&[y0, y1]), -radius, radius, tol) {
                    Ok(v) => {
                        inner_err.set(inner_err.get().max(v.error));
                        v.value
                    }
                    Err(err) => {
                        failure.set(Some(err));
                        Complex64::new(0.0, 0.0)
                    }
                },
                -radius,
                radius,
                tol,
            )?;
            if let Some(err) = failure.take() {
                return Err(err);
            }
            (e.value, e.error + 2.0 * radius * inner_err.get())
        }
        _ => return Err(QuadError::BadInterval { a: -radius, b: radius }),
    };
    // Largest |u₀| on the box faces times the face measure.
    let boundary = (0..=32)
        .flat_map(|j| {
            let y = -radius + 2.0 * radius * j as f64 / 32.0;
            if dim == 1 {
                vec![f(&[-radius]).norm(), f(&[radius]).norm()]
            } else {
                vec![f(&[y, -radius]).norm(), f(&[y, radius]).norm(), f(&[-radius, y]).norm(), f(&[radius, y]).norm()]
            }
        })
        .fold(0.0, f64::max);
    let scale = pre.norm();
    Ok(QuadratureValue {
        value: pre * value,
        error: scale * error,
        truncation: scale * boundary * (2.0 * radius).powi(dim as i32 - 1),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gauss_exact(t: f64, x: &[f64]) -> Complex64 {
        let d = 1.0 + 4.0 * I * t;
        let r2: f64 = x.iter().map(|v| v * v).sum();
        d.powf(-(x.len() as f64) / 2.0) * (-r2 / d).exp()
    }

    #[test]
    fn gaussian_mixture_is_exact() {
        let mix = GaussianMixture::gaussian(vec![0.0, 0.0]);
        let x = vec![0.4, -1.3];
        let v = mix.evolve(0.7, &x).unwrap();
        assert!((v.value - gauss_exact(0.7, &x)).norm() < 1e-15);
    }

    #[test]
    fn subordinated_at_zero_time_is_the_datum() {
        let data = PointData { alpha: 0.5, m: 0.8, t_star: 2.0, center: vec![0.0] };
        let mix = GaussianMixture::point(&data);
        for &z in &[0.0, 0.3, 1.7] {
            let expect = Complex64::from_polar(0.5 * (1.0_f64 + z * z).powf(-0.8), -z * z / 8.0);
            let got = mix.evolve(0.0, &[z]).unwrap();
            assert!((got.value - expect).norm() < 1e-10, "{z}: {} vs {expect}", got.value);
        }
    }

    #[test]
    fn direct_matches_closed_form_1d() {
        let data = QuadratureData::Direct { dim: 1, radius: 8.0, f: Arc::new(|y: &[f64]| Complex64::new((-y[0] * y[0]).exp(), 0.0)) };
        let pts = vec![vec![0.0], vec![0.8]];
        let v = quadrature_at(0.3, &data, &pts, Execution::Sequential).unwrap();
        for (p, q) in pts.iter().zip(&v) {
            assert!((q.value - gauss_exact(0.3, p)).norm() < 1e-9);
        }
    }
}
