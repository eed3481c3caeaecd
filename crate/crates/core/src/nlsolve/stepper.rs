use num_complex::Complex64;

use super::{SolveError, PHASE_LIMIT};
use crate::fields::{ComplexField, FftEngine, GridSpec};
use crate::parallel::{self, Execution};

const CHUNK: usize = 4096;

/// `|z|^q` without a square root or `powf` for the common exponents.
#[inline]
fn modulus_pow(z: Complex64, q: f64) -> f64 {
    let n2 = z.norm_sqr();
    if q == 2.0 {
        n2
    } else if q == 1.0 {
        n2.sqrt()
    } else if q == 4.0 {
        n2 * n2
    } else {
        n2.powf(0.5 * q)
    }
}

/// Whether the two-thirds rule is on by default for exponent `p`.
pub fn dealias_default(p: f64) -> bool {
    p >= 3.0 && (p - p.round()).abs() < 1e-12 && (p.round() as i64) % 2 == 1
}

/// Strang splitting `N(dt/2) L(dt) N(dt/2)` on a fixed grid.
///
/// `N(h)` multiplies by `e^(±i c|u|^(p−1) h)`, which leaves `|u|` unchanged.
/// With dealiasing the phase is projected onto `|k| ≤ N/3` first.
#[derive(Debug, Clone)]
pub struct Stepper {
    grid: GridSpec,
    engine: FftEngine,
    k2: Vec<f64>,
    keep: Option<Vec<bool>>,
    strength: f64,
    power: f64,
    multiplier: Vec<Complex64>,
    multiplier_dt: f64,
    work: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl Stepper {
    /// `strength = sign · coefficient`.
    pub fn new(grid: &GridSpec, p: f64, strength: f64, dealias: bool, exec: Execution) -> Self {
        let engine = FftEngine::for_grid(grid, exec);
        let mut k2 = vec![0.0; grid.len()];
        parallel::fill_indexed(exec, &mut k2, |i| grid.wavenumber_sq(i));
        let keep = dealias.then(|| {
            let n = grid.n();
            let limit = n as i64 / 3;
            let mut keep = vec![false; grid.len()];
            parallel::fill_indexed(exec, &mut keep, |i| {
                let mut rest = i;
                (0..grid.dim).all(|_| {
                    let k = grid.wave_index(rest % n);
                    rest /= n;
                    k.abs() <= limit
                })
            });
            keep
        });
        Self {
            grid: grid.clone(),
            engine,
            k2,
            keep,
            strength,
            power: p - 1.0,
            multiplier: Vec::new(),
            multiplier_dt: f64::NAN,
            work: Vec::new(),
            scratch: Vec::new(),
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn is_dealiased(&self) -> bool {
        self.keep.is_some()
    }

    fn exec(&self) -> Execution {
        self.engine.execution()
    }

    fn prepare(&mut self, dt: f64) {
        if self.multiplier_dt == dt {
            return;
        }
        let scale = 1.0 / self.grid.len() as f64;
        self.multiplier.resize(self.k2.len(), Complex64::new(0.0, 0.0));
        let k2 = &self.k2;
        parallel::fill_indexed(self.exec(), &mut self.multiplier, |i| Complex64::from_polar(scale, -k2[i] * dt));
        self.multiplier_dt = dt;
    }

    /// `max|u|`, NaN if any entry is not finite.
    pub fn sup(&self, u: &[Complex64]) -> f64 {
        let m = parallel::max_indexed(self.exec(), u.len(), |i| u[i].norm_sqr());
        if m.is_finite() {
            m.sqrt()
        } else {
            f64::NAN
        }
    }

    fn phase_rotate(&self, u: &mut [Complex64], h: f64) {
        let (s, q) = (self.strength, self.power);
        parallel::for_each_chunk(self.exec(), u, CHUNK, || (), |_, _, c| {
            for z in c.iter_mut() {
                *z *= Complex64::from_polar(1.0, s * modulus_pow(*z, q) * h);
            }
        });
    }

    /// Rotates `u` by `e^(iθ̃)`, where `θ̃` is the real phase `±c|u|^(p−1)h`
    /// restricted to `|k| ≤ N/3`. The projection keeps `θ̃` real, so the
    /// sub-step stays an exact `L²` isometry.
    fn dealiased_rotate(&mut self, u: &mut [Complex64], h: f64) {
        let (s, q) = (self.strength, self.power);
        self.work.resize(u.len(), Complex64::new(0.0, 0.0));
        let src: &[Complex64] = u;
        parallel::fill_indexed(self.exec(), &mut self.work, |i| Complex64::new(s * modulus_pow(src[i], q) * h, 0.0));
        let mut work = std::mem::take(&mut self.work);
        self.engine.forward(&mut work, &mut self.scratch);
        self.project(&mut work, 1.0 / self.grid.len() as f64);
        self.engine.inverse(&mut work, &mut self.scratch);
        parallel::for_each_chunk(self.exec(), u, CHUNK, || (), |_, ci, c| {
            let base = ci * CHUNK;
            for (j, z) in c.iter_mut().enumerate() {
                *z *= Complex64::from_polar(1.0, work[base + j].re);
            }
        });
        self.work = work;
    }

    fn project(&self, data: &mut [Complex64], scale: f64) {
        let keep = self.keep.as_ref().expect("dealiasing mask");
        parallel::for_each_chunk(self.exec(), data, CHUNK, || (), |_, ci, c| {
            let base = ci * CHUNK;
            for (j, z) in c.iter_mut().enumerate() {
                *z = if keep[base + j] { *z * scale } else { Complex64::new(0.0, 0.0) };
            }
        });
    }

    /// One Strang step of size `dt`. Returns `max|u|` at the start of the step.
    pub fn step(&mut self, u: &mut Vec<Complex64>, dt: f64, step: usize, time: f64) -> Result<f64, SolveError> {
        let sup = self.sup(u);
        if sup.is_nan() {
            return Err(SolveError::NonFinite { step, time });
        }
        let phase = dt * sup.powf(self.power) * self.strength.abs();
        if phase >= PHASE_LIMIT {
            return Err(SolveError::PhaseAccuracy { step, value: phase });
        }
        self.prepare(dt);
        let half = 0.5 * dt;
        if self.strength == 0.0 {
            self.linear(u);
        } else if self.keep.is_none() {
            self.phase_rotate(u, half);
            self.linear(u);
            self.phase_rotate(u, half);
        } else {
            self.dealiased_rotate(u, half);
            self.linear(u);
            self.dealiased_rotate(u, half);
        }
        Ok(sup)
    }

    fn linear(&mut self, u: &mut [Complex64]) {
        self.engine.forward(u, &mut self.scratch);
        let m = &self.multiplier;
        parallel::for_each_chunk(self.engine.execution(), u, CHUNK, || (), |_, ci, c| {
            let base = ci * CHUNK;
            for (j, z) in c.iter_mut().enumerate() {
                *z *= m[base + j];
            }
        });
        self.engine.inverse(u, &mut self.scratch);
    }
}

/// A single Strang step on a field; `sign` selects `±|u|^(p−1)u`.
pub fn step_strang(field: &ComplexField, dt: f64, p: f64, sign: i8) -> Result<ComplexField, SolveError> {
    let mut stepper = Stepper::new(field.grid(), p, f64::from(sign), dealias_default(p), Execution::default());
    let mut u = field.values().to_vec();
    stepper.step(&mut u, dt, 0, 0.0)?;
    Ok(ComplexField::new(field.grid().clone(), u)?)
}
