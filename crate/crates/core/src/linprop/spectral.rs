use num_complex::Complex64;

use super::LinPropError;
use crate::fields::{ComplexField, FftEngine, GridSpec};
use crate::parallel::{self, Execution};

/// Free flow on the periodic grid: `e^(itΔ)` as the multiplier `e^(−i|ξ|²t)`.
/// Keeps the transform of `u₀` so repeated evaluations cost one inverse FFT.
#[derive(Debug, Clone)]
pub struct LinearPropagator {
    grid: GridSpec,
    engine: FftEngine,
    initial: Vec<Complex64>,
    spectrum: Vec<Complex64>,
    k2: Vec<f64>,
}

impl LinearPropagator {
    pub fn new(u0: &ComplexField, exec: Execution) -> Self {
        let grid = u0.grid().clone();
        let engine = FftEngine::for_grid(&grid, exec);
        let mut spectrum = u0.values().to_vec();
        engine.forward(&mut spectrum, &mut Vec::new());
        let mut k2 = vec![0.0; grid.len()];
        parallel::fill_indexed(exec, &mut k2, |i| grid.wavenumber_sq(i));
        Self { grid, engine, initial: u0.values().to_vec(), spectrum, k2 }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    /// `|ξ|²` in raw FFT order.
    pub fn wavenumbers_sq(&self) -> &[f64] {
        &self.k2
    }

    pub fn engine(&self) -> &FftEngine {
        &self.engine
    }

    /// Writes `e^(itΔ)u₀` into `out`; `t = 0` copies `u₀` exactly.
    pub fn evaluate_into(&self, t: f64, out: &mut Vec<Complex64>, scratch: &mut Vec<Complex64>) {
        if t == 0.0 {
            out.clear();
            out.extend_from_slice(&self.initial);
            return;
        }
        let scale = 1.0 / self.grid.len() as f64;
        out.resize(self.spectrum.len(), Complex64::new(0.0, 0.0));
        let (spec, k2) = (&self.spectrum, &self.k2);
        parallel::fill_indexed(self.engine.execution(), out, |i| spec[i] * Complex64::from_polar(scale, -k2[i] * t));
        self.engine.inverse(out, scratch);
    }

    pub fn at(&self, t: f64) -> Result<ComplexField, LinPropError> {
        let mut out = Vec::new();
        self.evaluate_into(t, &mut out, &mut Vec::new());
        Ok(ComplexField::new(self.grid.clone(), out)?)
    }
}

/// One-shot spectral evaluation of `e^(itΔ)u₀`.
pub fn spectral_propagate(u0: &ComplexField, t: f64, exec: Execution) -> Result<ComplexField, LinPropError> {
    LinearPropagator::new(u0, exec).at(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unitary_and_reversible() {
        let grid = GridSpec::new(2, 10.0, 64).unwrap();
        let u0 = ComplexField::from_fn(grid, Execution::Sequential, |x| {
            Complex64::new((-(x[0] * x[0] + 2.0 * x[1] * x[1])).exp(), x[0] * (-(x[0] * x[0] + x[1] * x[1])).exp())
        })
        .unwrap();
        let p = LinearPropagator::new(&u0, Execution::Parallel);
        let u1 = p.at(0.37).unwrap();
        assert!((u1.l2_norm() - u0.l2_norm()).abs() < 1e-12 * u0.l2_norm());
        let back = spectral_propagate(&u1, -0.37, Execution::Sequential).unwrap();
        assert!(back.sub(&u0).unwrap().sup_norm() < 1e-12);
    }
}
