use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::{ComplexField, FieldError, GridSpec, Spectrum};
use crate::parallel::{self, Execution};

const TRANSPOSE_BLOCK: usize = 16;
const MIN_LINES_PER_TASK: usize = 8;

/// Unnormalized n-dimensional FFT on `N^dim` row-major data.
///
/// Each axis is transformed as contiguous rows and then rotated into place by
/// a cache-blocked transpose, so every pass works on unit-stride lines. Rows
/// and transpose blocks are independent work items for [`parallel`].
#[derive(Clone)]
pub struct FftEngine {
    n: usize,
    dim: usize,
    exec: Execution,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for FftEngine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FftEngine").field("n", &self.n).field("dim", &self.dim).field("exec", &self.exec).finish()
    }
}

impl FftEngine {
    pub fn new(dim: usize, n: usize, exec: Execution) -> Self {
        let mut planner = FftPlanner::new();
        Self { n, dim, exec, forward: planner.plan_fft_forward(n), inverse: planner.plan_fft_inverse(n) }
    }

    pub fn for_grid(grid: &GridSpec, exec: Execution) -> Self {
        Self::new(grid.dim, grid.n(), exec)
    }

    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn execution(&self) -> Execution {
        self.exec
    }

    /// In-place forward transform `Σ_j u_j e^(−2πi jk/N)`.
    pub fn forward(&self, data: &mut [Complex64], scratch: &mut Vec<Complex64>) {
        self.run(&self.forward, data, scratch);
    }

    /// In-place inverse transform without the `1/N^d` factor.
    pub fn inverse(&self, data: &mut [Complex64], scratch: &mut Vec<Complex64>) {
        self.run(&self.inverse, data, scratch);
    }

    fn run(&self, fft: &Arc<dyn Fft<f64>>, data: &mut [Complex64], scratch: &mut Vec<Complex64>) {
        assert_eq!(data.len(), self.len(), "buffer does not match the transform size");
        let n = self.n;
        let rows = data.len() / n;
        if self.dim == 1 {
            self.rows(fft, data);
            return;
        }
        scratch.resize(data.len(), Complex64::new(0.0, 0.0));
        for _ in 0..self.dim {
            self.rows(fft, data);
            // (rows × n) → (n × rows): the transformed axis becomes the slowest.
            transpose(self.exec, data, scratch, rows, n);
            data.copy_from_slice(scratch);
        }
    }

    fn rows(&self, fft: &Arc<dyn Fft<f64>>, data: &mut [Complex64]) {
        let n = self.n;
        let lines = data.len() / n;
        let per_task = if self.exec.is_parallel() { (lines / 64).max(MIN_LINES_PER_TASK).min(lines) } else { lines };
        let scratch_len = fft.get_inplace_scratch_len();
        parallel::for_each_chunk(
            self.exec,
            data,
            per_task * n,
            || vec![Complex64::new(0.0, 0.0); scratch_len],
            |s, _, chunk| fft.process_with_scratch(chunk, s),
        );
    }
}

/// `out[c * rows + r] = input[r * cols + c]`.
fn transpose(exec: Execution, input: &[Complex64], out: &mut [Complex64], rows: usize, cols: usize) {
    parallel::for_each_chunk(
        exec,
        out,
        TRANSPOSE_BLOCK * rows,
        || (),
        |_, block, chunk| {
            let c0 = block * TRANSPOSE_BLOCK;
            let width = chunk.len() / rows;
            for r in 0..rows {
                let src = &input[r * cols + c0..r * cols + c0 + width];
                for (dc, v) in src.iter().enumerate() {
                    chunk[dc * rows + r] = *v;
                }
            }
        },
    );
}

/// Per-axis factors `h e^(−iξ_j x₀)` (forward) or `e^(iξ_j x₀)/(2L)` (inverse).
fn axis_factors(grid: &GridSpec, axis: usize, forward: bool) -> Vec<Complex64> {
    let x0 = grid.origin(axis);
    let h = grid.spacing();
    (0..grid.n())
        .map(|j| {
            let xi = grid.frequency(j);
            if forward {
                Complex64::from_polar(h, -xi * x0)
            } else {
                Complex64::from_polar(1.0 / (2.0 * grid.half_width), xi * x0)
            }
        })
        .collect()
}

fn apply_factors(exec: Execution, grid: &GridSpec, data: &mut [Complex64], forward: bool) {
    let factors: Vec<Vec<Complex64>> = (0..grid.dim).map(|a| axis_factors(grid, a, forward)).collect();
    let n = grid.n();
    let dim = grid.dim;
    parallel::for_each_chunk(
        exec,
        data,
        n,
        || vec![0usize; dim],
        |idx, row, chunk| {
            grid.unravel(row * n, idx);
            let outer: Complex64 = (0..dim - 1).map(|a| factors[a][idx[a]]).product();
            for (v, f) in chunk.iter_mut().zip(&factors[dim - 1]) {
                *v *= outer * f;
            }
        },
    );
}

/// Scaled forward transform approximating `∫ f(y) e^(−iξ·y) dy`.
pub fn dft_forward(field: &ComplexField) -> Spectrum {
    dft_forward_with(&FftEngine::for_grid(field.grid(), Execution::default()), field)
}

pub fn dft_forward_with(engine: &FftEngine, field: &ComplexField) -> Spectrum {
    let grid = field.grid().clone();
    let mut data = field.values().to_vec();
    let mut scratch = Vec::new();
    engine.forward(&mut data, &mut scratch);
    apply_factors(engine.execution(), &grid, &mut data, true);
    Spectrum::from_raw(grid, data)
}

/// Inverse of [`dft_forward`]: `f(x) = (2π)^(−d) Σ f̂(ξ) e^(iξ·x) Δξ^d`.
pub fn dft_inverse(spectrum: &Spectrum) -> Result<ComplexField, FieldError> {
    dft_inverse_with(&FftEngine::for_grid(spectrum.grid(), Execution::default()), spectrum)
}

pub fn dft_inverse_with(engine: &FftEngine, spectrum: &Spectrum) -> Result<ComplexField, FieldError> {
    let grid = spectrum.grid().clone();
    let mut data = spectrum.values().to_vec();
    apply_factors(engine.execution(), &grid, &mut data, false);
    let mut scratch = Vec::new();
    engine.inverse(&mut data, &mut scratch);
    ComplexField::new(grid, data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn random_field(grid: &GridSpec) -> ComplexField {
        // Small LCG keeps the test free of extra dependencies.
        let mut state = 0x2545_f491_4f6c_dd1du64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let values = (0..grid.len()).map(|_| Complex64::new(next(), next())).collect();
        ComplexField::new(grid.clone(), values).unwrap()
    }

    #[test]
    fn round_trip() {
        for dim in 1..=3 {
            let grid = GridSpec::half_cell(dim, 3.0, 16).unwrap();
            let f = random_field(&grid);
            let back = dft_inverse(&dft_forward(&f)).unwrap();
            let err = back.sub(&f).unwrap().l2_norm() / f.l2_norm();
            assert!(err < 1e-12, "dim {dim}: {err:e}");
        }
    }

    #[test]
    fn impulse_has_flat_modulus() {
        let grid = GridSpec::new(2, 1.0, 16).unwrap();
        let mut values = vec![Complex64::new(0.0, 0.0); grid.len()];
        values[grid.ravel(&[3, 5])] = Complex64::new(1.0, 0.0);
        let f = ComplexField::new(grid.clone(), values).unwrap();
        let s = dft_forward(&f);
        let h2 = grid.cell_volume();
        assert!(s.values().iter().all(|v| (v.norm() - h2).abs() < 1e-15));
    }

    #[test]
    fn gaussian_transform() {
        let grid = GridSpec::new(1, 8.0, 256).unwrap();
        let f = ComplexField::from_fn(grid.clone(), Execution::Sequential, |x| {
            Complex64::new((-x[0] * x[0]).exp(), 0.0)
        })
        .unwrap();
        let s = dft_forward(&f);
        for (j, v) in s.values().iter().enumerate() {
            let xi = grid.frequency(j);
            let exact = PI.sqrt() * (-xi * xi / 4.0).exp();
            assert!((v - exact).norm() < 1e-8, "xi={xi}");
        }
    }

    #[test]
    fn parallel_matches_sequential_bitwise() {
        for dim in 1..=3 {
            let grid = GridSpec::new(dim, 2.0, 32).unwrap();
            let f = random_field(&grid);
            let a = dft_forward_with(&FftEngine::for_grid(&grid, Execution::Sequential), &f);
            let b = dft_forward_with(&FftEngine::for_grid(&grid, Execution::Parallel), &f);
            assert_eq!(a.values(), b.values());
        }
    }

    #[test]
    fn interpolation_reproduces_nodes() {
        let grid = GridSpec::half_cell(2, 2.0, 16).unwrap();
        let f = random_field(&grid);
        let s = dft_forward(&f);
        let i = grid.ravel(&[4, 11]);
        assert!((s.interpolate(&grid.node(i)) - f.values()[i]).norm() < 1e-12);
    }
}
