use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::FieldError;
use crate::parallel::{self, Execution};

/// A uniform periodic grid on `[-L, L)^dim` (shifted per axis by `offsets`)
/// with `N` points per axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub dim: usize,
    pub half_width: f64,
    pub points_per_axis: usize,
    pub offsets: Vec<f64>,
}

impl GridSpec {
    pub fn new(dim: usize, half_width: f64, points_per_axis: usize) -> Result<Self, FieldError> {
        Self::with_offsets(dim, half_width, points_per_axis, vec![0.0; dim])
    }

    pub fn with_offsets(
        dim: usize,
        half_width: f64,
        points_per_axis: usize,
        offsets: Vec<f64>,
    ) -> Result<Self, FieldError> {
        let g = Self { dim, half_width, points_per_axis, offsets };
        g.check()?;
        Ok(g)
    }

    /// Grid shifted by half a cell on every axis, so no node sits on a
    /// coordinate hyperplane through the origin.
    pub fn half_cell(dim: usize, half_width: f64, points_per_axis: usize) -> Result<Self, FieldError> {
        let h = 2.0 * half_width / points_per_axis as f64;
        Self::with_offsets(dim, half_width, points_per_axis, vec![0.5 * h; dim])
    }

    pub fn check(&self) -> Result<(), FieldError> {
        let bad = |m: String| Err(FieldError::InvalidGrid(m));
        if self.dim == 0 {
            return bad("dim must be at least 1".into());
        }
        let n = self.points_per_axis;
        if n < 8 || !n.is_power_of_two() {
            return bad(format!("points per axis must be a power of two >= 8, got {n}"));
        }
        if !(self.half_width.is_finite() && self.half_width > 0.0) {
            return bad(format!("half width must be positive, got {}", self.half_width));
        }
        if self.offsets.len() != self.dim || self.offsets.iter().any(|o| !o.is_finite()) {
            return bad(format!("need {} finite offsets, got {:?}", self.dim, self.offsets));
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.points_per_axis
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.points_per_axis as f64
    }

    /// Total number of nodes `N^dim`.
    pub fn len(&self) -> usize {
        self.points_per_axis.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Cell volume `h^dim`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    pub fn origin(&self, axis: usize) -> f64 {
        -self.half_width + self.offsets[axis]
    }

    pub fn coord(&self, axis: usize, j: usize) -> f64 {
        self.origin(axis) + j as f64 * self.spacing()
    }

    pub fn axis_coords(&self, axis: usize) -> Vec<f64> {
        (0..self.points_per_axis).map(|j| self.coord(axis, j)).collect()
    }

    /// Signed wavenumber index of DFT bin `j` in `[-N/2, N/2)`.
    pub fn wave_index(&self, j: usize) -> i64 {
        let n = self.points_per_axis as i64;
        let j = j as i64;
        if j < n / 2 {
            j
        } else {
            j - n
        }
    }

    /// Angular frequency `π k / L` of DFT bin `j`.
    pub fn frequency(&self, j: usize) -> f64 {
        PI * self.wave_index(j) as f64 / self.half_width
    }

    pub fn frequencies(&self) -> Vec<f64> {
        (0..self.points_per_axis).map(|j| self.frequency(j)).collect()
    }

    /// Row-major multi-index of flat index `i` (axis 0 slowest).
    pub fn unravel(&self, mut i: usize, out: &mut [usize]) {
        let n = self.points_per_axis;
        for a in (0..self.dim).rev() {
            out[a] = i % n;
            i /= n;
        }
    }

    pub fn ravel(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, &j| acc * self.points_per_axis + j)
    }

    pub fn node(&self, i: usize) -> Vec<f64> {
        let mut idx = vec![0; self.dim];
        self.unravel(i, &mut idx);
        idx.iter().enumerate().map(|(a, &j)| self.coord(a, j)).collect()
    }

    /// `|ξ|²` at flat spectral index `i`.
    pub fn wavenumber_sq(&self, i: usize) -> f64 {
        let n = self.points_per_axis;
        let mut rest = i;
        let mut k2 = 0.0;
        for _ in 0..self.dim {
            let xi = self.frequency(rest % n);
            k2 += xi * xi;
            rest /= n;
        }
        k2
    }

    /// Same grid with `N` replaced.
    pub fn with_points(&self, points_per_axis: usize) -> Result<Self, FieldError> {
        Self::with_offsets(self.dim, self.half_width, points_per_axis, self.offsets.clone())
    }
}

fn check_finite(values: &[Complex64]) -> Result<(), FieldError> {
    match values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
        Some(index) => Err(FieldError::NonFinite { index }),
        None => Ok(()),
    }
}

/// Samples of a complex function on a grid, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    grid: GridSpec,
    values: Vec<Complex64>,
}

impl ComplexField {
    pub fn new(grid: GridSpec, values: Vec<Complex64>) -> Result<Self, FieldError> {
        grid.check()?;
        if values.len() != grid.len() {
            return Err(FieldError::SizeMismatch { expected: grid.len(), got: values.len() });
        }
        check_finite(&values)?;
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        let n = grid.len();
        Self { grid, values: vec![Complex64::new(0.0, 0.0); n] }
    }

    /// Samples `f` at every node.
    pub fn from_fn<F>(grid: GridSpec, exec: Execution, f: F) -> Result<Self, FieldError>
    where
        F: Fn(&[f64]) -> Complex64 + Sync + Send,
    {
        grid.check()?;
        let mut values = vec![Complex64::new(0.0, 0.0); grid.len()];
        let coords: Vec<Vec<f64>> = (0..grid.dim).map(|a| grid.axis_coords(a)).collect();
        let n = grid.n();
        let dim = grid.dim;
        parallel::for_each_chunk(
            exec,
            &mut values,
            n,
            || (vec![0usize; dim], vec![0.0; dim]),
            |(idx, x), row, chunk| {
                grid.unravel(row * n, idx);
                for a in 0..dim - 1 {
                    x[a] = coords[a][idx[a]];
                }
                for (j, v) in chunk.iter_mut().enumerate() {
                    x[dim - 1] = coords[dim - 1][j];
                    *v = f(x);
                }
            },
        );
        check_finite(&values)?;
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// Discrete `L²` norm `(h^d Σ |u|²)^(1/2)`.
    pub fn l2_norm(&self) -> f64 {
        (self.grid.cell_volume() * self.values.iter().map(|v| v.norm_sqr()).sum::<f64>()).sqrt()
    }

    /// Discrete `L¹` norm.
    pub fn l1_norm(&self) -> f64 {
        self.grid.cell_volume() * self.values.iter().map(|v| v.norm()).sum::<f64>()
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Flat index and modulus of the largest sample.
    pub fn argmax(&self) -> (usize, f64) {
        self.values
            .iter()
            .enumerate()
            .map(|(i, v)| (i, v.norm()))
            .fold((0, 0.0), |best, cur| if cur.1 > best.1 { cur } else { best })
    }

    /// `self - other` on the same grid.
    pub fn sub(&self, other: &ComplexField) -> Result<ComplexField, FieldError> {
        if self.grid != other.grid {
            return Err(FieldError::InvalidGrid("fields live on different grids".into()));
        }
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect();
        Ok(Self { grid: self.grid.clone(), values })
    }

    pub fn scaled(&self, c: f64) -> ComplexField {
        Self { grid: self.grid.clone(), values: self.values.iter().map(|v| v * c).collect() }
    }
}

/// Scaled transform `f̂(ξ_k) ≈ ∫ f(y) e^(−iξ_k·y) dy` on the frequency lattice
/// `ξ = πk/L`, stored in DFT order.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    grid: GridSpec,
    values: Vec<Complex64>,
}

impl Spectrum {
    pub fn new(grid: GridSpec, values: Vec<Complex64>) -> Result<Self, FieldError> {
        grid.check()?;
        if values.len() != grid.len() {
            return Err(FieldError::SizeMismatch { expected: grid.len(), got: values.len() });
        }
        Ok(Self { grid, values })
    }

    pub(crate) fn from_raw(grid: GridSpec, values: Vec<Complex64>) -> Self {
        Self { grid, values }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// Trigonometric interpolant `(2L)^(−d) Σ_k f̂_k e^(iξ_k·x)` at an arbitrary point.
    pub fn interpolate(&self, x: &[f64]) -> Complex64 {
        let g = &self.grid;
        let n = g.n();
        let phases: Vec<Vec<Complex64>> = (0..g.dim)
            .map(|a| (0..n).map(|j| Complex64::from_polar(1.0, g.frequency(j) * x[a])).collect())
            .collect();
        // Contract the last axis first, then fold outward.
        let mut level: Vec<Complex64> = self.values.clone();
        for a in (0..g.dim).rev() {
            let ph = &phases[a];
            level = level.chunks(n).map(|c| c.iter().zip(ph).map(|(v, p)| v * p).sum()).collect();
        }
        level[0] / (2.0 * g.half_width).powi(g.dim as i32)
    }
}
