use serde::{Deserialize, Serialize};

use super::{dft_forward, ComplexField, Spectrum};

/// Relative agreement required between refinement levels.
const CONVERGENCE_TOL: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SobolevNorm {
    pub s: f64,
    pub value: f64,
    pub converged: bool,
}

/// Lattice quadrature of `‖f‖²_{H^s} = (2π)^(−d) ∫ (1+|ξ|²)^s |f̂|² dξ`.
///
/// The `converged` flag compares the full band against the inner half band
/// (the modes a grid with `N/2` points and the same `L` would carry).
pub fn sobolev_norm(field: &ComplexField, s: f64) -> SobolevNorm {
    sobolev_norm_of_spectrum(&dft_forward(field), s)
}

pub fn sobolev_norm_of_spectrum(spectrum: &Spectrum, s: f64) -> SobolevNorm {
    let g = spectrum.grid();
    let n = g.n();
    let quarter = (n / 4) as i64;
    let mut idx = vec![0usize; g.dim];
    let (mut full, mut half) = (0.0, 0.0);
    for (i, v) in spectrum.values().iter().enumerate() {
        let w = (1.0 + g.wavenumber_sq(i)).powf(s) * v.norm_sqr();
        full += w;
        g.unravel(i, &mut idx);
        if idx.iter().all(|&j| g.wave_index(j).abs() < quarter) {
            half += w;
        }
    }
    let scale = (2.0 * g.half_width).powi(g.dim as i32);
    let value = (full / scale).sqrt();
    let coarse = (half / scale).sqrt();
    let converged = value == 0.0 || (value - coarse).abs() / value < CONVERGENCE_TOL;
    SobolevNorm { s, value, converged }
}

/// Norms of the same function sampled at successive refinement levels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SobolevRefinement {
    pub norms: Vec<f64>,
    pub relative_changes: Vec<f64>,
    /// Finest-level norm; `converged` requires the last relative change below
    /// 1% and, with three or more levels, a shrinking increment.
    pub result: SobolevNorm,
}

pub fn sobolev_refinement(levels: &[ComplexField], s: f64) -> SobolevRefinement {
    let norms: Vec<f64> = levels.iter().map(|f| sobolev_norm(f, s).value).collect();
    refinement_from_norms(norms, s)
}

pub(crate) fn refinement_from_norms(norms: Vec<f64>, s: f64) -> SobolevRefinement {
    let relative_changes: Vec<f64> = norms.windows(2).map(|w| (w[1] - w[0]).abs() / w[1]).collect();
    let increments: Vec<f64> = norms.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    let small = relative_changes.last().is_some_and(|&r| r < CONVERGENCE_TOL);
    let contracting = increments.len() < 2 || increments[increments.len() - 1] < increments[increments.len() - 2];
    let value = norms.last().copied().unwrap_or(0.0);
    SobolevRefinement { result: SobolevNorm { s, value, converged: small && contracting }, norms, relative_changes }
}
