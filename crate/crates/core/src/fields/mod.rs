//! Uniform periodic grids, sampled complex fields, the scaled discrete Fourier
//! transform, spectral Sobolev norms and the initial-data generators.

mod dump;
mod fft;
mod grid;
mod initial;
mod sobolev;

pub use dump::{read_field, write_field, FieldSidecar};
pub use fft::{dft_forward, dft_forward_with, dft_inverse, dft_inverse_with, FftEngine};
pub use grid::{ComplexField, GridSpec, Spectrum};
pub use initial::{
    make_line_data, make_point_data, make_sphere_data, make_v0, sample, GaussianData, InitialDatum, LineData,
    Parity, PointData, SphereData, V0Data,
};
pub use sobolev::{sobolev_norm, sobolev_norm_of_spectrum, sobolev_refinement, SobolevNorm, SobolevRefinement};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum FieldError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("expected {expected} samples, got {got}")]
    SizeMismatch { expected: usize, got: usize },
    #[error("non-finite sample at index {index}")]
    NonFinite { index: usize },
    #[error("scenario is infeasible: {0}")]
    Infeasible(String),
    #[error("{0}")]
    Geometry(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
