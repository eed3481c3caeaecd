//! Three evaluations of the free flow `e^(itΔ)u₀` (closed form at the focusing
//! time, quadrature, spectral multiplier) and the dispersive decay check.

mod decay;
mod exact;
mod mixture;
mod spectral;

pub use decay::{dispersive_decay_check, DecayFit};
pub use exact::{exact_at_tstar, exact_v_at_tstar, schrodinger_prefactor};
pub use mixture::{quadrature_at, Component, GaussianMixture, GaussianTerm, QuadratureData, QuadratureValue};
pub use spectral::{spectral_propagate, LinearPropagator};

use thiserror::Error;

use crate::fields::FieldError;
use crate::quadrature::QuadError;
use crate::specfun::SpecFunError;

#[derive(Debug, Error)]
pub enum LinPropError {
    #[error("t = 0 is the identity; evaluate the initial data directly")]
    ZeroTime,
    #[error("evaluation point {0:?} lies on the singular set")]
    Singular(Vec<f64>),
    #[error("{0}")]
    Geometry(String),
    #[error("quadrature failed at {point:?}: {source}")]
    Quadrature { point: Vec<f64>, source: QuadError },
    #[error("domain truncation error {estimate:e} exceeds the tolerance")]
    Truncation { estimate: f64 },
    #[error("decay fit needs times spanning a decade, got ratio {ratio}")]
    InsufficientSpan { ratio: f64 },
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
    #[error(transparent)]
    Field(#[from] FieldError),
}
