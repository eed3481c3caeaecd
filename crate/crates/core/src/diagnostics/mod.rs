//! Verdicts on refinement studies: exponent fits along rays, divergence
//! near the singular set with continuity away from it, and the run report.

mod divergence;
mod exponent;
mod fit;
mod report;

pub use divergence::{combine_checks, refinement_divergence, DivergenceCheck, DivergenceThresholds, Verdict};
pub use exponent::{fit_blowup_exponent, ExponentFit, FitModel};
pub use fit::{linear_fit, LinearFit};
pub use report::{assemble_report, CriterionResult, DiagnosticsReport, DuhamelCheck, RefinementRow, ReportInputs};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiagError {
    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("samples span {decades:.2} decades in r, need {needed}")]
    InsufficientSpan { decades: f64, needed: f64 },
    #[error("sample {index} is not usable (r = {r}, value = {value})")]
    BadSample { index: usize, r: f64, value: f64 },
    #[error("need at least 3 refinement levels, got {0}")]
    TooFewLevels(usize),
    #[error("levels disagree on the number of far-region probes")]
    ProbeMismatch,
    #[error("scenario hash mismatch: {component} carries {found}, expected {expected}")]
    HashMismatch { component: String, expected: String, found: String },
}
