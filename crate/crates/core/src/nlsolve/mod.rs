//! Split-step pseudospectral integration of `i∂ₜu + Δu ± |u|^(p−1)u = 0`,
//! the Duhamel correction `D(t) = u(t) − e^(itΔ)u₀`, and the radial
//! one-dimensional reduction used for sphere data.

mod evolve;
mod export;
mod sphere;
mod stepper;

pub use evolve::{duhamel_term, evolve, evolve_field, evolve_linear};
pub use export::write_series_csv;
pub use sphere::{evolve_sphere_1d, lift_to_3d, RadialProfile, SphereTrace};
pub use stepper::{dealias_default, step_strang, Stepper};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fields::{ComplexField, FieldError, GridSpec};
use crate::linprop::LinPropError;

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error("non-finite value at step {step} (t = {time})")]
    NonFinite { step: usize, time: f64 },
    #[error("|u| reached {value:e} at t = {time}, above the ceiling")]
    Ceiling { time: f64, value: f64 },
    #[error("phase step dt·max|u|^(p−1) = {value} at step {step} exceeds 0.1")]
    PhaseAccuracy { step: usize, value: f64 },
    #[error("radial reduction lost its parity: defect {defect:e}")]
    ParityViolation { defect: f64 },
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    LinProp(#[from] LinPropError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Upper bound on the nonlinear phase increment per step.
pub const PHASE_LIMIT: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub dt: f64,
    /// Two-thirds rule on the nonlinear increment; `None` enables it for odd
    /// integer `p ≥ 3`.
    pub dealias: Option<bool>,
    /// Steps between entries of the norm, peak and Duhamel series.
    pub record_every: usize,
    /// Records between stored snapshots; `0` keeps only capture times and the end.
    pub snapshot_every: usize,
    /// Times at which the state is recorded and stored exactly.
    pub capture_times: Vec<f64>,
    /// Rerun with `dt/2` and compare `‖u(t_end)‖∞`.
    pub richardson: bool,
    pub richardson_tol: f64,
    pub ceiling: f64,
    /// Scales the nonlinearity; `0` gives the free flow.
    pub coefficient: f64,
    /// Sobolev index tracked in the norm series.
    pub sobolev_s: Option<f64>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            dealias: None,
            record_every: 10,
            snapshot_every: 0,
            capture_times: Vec::new(),
            richardson: true,
            richardson_tol: 1e-4,
            ceiling: 1e8,
            coefficient: 1.0,
            sobolev_s: None,
        }
    }
}

impl SolverConfig {
    pub fn check(&self) -> Result<(), SolveError> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(SolveError::InvalidConfig(format!("dt must be positive, got {}", self.dt)));
        }
        if self.record_every == 0 {
            return Err(SolveError::InvalidConfig("record_every must be at least 1".into()));
        }
        if !(self.ceiling > 0.0) {
            return Err(SolveError::InvalidConfig("ceiling must be positive".into()));
        }
        Ok(())
    }

    pub fn steps_to(&self, t: f64) -> usize {
        (t.abs() / self.dt).ceil() as usize
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PeakRecord {
    pub time: f64,
    pub location: Vec<f64>,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct NormRecord {
    pub time: f64,
    pub l2: f64,
    pub hs: Option<f64>,
    pub linf: f64,
}

#[derive(Debug, Clone)]
pub struct Snapshot {
    pub time: f64,
    pub field: ComplexField,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct RichardsonCheck {
    pub sup_full: f64,
    pub sup_half: f64,
    pub relative_change: f64,
    pub converged: bool,
}

#[derive(Debug, Clone)]
pub struct EvolutionTrace {
    pub grid: GridSpec,
    pub p: f64,
    pub sign: i8,
    pub u0: ComplexField,
    pub snapshots: Vec<Snapshot>,
    pub peak_series: Vec<PeakRecord>,
    pub norm_series: Vec<NormRecord>,
    /// `(t, ‖D(t)‖∞)` at every record.
    pub duhamel_series: Vec<(f64, f64)>,
    pub steps: usize,
    pub richardson: Option<RichardsonCheck>,
}

impl EvolutionTrace {
    pub fn converged(&self) -> bool {
        self.richardson.map_or(true, |r| r.converged)
    }

    pub fn final_state(&self) -> &ComplexField {
        &self.snapshots.last().expect("trace has at least the final snapshot").field
    }

    pub fn snapshot_at(&self, t: f64) -> Option<&ComplexField> {
        self.snapshots.iter().find(|s| (s.time - t).abs() <= 1e-12 * t.abs().max(1.0)).map(|s| &s.field)
    }

    /// Largest `‖D(t)‖∞` over records with `t ≤ until`.
    pub fn max_duhamel(&self, until: f64) -> f64 {
        self.duhamel_series.iter().filter(|(t, _)| *t <= until * (1.0 + 1e-12)).map(|(_, d)| *d).fold(0.0, f64::max)
    }

    /// Relative spread of the L² series.
    pub fn mass_drift(&self) -> f64 {
        let first = self.norm_series.first().map_or(0.0, |r| r.l2);
        self.norm_series.iter().map(|r| (r.l2 - first).abs()).fold(0.0, f64::max) / first
    }
}
