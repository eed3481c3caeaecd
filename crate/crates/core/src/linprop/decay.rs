use std::f64::consts::PI;

use serde::Serialize;

use super::{LinPropError, LinearPropagator};
use crate::diagnostics::linear_fit;
use crate::fields::ComplexField;
use crate::parallel::Execution;

/// Log-log fit of `sup|e^(itΔ)f|` against `|t|`.
#[derive(Debug, Clone, Serialize)]
pub struct DecayFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub times: Vec<f64>,
    pub sup_norms: Vec<f64>,
    /// Whether `sup|e^(itΔ)f| ≤ (4π|t|)^(−d/2) ‖f‖₁` held at every time.
    pub bound_holds: bool,
}

pub fn dispersive_decay_check(f: &ComplexField, times: &[f64], exec: Execution) -> Result<DecayFit, LinPropError> {
    let abs: Vec<f64> = times.iter().map(|t| t.abs()).collect();
    let lo = abs.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = abs.iter().cloned().fold(0.0, f64::max);
    if lo == 0.0 {
        return Err(LinPropError::ZeroTime);
    }
    if hi / lo < 10.0 {
        return Err(LinPropError::InsufficientSpan { ratio: hi / lo });
    }
    let prop = LinearPropagator::new(f, exec);
    let d = f.grid().dim as f64;
    let l1 = f.l1_norm();
    let mut out = Vec::new();
    let mut scratch = Vec::new();
    let mut sup_norms = Vec::with_capacity(times.len());
    let mut bound_holds = true;
    for &t in times {
        prop.evaluate_into(t, &mut out, &mut scratch);
        let sup = out.iter().map(|z| z.norm()).fold(0.0, f64::max);
        bound_holds &= sup <= (4.0 * PI * t.abs()).powf(-d / 2.0) * l1;
        sup_norms.push(sup);
    }
    let lx: Vec<f64> = abs.iter().map(|t| t.ln()).collect();
    let ly: Vec<f64> = sup_norms.iter().map(|s| s.ln()).collect();
    let fit = linear_fit(&lx, &ly);
    Ok(DecayFit {
        slope: fit.slope,
        intercept: fit.intercept,
        r_squared: fit.r_squared,
        times: times.to_vec(),
        sup_norms,
        bound_holds,
    })
}
