use num_complex::Complex64;
use serde::Serialize;

use super::{evolve_linear, EvolutionTrace, SolveError, SolverConfig};
use crate::fields::{dft_forward, make_v0, GridSpec, Parity};
use crate::parallel::Execution;
use crate::scenario::Scenario;

const PARITY_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct SphereTrace {
    pub trace: EvolutionTrace,
    pub parity: Parity,
    /// `max |v(t,r) ∓ v(t,−r)|` over the stored snapshots.
    pub parity_defect: f64,
}

/// Free one-dimensional flow of the radial datum. The odd extension evolves
/// as `r·u(t,r)` for the three-dimensional radial solution; the even one is
/// the datum as written, singular at `(t*, ±1)`.
pub fn evolve_sphere_1d(
    sc: &Scenario,
    grid1d: &GridSpec,
    parity: Parity,
    config: &SolverConfig,
    t_end: f64,
) -> Result<SphereTrace, SolveError> {
    let n = grid1d.n();
    let h = grid1d.spacing();
    if grid1d.dim != 1 || (grid1d.coord(0, 0) + grid1d.coord(0, n - 1)).abs() > 1e-9 * h {
        return Err(SolveError::InvalidConfig("radial grid must be one-dimensional and symmetric about 0".into()));
    }
    let mut v0 = make_v0(sc, grid1d)?;
    if parity == Parity::Odd {
        v0 = crate::fields::ComplexField::new(
            grid1d.clone(),
            v0.values().iter().enumerate().map(|(j, v)| v * grid1d.coord(0, j).signum()).collect(),
        )?;
    }
    let trace = evolve_linear(&v0, config, t_end, Execution::default())?;
    let sign = if parity == Parity::Even { 1.0 } else { -1.0 };
    let parity_defect = trace
        .snapshots
        .iter()
        .map(|s| {
            let v = s.field.values();
            (0..n).map(|j| (v[j] - sign * v[n - 1 - j]).norm()).fold(0.0, f64::max)
        })
        .fold(0.0, f64::max);
    if parity_defect > PARITY_TOL {
        return Err(SolveError::ParityViolation { defect: parity_defect });
    }
    Ok(SphereTrace { trace, parity, parity_defect })
}

#[derive(Debug, Clone, Serialize)]
pub struct RadialProfile {
    pub time: f64,
    pub radii: Vec<f64>,
    pub values: Vec<Complex64>,
}

/// `u(t,r) = v(t,r)/r` at arbitrary radii, through the trigonometric
/// interpolant of each stored snapshot.
pub fn lift_to_3d(trace: &SphereTrace, radii: &[f64]) -> Vec<RadialProfile> {
    trace
        .trace
        .snapshots
        .iter()
        .map(|s| {
            let spec = dft_forward(&s.field);
            let values = radii.iter().map(|&r| spec.interpolate(&[r]) / r).collect();
            RadialProfile { time: s.time, radii: radii.to_vec(), values }
        })
        .collect()
}
