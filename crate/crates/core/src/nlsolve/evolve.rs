use num_complex::Complex64;

use super::stepper::{dealias_default, Stepper};
use super::{EvolutionTrace, NormRecord, PeakRecord, RichardsonCheck, Snapshot, SolveError, SolverConfig};
use crate::fields::{
    make_line_data, make_point_data, make_sphere_data, sobolev_norm, ComplexField, GridSpec,
};
use crate::linprop::LinearPropagator;
use crate::parallel::{self, Execution};
use crate::scenario::{Geometry, Scenario};

/// Samples the scenario's initial data on `grid` and evolves it to `t_end`.
pub fn evolve(sc: &Scenario, grid: &GridSpec, config: &SolverConfig, t_end: f64) -> Result<EvolutionTrace, SolveError> {
    let u0 = match sc.geometry {
        Geometry::Point { .. } => make_point_data(sc, grid)?,
        Geometry::Line => make_line_data(sc, grid)?,
        Geometry::Sphere => make_sphere_data(sc, grid)?,
    };
    evolve_field(&u0, sc.p, sc.sign, config, t_end, Execution::default())
}

/// Ordered event times in `(0, t_end]`: capture times and the end point.
fn events(config: &SolverConfig, t_end: f64) -> Vec<f64> {
    let mut ev: Vec<f64> = config.capture_times.iter().copied().filter(|&t| t > 0.0 && t < t_end).collect();
    ev.push(t_end);
    ev.sort_by(f64::total_cmp);
    ev.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs().max(1.0));
    ev
}

struct Recorder<'a> {
    config: &'a SolverConfig,
    grid: &'a GridSpec,
    linear: LinearPropagator,
    lin: Vec<Complex64>,
    scratch: Vec<Complex64>,
    trace_snapshots: Vec<Snapshot>,
    peaks: Vec<PeakRecord>,
    norms: Vec<NormRecord>,
    duhamel: Vec<(f64, f64)>,
    records: usize,
}

impl Recorder<'_> {
    fn record(&mut self, t: f64, u: &[Complex64], store: bool) -> Result<(), SolveError> {
        let exec = self.linear.engine().execution();
        let field = ComplexField::new(self.grid.clone(), u.to_vec())?;
        let (imax, linf) = field.argmax();
        self.peaks.push(PeakRecord { time: t, location: self.grid.node(imax), value: linf });
        let hs = self.config.sobolev_s.map(|s| sobolev_norm(&field, s).value);
        self.norms.push(NormRecord { time: t, l2: field.l2_norm(), hs, linf });
        self.linear.evaluate_into(t, &mut self.lin, &mut self.scratch);
        let lin = &self.lin;
        let d = parallel::max_indexed(exec, u.len(), |i| (u[i] - lin[i]).norm());
        self.duhamel.push((t, d));
        let keep = store || (self.config.snapshot_every > 0 && self.records % self.config.snapshot_every == 0);
        if keep {
            self.trace_snapshots.push(Snapshot { time: t, field });
        }
        self.records += 1;
        Ok(())
    }
}

/// Steps `u0` to `t_end` and records the series. The step size inside each
/// segment between event times is `len / ceil(len / dt)`, so capture times
/// are hit exactly.
pub fn evolve_field(
    u0: &ComplexField,
    p: f64,
    sign: i8,
    config: &SolverConfig,
    t_end: f64,
    exec: Execution,
) -> Result<EvolutionTrace, SolveError> {
    config.check()?;
    if !(t_end > 0.0) {
        return Err(SolveError::InvalidConfig(format!("t_end must be positive, got {t_end}")));
    }
    let grid = u0.grid().clone();
    let dealias = config.dealias.unwrap_or_else(|| dealias_default(p));
    let strength = f64::from(sign) * config.coefficient;
    let mut stepper = Stepper::new(&grid, p, strength, dealias, exec);
    let mut rec = Recorder {
        config,
        grid: &grid,
        linear: LinearPropagator::new(u0, exec),
        lin: Vec::new(),
        scratch: Vec::new(),
        trace_snapshots: Vec::new(),
        peaks: Vec::new(),
        norms: Vec::new(),
        duhamel: Vec::new(),
        records: 0,
    };
    let mut u = u0.values().to_vec();
    rec.record(0.0, &u, true)?;
    let (steps, _) = run(&mut stepper, &mut u, config, t_end, config.dt, Some(&mut rec))?;
    let richardson = if config.richardson {
        let sup_full = stepper.sup(&u);
        let mut half = u0.values().to_vec();
        run(&mut stepper, &mut half, config, t_end, 0.5 * config.dt, None)?;
        let sup_half = stepper.sup(&half);
        let relative_change = (sup_full - sup_half).abs() / sup_half;
        Some(RichardsonCheck { sup_full, sup_half, relative_change, converged: relative_change < config.richardson_tol })
    } else {
        None
    };
    Ok(EvolutionTrace {
        grid: grid.clone(),
        p,
        sign,
        u0: u0.clone(),
        snapshots: rec.trace_snapshots,
        peak_series: rec.peaks,
        norm_series: rec.norms,
        duhamel_series: rec.duhamel,
        steps,
        richardson,
    })
}

fn run(
    stepper: &mut Stepper,
    u: &mut Vec<Complex64>,
    config: &SolverConfig,
    t_end: f64,
    dt: f64,
    mut rec: Option<&mut Recorder<'_>>,
) -> Result<(usize, f64), SolveError> {
    let mut t = 0.0;
    let mut step = 0;
    for target in events(config, t_end) {
        let n = ((target - t) / dt).ceil().max(1.0) as usize;
        let h = (target - t) / n as f64;
        let start = t;
        for j in 1..=n {
            let sup = stepper.step(u, h, step, t)?;
            if sup > config.ceiling {
                return Err(SolveError::Ceiling { time: t, value: sup });
            }
            step += 1;
            t = if j == n { target } else { start + j as f64 * h };
            if let Some(r) = rec.as_deref_mut() {
                if j == n {
                    r.record(t, u, true)?;
                } else if step % config.record_every == 0 {
                    r.record(t, u, false)?;
                }
            }
        }
    }
    let sup = stepper.sup(u);
    if sup.is_nan() {
        return Err(SolveError::NonFinite { step, time: t });
    }
    if sup > config.ceiling {
        return Err(SolveError::Ceiling { time: t, value: sup });
    }
    Ok((step, t))
}

/// Free flow with the same recording as [`evolve_field`], evaluated exactly
/// at each record time instead of stepped.
pub fn evolve_linear(u0: &ComplexField, config: &SolverConfig, t_end: f64, exec: Execution) -> Result<EvolutionTrace, SolveError> {
    config.check()?;
    let grid = u0.grid().clone();
    let mut rec = Recorder {
        config,
        grid: &grid,
        linear: LinearPropagator::new(u0, exec),
        lin: Vec::new(),
        scratch: Vec::new(),
        trace_snapshots: Vec::new(),
        peaks: Vec::new(),
        norms: Vec::new(),
        duhamel: Vec::new(),
        records: 0,
    };
    let prop = LinearPropagator::new(u0, exec);
    let mut u = Vec::new();
    let mut scratch = Vec::new();
    rec.record(0.0, u0.values(), true)?;
    let mut t = 0.0;
    let mut steps = 0;
    for target in events(config, t_end) {
        let n = ((target - t) / config.dt).ceil().max(1.0) as usize;
        let h = (target - t) / n as f64;
        let start = t;
        for j in 1..=n {
            steps += 1;
            let is_event = j == n;
            if is_event || steps % config.record_every == 0 {
                let tj = if is_event { target } else { start + j as f64 * h };
                prop.evaluate_into(tj, &mut u, &mut scratch);
                rec.record(tj, &u, is_event)?;
            }
        }
        t = target;
    }
    Ok(EvolutionTrace {
        grid: grid.clone(),
        p: 1.0,
        sign: 1,
        u0: u0.clone(),
        snapshots: rec.trace_snapshots,
        peak_series: rec.peaks,
        norm_series: rec.norms,
        duhamel_series: rec.duhamel,
        steps,
        richardson: None,
    })
}

/// `(t, ‖u(t) − e^(itΔ)u₀‖∞)` recomputed from the stored snapshots.
pub fn duhamel_term(trace: &EvolutionTrace) -> Result<Vec<(f64, f64)>, SolveError> {
    let prop = LinearPropagator::new(&trace.u0, Execution::default());
    let mut lin = Vec::new();
    let mut scratch = Vec::new();
    Ok(trace
        .snapshots
        .iter()
        .map(|s| {
            prop.evaluate_into(s.time, &mut lin, &mut scratch);
            let d = s.field.values().iter().zip(&lin).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            (s.time, d)
        })
        .collect())
}
