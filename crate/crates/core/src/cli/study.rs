use num_complex::Complex64;
use serde::Serialize;

use super::config::{AlphaPolicy, Config, RichardsonPolicy};
use super::CliError;
use crate::diagnostics::{
    assemble_report, fit_blowup_exponent, refinement_divergence, DiagnosticsReport, ExponentFit, FitModel,
    RefinementRow, ReportInputs,
};
use crate::fields::{
    dft_forward, make_line_data, make_point_data, make_sphere_data, sobolev_norm, ComplexField, GridSpec,
    Parity, Spectrum,
};
use crate::linprop::{exact_at_tstar, exact_v_at_tstar, LinearPropagator};
use crate::nlsolve::{evolve_field, evolve_sphere_1d, EvolutionTrace, SolverConfig};
use crate::parallel::{self, Execution};
use crate::scenario::{scenario_hash, validate, FeasibilityVerdict, Geometry, Scenario};
use crate::specfun::NU_ZERO;

/// Points per axis of the one-dimensional radial oracle.
const RADIAL_ORACLE_POINTS: usize = 1 << 16;
const RADIAL_ORACLE_HALF_WIDTH: f64 = 160.0;
/// Exponent fits sample `ρ = r/(2|t*|)` in this range.
const FIT_RHO: (f64, f64) = (1e-8, 1e-5);
const FIT_SAMPLES: usize = 16;

#[derive(Debug, Clone, Serialize)]
pub struct AlphaChoice {
    pub policy: AlphaPolicy,
    pub alpha: f64,
    /// `‖u₀‖_{H^s}` of the `α = 1` data on the coarsest grid.
    pub sobolev_norm: Option<f64>,
    /// `‖e^(it*Δ)u₀‖∞` of the `α = 1` data on the coarsest grid.
    pub linear_peak: Option<f64>,
    pub time_exponent: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct LevelResult {
    pub grid: GridSpec,
    pub trace: EvolutionTrace,
    /// Near-locus linear maxima, one per locus point.
    pub near: Vec<f64>,
    /// Real and imaginary parts of `u(t*)` at the far probes.
    pub far: Vec<f64>,
    pub spectral_peak: f64,
}

#[derive(Debug, Clone)]
pub struct StudyOutcome {
    pub scenario: Scenario,
    pub feasibility: FeasibilityVerdict,
    pub alpha: Option<AlphaChoice>,
    pub locus: Vec<Vec<f64>>,
    pub probes: Vec<Vec<f64>>,
    pub levels: Vec<LevelResult>,
    pub exponent_samples: Vec<(f64, f64)>,
    pub report: DiagnosticsReport,
}

impl StudyOutcome {
    pub fn converged(&self) -> bool {
        self.report.numerics_converged
    }
}

fn sample_data(sc: &Scenario, grid: &GridSpec) -> Result<ComplexField, CliError> {
    Ok(match sc.geometry {
        Geometry::Point { .. } => make_point_data(sc, grid)?,
        Geometry::Line => make_line_data(sc, grid)?,
        Geometry::Sphere => make_sphere_data(sc, grid)?,
    })
}

fn unit(dim: usize, axis: usize, sign: f64) -> Vec<f64> {
    let mut e = vec![0.0; dim];
    e[axis] = sign;
    e
}

fn axpy(x: &[f64], a: f64, e: &[f64]) -> Vec<f64> {
    x.iter().zip(e).map(|(x, e)| x + a * e).collect()
}

/// Points on the singular set where divergence is tested.
pub fn locus_points(sc: &Scenario) -> Vec<Vec<f64>> {
    let d = sc.dim;
    match &sc.geometry {
        Geometry::Point { center } => vec![center.clone()],
        Geometry::Line => [-1.0, -0.5, 0.0, 0.5, 1.0].iter().map(|&x| axpy(&vec![0.0; d], x, &unit(d, 0, 1.0))).collect(),
        Geometry::Sphere => (0..d).flat_map(|a| [1.0, -1.0].map(|s| unit(d, a, s))).collect(),
    }
}

/// Fixed probes farther than `far` from the singular set.
pub fn far_probes(sc: &Scenario, far: f64) -> Vec<Vec<f64>> {
    let d = sc.dim;
    let scales = [1.5, 2.5, 4.0];
    match &sc.geometry {
        Geometry::Point { center } => (0..d)
            .flat_map(|a| [1.0, -1.0].map(|s| unit(d, a, s)))
            .flat_map(|e| scales.iter().map(move |k| (e.clone(), k * far)).collect::<Vec<_>>())
            .map(|(e, r)| axpy(center, r, &e))
            .collect(),
        Geometry::Line => {
            let mut out = Vec::new();
            for x1 in [-1.0, 0.0, 1.0] {
                for a in 1..d {
                    for s in [1.0, -1.0] {
                        for k in scales {
                            let mut x = unit(d, a, s * k * far);
                            x[0] = x1;
                            out.push(x);
                        }
                    }
                }
            }
            out
        }
        Geometry::Sphere => (0..d)
            .flat_map(|a| [1.0, -1.0].map(|s| unit(d, a, s)))
            .flat_map(|e| {
                [1.0 - 1.5 * far, 1.0 + 1.5 * far, 1.0 + 2.5 * far]
                    .into_iter()
                    .filter(|r| *r > 0.0)
                    .map(move |r| e.iter().map(|v| v * r).collect::<Vec<f64>>())
            })
            .collect(),
    }
}

/// Nodes in a small box around `x` (six per axis).
fn nodes_near(grid: &GridSpec, x: &[f64]) -> Vec<Vec<f64>> {
    let h = grid.spacing();
    let n = grid.n() as i64;
    let ranges: Vec<Vec<usize>> = (0..grid.dim)
        .map(|a| {
            let j0 = ((x[a] - grid.origin(a)) / h).floor() as i64;
            ((j0 - 2).max(0)..=(j0 + 3).min(n - 1)).map(|j| j as usize).collect()
        })
        .collect();
    let mut out = vec![Vec::new()];
    for (a, r) in ranges.iter().enumerate() {
        out = out
            .into_iter()
            .flat_map(|p: Vec<f64>| r.iter().map(move |&j| {
                let mut q = p.clone();
                q.push(grid.coord(a, j));
                q
            }))
            .collect();
    }
    out
}

/// Linear solution at `t*` from the closed form (point, line) or from the
/// one-dimensional radial oracle (sphere).
struct LinearReference {
    radial: Option<Spectrum>,
}

impl LinearReference {
    fn new(sc: &Scenario) -> Result<Self, CliError> {
        if !matches!(sc.geometry, Geometry::Sphere) {
            return Ok(Self { radial: None });
        }
        let grid = GridSpec::half_cell(1, RADIAL_ORACLE_HALF_WIDTH, RADIAL_ORACLE_POINTS)?;
        let cfg = SolverConfig { richardson: false, capture_times: vec![], record_every: 1, ..SolverConfig::default() };
        let cfg = SolverConfig { dt: sc.t_star, ..cfg };
        let tr = evolve_sphere_1d(sc, &grid, Parity::Odd, &cfg, sc.t_star)?;
        Ok(Self { radial: Some(dft_forward(tr.trace.final_state())) })
    }

    fn modulus(&self, sc: &Scenario, points: &[Vec<f64>]) -> Result<Vec<f64>, CliError> {
        match &self.radial {
            None => {
                // Nodes on the singular set itself are never sampled on offset grids.
                Ok(exact_at_tstar(sc, points)?.iter().map(|z| z.norm()).collect())
            }
            Some(spec) => Ok(parallel::map(Execution::default(), points, |x| {
                let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                (spec.interpolate(&[r]) / r).norm()
            })),
        }
    }
}

fn exponent_samples(sc: &Scenario) -> Result<(Vec<(f64, f64)>, FitModel), CliError> {
    let d = sc.dim as f64;
    let two_t = 2.0 * sc.t_star.abs();
    let rhos: Vec<f64> = (0..FIT_SAMPLES)
        .map(|k| FIT_RHO.0 * (FIT_RHO.1 / FIT_RHO.0).powf(k as f64 / (FIT_SAMPLES - 1) as f64))
        .collect();
    let (nu, samples) = match &sc.geometry {
        Geometry::Point { center } => {
            let pts: Vec<Vec<f64>> = rhos.iter().map(|r| axpy(center, r * two_t, &unit(sc.dim, 0, 1.0))).collect();
            let u = exact_at_tstar(sc, &pts)?;
            (d / 2.0 - sc.m, rhos.iter().zip(u).map(|(r, v)| (r * two_t, v.norm())).collect())
        }
        Geometry::Line => {
            let pts: Vec<Vec<f64>> = rhos.iter().map(|r| unit(sc.dim, 1, r * two_t)).collect();
            let u = exact_at_tstar(sc, &pts)?;
            ((d - 1.0) / 2.0 - sc.m, rhos.iter().zip(u).map(|(r, v)| (r * two_t, v.norm())).collect())
        }
        Geometry::Sphere => {
            let radii: Vec<f64> = rhos.iter().map(|r| 1.0 + r * two_t).collect();
            let v = exact_v_at_tstar(sc, &radii)?;
            (0.5 - sc.m, rhos.iter().zip(radii.iter().zip(v)).map(|(r, (rr, v))| (r * two_t, v.norm() / rr)).collect())
        }
    };
    let model = if nu.abs() < NU_ZERO { FitModel::Log } else { FitModel::Power };
    Ok((samples, model))
}

fn choose_alpha(config: &Config, grid: &GridSpec) -> Result<AlphaChoice, CliError> {
    let sc = &config.scenario;
    match config.alpha_policy {
        AlphaPolicy::Fixed => Ok(AlphaChoice {
            policy: AlphaPolicy::Fixed,
            alpha: sc.alpha,
            sobolev_norm: None,
            linear_peak: None,
            time_exponent: None,
        }),
        AlphaPolicy::Auto { margin } => {
            let unit_data = sample_data(&sc.with_alpha(1.0), grid)?;
            let n = sobolev_norm(&unit_data, sc.s).value;
            let peak = LinearPropagator::new(&unit_data, Execution::default()).at(sc.t_star)?.sup_norm();
            let d = sc.dim as f64;
            let e = (4.0 + sc.p * (2.0 * sc.s - d)) / 6.0;
            let t = config.t_end();
            let bound = 0.1 * peak / (t.powf(e) * n.powf(sc.p));
            let alpha = margin * bound.powf(1.0 / (sc.p - 1.0));
            Ok(AlphaChoice {
                policy: config.alpha_policy,
                alpha,
                sobolev_norm: Some(n),
                linear_peak: Some(peak),
                time_exponent: Some(e),
            })
        }
    }
}

fn check_chirp(sc: &Scenario, grid: &GridSpec) -> Result<(), CliError> {
    // Local wavenumber of e^(−i|x|²/4t*) at the box corner.
    let corner = grid.half_width * (sc.dim as f64).sqrt();
    let k = corner / (2.0 * sc.t_star.abs());
    let nyquist = std::f64::consts::PI / grid.spacing();
    if k >= nyquist {
        return Err(CliError::Config(format!(
            "grid N = {} does not resolve the chirp: wavenumber {k:.3} at the corner, Nyquist {nyquist:.3}",
            grid.n()
        )));
    }
    Ok(())
}

/// validate → data → linear references → nonlinear runs → diagnostics.
pub fn run_study(config: &Config, exec: Execution) -> Result<StudyOutcome, CliError> {
    let feasibility = validate(&config.scenario);
    let levels = config.levels();
    if !feasibility.is_feasible() {
        let sc = config.scenario.clone();
        let report = assemble_report(ReportInputs {
            component_hashes: vec![],
            feasibility: feasibility.clone(),
            scenario: sc.clone(),
            exponent_fit: None,
            refinement_table: vec![],
            divergence: vec![],
            duhamel_tolerance: config.diagnostics.duhamel_tolerance,
            numerics_converged: true,
        })?;
        return Ok(StudyOutcome {
            scenario: sc,
            feasibility,
            alpha: None,
            locus: vec![],
            probes: vec![],
            levels: vec![],
            exponent_samples: vec![],
            report,
        });
    }
    if !(config.scenario.t_star > 0.0) {
        return Err(CliError::Config("the nonlinear study runs forward in time and needs t_star > 0".into()));
    }
    if levels.windows(2).any(|w| w[1] != 2 * w[0]) {
        return Err(CliError::Config(format!("refinement levels must double, got {levels:?}")));
    }
    let l = config.grid.half_width;
    let grids: Vec<GridSpec> =
        levels.iter().map(|&n| GridSpec::half_cell(config.scenario.dim, l, n)).collect::<Result<_, _>>()?;
    check_chirp(&config.scenario, &grids[0])?;

    let alpha = choose_alpha(config, &grids[0])?;
    let sc = config.scenario.with_alpha(alpha.alpha);
    let hash = scenario_hash(&sc);
    let t_end = config.t_end();
    let t_star = sc.t_star;
    let locus = locus_points(&sc);
    let probes = far_probes(&sc, config.diagnostics.far_radius);
    let reference = LinearReference::new(&sc)?;

    let mut results = Vec::with_capacity(grids.len());
    for (k, grid) in grids.iter().enumerate() {
        let u0 = sample_data(&sc, grid)?;
        let richardson = match config.refinement.richardson {
            RichardsonPolicy::All => true,
            RichardsonPolicy::Coarsest => k == 0,
            RichardsonPolicy::Off => false,
        };
        let mut capture = config.solver.capture_times.clone();
        if t_star < t_end {
            capture.push(t_star);
        }
        let solver = SolverConfig { richardson, capture_times: capture, ..config.solver.clone() };
        let trace = evolve_field(&u0, sc.p, sc.sign, &solver, t_end, exec)?;
        let at_focus = trace.snapshot_at(t_star.min(t_end)).unwrap_or(trace.final_state());
        let spec = dft_forward(at_focus);
        let far: Vec<f64> = parallel::map(exec, &probes, |x| spec.interpolate(x))
            .into_iter()
            .flat_map(|z: Complex64| [z.re, z.im])
            .collect();
        let near = locus
            .iter()
            .map(|x| Ok(reference.modulus(&sc, &nodes_near(grid, x))?.into_iter().fold(0.0, f64::max)))
            .collect::<Result<Vec<f64>, CliError>>()?;
        let spectral_peak = LinearPropagator::new(&u0, exec).at(t_star)?.sup_norm();
        results.push(LevelResult { grid: grid.clone(), trace, near, far, spectral_peak });
    }

    let (samples, model) = exponent_samples(&sc)?;
    let fit: Option<ExponentFit> = fit_blowup_exponent(&samples, model).ok();
    let far_levels: Vec<Vec<f64>> = results.iter().map(|r| r.far.clone()).collect();
    let divergence = (0..locus.len())
        .map(|j| {
            let near: Vec<f64> = results.iter().map(|r| r.near[j]).collect();
            refinement_divergence(&near, &far_levels, config.diagnostics.thresholds())
        })
        .collect::<Result<Vec<_>, _>>();
    let divergence = match divergence {
        Ok(d) => d,
        Err(_) => vec![],
    };
    let table: Vec<RefinementRow> = results
        .iter()
        .map(|r| RefinementRow {
            points_per_axis: r.grid.n(),
            linear_peak: r.near.iter().cloned().fold(0.0, f64::max),
            spectral_peak: r.spectral_peak,
            duhamel_max: r.trace.max_duhamel(t_star),
            far_max: r.far.iter().map(|v| v.abs()).fold(0.0, f64::max),
        })
        .collect();
    let converged = results.iter().all(|r| r.trace.converged());
    let report = assemble_report(ReportInputs {
        component_hashes: vec![("levels".into(), hash)],
        feasibility: feasibility.clone(),
        scenario: sc.clone(),
        exponent_fit: fit,
        refinement_table: table,
        divergence,
        duhamel_tolerance: config.diagnostics.duhamel_tolerance,
        numerics_converged: converged,
    })?;
    Ok(StudyOutcome {
        scenario: sc,
        feasibility,
        alpha: Some(alpha),
        locus,
        probes,
        levels: results,
        exponent_samples: samples,
        report,
    })
}
