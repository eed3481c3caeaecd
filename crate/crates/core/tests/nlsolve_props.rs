use dbu::diagnostics::linear_fit;
use dbu::fields::{ComplexField, GridSpec, Parity};
use dbu::linprop::spectral_propagate;
use dbu::nlsolve::{duhamel_term, evolve, evolve_field, evolve_sphere_1d, lift_to_3d, SolveError, SolverConfig};
use dbu::parallel::Execution;
use dbu::scenario::{Geometry, Scenario};
use num_complex::Complex64;

fn gaussian(grid: &GridSpec, amp: f64) -> ComplexField {
    ComplexField::from_fn(grid.clone(), Execution::Parallel, |x| {
        Complex64::new(amp * (-x.iter().map(|v| v * v).sum::<f64>()).exp(), 0.0)
    })
    .unwrap()
}

fn quiet(dt: f64) -> SolverConfig {
    SolverConfig { dt, richardson: false, ..SolverConfig::default() }
}

#[test]
fn zero_data_stays_zero() {
    let grid = GridSpec::new(2, 8.0, 32).unwrap();
    let u0 = ComplexField::zeros(grid);
    let tr = evolve_field(&u0, 3.0, 1, &quiet(0.01), 0.5, Execution::Parallel).unwrap();
    assert_eq!(tr.final_state().sup_norm(), 0.0);
}

#[test]
fn linear_runs_match_the_multiplier() {
    let grid = GridSpec::new(1, 20.0, 256).unwrap();
    let u0 = gaussian(&grid, 1.0);
    let cfg = SolverConfig { coefficient: 0.0, snapshot_every: 1, ..quiet(0.01) };
    let tr = evolve_field(&u0, 3.0, 1, &cfg, 0.5, Execution::Sequential).unwrap();
    assert!(tr.snapshots.len() > 3);
    for s in &tr.snapshots {
        let lin = spectral_propagate(&u0, s.time, Execution::Sequential).unwrap();
        assert!(s.field.sub(&lin).unwrap().sup_norm() < 1e-13, "t={}", s.time);
    }
    assert!(duhamel_term(&tr).unwrap().iter().all(|(_, d)| *d < 1e-13));
    assert_eq!(tr.duhamel_series[0], (0.0, 0.0));
}

#[test]
fn mass_is_conserved() {
    let grid = GridSpec::new(1, 20.0, 512).unwrap();
    let u0 = gaussian(&grid, 1.0);
    let cfg = SolverConfig { record_every: 50, ..quiet(1e-3) };
    let tr = evolve_field(&u0, 3.0, 1, &cfg, 1.0, Execution::Parallel).unwrap();
    assert_eq!(tr.steps, 1000);
    assert!(tr.mass_drift() < 1e-10, "{:e}", tr.mass_drift());
}

#[test]
fn strang_is_second_order() {
    let grid = GridSpec::new(1, 20.0, 512).unwrap();
    let u0 = gaussian(&grid, 1.0);
    let at = |dt: f64| evolve_field(&u0, 3.0, 1, &quiet(dt), 0.5, Execution::Parallel).unwrap().final_state().clone();
    let reference = at(0.02 / 64.0);
    let e1 = at(0.02).sub(&reference).unwrap().l2_norm();
    let e2 = at(0.01).sub(&reference).unwrap().l2_norm();
    let ratio = e1 / e2;
    assert!((ratio - 4.0).abs() < 0.8, "ratio {ratio}");
}

#[test]
fn sign_changes_the_trace_not_the_datum() {
    let grid = GridSpec::new(1, 20.0, 256).unwrap();
    let u0 = gaussian(&grid, 1.0);
    let a = evolve_field(&u0, 3.0, 1, &quiet(0.01), 0.5, Execution::Parallel).unwrap();
    let b = evolve_field(&u0, 3.0, -1, &quiet(0.01), 0.5, Execution::Parallel).unwrap();
    assert_eq!(a.snapshots[0].field, b.snapshots[0].field);
    assert!(a.final_state().sub(b.final_state()).unwrap().sup_norm() > 1e-3);
}

#[test]
fn duhamel_is_small_for_small_data() {
    let alpha = 0.05;
    let grid = GridSpec::new(2, 10.0, 64).unwrap();
    let u0 = gaussian(&grid, alpha);
    let cfg = SolverConfig { record_every: 1, ..quiet(1e-3) };
    let tr = evolve_field(&u0, 3.0, 1, &cfg, 0.1, Execution::Parallel).unwrap();
    for (t, d) in &tr.duhamel_series {
        assert!(*d <= 10.0 * alpha.powi(3) * t + 1e-15, "t={t} D={d:e}");
    }
    // Non-decreasing running maximum, vanishing at 0, slope ≥ 1 on small T.
    let running: Vec<f64> = tr.duhamel_series.iter().map(|(t, _)| tr.max_duhamel(*t)).collect();
    assert!(running.windows(2).all(|w| w[1] >= w[0]));
    assert_eq!(running[0], 0.0);
    // The slope tends to 1 from below: ‖D(T)‖∞ = T‖|u₀|³‖∞ − O(T²).
    let fine = SolverConfig { record_every: 1, ..quiet(1e-4) };
    let tr = evolve_field(&u0, 3.0, 1, &fine, 2e-3, Execution::Parallel).unwrap();
    let small: Vec<(f64, f64)> = tr.duhamel_series.iter().filter(|(t, _)| *t > 0.0).copied().collect();
    let fit = linear_fit(
        &small.iter().map(|(t, _)| t.ln()).collect::<Vec<_>>(),
        &small.iter().map(|(_, d)| d.ln()).collect::<Vec<_>>(),
    );
    assert!(fit.slope >= 1.0 - 1e-3, "slope {}", fit.slope);
}

#[test]
fn small_point_data_runs_past_focus() {
    let sc = Scenario::new(2, 3.0, 0.5, 0.8, 0.05, 0.5, Geometry::Point { center: vec![0.0, 0.0] }, 1).unwrap();
    let grid = GridSpec::half_cell(2, 8.0, 64).unwrap();
    let cfg = SolverConfig { dt: 2e-3, capture_times: vec![0.5], ..SolverConfig::default() };
    let tr = evolve(&sc, &grid, &cfg, 0.6).unwrap();
    assert!(tr.converged(), "{:?}", tr.richardson);
    assert!(tr.snapshot_at(0.5).is_some());
    assert!(tr.mass_drift() < 1e-8);
}

#[test]
fn guards_trip() {
    let grid = GridSpec::new(1, 10.0, 128).unwrap();
    let big = gaussian(&grid, 10.0);
    let r = evolve_field(&big, 3.0, 1, &quiet(0.01), 0.1, Execution::Sequential);
    assert!(matches!(r, Err(SolveError::PhaseAccuracy { step: 0, .. })));
    let cfg = SolverConfig { ceiling: 0.5, ..quiet(1e-3) };
    let r = evolve_field(&gaussian(&grid, 1.0), 3.0, 1, &cfg, 0.1, Execution::Sequential);
    assert!(matches!(r, Err(SolveError::Ceiling { .. })));
    assert!(evolve_field(&big, 3.0, 1, &quiet(-1.0), 0.1, Execution::Sequential).is_err());
}

#[test]
fn radial_reduction_keeps_parity() {
    let sc = Scenario::new(3, 1.5, 0.35, 0.45, 1.0, 1.0, Geometry::Sphere, 1).unwrap();
    let grid = GridSpec::half_cell(1, 40.0, 4096).unwrap();
    let cfg = SolverConfig { record_every: 1, snapshot_every: 2, capture_times: vec![0.5], ..quiet(0.05) };
    for parity in [Parity::Even, Parity::Odd] {
        let tr = evolve_sphere_1d(&sc, &grid, parity, &cfg, 1.0).unwrap();
        assert!(tr.parity_defect < 1e-10);
        assert!(tr.trace.snapshots.len() > 3);
    }
    let odd = evolve_sphere_1d(&sc, &grid, Parity::Odd, &cfg, 1.0).unwrap();
    let prof = lift_to_3d(&odd, &[0.5, 1.5]);
    assert_eq!(prof.len(), odd.trace.snapshots.len());
    assert!(prof.iter().all(|p| p.values.iter().all(|v| v.norm().is_finite())));
}
