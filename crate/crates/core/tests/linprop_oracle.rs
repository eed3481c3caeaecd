use std::sync::Arc;

use dbu::fields::{ComplexField, GridSpec, LineData, Parity, PointData, V0Data};
use dbu::linprop::{
    dispersive_decay_check, exact_at_tstar, exact_v_at_tstar, quadrature_at, spectral_propagate, GaussianMixture,
    QuadratureData,
};
use dbu::parallel::Execution;
use dbu::scenario::{Geometry, Scenario};
use num_complex::Complex64;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

fn gauss_free(t: f64, x: &[f64]) -> Complex64 {
    let d = 1.0 + 4.0 * I * t;
    let r2: f64 = x.iter().map(|v| v * v).sum();
    d.powf(-(x.len() as f64) / 2.0) * (-r2 / d).exp()
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

#[test]
fn spectral_gaussian_matches_closed_form() {
    for (dim, l, n, t) in [(1, 40.0, 1024, 1.0), (2, 20.0, 256, 0.5)] {
        let grid = GridSpec::new(dim, l, n).unwrap();
        let u0 = ComplexField::from_fn(grid.clone(), Execution::Parallel, |x| gauss_free(0.0, x)).unwrap();
        let u = spectral_propagate(&u0, t, Execution::Parallel).unwrap();
        let err = (0..grid.len()).map(|i| (u.values()[i] - gauss_free(t, &grid.node(i))).norm()).fold(0.0, f64::max);
        assert!(err < 1e-8, "d={dim}: {err:e}");
    }
}

#[test]
fn direct_quadrature_gaussian_2d() {
    let data = QuadratureData::Direct {
        dim: 2,
        radius: 7.0,
        f: Arc::new(|y: &[f64]| Complex64::new((-(y[0] * y[0] + y[1] * y[1])).exp(), 0.0)),
    };
    let pts = vec![vec![0.0, 0.0], vec![0.5, -0.3], vec![1.2, 0.9]];
    let v = quadrature_at(0.4, &data, &pts, Execution::Parallel).unwrap();
    for (p, q) in pts.iter().zip(&v) {
        assert!(rel(q.value, gauss_free(0.4, p)) < 1e-8, "{p:?}");
    }
}

#[test]
fn small_time_recovers_datum() {
    let data = PointData { alpha: 1.0, m: 0.8, t_star: 1.0, center: vec![0.0, 0.0] };
    let mix = QuadratureData::Mixture(GaussianMixture::point(&data));
    let pts = vec![vec![0.2, 0.1], vec![-0.7, 0.4], vec![1.5, -1.0]];
    let v = quadrature_at(1e-8, &mix, &pts, Execution::Sequential).unwrap();
    for (p, q) in pts.iter().zip(&v) {
        let r2 = p[0] * p[0] + p[1] * p[1];
        let u0 = Complex64::from_polar((1.0 + r2).powf(-0.8), -r2 / 4.0);
        assert!((q.value - u0).norm() < 1e-6, "{p:?}: {} vs {u0}", q.value);
    }
}

#[test]
fn quadrature_is_linear() {
    let f = |y: &[f64]| Complex64::new((-y[0] * y[0]).exp(), 0.0);
    let g = |y: &[f64]| Complex64::from_polar((-(y[0] - 1.0).powi(2)).exp(), y[0]);
    let a = Complex64::new(2.0, -0.5);
    let b = Complex64::new(0.0, 1.5);
    let mk = |h: Arc<dyn Fn(&[f64]) -> Complex64 + Send + Sync>| QuadratureData::Direct { dim: 1, radius: 10.0, f: h };
    let pts: Vec<Vec<f64>> = (0..5).map(|k| vec![-1.0 + 0.6 * k as f64]).collect();
    let uf = quadrature_at(0.6, &mk(Arc::new(f)), &pts, Execution::Sequential).unwrap();
    let ug = quadrature_at(0.6, &mk(Arc::new(g)), &pts, Execution::Sequential).unwrap();
    let uh = quadrature_at(0.6, &mk(Arc::new(move |y: &[f64]| a * f(y) + b * g(y))), &pts, Execution::Sequential).unwrap();
    for k in 0..pts.len() {
        let combo = a * uf[k].value + b * ug[k].value;
        assert!((uh[k].value - combo).norm() < 1e-9 * combo.norm().max(1e-3));
    }
}

fn ring_points(center: &[f64], n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|k| {
            let r = 0.1 * 10f64.powf(k as f64 / (n - 1) as f64);
            let a = 2.399963 * k as f64;
            vec![center[0] + r * a.cos(), center[1] + r * a.sin()]
        })
        .collect()
}

#[test]
fn exact_matches_quadrature_at_focus() {
    for t_star in [1.0, -0.7] {
        let center = vec![0.25, -0.5];
        let sc = Scenario::new(2, 3.0, 0.5, 0.8, 1.0, t_star, Geometry::Point { center: center.clone() }, 1).unwrap();
        let pts = ring_points(&center, 20);
        let exact = exact_at_tstar(&sc, &pts).unwrap();
        let data = PointData::from_scenario(&sc).unwrap();
        let quad = quadrature_at(t_star, &QuadratureData::Mixture(GaussianMixture::point(&data)), &pts, Execution::Parallel).unwrap();
        let worst = exact.iter().zip(&quad).map(|(e, q)| rel(q.value, *e)).fold(0.0, f64::max);
        assert!(worst < 1e-6, "t*={t_star}: {worst:e}");
    }
}

#[test]
fn line_solution_is_rank_one_and_exact() {
    let sc = Scenario::new(2, 3.0, 0.35, 0.45, 1.0, 1.0, Geometry::Line, 1).unwrap();
    let data = LineData::from_scenario(&sc).unwrap();
    let mix = QuadratureData::Mixture(GaussianMixture::line(&data));
    let along = [-0.8, 0.1, 0.6];
    let across = [0.15, -0.4, 0.9];
    let pts: Vec<Vec<f64>> = along.iter().flat_map(|&a| across.iter().map(move |&b| vec![a, b])).collect();
    let q: Vec<Complex64> = quadrature_at(1.0, &mix, &pts, Execution::Parallel).unwrap().iter().map(|v| v.value).collect();
    let exact = exact_at_tstar(&sc, &pts).unwrap();
    for (a, b) in q.iter().zip(&exact) {
        assert!(rel(*a, *b) < 1e-6);
    }
    // 2×2 minors of the (along, across) matrix vanish.
    let at = |i: usize, j: usize| q[i * across.len() + j];
    for (i, j) in [(0, 1), (1, 2), (0, 2)] {
        for (k, l) in [(0, 1), (1, 2), (0, 2)] {
            let minor = at(i, k) * at(j, l) - at(i, l) * at(j, k);
            let scale = (at(i, k) * at(j, l)).norm();
            assert!(minor.norm() < 1e-6 * scale, "minor ({i},{j})x({k},{l})");
        }
    }
}

#[test]
fn radial_solution_matches_quadrature() {
    let sc = Scenario::new(3, 1.5, 0.35, 0.45, 1.0, 1.0, Geometry::Sphere, 1).unwrap();
    let data = V0Data::from_scenario(&sc, Parity::Even).unwrap();
    let mix = QuadratureData::Mixture(GaussianMixture::v0(&data).unwrap());
    let radii = [-2.3, -0.6, 0.0, 0.4, 0.8, 1.3, 2.0];
    let pts: Vec<Vec<f64>> = radii.iter().map(|&r| vec![r]).collect();
    let q = quadrature_at(1.0, &mix, &pts, Execution::Sequential).unwrap();
    let e = exact_v_at_tstar(&sc, &radii).unwrap();
    for (a, b) in q.iter().zip(&e) {
        assert!(rel(a.value, *b) < 1e-6);
    }
    assert!(exact_v_at_tstar(&sc, &[1.0]).is_err());
}

#[test]
fn decay_rate_one_dimension() {
    let grid = GridSpec::new(1, 400.0, 4096).unwrap();
    let u0 = ComplexField::from_fn(grid, Execution::Parallel, |x| gauss_free(0.0, x)).unwrap();
    let times: Vec<f64> = (0..12).map(|k| 10f64.powf(k as f64 / 11.0)).collect();
    let fit = dispersive_decay_check(&u0, &times, Execution::Parallel).unwrap();
    assert!((fit.slope + 0.5).abs() < 0.03 * 0.5, "{}", fit.slope);
    assert!(fit.bound_holds);
    assert!(dispersive_decay_check(&u0, &[1.0, 5.0], Execution::Parallel).is_err());
}
