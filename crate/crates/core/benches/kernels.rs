use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dbu::fields::{ComplexField, FftEngine, GridSpec, PointData};
use dbu::linprop::{quadrature_at, GaussianMixture, QuadratureData};
use dbu::nlsolve::Stepper;
use dbu::parallel::Execution;
use num_complex::Complex64;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn gaussian(grid: &GridSpec) -> ComplexField {
    ComplexField::from_fn(grid.clone(), Execution::Parallel, |x| {
        Complex64::new((-x.iter().map(|v| v * v).sum::<f64>()).exp(), 0.0)
    })
    .unwrap()
}

fn fft(c: &mut Criterion) {
    let mut group = c.benchmark_group("fft_2d");
    group.sample_size(10);
    for n in [256usize, 1024] {
        for (name, exec) in MODES {
            let engine = FftEngine::new(2, n, exec);
            let mut data = vec![Complex64::new(1.0, 0.5); n * n];
            let mut scratch = Vec::new();
            group.bench_with_input(BenchmarkId::new(name, n), &n, |b, _| {
                b.iter(|| engine.forward(&mut data, &mut scratch))
            });
        }
    }
    group.finish();
}

fn strang_step(c: &mut Criterion) {
    let mut group = c.benchmark_group("strang_step_2d");
    group.sample_size(10);
    for n in [256usize, 1024] {
        let grid = GridSpec::new(2, 10.0, n).unwrap();
        let u0 = gaussian(&grid);
        for (name, exec) in MODES {
            let mut stepper = Stepper::new(&grid, 3.0, 1.0, true, exec);
            let mut u = u0.values().to_vec();
            group.bench_with_input(BenchmarkId::new(name, n), &n, |b, _| {
                b.iter(|| stepper.step(&mut u, 1e-4, 0, 0.0).unwrap())
            });
        }
    }
    group.finish();
}

fn quadrature(c: &mut Criterion) {
    let mut group = c.benchmark_group("quadrature_batch");
    group.sample_size(10);
    let data = PointData { alpha: 1.0, m: 0.8, t_star: 1.0, center: vec![0.0, 0.0] };
    let mix = QuadratureData::Mixture(GaussianMixture::point(&data));
    let points: Vec<Vec<f64>> = (0..64).map(|k| vec![0.05 * k as f64, 0.3]).collect();
    for (name, exec) in MODES {
        group.bench_function(name, |b| b.iter(|| quadrature_at(0.7, &mix, &points, exec).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, fft, strang_step, quadrature);
criterion_main!(benches);
