//! Kernel timings on the rayon pool versus a single worker.
//!
//! With default features each kernel is timed twice: on the global pool and
//! inside a one-thread pool. Built with `--no-default-features` the same
//! kernels run through the sequential code path.

use beltrami_core::fields::eval_b_n;
use beltrami_core::solver;
use beltrami_core::zeros::{scan_zeros, ScanConfig};
use beltrami_core::{ops, GridSpec, PhysicalField, SpectralField};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

fn datum(n: usize) -> (PhysicalField, SpectralField) {
    let g = GridSpec::with_periods(n, 1).unwrap();
    let f = PhysicalField::from_fn(g, |[x, y, z]| {
        let b = eval_b_n(2.0, [x, y, z]);
        [b[0] + (x + y).sin(), b[1] + z.cos(), (x - z).sin()]
    });
    let s = f.forward().unwrap();
    (f, s)
}

type Kernel = Box<dyn Fn() + Send + Sync>;

fn kernels(n: usize) -> Vec<(&'static str, Kernel)> {
    let (phys, spec) = datum(n);
    let spec2 = spec.clone();
    let spec3 = spec.clone();
    let spec4 = ops::curl(&spec).unwrap();
    vec![
        ("forward", Box::new(move || drop(black_box(phys.forward().unwrap())))),
        ("leray", Box::new(move || drop(black_box(ops::leray_project(&spec).unwrap())))),
        ("nonlinear", Box::new(move || drop(black_box(solver::nonlinear(&spec2, true).unwrap())))),
        ("step", Box::new(move || drop(black_box(solver::step(&spec3, 1.0, 1e-3, true).unwrap())))),
        ("scan", Box::new(move || drop(black_box(scan_zeros(&spec4, &ScanConfig::default()).unwrap())))),
    ]
}

fn bench(c: &mut Criterion) {
    let mut group = c.benchmark_group("kernels");
    group.sample_size(10);
    for n in [32, 64] {
        for (name, k) in kernels(n) {
            #[cfg(feature = "parallel")]
            {
                group.bench_with_input(BenchmarkId::new(format!("{name}/pool"), n), &n, |b, _| b.iter(&k));
                let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
                group.bench_with_input(BenchmarkId::new(format!("{name}/one-thread"), n), &n, |b, _| {
                    b.iter(|| single.install(|| k()))
                });
            }
            #[cfg(not(feature = "parallel"))]
            group.bench_with_input(BenchmarkId::new(format!("{name}/sequential"), n), &n, |b, _| b.iter(&k));
        }
    }
    group.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
