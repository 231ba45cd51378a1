//! Rayon scans against their sequential fallbacks on the three hot loops:
//! covariance factorization, Hölder pair scans, and the incremental
//! right-derivative sweep behind the driver norms.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use fsdde_core::chol::{cholesky, cholesky_seq};
use fsdde_core::exec::{sup_indexed_par, sup_indexed_seq};
use fsdde_core::fbm::{FbmSampler, Hurst};
use fsdde_core::grid::{Grid, GridFunction};
use fsdde_core::holder::{holder_seminorm, HolderExponent};

fn covariance_matrix(n: usize, hurst: f64) -> Vec<f64> {
    let h = 1.0 / n as f64;
    let two_h = 2.0 * hurst;
    let mut a = vec![0.0; n * n];
    for i in 0..n {
        let ti = (i + 1) as f64 * h;
        for j in 0..=i {
            let tj = (j + 1) as f64 * h;
            a[i * n + j] = 0.5 * (ti.powf(two_h) + tj.powf(two_h) - (ti - tj).powf(two_h));
        }
    }
    a
}

fn bench_cholesky(c: &mut Criterion) {
    let mut group = c.benchmark_group("cholesky");
    group.sample_size(10);
    for &n in &[256usize, 512, 1024] {
        let a = covariance_matrix(n, 0.75);
        group.bench_with_input(BenchmarkId::new("parallel", n), &n, |b, _| {
            b.iter(|| cholesky(a.clone(), n).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("sequential", n), &n, |b, _| {
            b.iter(|| cholesky_seq(a.clone(), n).unwrap())
        });
    }
    group.finish();
}

fn bench_pair_scan(c: &mut Criterion) {
    let mut group = c.benchmark_group("holder_seminorm");
    let beta = HolderExponent::new(0.65).unwrap();
    for &n in &[1024usize, 4096] {
        let sampler = FbmSampler::new(Hurst::new(0.75).unwrap(), Grid::over_horizon(1.0, n).unwrap())
            .unwrap();
        let path = sampler.sample(1).as_grid_function();
        group.bench_with_input(BenchmarkId::new("parallel", n), &n, |b, _| {
            b.iter(|| holder_seminorm(&path, beta))
        });
        // the sequential path through the same pair kernel
        let h = 1.0 / n as f64;
        let pow: Vec<f64> = (0..=n).map(|g| (g as f64 * h).powf(beta.get())).collect();
        let values: Vec<f64> = path.data().to_vec();
        let scan = |i: usize| {
            let mut best: f64 = 0.0;
            for j in i + 1..=n {
                best = best.max((values[j] - values[i]).abs() / pow[j - i]);
            }
            best
        };
        group.bench_with_input(BenchmarkId::new("sequential", n), &n, |b, _| {
            b.iter(|| sup_indexed_seq(n, scan))
        });
        group.bench_with_input(BenchmarkId::new("parallel_kernel", n), &n, |b, _| {
            b.iter(|| sup_indexed_par(n, scan))
        });
    }
    group.finish();
}

fn bench_monte_carlo_draws(c: &mut Criterion) {
    let mut group = c.benchmark_group("fbm_draws_x128");
    group.sample_size(10);
    for &n in &[256usize, 1024] {
        let sampler = FbmSampler::new(Hurst::new(0.75).unwrap(), Grid::over_horizon(1.0, n).unwrap())
            .unwrap();
        group.bench_with_input(BenchmarkId::new("parallel", n), &n, |b, _| {
            b.iter(|| {
                fsdde_core::exec::map_indexed(128, |seed| {
                    sampler.sample(seed as u64).values()[n]
                })
            })
        });
        group.bench_with_input(BenchmarkId::new("sequential", n), &n, |b, _| {
            b.iter(|| {
                fsdde_core::exec::map_indexed_seq(128, |seed| {
                    sampler.sample(seed as u64).values()[n]
                })
            })
        });
    }
    group.finish();
}

criterion_group!(benches, bench_cholesky, bench_pair_scan, bench_monte_carlo_draws);
criterion_main!(benches);
