//! Sequential (one worker) against the rayon pool on the Monte Carlo kernels.
//! With `--no-default-features` both arms run the sequential path.

use std::hint::black_box;
use std::time::Duration;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use parset::entropy::{entropy_mc, GaussianMixture};
use parset::mc::{mc_shell_lebesgue, mc_volume, McConfig};
use parset::{NormKind, ParallelSetSpec, PointSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn spec(d: usize, n: usize) -> ParallelSetSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let coords = (0..n * d).map(|_| rng.random_range(-1.0..1.0)).collect();
    ParallelSetSpec::new(PointSet::new(d, coords).unwrap(), NormKind::L2, 0.4).unwrap()
}

fn worker_counts() -> Vec<usize> {
    let n = std::thread::available_parallelism().map_or(1, |n| n.get());
    if n > 1 { vec![1, n] } else { vec![1, 2] }
}

fn volume(c: &mut Criterion) {
    let s = spec(3, 32);
    let mut group = c.benchmark_group("mc_volume");
    for w in worker_counts() {
        let cfg = McConfig::new(200_000, 7).with_workers(w);
        group.bench_with_input(BenchmarkId::new("workers", w), &cfg, |b, cfg| {
            b.iter(|| black_box(mc_volume(&s, cfg).unwrap()))
        });
    }
    group.finish();
}

fn shell(c: &mut Criterion) {
    let s = spec(3, 32);
    let mut group = c.benchmark_group("mc_shell_lebesgue");
    for w in worker_counts() {
        let cfg = McConfig::new(200_000, 7).with_workers(w);
        group.bench_with_input(BenchmarkId::new("workers", w), &cfg, |b, cfg| {
            b.iter(|| black_box(mc_shell_lebesgue(&s, cfg).unwrap()))
        });
    }
    group.finish();
}

fn entropy(c: &mut Criterion) {
    let atoms = PointSet::new(2, vec![0.0, 0.0, 1.0, 0.5, -0.7, 1.2, 2.0, -1.0]).unwrap();
    let gm = GaussianMixture::uniform(atoms, 0.3).unwrap();
    let mut group = c.benchmark_group("entropy_mc");
    for w in worker_counts() {
        group.bench_with_input(BenchmarkId::new("workers", w), &w, |b, &w| {
            b.iter(|| black_box(entropy_mc(&gm, 100_000, 3, w).unwrap()))
        });
    }
    group.finish();
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10).measurement_time(Duration::from_secs(3));
    targets = volume, shell, entropy
}
criterion_main!(benches);
