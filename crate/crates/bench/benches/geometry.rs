//! Benchmarks for the hot numeric kernels: wedge products, principal-angle
//! extraction, and Lawson-Osserman frame construction.

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use gbk_core::cones::{lo_cone_frames, CoassocProfile};
use gbk_core::grassmann::{self, GrassmannPoint};
use gbk_core::multivector::wedge;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_vectors(rng: &mut ChaCha8Rng, count: usize, dim: usize) -> Vec<Vec<f64>> {
    (0..count)
        .map(|_| (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect()
}

fn random_point(rng: &mut ChaCha8Rng, n: usize, m: usize) -> GrassmannPoint {
    loop {
        if let Ok(p) = grassmann::from_basis(&random_vectors(rng, n, n + m)) {
            return p;
        }
    }
}

fn bench_wedge(c: &mut Criterion) {
    let mut group = c.benchmark_group("wedge");
    for (count, dim) in [(2usize, 4usize), (3, 7), (4, 8)] {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        group.bench_function(format!("{count}-vectors-in-R{dim}"), |b| {
            b.iter_batched(
                || random_vectors(&mut rng, count, dim),
                |vs| wedge(&vs).unwrap(),
                BatchSize::SmallInput,
            )
        });
    }
    group.finish();
}

fn bench_jordan(c: &mut Criterion) {
    let mut group = c.benchmark_group("jordan-angles");
    for (n, m) in [(2usize, 2usize), (3, 2), (4, 3)] {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        group.bench_function(format!("G({n},{m})"), |b| {
            b.iter_batched(
                || (random_point(&mut rng, n, m), random_point(&mut rng, n, m)),
                |(p, q)| grassmann::jordan_angles(&p, &q).unwrap(),
                BatchSize::SmallInput,
            )
        });
    }
    group.finish();
}

fn bench_w_function(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(37);
    c.bench_function("w-function/G(4,3)", |b| {
        b.iter_batched(
            || (random_point(&mut rng, 4, 3), random_point(&mut rng, 4, 3)),
            |(p, q)| grassmann::w_function(&p, &q).unwrap(),
            BatchSize::SmallInput,
        )
    });
}

fn bench_lo_frames(c: &mut Criterion) {
    let profile = CoassocProfile::lawson_osserman();
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    c.bench_function("lo-cone-frames", |b| {
        b.iter_batched(
            || {
                let x: Vec<f64> = (0..4).map(|_| rng.gen_range(-2.0..2.0)).collect();
                if x.iter().map(|v| v * v).sum::<f64>() > 0.04 {
                    x
                } else {
                    vec![0.5, -0.3, 0.8, 0.2]
                }
            },
            |x| lo_cone_frames(&x, &profile).unwrap(),
            BatchSize::SmallInput,
        )
    });
}

criterion_group!(benches, bench_wedge, bench_jordan, bench_w_function, bench_lo_frames);
criterion_main!(benches);
