use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use gqprof::testkit::{fibonacci_slp, random_text};
use gqprof::{
    build_profile_basic_with, build_profile_improved, build_profiles, compress_text,
    distance_matrix, BuildConfig, Exec, FingerprintParams, ProfileTable, Slp,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const MODES: [(&str, Exec); 2] = [
    ("sequential", Exec::Sequential),
    ("parallel", Exec::Parallel),
];

fn corpus(count: usize, len: usize) -> Vec<Slp> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    (0..count)
        .map(|i| compress_text(&random_text(&mut rng, [2, 4, 26][i % 3], len)).unwrap())
        .collect()
}

fn basic_build(c: &mut Criterion) {
    let slp = &corpus(1, 100_000)[0];
    let mut group = c.benchmark_group("basic_build");
    group.sample_size(10);
    for q in [4, 16] {
        let params = FingerprintParams::new(q, 1).unwrap();
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, q), &params, |b, p| {
                b.iter(|| build_profile_basic_with(black_box(slp), p.clone(), exec).unwrap())
            });
        }
    }
    group.finish();
}

fn basic_vs_improved(c: &mut Criterion) {
    let random = corpus(1, 100_000).remove(0);
    let fib = fibonacci_slp(30);
    let mut group = c.benchmark_group("algorithm");
    group.sample_size(10);
    for (input, slp) in [("random", &random), ("fibonacci", &fib)] {
        let params = FingerprintParams::new(8, 1).unwrap();
        group.bench_function(BenchmarkId::new("basic", input), |b| {
            b.iter(|| build_profile_basic_with(slp, params.clone(), Exec::Sequential).unwrap())
        });
        group.bench_function(BenchmarkId::new("improved", input), |b| {
            b.iter(|| build_profile_improved(slp, params.clone()).unwrap())
        });
    }
    group.finish();
}

fn batch_builds(c: &mut Criterion) {
    let slps = corpus(32, 20_000);
    let mut group = c.benchmark_group("batch_build");
    group.sample_size(10);
    for (name, exec) in MODES {
        let config = BuildConfig {
            exec,
            ..BuildConfig::default()
        };
        group.bench_function(name, |b| b.iter(|| build_profiles(&slps, 5, 1, &config)));
    }
    group.finish();
}

fn distances(c: &mut Criterion) {
    let tables: Vec<ProfileTable> = corpus(64, 5_000)
        .iter()
        .map(|slp| gqprof::build_profile(slp, 4, 1).unwrap().profile.table())
        .collect();
    let mut group = c.benchmark_group("distance_matrix");
    for (name, exec) in MODES {
        group.bench_function(name, |b| b.iter(|| distance_matrix(&tables, exec).unwrap()));
    }
    group.finish();
}

criterion_group!(
    benches,
    basic_build,
    basic_vs_improved,
    batch_builds,
    distances
);
criterion_main!(benches);
