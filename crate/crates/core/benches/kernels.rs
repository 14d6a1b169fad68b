//! Sequential vs parallel timings for the hot kernels.
//!
//! Build without the `parallel` feature to confirm both columns collapse to
//! the same sequential path.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use sumfactor_core::collapse::prop310_check;
use sumfactor_core::intsets::{iterated_sumset, SetContext, SetSpec};
use sumfactor_core::strata::compute_strata;
use sumfactor_core::{Exec, PrimeTable};

const POLICIES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn sieve(c: &mut Criterion) {
    let mut group = c.benchmark_group("sieve");
    group.sample_size(10);
    for limit in [1_000_000u64, 10_000_000] {
        for (name, exec) in POLICIES {
            group.bench_with_input(BenchmarkId::new(name, limit), &limit, |b, &limit| {
                b.iter(|| PrimeTable::new(black_box(limit), exec).unwrap())
            });
        }
    }
    group.finish();
}

fn sumset(c: &mut Criterion) {
    let primes = PrimeTable::new(1_000_003, Exec::Parallel).unwrap();
    let ctx = SetContext::new(&primes);
    let mut group = c.benchmark_group("iterated_sumset");
    group.sample_size(10);
    for hi in [100_000u64, 1_000_000] {
        let p3 = SetSpec::primes_ge(3).to_window(&ctx, 3, hi).unwrap();
        for (name, exec) in POLICIES {
            group.bench_with_input(BenchmarkId::new(name, hi), &p3, |b, ws| {
                b.iter(|| iterated_sumset(black_box(ws), 2, exec).unwrap())
            });
        }
    }
    group.finish();
}

fn strata(c: &mut Criterion) {
    let primes = PrimeTable::new(1_000_003, Exec::Parallel).unwrap();
    let mut group = c.benchmark_group("compute_strata");
    group.sample_size(10);
    for limit in [100_000u64, 1_000_000] {
        for (name, exec) in POLICIES {
            group.bench_with_input(BenchmarkId::new(name, limit), &limit, |b, &limit| {
                b.iter(|| compute_strata(&primes, black_box(limit), exec).unwrap())
            });
        }
    }
    group.finish();
}

fn pair_sweep(c: &mut Criterion) {
    let primes = PrimeTable::new(200_000, Exec::Parallel).unwrap();
    let mut group = c.benchmark_group("prop310_check");
    group.sample_size(10);
    for k_max in [10_000u64, 40_000] {
        for (name, exec) in POLICIES {
            group.bench_with_input(BenchmarkId::new(name, k_max), &k_max, |b, &k| {
                b.iter(|| prop310_check(&primes, black_box(k), exec).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, sieve, sumset, strata, pair_sweep);
criterion_main!(benches);
