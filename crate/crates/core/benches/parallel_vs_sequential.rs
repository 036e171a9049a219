//! Each workload runs on the global rayon pool and on a one-thread pool.
//! Build with `--no-default-features` to time the plain sequential path.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use iiot_energy::learning::*;
use iiot_energy::placement::{generate_instance, solve_optimal, AppShape};
use iiot_energy::radio::{monte_carlo_reservation, pow_latency_oracle, RadioConfig};
use iiot_energy::Seed;

#[cfg(feature = "parallel")]
fn pools() -> Vec<(&'static str, Option<rayon::ThreadPool>)> {
    let one = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    vec![("parallel", None), ("one-thread", Some(one))]
}

#[cfg(not(feature = "parallel"))]
fn pools() -> Vec<(&'static str, Option<()>)> {
    vec![("sequential", None)]
}

#[cfg(feature = "parallel")]
fn on<T: Send>(pool: &Option<rayon::ThreadPool>, f: impl FnOnce() -> T + Send) -> T {
    match pool {
        Some(p) => p.install(f),
        None => f(),
    }
}

#[cfg(not(feature = "parallel"))]
fn on<T: Send>(_: &Option<()>, f: impl FnOnce() -> T + Send) -> T {
    f()
}

fn monte_carlo(c: &mut Criterion) {
    let mut g = c.benchmark_group("monte_carlo");
    g.sample_size(10);
    let radio = RadioConfig {
        lambda_s: 4.0,
        ..Default::default()
    };
    for (name, pool) in pools() {
        g.bench_function(BenchmarkId::new("pow_oracle_1e6", name), |b| {
            b.iter(|| {
                on(&pool, || {
                    pow_latency_oracle(5, 2.0, black_box(1_000_000), Seed(1))
                })
            })
        });
        g.bench_function(BenchmarkId::new("reservation_1e5", name), |b| {
            b.iter(|| {
                on(&pool, || {
                    monte_carlo_reservation(&radio, black_box(100_000), Seed(1)).unwrap()
                })
            })
        });
    }
    g.finish();
}

fn placement(c: &mut Criterion) {
    let mut g = c.benchmark_group("placement");
    g.sample_size(10);
    let (app, net, _) = generate_instance(AppShape::Wide, 10, 12, Seed(4)).unwrap();
    for (name, pool) in pools() {
        g.bench_function(BenchmarkId::new("exact_12x10", name), |b| {
            b.iter(|| {
                on(&pool, || {
                    solve_optimal(black_box(&app), &net, None).unwrap()
                })
            })
        });
    }
    g.finish();
}

fn learning(c: &mut Criterion) {
    let mut g = c.benchmark_group("learning");
    g.sample_size(10);
    let problems = SyntheticRegression::default().generate(Seed(2)).unwrap();
    let topo = build_topology(18, TopologyKind::Bipartite { mean_degree: 3.0 }, Seed(2)).unwrap();
    let energy = CommEnergyModel::with_random_gains(18, Seed(2));
    let cfg = RunConfig::new(Variant::Ggadmm, 1.0, 200, Seed(3));
    for (name, pool) in pools() {
        g.bench_function(BenchmarkId::new("ggadmm_18x200", name), |b| {
            b.iter(|| {
                on(&pool, || {
                    run(black_box(&problems), &topo, &cfg, &energy).unwrap()
                })
            })
        });
    }
    g.finish();
}

criterion_group!(benches, monte_carlo, placement, learning);
criterion_main!(benches);
