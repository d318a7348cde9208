use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use mutsel::ctmc::{simulate_d, simulate_l, simulate_r, DEFAULT_CAP};
use mutsel::flow::{flow, integrate_rk4};
use mutsel::montecarlo::replicate_rng;
use mutsel::pdmp::{default_horizon, HazardProfile};
use mutsel::{equilibria, ModelParams};

fn params() -> ModelParams {
    ModelParams::new(1.0, 0.3, 0.2).unwrap()
}

fn forward_benchmark(c: &mut Criterion) {
    let p = params();
    let mut group = c.benchmark_group("forward");

    group.bench_function("equilibria", |b| b.iter(|| equilibria(std::hint::black_box(&p))));

    group.bench_function("flow_closed_form", |b| b.iter(|| flow(&p, std::hint::black_box(0.6), 3.0)));

    group.bench_function("rk4_t10_h1e-3", |b| b.iter(|| integrate_rk4(&p, 0.6, 10.0, 1e-3).unwrap()));

    group.finish()
}

fn chain_benchmark(c: &mut Criterion) {
    let p = params();
    let mut group = c.benchmark_group("chains");

    group.bench_function("r_to_absorption", |b| {
        let mut i = 0;
        b.iter_batched(
            || {
                i += 1;
                replicate_rng(1, i)
            },
            |mut rng| simulate_r(&p, 5, f64::INFINITY, DEFAULT_CAP, &mut rng).unwrap(),
            BatchSize::SmallInput,
        );
    });

    group.bench_function("l_horizon_60", |b| {
        let mut i = 0;
        b.iter_batched(
            || {
                i += 1;
                replicate_rng(2, i)
            },
            |mut rng| simulate_l(&p, 1, 60.0, &mut rng).unwrap(),
            BatchSize::SmallInput,
        );
    });

    group.bench_function("d_to_absorption", |b| {
        let mut i = 0;
        b.iter_batched(
            || {
                i += 1;
                replicate_rng(3, i)
            },
            |mut rng| simulate_d(&p, 5, f64::INFINITY, DEFAULT_CAP, &mut rng).unwrap(),
            BatchSize::SmallInput,
        );
    });

    group.finish()
}

fn pdmp_benchmark(c: &mut Criterion) {
    let p = params();
    let horizon = default_horizon(&p).unwrap();
    let mut group = c.benchmark_group("pdmp");

    group.bench_function("hazard_profile", |b| b.iter(|| HazardProfile::new(&p, 0.5, horizon).unwrap()));

    let profile = HazardProfile::new(&p, 0.5, horizon).unwrap();
    group.bench_function("path_from_profile", |b| {
        let mut i = 0;
        b.iter_batched(
            || {
                i += 1;
                replicate_rng(4, i)
            },
            |mut rng| profile.sample(&mut rng).unwrap(),
            BatchSize::SmallInput,
        );
    });

    group.finish()
}

criterion_group!(benches, forward_benchmark, chain_benchmark, pdmp_benchmark);
criterion_main!(benches);
