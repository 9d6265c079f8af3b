//! Benchmarks for the data-parallel hot paths. Run once with the default
//! `parallel` feature and once with `--no-default-features`; the bench ids
//! carry the backend so criterion baselines line up:
//!
//!   cargo bench
//!   cargo bench --no-default-features

use criterion::{criterion_group, criterion_main, Criterion};

use greedylab::approx::ApproxOptions;
use greedylab::coeff::CoeffVector;
use greedylab::constants::estimate_property_a;
use greedylab::counterexample::{build_weights, qg_violation_ratio, uniform_a_check};
use greedylab::family::{rng_for, FamilyConfig};
use greedylab::greedy::{greedy_residual, EnumOptions};
use greedylab::lebesgue::estimate_weak_greedy;
use greedylab::norms::{make_lp_norm, make_weighted_tail_norm};

fn backend() -> &'static str {
    if cfg!(feature = "parallel") {
        "parallel"
    } else {
        "sequential"
    }
}

fn random_batch(dim: u32, count: usize) -> Vec<CoeffVector> {
    use rand::Rng;
    (0..count)
        .map(|i| {
            let mut rng = rng_for(3, 0, i as u64);
            let vals: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
            CoeffVector::from_dense(&vals)
        })
        .collect()
}

fn bench_property_a(c: &mut Criterion) {
    let l2 = make_lp_norm(2.0).unwrap();
    let mut fam = FamilyConfig::new(6, 11);
    fam.random_trials = 400;
    c.bench_function(&format!("property_a_estimate/{}", backend()), |b| {
        b.iter(|| estimate_property_a(2, 0.5, &l2, &fam).unwrap().lower_bound)
    });
}

fn bench_weak_lebesgue(c: &mut Criterion) {
    let w = build_weights(3).unwrap();
    let oracle = make_weighted_tail_norm(w.weights_prefix(12).unwrap()).unwrap();
    let mut fam = FamilyConfig::new(10, 11);
    fam.random_trials = 40;
    fam.lean_grid = true;
    let opts = ApproxOptions::default();
    c.bench_function(&format!("weak_lebesgue_estimate/{}", backend()), |b| {
        b.iter(|| {
            estimate_weak_greedy(2, 0.5, &oracle, &fam, &opts)
                .unwrap()
                .lower_bound
        })
    });
}

fn bench_residual_batch(c: &mut Criterion) {
    let l1 = make_lp_norm(1.0).unwrap();
    let batch = random_batch(8, 800);
    let opts = EnumOptions::default();
    c.bench_function(&format!("greedy_residual_batch/{}", backend()), |b| {
        b.iter(|| {
            batch
                .iter()
                .map(|x| greedy_residual(x, 2, 0.5, &l1, &opts).unwrap().value)
                .sum::<f64>()
        })
    });
}

fn bench_block_sweep(c: &mut Criterion) {
    let w = build_weights(24).unwrap();
    c.bench_function(&format!("qg_block_sweep/{}", backend()), |b| {
        b.iter(|| {
            (3..=w.blocks())
                .map(|k| qg_violation_ratio(2, &w, k).unwrap().ratio)
                .sum::<f64>()
        })
    });
}

fn bench_indicator_check(c: &mut Criterion) {
    let w = build_weights(4).unwrap();
    c.bench_function(&format!("uniform_indicator_check/{}", backend()), |b| {
        b.iter(|| uniform_a_check(3, &w, 500, 5).max_ratio)
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = bench_property_a, bench_weak_lebesgue, bench_residual_batch, bench_block_sweep, bench_indicator_check
}
criterion_main!(benches);
