use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use thermofringe::estimation::{
    estimate_high_t, resolution_propagated, Observation, DEFAULT_RELATIVE_STEP,
};
use thermofringe::fock_oracle::{exact_m_stats, FockDims};
use thermofringe::{mean_m, second_moment, MeasurementModel, Mirrors, ModelOptions};
use thermofringe_bench::{natural, reference, reference_temperature};

fn closed_form_models(c: &mut Criterion) {
    let v = reference();
    let t = reference_temperature();
    let opts = ModelOptions::overriding();
    let mut g = c.benchmark_group("second_moment");
    for model in [
        MeasurementModel::QuadraticHighT,
        MeasurementModel::TwoLevelLowT,
        MeasurementModel::ExactGaussian,
    ] {
        g.bench_function(model.name(), |b| {
            b.iter(|| second_moment(black_box(&v), black_box(t), model, &opts).unwrap())
        });
    }
    g.finish();
}

fn laguerre_sum(c: &mut Criterion) {
    let v = natural(0.3, 1.0, 0.0);
    let opts = ModelOptions::overriding();
    let mut g = c.benchmark_group("laguerre_sum");
    for ratio in [1.0, 0.1, 0.01] {
        let t = v.temperature_for_ratio(ratio);
        g.bench_function(format!("ratio_{ratio}"), |b| {
            b.iter(|| mean_m(black_box(&v), t, MeasurementModel::LaguerreSum, &opts).unwrap())
        });
    }
    g.finish();
}

fn estimation(c: &mut Criterion) {
    let v = reference();
    let t = reference_temperature();
    let opts = ModelOptions::default();
    let stats = mean_m(&v, t, MeasurementModel::QuadraticHighT, &opts).unwrap();
    let obs = Observation::from_stats(&stats);
    c.bench_function("estimate_high_t", |b| {
        b.iter(|| estimate_high_t(black_box(&v), black_box(obs)).unwrap())
    });
    c.bench_function("resolution_propagated", |b| {
        b.iter(|| {
            resolution_propagated(
                &v,
                black_box(t),
                MeasurementModel::QuadraticHighT,
                &opts,
                DEFAULT_RELATIVE_STEP,
            )
            .unwrap()
        })
    });
}

fn fock_oracle(c: &mut Criterion) {
    let mut g = c.benchmark_group("fock_oracle");
    g.sample_size(10);
    for (n, chi) in [(4.0, 0.0), (9.0, 0.0), (9.0, 1e-3)] {
        let v = natural(0.3, n, chi);
        let t = v.temperature_for_ratio(2f64.ln());
        let dims = FockDims::default();
        g.bench_function(format!("n{n}_chi{chi}"), |b| {
            b.iter(|| exact_m_stats(&v, t, Mirrors::OneThermal, chi != 0.0, &dims).unwrap())
        });
    }
    g.finish();
}

criterion_group!(
    benches,
    closed_form_models,
    laguerre_sum,
    estimation,
    fock_oracle
);
criterion_main!(benches);
