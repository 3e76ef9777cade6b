use criterion::{criterion_group, criterion_main, Criterion};
use num::BigRational;
use sceff_core::lattice::Shape;
use sceff_core::models::Model;
use sceff_core::par;
use sceff_core::phase::{enumerate_lines, model_table, ClassicalTable};
use sceff_core::scalar::parse_rational;
use sceff_core::validate::scaling_study;

fn rat(s: &str) -> BigRational {
    parse_rational(s).unwrap()
}

fn quartic_table() -> ClassicalTable {
    let model = Model::falicov_kimball();
    model_table(&model, 4, &[rat("1/10"), rat("7"), rat("0"), rat("0")]).unwrap()
}

fn bench_envelope(c: &mut Criterion) {
    let tab = quartic_table();
    let mut group = c.benchmark_group("envelope-4x4");
    group.sample_size(20);
    group.bench_function("parallel", |b| {
        par::force_serial(false);
        b.iter(|| enumerate_lines(&tab, 4, 4).unwrap());
    });
    group.bench_function("serial", |b| {
        par::force_serial(true);
        b.iter(|| enumerate_lines(&tab, 4, 4).unwrap());
    });
    group.finish();
    par::force_serial(false);
}

fn bench_scaling_study(c: &mut Criterion) {
    let model = Model::one_band_symmetric();
    let hoppings: Vec<BigRational> = ["2/5", "1/5", "1/10", "1/20", "1/40", "1/80"]
        .iter()
        .map(|s| rat(s))
        .collect();
    let values_at = |t: &BigRational| vec![t.clone(), rat("8"), rat("0"), rat("0")];
    let mut group = c.benchmark_group("band-error-study");
    group.sample_size(10);
    group.bench_function("parallel", |b| {
        par::force_serial(false);
        b.iter(|| scaling_study(&model, Shape::Bond, 2, &hoppings, values_at).unwrap());
    });
    group.bench_function("serial", |b| {
        par::force_serial(true);
        b.iter(|| scaling_study(&model, Shape::Bond, 2, &hoppings, values_at).unwrap());
    });
    group.finish();
    par::force_serial(false);
}

criterion_group!(benches, bench_envelope, bench_scaling_study);
criterion_main!(benches);
