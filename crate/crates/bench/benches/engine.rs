use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use gridaudit_bench::workload;
use gridaudit_core::{detect_all, eval_instance, eval_intervals, instantiate, load_program, run_interval_test};

fn parse(c: &mut Criterion) {
    let mut group = c.benchmark_group("load_program");
    for cells in [100, 1000] {
        let text = workload(1, cells).0.render();
        group.bench_with_input(BenchmarkId::from_parameter(cells), &text, |b, text| {
            b.iter(|| load_program(black_box(text)).unwrap())
        });
    }
    group.finish();
}

fn evaluate(c: &mut Criterion) {
    let mut group = c.benchmark_group("evaluate");
    for cells in [100, 1000] {
        let (p, spec) = workload(2, cells);
        let inst = instantiate(p.clone(), []).unwrap();
        group.bench_with_input(BenchmarkId::new("concrete", cells), &inst, |b, inst| {
            b.iter(|| eval_instance(black_box(inst)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("interval", cells), &(p, spec), |b, (p, spec)| {
            b.iter(|| eval_intervals(black_box(p), spec).unwrap())
        });
    }
    group.finish();
}

fn detectors(c: &mut Criterion) {
    let mut group = c.benchmark_group("detect_all");
    for cells in [100, 1000] {
        let (p, _) = workload(3, cells);
        group.bench_with_input(BenchmarkId::from_parameter(cells), &p, |b, p| {
            b.iter(|| detect_all(black_box(p), None))
        });
    }
    group.finish();
}

fn interval_test(c: &mut Criterion) {
    let (p, spec) = workload(4, 500);
    let inst = instantiate(p, []).unwrap();
    c.bench_function("run_interval_test/500", |b| {
        b.iter(|| run_interval_test(black_box(&inst), &spec).unwrap())
    });
}

criterion_group!(benches, parse, evaluate, detectors, interval_test);
criterion_main!(benches);
