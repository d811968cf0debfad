use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qnf::cli::render;
use qnf::config::Scenario;
use qnf::ion::{linspace, OracleModel, SidebandDrive};
use qnf::states::StateSpec;
use qnf::{Execution, FockSpace};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn oracle_curve(c: &mut Criterion) {
    let space = FockSpace::new(64).unwrap();
    let drive = SidebandDrive::new(1.5, 0.6, 0.7, 1.1).unwrap();
    let model = OracleModel::new(space, &drive).unwrap();
    let state = StateSpec::parse("squeezed:0.5,0.3").unwrap().build(space).unwrap();
    let dynamics = model.dynamics(&state).unwrap();
    let times = linspace(0.0, 20.0, 512);
    let mut group = c.benchmark_group("oracle_curve");
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| dynamics.curve(black_box(&times), exec).unwrap())
        });
    }
    group.finish();
}

fn witness_sweep(c: &mut Criterion) {
    let sc = Scenario::from_json(
        r#"{"kind":"sweep","state":"squeezed:{r},0","observable":"delta:a + ad","dim":96,
            "sweep":{"param":"r","start":0.0,"stop":1.2,"steps":24}}"#,
    )
    .unwrap();
    let mut group = c.benchmark_group("witness_sweep");
    group.sample_size(20);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| render(black_box(&sc), exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, oracle_curve, witness_sweep);
criterion_main!(benches);
