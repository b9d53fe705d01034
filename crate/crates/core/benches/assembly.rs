use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;
use wg_biharmonic::analysis::Example;
use wg_biharmonic::mesh::unit_square;
use wg_biharmonic::solver::{assemble_full, condense};
use wg_biharmonic::Execution;

const POLICIES: [(&str, Execution); 2] = [("serial", Execution::Serial), ("parallel", Execution::Parallel)];

fn bench_condense(c: &mut Criterion) {
    let problem = Example::Two.solution();
    let mut group = c.benchmark_group("condense");
    group.sample_size(10);
    for (n, k) in [(16, 2), (32, 2), (16, 3)] {
        let mesh = unit_square(n).unwrap();
        for (name, exec) in POLICIES {
            group.bench_with_input(BenchmarkId::new(name, format!("n{n}_k{k}")), &mesh, |b, mesh| {
                b.iter(|| condense(black_box(mesh), k, problem, exec).unwrap())
            });
        }
    }
    group.finish();
}

fn bench_full(c: &mut Criterion) {
    let problem = Example::Two.solution();
    let mut group = c.benchmark_group("assemble_full");
    group.sample_size(10);
    let mesh = unit_square(32).unwrap();
    for (name, exec) in POLICIES {
        group.bench_with_input(BenchmarkId::new(name, "n32_k2"), &mesh, |b, mesh| {
            b.iter(|| assemble_full(black_box(mesh), 2, problem, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_condense, bench_full);
criterion_main!(benches);
