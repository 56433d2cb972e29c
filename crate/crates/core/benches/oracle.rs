use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use majorbound::entropy::EntropyFunctional;
use majorbound::exec::Execution;
use majorbound::oracle::{verify_sigma_star, CandidatePool, CandidateSet, SearchBudget};
use majorbound::spectrum::Spectrum;

fn bench_worst_gap(c: &mut Criterion) {
    let s = Spectrum::finite(&[0.3, 0.25, 0.2, 0.15, 0.1]).unwrap();
    let f = EntropyFunctional::VonNeumann;
    let mut group = c.benchmark_group("worst_gap");
    group.sample_size(10);
    for exec in [Execution::Sequential, Execution::Parallel] {
        let budget = SearchBudget::grid(200).with_samples(2000, 1).with_refine(4).with_execution(exec);
        group.bench_with_input(BenchmarkId::from_parameter(format!("{exec:?}")), &budget, |b, budget| {
            b.iter(|| {
                let pool = CandidatePool::build(&s, 1, 0.15, budget, CandidateSet::Pset).unwrap();
                black_box(pool.worst_gap(&f).unwrap())
            })
        });
    }
    group.finish();
}

fn bench_sigma_star(c: &mut Criterion) {
    let mut group = c.benchmark_group("sigma_star");
    group.sample_size(10);
    for exec in [Execution::Sequential, Execution::Parallel] {
        let budget = SearchBudget::random(2000, 1).with_execution(exec);
        group.bench_with_input(BenchmarkId::from_parameter(format!("{exec:?}")), &budget, |b, budget| {
            b.iter(|| black_box(verify_sigma_star(budget).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, bench_worst_gap, bench_sigma_star);
criterion_main!(benches);
