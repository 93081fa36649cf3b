//! Sequential versus data-parallel timing of the two enumeration-heavy
//! kernels: the brute-force weighted error oracle and a full property
//! suite. Both strategies return bit-identical values; this measures
//! nothing but wall time.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use greedy_approx::exec::Parallelism;
use greedy_approx::oracles::sigma_omega;
use greedy_approx::spaces::NormSpace;
use greedy_approx::sparse::{Index, IndexSet, SparseVector};
use greedy_approx::theorems::{run_suite, SuiteConfig};
use greedy_approx::weights::SetWeight;

const STRATEGIES: [(&str, Parallelism); 2] = [
    ("sequential", Parallelism::Sequential),
    ("parallel", Parallelism::Parallel),
];

fn bench_oracle(c: &mut Criterion) {
    let space = NormSpace::split_lorentz();
    let weight = SetWeight::Cardinality;
    let x = SparseVector::from_entries((1..=14u64).map(|n| (Index::from_u64(n), 1.0 / n as f64)));
    let b: IndexSet = (1..=4u64).map(Index::from_u64).collect();
    let universe: IndexSet = (1..=14u64).map(Index::from_u64).collect();
    let mut group = c.benchmark_group("sigma_omega_14");
    group.sample_size(20);
    for (label, par) in STRATEGIES {
        group.bench_with_input(BenchmarkId::from_parameter(label), &par, |bench, &par| {
            bench.iter(|| {
                sigma_omega(&space, &weight, black_box(&x), &b, Some(&universe), par)
                    .unwrap()
                    .value
            })
        });
    }
    group.finish();
}

fn bench_suite(c: &mut Criterion) {
    let mut group = c.benchmark_group("suite_cc");
    group.sample_size(10);
    for (label, par) in STRATEGIES {
        group.bench_with_input(BenchmarkId::from_parameter(label), &par, |bench, &par| {
            bench.iter(|| {
                let mut cfg = SuiteConfig::new(NormSpace::l2(), SetWeight::Cardinality);
                cfg.par = par;
                let report = run_suite("cc", &cfg).unwrap();
                assert!(report.passed());
                black_box(report.instances)
            })
        });
    }
    group.finish();
}

criterion_group!(benches, bench_oracle, bench_suite);
criterion_main!(benches);
