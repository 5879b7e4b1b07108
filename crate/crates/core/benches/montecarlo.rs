//! Replication throughput. Built with the default `parallel` feature the
//! ids read `rayon/<threads>`; built with `--no-default-features` they read
//! `sequential`, so the two paths can be compared through saved baselines:
//!
//! ```text
//! cargo bench -p hdlrt --no-default-features -- --save-baseline seq
//! cargo bench -p hdlrt -- --baseline seq
//! ```

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use hdlrt::montecarlo::Scenario;
use hdlrt::{run_level, with_threads, SimulationPlan};

fn plans() -> Vec<(&'static str, SimulationPlan)> {
    vec![
        (
            "block_n100_p60",
            SimulationPlan::block(100, Scenario::SinglesPlusOne.partition(60).unwrap()),
        ),
        ("corr_n120_p90", SimulationPlan::correlation(120, 90)),
        (
            "eqcov_3x100_p60",
            SimulationPlan::eqcov(vec![100, 100, 100], 60),
        ),
    ]
}

fn thread_counts() -> Vec<usize> {
    if cfg!(feature = "parallel") {
        let max = std::thread::available_parallelism().map_or(1, |n| n.get());
        let mut t = vec![1, 2, 4, max];
        t.sort_unstable();
        t.dedup();
        t
    } else {
        vec![1]
    }
}

fn level(c: &mut Criterion) {
    let mut group = c.benchmark_group("run_level_200reps");
    group.sample_size(10);
    for (name, plan) in plans() {
        let plan = plan.with_reps(200).with_seed(1);
        for threads in thread_counts() {
            let id = if cfg!(feature = "parallel") {
                format!("rayon/{threads}")
            } else {
                "sequential".to_string()
            };
            group.bench_with_input(BenchmarkId::new(name, id), &plan, |b, plan| {
                b.iter(|| with_threads(threads, || run_level(plan).unwrap()).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, level);
criterion_main!(benches);
