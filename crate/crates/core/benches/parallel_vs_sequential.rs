use criterion::{criterion_group, criterion_main, Criterion};
use trackperf::exec;
use trackperf::h2opt::{compute_jstar, Problem};
use trackperf::oracle::suites;

fn problems() -> Vec<Problem> {
    let mut rng = suites::rng(2024);
    (0..64).map(|_| suites::verification_problem(&mut rng)).collect()
}

fn bench_sweep(c: &mut Criterion) {
    let probs = problems();
    let mut group = c.benchmark_group("jstar_sweep_64");
    group.sample_size(20);
    group.bench_function("sequential", |b| {
        b.iter(|| exec::map_sequential(&probs, |p| compute_jstar(p).map(|j| j.total).ok()))
    });
    #[cfg(feature = "parallel")]
    group.bench_function("parallel", |b| {
        b.iter(|| exec::map_parallel(&probs, |p| compute_jstar(p).map(|j| j.total).ok()))
    });
    group.finish();
}

criterion_group!(benches, bench_sweep);
criterion_main!(benches);
