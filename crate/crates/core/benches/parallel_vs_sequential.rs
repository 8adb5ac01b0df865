use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;
use tourney_core::hamscc::{ham_path_streaming_with, Binning, PivotConfig};
use tourney_core::ptas::{run_ptas, PtasConfig};
use tourney_core::{generate, EdgeStream, GeneratorSpec, StreamOrder};

const MODES: [(&str, bool); 2] = [("parallel", true), ("sequential", false)];

fn ptas(c: &mut Criterion) {
    let mut group = c.benchmark_group("ptas");
    group.sample_size(10);
    for n in [128, 512] {
        let t = generate(&GeneratorSpec::planted(n, 0.2, 1)).unwrap();
        for (name, parallel) in MODES {
            let config = PtasConfig { parallel, ..PtasConfig::new(0.4, 2, 1) };
            group.bench_with_input(BenchmarkId::new(name, n), &t, |b, t| {
                b.iter(|| {
                    let mut s = EdgeStream::new(t.clone(), StreamOrder::Canonical);
                    black_box(run_ptas(&mut s, &config).unwrap().permutation)
                })
            });
        }
    }
    group.finish();
}

fn ham_path(c: &mut Criterion) {
    let mut group = c.benchmark_group("ham_path");
    group.sample_size(10);
    for n in [1024, 4096] {
        let t = generate(&GeneratorSpec::uniform(n, 1)).unwrap();
        for (name, parallel) in MODES {
            let cfg = PivotConfig { parallel, ..PivotConfig::new(2, 1, Binning::HamSlot) };
            group.bench_with_input(BenchmarkId::new(name, n), &t, |b, t| {
                b.iter(|| {
                    let mut s = EdgeStream::new(t.clone(), StreamOrder::Canonical);
                    black_box(ham_path_streaming_with(&mut s, &cfg).unwrap().path)
                })
            });
        }
    }
    group.finish();
}

criterion_group!(benches, ptas, ham_path);
criterion_main!(benches);
