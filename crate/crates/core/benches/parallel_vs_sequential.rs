//! Each workload runs on a one-thread pool and on the default pool.
//! Build with `--no-default-features` to time the sequential fallback.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use pstc_core::generators::parse_generator_list;
use pstc_core::gtf::{transfer_function, EventScope, GtfMode, Reference, TruncationPolicy};
use pstc_core::par;
use pstc_core::search::{search, SearchSpec};
use pstc_core::sim::{run_fer, ExperimentConfig};
use pstc_core::trellis::EncoderConfig;

fn pools() -> Vec<(String, rayon::ThreadPool)> {
    let mut threads = vec![1, rayon::current_num_threads()];
    threads.dedup();
    threads
        .into_iter()
        .map(|n| {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(n).build().unwrap();
            (format!("{}-{n}", par::backend()), pool)
        })
        .collect()
}

fn bench_search(c: &mut Criterion) {
    let mut spec = SearchSpec::new(2, 1, 1, 5, 1, 1, 64);
    spec.policy = TruncationPolicy::with_delta_h(13);
    let mut g = c.benchmark_group("search_2^10");
    g.sample_size(10);
    for (name, pool) in pools() {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| pool.install(|| search(&spec).unwrap()))
        });
    }
    g.finish();
}

fn bench_fer(c: &mut Criterion) {
    let mut cfg = ExperimentConfig::new("06,13,11,16", 2, 2, 2, 2, 130, 1, 2);
    cfg.ebn0_db = vec![6.0];
    cfg.stop.min_errors = u64::MAX;
    cfg.stop.max_frames = 2048;
    cfg.batch_frames = 2048;
    let mut g = c.benchmark_group("fer_2048_frames");
    g.sample_size(10);
    for (name, pool) in pools() {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| pool.install(|| run_fer(&cfg).unwrap()))
        });
    }
    g.finish();
}

fn bench_all_starts(c: &mut Criterion) {
    let gens = parse_generator_list("5,7", 1, 3).unwrap();
    let enc = EncoderConfig::new(2, 1, 1, 1, 3, 64);
    let mode = GtfMode::new(Reference::AllCodewords, EventScope::AllStarts);
    let pol = TruncationPolicy::with_delta_h(9);
    let mut g = c.benchmark_group("gtf_all_starts");
    g.sample_size(10);
    for (name, pool) in pools() {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| pool.install(|| transfer_function(&gens, &enc, 4, &pol, &mode).unwrap()))
        });
    }
    g.finish();
}

criterion_group!(benches, bench_search, bench_fer, bench_all_starts);
criterion_main!(benches);
