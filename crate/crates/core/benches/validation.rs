use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use jep_core::oracle::{cross_validate, Suite, TrialConfig};

fn validation(c: &mut Criterion) {
    let mut group = c.benchmark_group("cross-validate");
    group.sample_size(10);
    for suite in [Suite::StringClaim1, Suite::TreeClaim1, Suite::EncodedSup] {
        for parallel in [false, true] {
            let cfg = TrialConfig {
                trials: 40,
                parallel,
                ..TrialConfig::for_suite(suite)
            };
            let id = BenchmarkId::new(suite.name(), if parallel { "rayon" } else { "sequential" });
            group.bench_with_input(id, &cfg, |b, cfg| b.iter(|| black_box(cross_validate(suite, cfg))));
        }
    }
    group.finish();
}

criterion_group!(benches, validation);
criterion_main!(benches);
