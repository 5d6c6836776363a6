use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use boundeffred::extend::{ExtenderKind, Solver};
use boundeffred::pipeline::{stream_init, PipelineConfig};
use boundeffred::signal::Signal;
use boundeffred::tfr::{sst, stft, TfrKind};
use boundeffred::window::WindowSpec;
use boundeffred_bench::benchmark_signal;

fn bench_columns(c: &mut Criterion) {
    // Window of 1400 samples on a 2048-point grid, the benchmark STFT setup.
    let x = benchmark_signal(10_000, 4);
    let w = WindowSpec::gaussian(700, 700.0 / 3.0).unwrap();
    let hop = 35;
    let cols = x.len().div_ceil(hop);
    let mut group = c.benchmark_group("per_column");
    group.sample_size(10);
    group.bench_function("stft_2048", |b| {
        b.iter(|| {
            let m = stft(&x, &w, 2048, hop).unwrap();
            black_box(m.n_cols())
        })
    });
    group.bench_function("sst_2048", |b| {
        b.iter(|| {
            let m = sst(&x, &w, 2048, hop, 1e-4).unwrap();
            black_box(m.n_cols())
        })
    });
    group.finish();
    eprintln!("note: divide by {cols} columns for per-column times");
}

fn bench_stream_push(c: &mut Criterion) {
    // Real-time reference configuration: 512 frequency bins (n_fft 1022),
    // half-window 250, extension 250, M = 375, fs = 65.5 Hz.
    let fs = 65.5;
    let x = benchmark_signal(6_000, 5);
    let x = Signal::new(x.samples().to_vec(), fs).unwrap();
    let cfg = PipelineConfig {
        extender: ExtenderKind::SigExt {
            m: 375,
            k: 937,
            solver: Solver::NormalEquations,
        },
        tfr: TfrKind::Sst { gamma_rel: 1e-4 },
        window: WindowSpec::gaussian(250, 250.0 / 3.0).unwrap(),
        n_fft: 1022,
        hop: 8,
        ext_len: 250,
    };
    let init = Signal::new(x.samples()[..4000].to_vec(), fs).unwrap();
    let chunk: Vec<f64> = x.samples()[4000..4008].to_vec();
    c.bench_function("stream_push_h8_sst512", |b| {
        b.iter_batched(
            || stream_init(&init, cfg.clone()).unwrap(),
            |mut st| black_box(st.push(&chunk).unwrap()),
            criterion::BatchSize::LargeInput,
        )
    });
}

criterion_group!(benches, bench_columns, bench_stream_push);
criterion_main!(benches);
