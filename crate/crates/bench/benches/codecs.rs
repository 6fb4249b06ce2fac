use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use gmmcodec::baseline::{gsm, table};
use gmmcodec::harness::generate_gsm_workload;
use gmmcodec::{flash_codec, ApproximatorKind};
use gmmcodec_bench::workload;

const SYMBOLS: usize = 20_000;

fn alphabet_sweep(c: &mut Criterion) {
    let mut group = c.benchmark_group("alphabet_sweep");
    group.sample_size(10);
    group.throughput(Throughput::Elements(SYMBOLS as u64));
    for size in [64u32, 256, 1024, 4096] {
        let (spec, work) = workload(SYMBOLS, size, 3, ApproximatorKind::Logistic);
        let stream =
            flash_codec::encode(&work.symbols, &work.params, &spec.alphabet, spec.kind).unwrap();
        group.bench_with_input(BenchmarkId::new("flash_encode", size), &size, |b, _| {
            b.iter(|| {
                flash_codec::encode(&work.symbols, &work.params, &spec.alphabet, spec.kind).unwrap()
            })
        });
        group.bench_with_input(BenchmarkId::new("flash_decode", size), &size, |b, _| {
            b.iter(|| flash_codec::decode(&stream).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("table_encode", size), &size, |b, _| {
            b.iter(|| {
                table::encode(&work.symbols, &work.params, &spec.alphabet, spec.kind).unwrap()
            })
        });
        group.bench_with_input(BenchmarkId::new("table_decode", size), &size, |b, _| {
            b.iter(|| table::decode(&stream).unwrap())
        });
    }
    group.finish();
}

fn approximators(c: &mut Criterion) {
    let mut group = c.benchmark_group("flash_by_approximator");
    group.throughput(Throughput::Elements(SYMBOLS as u64));
    for kind in ApproximatorKind::ALL {
        let (spec, work) = workload(SYMBOLS, 256, 3, kind);
        let stream =
            flash_codec::encode(&work.symbols, &work.params, &spec.alphabet, kind).unwrap();
        group.bench_function(format!("encode/{kind}"), |b| {
            b.iter(|| {
                flash_codec::encode(&work.symbols, &work.params, &spec.alphabet, kind).unwrap()
            })
        });
        group.bench_function(format!("decode/{kind}"), |b| {
            b.iter(|| flash_codec::decode(&stream).unwrap())
        });
    }
    group.finish();
}

fn scale_table(c: &mut Criterion) {
    let (spec, _) = workload(0, 256, 1, ApproximatorKind::Exact);
    let t = gsm::ScaleTable::new(16, ApproximatorKind::Exact).unwrap();
    let work = generate_gsm_workload(
        &gmmcodec::harness::WorkloadSpec {
            symbol_count: SYMBOLS,
            ..spec
        },
        &t,
    )
    .unwrap();
    let stream = gsm::encode(&work.symbols, &work.means, &work.sigmas, &t).unwrap();
    let mut group = c.benchmark_group("gsm");
    group.throughput(Throughput::Elements(SYMBOLS as u64));
    group.bench_function("init", |b| {
        b.iter(|| gsm::ScaleTable::new(16, ApproximatorKind::Exact).unwrap())
    });
    group.bench_function("encode", |b| {
        b.iter(|| gsm::encode(&work.symbols, &work.means, &work.sigmas, &t).unwrap())
    });
    group.bench_function("decode", |b| b.iter(|| gsm::decode(&stream, &t).unwrap()));
    group.finish();
}

criterion_group!(benches, alphabet_sweep, approximators, scale_table);
criterion_main!(benches);
