use criterion::{black_box, criterion_group, criterion_main, Criterion, Throughput};
use gmmcodec::{
    mixture_cdf, quantized_boundary, std_normal_cdf, ApproximatorKind, MixtureParams,
    SymbolAlphabet,
};

fn std_normal(c: &mut Criterion) {
    let xs: Vec<f64> = (0..1024)
        .map(|i| -8.0 + 16.0 * f64::from(i) / 1024.0)
        .collect();
    let mut group = c.benchmark_group("std_normal_cdf");
    group.throughput(Throughput::Elements(xs.len() as u64));
    for kind in ApproximatorKind::ALL {
        group.bench_function(kind.name(), |b| {
            b.iter(|| {
                xs.iter()
                    .map(|&x| std_normal_cdf(black_box(x), kind))
                    .sum::<f64>()
            })
        });
    }
    group.finish();
}

fn mixture(c: &mut Criterion) {
    let params = MixtureParams::new(&[0.2, 0.5, 0.3], &[-3.0, 0.5, 4.0], &[1.0, 2.5, 0.7]).unwrap();
    let alphabet = SymbolAlphabet::centered(256, 16).unwrap();
    let mut group = c.benchmark_group("mixture_k3");
    group.throughput(Throughput::Elements(256));
    for kind in ApproximatorKind::ALL {
        group.bench_function(format!("cdf/{kind}"), |b| {
            b.iter(|| {
                (0..256)
                    .map(|i| mixture_cdf(f64::from(i) - 128.5, black_box(&params), kind))
                    .sum::<f64>()
            })
        });
        group.bench_function(format!("boundary/{kind}"), |b| {
            b.iter(|| {
                (0..256u32)
                    .map(|j| quantized_boundary(black_box(&params), &alphabet, j, kind))
                    .sum::<u32>()
            })
        });
    }
    group.finish();
}

criterion_group!(benches, std_normal, mixture);
criterion_main!(benches);
