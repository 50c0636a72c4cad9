use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use hsicinf::truncated_normal::trunc_norm_cdf;
use hsicinf::{hsic_vector, within_block_hsic, BlockPartition, KernelSpec, TruncatedNormalParams};
use hsicinf_bench::{gram_pair, normal_matrix};

fn bench_within_block(c: &mut Criterion) {
    let mut group = c.benchmark_group("within_block_hsic");
    for b in [5, 10, 20, 50] {
        let (k, l) = gram_pair(b, 7);
        group.bench_with_input(BenchmarkId::from_parameter(b), &b, |bench, _| {
            bench.iter(|| within_block_hsic(black_box(&k), black_box(&l)).unwrap())
        });
    }
    group.finish();
}

fn bench_hsic_vector(c: &mut Criterion) {
    let mut group = c.benchmark_group("hsic_vector");
    group.sample_size(20);
    let spec = KernelSpec::Gaussian { bandwidth: 1.0 };
    for n in [1000, 3000] {
        let x = normal_matrix(n, 20, 1);
        let y = normal_matrix(n, 1, 2);
        let part = BlockPartition::sequential(n, 10).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |bench, _| {
            bench.iter(|| hsic_vector(x.view(), y.view(), &spec, &spec, &part).unwrap())
        });
    }
    group.finish();
}

fn bench_trunc_norm(c: &mut Criterion) {
    let mut group = c.benchmark_group("trunc_norm_cdf");
    let cases = [("central", -1.0, 2.0, 0.5), ("upper_tail", 7.0, 30.0, 7.5), ("lower_tail", -30.0, -7.0, -7.5)];
    for (name, lo, hi, x) in cases {
        let p = TruncatedNormalParams::new(0.0, 1.0, lo, hi).unwrap();
        group.bench_function(name, |bench| bench.iter(|| trunc_norm_cdf(black_box(x), &p).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, bench_within_block, bench_hsic_vector, bench_trunc_norm);
criterion_main!(benches);
