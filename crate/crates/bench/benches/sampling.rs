use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use scalemix::experiments::Method;
use scalemix::{DenseMatrix, RngStream};
use scalemix_bench::instance;

fn samplers(c: &mut Criterion) {
    let mut group = c.benchmark_group("sample_n50");
    group.sample_size(10);
    for p in [250usize, 500, 1000] {
        let g = instance(50, p);
        for method in Method::ALL {
            let mut rng = RngStream::new(1, 0);
            group.bench_with_input(BenchmarkId::new(method.label(), p), &g, |b, g| {
                b.iter(|| black_box(method.sample(g, &mut rng).unwrap()))
            });
        }
    }
    group.finish();
}

fn kernels(c: &mut Criterion) {
    let mut group = c.benchmark_group("gemm");
    for dim in [64usize, 128, 256] {
        let mut rng = RngStream::new(2, dim as u64);
        let a = DenseMatrix::new(dim, dim, rng.std_normal_vec(dim * dim)).unwrap();
        let b = DenseMatrix::new(dim, dim, rng.std_normal_vec(dim * dim)).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(dim), &(a, b), |bench, (a, b)| {
            bench.iter(|| black_box(a.matmul(b).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, samplers, kernels);
criterion_main!(benches);
