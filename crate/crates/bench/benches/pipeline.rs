use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use mtorus::affine::{find_periodic, AffineParams};
use mtorus::oracles::{lattice_fixed_count, window_scan};
use mtorus::{
    classify, deformability_report, nielsen_fiber, power_exponents, BundleSpec, ConditionContext, ExactScalar,
    FiberedMapSpec, IntMatrix2, IntVec2,
};

fn iterates(c: &mut Criterion) {
    let f = FiberedMapSpec::normalized(3, -2, 1, 4);
    let mut group = c.benchmark_group("power_exponents");
    for n in [8u64, 64, 512] {
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| b.iter(|| power_exponents(black_box(&f), n)));
    }
    group.finish();
    let m = IntMatrix2::from_rows([[2, 1], [1, 1]]);
    c.bench_function("nielsen_fiber/n=64", |b| b.iter(|| nielsen_fiber(black_box(&m), 64)));
}

fn pipeline(c: &mut Criterion) {
    let bundle = BundleSpec::new(IntMatrix2::from_rows([[1, 1], [0, 1]]));
    let map = FiberedMapSpec::new(IntMatrix2::from_rows([[1, 2], [0, 1]]), IntVec2::new(1, 1));
    c.bench_function("classify", |b| b.iter(|| classify(black_box(&bundle), black_box(&map))));
    let cls = classify(&bundle, &map).unwrap();
    c.bench_function("deformability_report/n=360", |b| {
        b.iter(|| deformability_report(&ConditionContext::from_classification(black_box(&cls), 360).unwrap()))
    });
}

fn periodic(c: &mut Criterion) {
    let p = AffineParams::new(0, -1, 1, 0, ExactScalar::sqrt2(), ExactScalar::zero());
    let q = AffineParams::new(1, 3, 2, 1, ExactScalar::ratio(1, 3), ExactScalar::sqrt2());
    c.bench_function("find_periodic/reflection/n=2", |b| b.iter(|| find_periodic(black_box(&p), 2)));
    c.bench_function("find_periodic/expanding/n=6", |b| b.iter(|| find_periodic(black_box(&q), 6)));
    c.bench_function("window_scan/bound=8", |b| b.iter(|| window_scan(black_box(&q), 3, 8)));
    let m = IntMatrix2::from_rows([[7, 3], [2, 5]]);
    c.bench_function("lattice_fixed_count", |b| b.iter(|| lattice_fixed_count(black_box(&m))));
}

criterion_group!(benches, iterates, pipeline, periodic);
criterion_main!(benches);
