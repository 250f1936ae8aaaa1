use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use fpsp::energy::rep_fn;
use fpsp::incidence::{incidences, max_collinear};
use fpsp::sets::{combine_with, generate};
use fpsp::verify::{quad_energy, QuadVariant};
use fpsp::{
    FSet, Family, FnSpec, IncidenceConfig, Method, Plane3, Point3, PrimeField, RepKind, SetOp,
};
use std::hint::black_box;

fn random(f: &PrimeField, n: usize, id: u64) -> FSet {
    generate(
        f,
        &Family::Random {
            len: n,
            zero_free: true,
        },
        1,
        id,
    )
    .unwrap()
}

fn rep_functions(c: &mut Criterion) {
    let mut group = c.benchmark_group("rep_fn");
    for (p, n) in [(1009u64, 300usize), (65537, 1000), (65537, 8000)] {
        let f = PrimeField::new(p).unwrap();
        let (b, cc) = (random(&f, n, 0), random(&f, n, 1));
        for method in [Method::Naive, Method::Transform] {
            let id = BenchmarkId::new(format!("{method:?}"), format!("p={p} n={n}"));
            group.bench_with_input(id, &method, |bench, &m| {
                bench
                    .iter(|| rep_fn(black_box(&b), black_box(&cc), RepKind::Difference, m).unwrap())
            });
        }
    }
    group.finish();
}

fn sumsets(c: &mut Criterion) {
    let f = PrimeField::new(65537).unwrap();
    let (a, b) = (random(&f, 2000, 2), random(&f, 2000, 3));
    let mut group = c.benchmark_group("sumset");
    for op in [SetOp::Sum, SetOp::Prod] {
        group.bench_function(format!("{op:?} n=2000"), |bench| {
            bench.iter(|| combine_with(black_box(&a), black_box(&b), op, Method::Auto).unwrap())
        });
    }
    group.finish();
}

fn incidence_kernels(c: &mut Criterion) {
    let f = PrimeField::new(101).unwrap();
    let n = 1000u64;
    let pts: Vec<Point3> = (0..n)
        .map(|i| Point3::new(i % 101, i * 7 % 101, i * i % 101))
        .collect();
    let planes: Vec<Plane3> = (0..n)
        .filter_map(|i| Plane3::new(&f, 1 + i % 100, i * 3 % 101, i * 11 % 101, i * 13 % 101).ok())
        .collect();
    let cfg = IncidenceConfig::new(&f, pts, planes, None).unwrap();
    c.bench_function("incidences n=1000 p=101", |bench| {
        bench.iter(|| incidences(black_box(&cfg)))
    });
    c.bench_function("max_collinear n=1000 p=101", |bench| {
        bench.iter(|| max_collinear(&f, black_box(cfg.points())).unwrap())
    });
}

fn quad_energies(c: &mut Criterion) {
    let f = PrimeField::new(1009).unwrap();
    let (a, x, cc) = (random(&f, 64, 4), random(&f, 64, 5), random(&f, 64, 6));
    let g = FnSpec::Random(None).build(&f, 1, 4).unwrap();
    let h = FnSpec::Random(None).build(&f, 1, 5).unwrap();
    let mut group = c.benchmark_group("quad_energy");
    for v in [
        QuadVariant::E1Sum,
        QuadVariant::E2Sum,
        QuadVariant::E3Prod,
        QuadVariant::E4Prod,
    ] {
        group.bench_function(v.label(), |bench| {
            bench.iter(|| quad_energy(v, &a, &x, &cc, &g, &h).unwrap())
        });
    }
    group.finish();
}

criterion_group!(
    benches,
    rep_functions,
    sumsets,
    incidence_kernels,
    quad_energies
);
criterion_main!(benches);
