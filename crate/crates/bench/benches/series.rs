use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use crforge_core::fixtures;
use crforge_core::jets::prolong;
use crforge_core::manifolds::SegreMapping;
use crforge_core::powerseries::{generic_rank, MultiIndex, Series, SeriesMap};
use crforge_core::reflection::{build_system, ideal_compare, SystemKind};
use crforge_core::Coefficient;

fn dense(nvars: usize, order: u32) -> Series {
    let mut s = Series::zero(nvars, order);
    for (k, m) in MultiIndex::up_to_degree(nvars, order).into_iter().enumerate().skip(1) {
        s.add_term(m, &Coefficient::gaussian(k as i64 % 5 - 2, k as i64 % 3 - 1));
    }
    s
}

fn arithmetic(c: &mut Criterion) {
    let a = dense(3, 8);
    let b = dense(3, 8).derivative(0, 1).unwrap().with_order(8);
    c.bench_function("mul 3 vars order 8", |x| x.iter(|| black_box(&a).mul(black_box(&b))));
    let inner: Vec<Series> = (0..3).map(|i| Series::var(3, i, 8).add(&dense(3, 8).homogeneous_part(2))).collect();
    c.bench_function("compose 3 vars order 8", |x| x.iter(|| black_box(&a).compose(black_box(&inner)).unwrap()));
    let u = Series::one(3, 8).add(&a);
    c.bench_function("inverse 3 vars order 8", |x| x.iter(|| black_box(&u).inverse().unwrap()));
}

fn geometry(c: &mut Criterion) {
    let p = fixtures::product_hypersurface(8).unwrap();
    c.bench_function("segre iterate v^3 product order 8", |x| {
        x.iter(|| SegreMapping::standard(black_box(&p)).iterate(3).unwrap())
    });
    let v = SegreMapping::standard(&p).iterate(2).unwrap();
    c.bench_function("generic rank v^2 product", |x| x.iter(|| generic_rank(black_box(&v)).unwrap()));
}

fn jets(c: &mut Criterion) {
    let q = fixtures::quadric(6).unwrap();
    let rho = q.rho_normal().unwrap();
    c.bench_function("prolong quadric generator l=2", |x| x.iter(|| prolong(black_box(&rho), 2, 2).unwrap()));
    let id = SeriesMap::identity(2, 6);
    c.bench_function("psi system quadric l=2 j=1", |x| {
        x.iter(|| build_system(&q, &q, black_box(&id), SystemKind::Psi, true, 2, 1, 0).unwrap())
    });
    let p = fixtures::product_hypersurface(8).unwrap();
    let tw = fixtures::divergent_twist(8).unwrap();
    let id3 = SeriesMap::identity(3, 8);
    c.bench_function("ideal compare twist order 8", |x| x.iter(|| ideal_compare(&p, black_box(&tw), &id3).unwrap()));
}

criterion_group!(benches, arithmetic, geometry, jets);
criterion_main!(benches);
