use criterion::{criterion_group, criterion_main, Criterion};
use scissors_core::assembler::presets;
use scissors_core::complex::{check_connectivity_bound, DestabModel, DEFAULT_VERTEX_CAP};
use scissors_core::construct::construct_embedding_ea;
use scissors_core::group::random_auto;
use scissors_core::invariant::saf;
use scissors_core::ktheory::{smith_normal_form, two_term_homology, IntMatrix};
use scissors_core::{CoefficientGroup, RectPolytope, Scalar};
use std::hint::black_box;

fn scalar_arithmetic(c: &mut Criterion) {
    let x = Scalar::one() + Scalar::sqrt(2) + Scalar::sqrt(3) - Scalar::from_frac(7, 5);
    let y = Scalar::sqrt(5) - Scalar::from_frac(1, 3) * Scalar::sqrt(2);
    c.bench_function("scalar multiply", |b| {
        b.iter(|| black_box(x.clone()) * black_box(y.clone()))
    });
    c.bench_function("scalar reciprocal", |b| {
        b.iter(|| black_box(x.clone()).recip().unwrap())
    });
    c.bench_function("scalar compare", |b| {
        b.iter(|| black_box(&x).try_cmp(black_box(&y)).unwrap())
    });
}

fn group_composition(c: &mut Criterion) {
    let spec = presets::brin_thompson(2);
    let base = RectPolytope::unit(2);
    let f = random_auto(&spec, &base, 7, 4);
    let g = random_auto(&spec, &base, 8, 4);
    c.bench_function("compose 2V elements", |b| {
        b.iter(|| black_box(&f).then(black_box(&g)).unwrap())
    });

    let gamma = CoefficientGroup::with_sqrt(2);
    let iet = presets::iet_group(gamma.clone());
    let interval = RectPolytope::unit(1);
    let h = random_auto(&iet, &interval, 9, 5);
    c.bench_function("saf of an interval exchange", |b| {
        b.iter(|| saf(black_box(&h), &gamma).unwrap())
    });
}

fn smith_form(c: &mut Criterion) {
    let m = IntMatrix::from_i64(&[
        &[-6, 111, -36, 6, 2],
        &[5, -672, 210, 74, -1],
        &[0, -255, 81, 24, 8],
        &[-7, 255, -81, -10, 0],
        &[3, 17, -2, 5, 9],
    ]);
    c.bench_function("smith normal form 5x5", |b| {
        b.iter(|| smith_normal_form(black_box(&m)))
    });
    let tau = IntMatrix::from_i64(&[&[0, 1], &[1, -1]]);
    c.bench_function("two-term homology (tau)", |b| {
        b.iter(|| two_term_homology(black_box(&tau), false).unwrap())
    });
}

fn constructions(c: &mut Criterion) {
    let spec = presets::iet_rational();
    let p = RectPolytope::interval(Scalar::zero(), Scalar::one());
    let q = RectPolytope::interval(Scalar::zero(), Scalar::from_frac(3, 2));
    c.bench_function("EA embedding [0,1] into [0,3/2]", |b| {
        b.iter(|| construct_embedding_ea(black_box(&p), black_box(&q), &spec).unwrap())
    });
}

fn complexes(c: &mut Criterion) {
    c.bench_function("connectivity bound grid(2,6)", |b| {
        b.iter(|| {
            check_connectivity_bound(
                DestabModel::GridInterval {
                    cells: 2,
                    ambient: 6,
                },
                DEFAULT_VERTEX_CAP,
            )
            .unwrap()
        })
    });
}

criterion_group!(
    benches,
    scalar_arithmetic,
    group_composition,
    smith_form,
    constructions,
    complexes
);
criterion_main!(benches);
