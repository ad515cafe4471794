//! Fixtures and benchmark groups shared by the bench targets.

use criterion::Criterion;
use std::hint::black_box;
use ultramani_core::linalg::{adapted_norm, spectral_split, Matrix};
use ultramani_core::manifolds::{irwin_stable_chart, normalize, series_chart, Mode};
use ultramani_core::series::{MultiIndex, TruncatedMap};
use ultramani_core::{AbsValue, FieldSpec};

/// `(πx + πy², π⁻¹y + πx²)` over `Q_5` at 40 digits.
pub fn worked_system() -> TruncatedMap {
    let f = FieldSpec::padic(5, 40).unwrap();
    let p = f.uniformizer();
    let mut m = TruncatedMap::zero(f, 2, 2, 2, AbsValue::ONE);
    m.add_term(0, MultiIndex::new(vec![1, 0]), p.clone());
    m.add_term(0, MultiIndex::new(vec![0, 2]), p.clone());
    m.add_term(1, MultiIndex::new(vec![0, 1]), p.inv().unwrap());
    m.add_term(1, MultiIndex::new(vec![2, 0]), p);
    m
}

/// Upper triangular 4×4 with radii `p, 1, 1, p⁻¹` and coupling above the
/// diagonal.
pub fn triangular4() -> Matrix {
    let f = FieldSpec::padic(5, 40).unwrap();
    let diag = [f.int(5), f.one(), f.int(6), f.rational(1, 5).unwrap()];
    Matrix::from_fn(f, 4, 4, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Equal => diag[i].clone(),
        std::cmp::Ordering::Less => f.int((i + 2 * j) as i64),
        std::cmp::Ordering::Greater => f.zero(),
    })
}

pub fn benchmarks(c: &mut Criterion) {
    let m = triangular4();
    c.bench_function("spectral_split/4x4", |b| b.iter(|| spectral_split(black_box(&m)).unwrap()));
    let split = spectral_split(&m).unwrap();
    let eps = AbsValue::from_int_exponent(1);
    c.bench_function("adapted_norm/4x4", |b| b.iter(|| adapted_norm(black_box(&m), &split, eps).unwrap()));

    let f = worked_system();
    let sys = normalize(&f, AbsValue::ONE, Mode::CentreStable).unwrap();
    c.bench_function("series_chart/degree8", |b| b.iter(|| series_chart(black_box(&sys), 8).unwrap()));

    let stable = normalize(&f, AbsValue::from_ratio(1, 2), Mode::Stable).unwrap();
    let x = vec![stable.field().int(5)];
    c.bench_function("irwin_stable/point", |b| b.iter(|| irwin_stable_chart(black_box(&stable), &x, None).unwrap()));

    let g = f.with_radius(AbsValue::from_int_exponent(2));
    c.bench_function("local_inverse/degree8", |b| b.iter(|| black_box(&g).local_inverse(8).unwrap()));
}
