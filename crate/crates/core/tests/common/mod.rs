//! Independent oracle for one-dimensional tangent directions, written with
//! plain univariate truncated polynomials.

#![allow(dead_code)]

use ultramani_core::field::{AbsValue, FieldSpec, UltraScalar};
use ultramani_core::series::{MultiIndex, TruncatedMap};

/// `t' = r t + …`, `u_j' = l_j u_j + …` with polynomial terms
/// `(out, coeff, exps)` over `(t, u_1, …, u_m)`; coordinate 0 is `t`.
pub struct Scalar1D {
    pub r: UltraScalar,
    pub l: Vec<UltraScalar>,
    pub terms: Vec<(usize, UltraScalar, Vec<u32>)>,
}

pub fn pmul(a: &[UltraScalar], b: &[UltraScalar], d: usize, f: FieldSpec) -> Vec<UltraScalar> {
    let mut out = vec![f.zero(); d + 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            if i + j <= d {
                out[i + j] = &out[i + j] + &(x * y);
            }
        }
    }
    out
}

pub fn ppow(a: &[UltraScalar], k: u32, d: usize, f: FieldSpec) -> Vec<UltraScalar> {
    let mut out = vec![f.zero(); d + 1];
    out[0] = f.one();
    for _ in 0..k {
        out = pmul(&out, a, d, f);
    }
    out
}

/// Graph coefficients `u_j = Σ c_{j,n} t^n` through degree `d`.
pub fn oracle(sys: &Scalar1D, d: usize, f: FieldSpec) -> Vec<Vec<UltraScalar>> {
    let m = sys.l.len();
    let mut c = vec![vec![f.zero(); d + 1]; m];
    let mut t = vec![f.zero(); d + 1];
    t[1] = f.one();
    for n in 2..=d {
        let mut coords = vec![t.clone()];
        coords.extend(c.iter().cloned());
        let g = |out: usize| {
            let mut acc = vec![f.zero(); d + 1];
            for (o, k, e) in &sys.terms {
                if *o == out {
                    let mut mono = vec![f.zero(); d + 1];
                    mono[0] = k.clone();
                    for (v, &ex) in e.iter().enumerate() {
                        mono = pmul(&mono, &ppow(&coords[v], ex, d, f), d, f);
                    }
                    acc = acc.iter().zip(&mono).map(|(a, b)| a + b).collect();
                }
            }
            acc
        };
        let mut ft = g(0);
        ft[1] = &ft[1] + &sys.r;
        for j in 0..m {
            let mut lhs = f.zero();
            for (k, ck) in c[j].iter().enumerate().take(n).skip(2) {
                lhs = &lhs + &(ck * &ppow(&ft, k as u32, d, f)[n]);
            }
            let rhs = &(&sys.l[j] * &c[j][n]) + &g(j + 1)[n];
            let denom = &sys.r.pow(n as i64).unwrap() - &sys.l[j];
            c[j][n] = (&rhs - &lhs).div(&denom).unwrap();
        }
    }
    c
}

pub fn to_map(sys: &Scalar1D, order: &[usize], f: FieldSpec, radius: AbsValue) -> TruncatedMap {
    let n = order.len();
    let mut m = TruncatedMap::zero(f, n, n, 2, radius);
    let pos = |v: usize| order.iter().position(|&o| o == v).unwrap();
    let mut e = vec![0; n];
    e[pos(0)] = 1;
    m.add_term(pos(0), MultiIndex::new(e), sys.r.clone());
    for (j, l) in sys.l.iter().enumerate() {
        let mut e = vec![0; n];
        e[pos(j + 1)] = 1;
        m.add_term(pos(j + 1), MultiIndex::new(e), l.clone());
    }
    for (o, k, ex) in &sys.terms {
        let mut e = vec![0; n];
        for (v, &x) in ex.iter().enumerate() {
            e[pos(v)] = x;
        }
        m.add_term(pos(*o), MultiIndex::new(e), k.clone());
    }
    m
}

pub fn cs_system(f: FieldSpec) -> Scalar1D {
    let p = f.uniformizer();
    Scalar1D {
        r: p.clone(),
        l: vec![p.inv().unwrap()],
        terms: vec![(0, p.clone(), vec![0, 2]), (1, p.clone(), vec![2, 0])],
    }
}

pub fn centre_system(f: FieldSpec) -> Scalar1D {
    // t = y (middle), u_1 = x, u_2 = z.
    let p = f.uniformizer();
    Scalar1D {
        r: f.one(),
        l: vec![p.clone(), p.inv().unwrap()],
        terms: vec![(1, p.clone(), vec![2, 0, 0]), (2, p.clone(), vec![2, 0, 0])],
    }
}

pub fn fields() -> [FieldSpec; 2] {
    [FieldSpec::padic(5, 40).unwrap(), FieldSpec::laurent(5, 40).unwrap()]
}

/// Invariance residual `c_j(f_T) − (l_j c_j + g_j)` through degree `d`, for
/// given graph coefficients `c[j][n]`.
pub fn residual(sys: &Scalar1D, c: &[Vec<UltraScalar>], d: usize, f: FieldSpec) -> Vec<Vec<UltraScalar>> {
    let mut t = vec![f.zero(); d + 1];
    t[1] = f.one();
    let mut coords = vec![t];
    coords.extend(c.iter().cloned());
    let g = |out: usize| {
        let mut acc = vec![f.zero(); d + 1];
        for (o, k, e) in &sys.terms {
            if *o == out {
                let mut mono = vec![f.zero(); d + 1];
                mono[0] = k.clone();
                for (v, &ex) in e.iter().enumerate() {
                    mono = pmul(&mono, &ppow(&coords[v], ex, d, f), d, f);
                }
                acc = acc.iter().zip(&mono).map(|(a, b)| a + b).collect();
            }
        }
        acc
    };
    let mut ft = g(0);
    ft[1] = &ft[1] + &sys.r;
    (0..c.len())
        .map(|j| {
            let mut lhs = vec![f.zero(); d + 1];
            for (k, ck) in c[j].iter().enumerate().skip(1) {
                let pk = ppow(&ft, k as u32, d, f);
                lhs = lhs.iter().zip(&pk).map(|(a, b)| a + &(ck * b)).collect();
            }
            let gj = g(j + 1);
            (0..=d).map(|n| &(&lhs[n] - &(&sys.l[j] * &c[j][n])) - &gj[n]).collect()
        })
        .collect()
}
