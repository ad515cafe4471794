//! Univariate polynomials and characteristic polynomials.

use std::fmt;

use serde::{Serialize, Serializer};

use super::Matrix;
use crate::error::{Error, Result};
use crate::field::{FieldSpec, UltraScalar};

/// Coefficients low to high; trailing exact zeros are trimmed.
#[derive(Clone, PartialEq, Eq)]
pub struct Poly {
    field: FieldSpec,
    coeffs: Vec<UltraScalar>,
}

impl Poly {
    pub fn new(field: FieldSpec, mut coeffs: Vec<UltraScalar>) -> Self {
        while coeffs.last().map_or(false, UltraScalar::is_exact_zero) {
            coeffs.pop();
        }
        Poly { field, coeffs }
    }

    pub fn zero(field: FieldSpec) -> Self {
        Poly { field, coeffs: Vec::new() }
    }

    pub fn one(field: FieldSpec) -> Self {
        Poly::new(field, vec![field.one()])
    }

    /// `t^k`.
    pub fn monomial(field: FieldSpec, k: usize) -> Self {
        let mut c = vec![field.zero(); k + 1];
        c[k] = field.one();
        Poly { field, coeffs: c }
    }

    /// `Π (t - r)`.
    pub fn from_roots(field: FieldSpec, roots: &[UltraScalar]) -> Self {
        roots.iter().fold(Poly::one(field), |acc, r| {
            acc.mul(&Poly::new(field, vec![-r, field.one()]))
        })
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn coeffs(&self) -> &[UltraScalar] {
        &self.coeffs
    }

    /// Degree, counting a leading coefficient without certified digits.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, i: usize) -> UltraScalar {
        self.coeffs.get(i).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().map_or(false, |c| c.eq_at_precision(&self.field.one()))
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::new(self.field, (0..n).map(|i| self.coeff(i) + other.coeff(i)).collect())
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::new(self.field, (0..n).map(|i| self.coeff(i) - other.coeff(i)).collect())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Poly::zero(self.field);
        }
        let mut c = vec![self.field.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_exact_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                c[i + j] += &(a * b);
            }
        }
        Poly::new(self.field, c)
    }

    pub fn scale(&self, s: &UltraScalar) -> Poly {
        Poly::new(self.field, self.coeffs.iter().map(|c| c * s).collect())
    }

    /// Exact division by `t^k`; the caller guarantees the low coefficients vanish.
    pub fn shift_down(&self, k: usize) -> Poly {
        Poly::new(self.field, self.coeffs.iter().skip(k).cloned().collect())
    }

    /// Coefficients of degrees `lo..hi`, re-based at zero.
    pub fn slice(&self, lo: usize, hi: usize) -> Poly {
        let hi = hi.min(self.coeffs.len());
        Poly::new(self.field, self.coeffs.get(lo..hi).map(<[_]>::to_vec).unwrap_or_default())
    }

    pub fn eval(&self, x: &UltraScalar) -> UltraScalar {
        self.coeffs.iter().rev().fold(self.field.zero(), |acc, c| &(&acc * x) + c)
    }

    /// `P(M)` by Horner's rule.
    pub fn eval_matrix(&self, m: &Matrix) -> Matrix {
        let n = m.rows();
        let id = Matrix::identity(self.field, n);
        self.coeffs
            .iter()
            .rev()
            .fold(Matrix::zeros(self.field, n, n), |acc, c| acc.mul(m).add(&id.scale(c)))
    }

    pub fn eq_at_precision(&self, other: &Poly) -> bool {
        self.sub(other).coeffs.iter().all(UltraScalar::is_zero_at_precision)
    }
}

/// Characteristic polynomial `det(t·I - M)` by Berkowitz's division-free
/// recursion. The result is monic with exact leading coefficient.
pub fn char_poly(m: &Matrix) -> Result<Poly> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch("characteristic polynomial of a non-square matrix".into()));
    }
    let field = m.field();
    let n = m.rows();
    // Coefficients highest degree first, for the trailing principal submatrix.
    let mut q = vec![field.one()];
    for r in (0..n).rev() {
        let size = n - r;
        let a = m.get(r, r);
        let row: Vec<UltraScalar> = (r + 1..n).map(|j| m.get(r, j).clone()).collect();
        let mut col: Vec<UltraScalar> = (r + 1..n).map(|i| m.get(i, r).clone()).collect();
        let sub = m.select(&(r + 1..n).collect::<Vec<_>>(), &(r + 1..n).collect::<Vec<_>>());
        // Toeplitz column: 1, -a, -R·C, -R·A·C, ...
        let mut t = Vec::with_capacity(size + 1);
        t.push(field.one());
        t.push(-a);
        for k in 0..size.saturating_sub(1) {
            if k > 0 {
                col = sub.mul_vec(&col);
            }
            let mut s = field.zero();
            for (x, y) in row.iter().zip(&col) {
                s += &(x * y);
            }
            t.push(-s);
        }
        let mut next = Vec::with_capacity(size + 1);
        for i in 0..=size {
            let mut s = field.zero();
            for j in 0..=i.min(q.len() - 1) {
                s += &(&t[i - j] * &q[j]);
            }
            next.push(s);
        }
        q = next;
    }
    q.reverse();
    Ok(Poly::new(field, q))
}

impl Serialize for Poly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.coeffs.serialize(s)
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly{:?}", self.coeffs)
    }
}
