//! Dense matrices over an ultrametric field.
//!
//! Elimination always pivots on an entry of largest absolute value, which in
//! the ultrametric setting keeps every multiplier integral and loses no
//! precision beyond what the pivot itself forces.

use std::fmt;

use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::field::{AbsValue, FieldSpec, UltraScalar};

#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    field: FieldSpec,
    rows: usize,
    cols: usize,
    data: Vec<UltraScalar>,
}

impl Matrix {
    pub fn zeros(field: FieldSpec, rows: usize, cols: usize) -> Self {
        Matrix { field, rows, cols, data: vec![field.zero(); rows * cols] }
    }

    pub fn identity(field: FieldSpec, n: usize) -> Self {
        Self::from_fn(field, n, n, |i, j| if i == j { field.one() } else { field.zero() })
    }

    pub fn from_fn(
        field: FieldSpec,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> UltraScalar,
    ) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { field, rows, cols, data }
    }

    pub fn from_rows(field: FieldSpec, rows: Vec<Vec<UltraScalar>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged matrix rows".into()));
        }
        if rows.iter().flatten().any(|x| x.field() != field) {
            return Err(Error::DimensionMismatch("matrix entry from another field".into()));
        }
        Ok(Matrix { field, rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(field: FieldSpec, rows: usize, cols: &[Vec<UltraScalar>]) -> Self {
        Self::from_fn(field, rows, cols.len(), |i, j| cols[j][i].clone())
    }

    pub fn diag(field: FieldSpec, d: &[UltraScalar]) -> Self {
        let n = d.len();
        Self::from_fn(field, n, n, |i, j| if i == j { d[i].clone() } else { field.zero() })
    }

    /// Companion matrix of the monic polynomial with the given low-to-high
    /// coefficients (leading 1 omitted or included): `e_i ↦ e_{i+1}`,
    /// `e_{n-1} ↦ -Σ a_i e_i`.
    pub fn companion(field: FieldSpec, coeffs: &[UltraScalar]) -> Self {
        let mut a = coeffs.to_vec();
        if a.len() > 1 && a.last().map_or(false, |c| c.eq_at_precision(&field.one())) {
            a.pop();
        }
        let n = a.len();
        Self::from_fn(field, n, n, |i, j| {
            if j + 1 == n {
                -&a[i]
            } else if i == j + 1 {
                field.one()
            } else {
                field.zero()
            }
        })
    }

    pub fn block_diag(field: FieldSpec, blocks: &[Matrix]) -> Self {
        let n: usize = blocks.iter().map(|b| b.rows).sum();
        let m: usize = blocks.iter().map(|b| b.cols).sum();
        let mut out = Self::zeros(field, n, m);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    out.set(r0 + i, c0 + j, b.get(i, j).clone());
                }
            }
            r0 += b.rows;
            c0 += b.cols;
        }
        out
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &UltraScalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: UltraScalar) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> Vec<UltraScalar> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn col(&self, j: usize) -> Vec<UltraScalar> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<UltraScalar>> {
        (0..self.cols).map(|j| self.col(j)).collect()
    }

    pub fn transpose(&self) -> Matrix {
        Self::from_fn(self.field, self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    /// Rows `rs` and columns `cs`, in the given order.
    pub fn select(&self, rs: &[usize], cs: &[usize]) -> Matrix {
        Self::from_fn(self.field, rs.len(), cs.len(), |i, j| self.get(rs[i], cs[j]).clone())
    }

    pub fn hcat(field: FieldSpec, rows: usize, parts: &[Matrix]) -> Matrix {
        let cols: Vec<Vec<UltraScalar>> = parts.iter().flat_map(Matrix::columns).collect();
        Self::from_columns(field, rows, &cols)
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matrix product dimension mismatch");
        Self::from_fn(self.field, self.rows, other.cols, |i, j| {
            let mut s = self.field.zero();
            for k in 0..self.cols {
                let a = self.get(i, k);
                if !a.is_exact_zero() {
                    s += &(a * other.get(k, j));
                }
            }
            s
        })
    }

    pub fn mul_vec(&self, v: &[UltraScalar]) -> Vec<UltraScalar> {
        assert_eq!(self.cols, v.len(), "matrix-vector dimension mismatch");
        (0..self.rows)
            .map(|i| {
                let mut s = self.field.zero();
                for (k, x) in v.iter().enumerate() {
                    let a = self.get(i, k);
                    if !a.is_exact_zero() && !x.is_exact_zero() {
                        s += &(a * x);
                    }
                }
                s
            })
            .collect()
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self::from_fn(self.field, self.rows, self.cols, |i, j| self.get(i, j) + other.get(i, j))
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self::from_fn(self.field, self.rows, self.cols, |i, j| self.get(i, j) - other.get(i, j))
    }

    pub fn scale(&self, c: &UltraScalar) -> Matrix {
        Self::from_fn(self.field, self.rows, self.cols, |i, j| self.get(i, j) * c)
    }

    pub fn mul_pi_pow(&self, k: i64) -> Matrix {
        Self::from_fn(self.field, self.rows, self.cols, |i, j| self.get(i, j).mul_pi_pow(k))
    }

    pub fn pow(&self, k: u32) -> Matrix {
        assert!(self.is_square());
        let mut acc = Self::identity(self.field, self.rows);
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Operator norm for the max norm: `max |a_ij|` (a certified upper bound
    /// when some entry has no certified digit).
    pub fn max_abs(&self) -> AbsValue {
        AbsValue::max_of(self.data.iter().map(UltraScalar::abs_bound))
    }

    /// Operator norm between weighted max norms `‖x‖ = max w_j |x_j|`:
    /// `max_{ij} w_out_i |a_ij| / w_in_j`.
    pub fn weighted_norm(&self, w_in: &[AbsValue], w_out: &[AbsValue]) -> AbsValue {
        let mut best = AbsValue::ZERO;
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j).abs_bound();
                if !a.is_zero() {
                    best = best.max(a * w_out[i] / w_in[j]);
                }
            }
        }
        best
    }

    pub fn is_zero_at_precision(&self) -> bool {
        self.data.iter().all(UltraScalar::is_zero_at_precision)
    }

    pub fn eq_at_precision(&self, other: &Matrix) -> bool {
        (self.rows, self.cols) == (other.rows, other.cols) && self.sub(other).is_zero_at_precision()
    }

    /// Inverse by Gauss–Jordan elimination with maximal pivots.
    pub fn inverse(&self) -> Result<Matrix> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(self.field, n);
        for c in 0..n {
            let pivot = (c..n)
                .filter_map(|r| a.get(r, c).val().map(|v| (v, r)))
                .min()
                .map(|(_, r)| r)
                .ok_or_else(|| Error::NotInvertible(format!("no certified pivot in column {c}")))?;
            a.swap_rows(pivot, c);
            inv.swap_rows(pivot, c);
            let p_inv = a.get(c, c).inv()?;
            a.scale_row(c, &p_inv);
            inv.scale_row(c, &p_inv);
            for r in 0..n {
                if r == c {
                    continue;
                }
                let factor = a.get(r, c).clone();
                if factor.is_exact_zero() {
                    continue;
                }
                a.axpy_row(r, c, &factor);
                inv.axpy_row(r, c, &factor);
            }
        }
        Ok(inv)
    }

    /// Basis (as columns) of the kernel, which must have dimension `nullity`.
    ///
    /// Uses full maximal pivoting for `cols - nullity` steps; the remaining
    /// block must have no certified digit. Each basis vector has a single
    /// free coordinate equal to one.
    pub fn kernel(&self, nullity: usize) -> Result<Matrix> {
        let (m, n) = (self.rows, self.cols);
        if nullity > n {
            return Err(Error::DimensionMismatch(format!("nullity {nullity} > {n} columns")));
        }
        let rank = n - nullity;
        let mut a = self.clone();
        let mut row_used = vec![false; m];
        let mut col_used = vec![false; n];
        let mut pivots = Vec::with_capacity(rank);
        for step in 0..rank {
            let mut best: Option<(i64, usize, usize)> = None;
            for i in (0..m).filter(|&i| !row_used[i]) {
                for j in (0..n).filter(|&j| !col_used[j]) {
                    if let Some(v) = a.get(i, j).val() {
                        if best.map_or(true, |(bv, _, _)| v < bv) {
                            best = Some((v, i, j));
                        }
                    }
                }
            }
            let (_, pi, pj) = best.ok_or_else(|| {
                Error::InconsistentSplit(format!(
                    "kernel has dimension above {nullity}: only {step} certified pivots"
                ))
            })?;
            let p_inv = a.get(pi, pj).inv()?;
            for i in (0..m).filter(|&i| i != pi) {
                let factor = a.get(i, pj) * &p_inv;
                if !factor.is_exact_zero() {
                    a.axpy_row(i, pi, &factor);
                }
            }
            row_used[pi] = true;
            col_used[pj] = true;
            pivots.push((pi, pj));
        }
        for i in (0..m).filter(|&i| !row_used[i]) {
            for j in (0..n).filter(|&j| !col_used[j]) {
                if !a.get(i, j).is_zero_at_precision() {
                    return Err(Error::InconsistentSplit(format!(
                        "kernel has dimension below {nullity}"
                    )));
                }
            }
        }
        let free: Vec<usize> = (0..n).filter(|&j| !col_used[j]).collect();
        let mut basis = Vec::with_capacity(free.len());
        for &fcol in &free {
            let mut v = vec![self.field.zero(); n];
            v[fcol] = self.field.one();
            for &(pi, pj) in &pivots {
                v[pj] = -(a.get(pi, fcol).div(a.get(pi, pj))?);
            }
            basis.push(v);
        }
        Ok(Self::from_columns(self.field, n, &basis))
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn scale_row(&mut self, r: usize, c: &UltraScalar) {
        for j in 0..self.cols {
            let v = self.get(r, j) * c;
            self.set(r, j, v);
        }
    }

    /// `row_r -= factor · row_s`.
    fn axpy_row(&mut self, r: usize, s: usize, factor: &UltraScalar) {
        for j in 0..self.cols {
            let src = self.get(s, j);
            if src.is_exact_zero() {
                continue;
            }
            let v = self.get(r, j) - &(factor * src);
            self.set(r, j, v);
        }
    }
}

impl FieldSpec {
    /// Parses a JSON array of rows of scalars.
    pub fn parse_matrix(self, v: &serde_json::Value) -> Result<Matrix> {
        let rows = v.as_array().ok_or_else(|| Error::Parse("matrix must be an array of rows".into()))?;
        let mut out = Vec::with_capacity(rows.len());
        for row in rows {
            let row = row.as_array().ok_or_else(|| Error::Parse("matrix row must be an array".into()))?;
            out.push(row.iter().map(|x| self.parse_scalar_value(x)).collect::<Result<Vec<_>>>()?);
        }
        Matrix::from_rows(self, out)
    }
}

impl Serialize for Matrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.rows))?;
        for i in 0..self.rows {
            seq.serialize_element(&self.data[i * self.cols..(i + 1) * self.cols])?;
        }
        seq.end()
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", &self.data[i * self.cols..(i + 1) * self.cols])?;
        }
        write!(f, "]")
    }
}
