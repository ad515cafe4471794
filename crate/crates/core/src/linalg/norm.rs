//! Adapted norms: `‖Mx‖ = ρ‖x‖` on every nonzero spectral component and an
//! operator norm below a chosen `ε` on the nilpotent part.
//!
//! Every norm here is diagonal in some basis `W`: `N(x) = max u_i |y_i|`
//! with `y = W⁻¹x`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{Matrix, SpectralSplit};
use crate::error::{Error, Result};
use crate::field::{AbsValue, FieldSpec, UltraScalar};

#[derive(Clone, Debug, Serialize)]
pub struct WeightedNorm {
    basis: Matrix,
    #[serde(skip)]
    inverse: Matrix,
    weights: Vec<AbsValue>,
}

impl WeightedNorm {
    pub fn new(basis: Matrix, weights: Vec<AbsValue>) -> Result<Self> {
        if !basis.is_square() || weights.len() != basis.rows() {
            return Err(Error::DimensionMismatch("norm basis and weights disagree".into()));
        }
        if weights.iter().any(AbsValue::is_zero) {
            return Err(Error::InvalidArgument("norm weights must be positive".into()));
        }
        let inverse = basis.inverse()?;
        Ok(WeightedNorm { basis, inverse, weights })
    }

    /// The max norm `max |x_i|`.
    pub fn standard(field: FieldSpec, n: usize) -> Self {
        Self::diagonal(field, vec![AbsValue::ONE; n])
    }

    pub fn diagonal(field: FieldSpec, weights: Vec<AbsValue>) -> Self {
        let n = weights.len();
        WeightedNorm { basis: Matrix::identity(field, n), inverse: Matrix::identity(field, n), weights }
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn inverse_basis(&self) -> &Matrix {
        &self.inverse
    }

    pub fn weights(&self) -> &[AbsValue] {
        &self.weights
    }

    pub fn coordinates(&self, x: &[UltraScalar]) -> Vec<UltraScalar> {
        self.inverse.mul_vec(x)
    }

    /// Certified upper bound for `N(x)`.
    pub fn norm(&self, x: &[UltraScalar]) -> AbsValue {
        coordinate_norm(&self.coordinates(x), &self.weights)
    }

    /// `N(x)` exactly, when the certified digits determine it.
    pub fn norm_exact(&self, x: &[UltraScalar]) -> Result<AbsValue> {
        coordinate_norm_exact(&self.coordinates(x), &self.weights)
    }

    /// Operator norm of `m` with respect to this norm on both sides.
    pub fn operator_norm(&self, m: &Matrix) -> AbsValue {
        self.inverse.mul(m).mul(&self.basis).weighted_norm(&self.weights, &self.weights)
    }
}

/// Upper bound for `max u_i |y_i|`.
pub fn coordinate_norm(y: &[UltraScalar], u: &[AbsValue]) -> AbsValue {
    AbsValue::max_of(y.iter().zip(u).map(|(c, w)| c.abs_bound() * *w))
}

/// `max u_i |y_i|` exactly; fails if an uncertified coordinate could be the
/// largest.
pub fn coordinate_norm_exact(y: &[UltraScalar], u: &[AbsValue]) -> Result<AbsValue> {
    let mut known = AbsValue::ZERO;
    let mut unknown = AbsValue::ZERO;
    for (c, w) in y.iter().zip(u) {
        if c.is_exact_zero() {
            continue;
        }
        match c.valuation() {
            Ok(a) => known = known.max(a * *w),
            Err(_) => unknown = unknown.max(c.abs_bound() * *w),
        }
    }
    if known >= unknown {
        Ok(known)
    } else {
        Err(Error::IndeterminateValuation)
    }
}

/// Adapted norm for `m` along `split`.
///
/// On a component of radius `ρ = p^{-a/b}` the unit ball is the lattice
/// spanned by `β^k O^d`, `β = π^{-a} M^b`, pulled back through the weighted
/// functionals `ρ^{-k} M^k` for `k < b`. On the nilpotent part the norm is
/// `max_k |λ|^{-k} ‖M^k x‖` with `|λ| < ε`.
pub fn adapted_norm(m: &Matrix, split: &SpectralSplit, eps: AbsValue) -> Result<WeightedNorm> {
    let field = m.field();
    let mut blocks = Vec::new();
    let mut weights = Vec::new();
    for c in &split.components {
        let (s, u) = if c.radius.is_zero() {
            nilpotent_norm(&c.block, eps)?
        } else {
            radius_norm(&c.block, c.radius)?
        };
        blocks.push(s);
        weights.extend(u);
    }
    let basis = split.change_of_basis.mul(&Matrix::block_diag(field, &blocks));
    let norm = WeightedNorm::new(basis, weights)?;
    certify(m, split, &norm, eps)?;
    Ok(norm)
}

fn radius_norm(t: &Matrix, radius: AbsValue) -> Result<(Matrix, Vec<AbsValue>)> {
    let field = t.field();
    let d = t.rows();
    let s = radius.exponent().expect("nonzero radius");
    let (a, b) = (*s.numer(), *s.denom());
    let beta = t.pow(b as u32).mul_pi_pow(-a);
    let mut gens = Vec::with_capacity(d);
    let mut power = Matrix::identity(field, d);
    for _ in 0..d {
        gens.push(power.clone());
        power = power.mul(&beta);
    }
    let q = lattice_basis(&Matrix::hcat(field, d, &gens))?;
    let q_inv = q.inverse()?;
    let mut rows = Vec::new();
    let mut row_weights = Vec::new();
    let mut tk = Matrix::identity(field, d);
    for k in 0..b {
        let g = q_inv.mul(&tk);
        rows.extend((0..d).map(|i| g.row(i)));
        row_weights.extend(std::iter::repeat(radius.powi(-k)).take(d));
        tk = tk.mul(t);
    }
    let g = Matrix::from_rows(field, rows)?;
    // The functionals act on component coordinates, so `S` is the basis.
    orthogonalize(&g, &row_weights)
}

fn nilpotent_norm(t: &Matrix, eps: AbsValue) -> Result<(Matrix, Vec<AbsValue>)> {
    let field = t.field();
    let d = t.rows();
    let e = eps
        .exponent()
        .ok_or_else(|| Error::InvalidArgument("nilpotent window must be positive".into()))?;
    // |λ| = p^{-m} < ε.
    let m = e.floor().to_integer() + 1;
    let lam = AbsValue::from_int_exponent(m);
    let mut rows = Vec::new();
    let mut row_weights = Vec::new();
    let mut tk = Matrix::identity(field, d);
    for k in 0..d as i64 {
        rows.extend((0..d).map(|i| tk.row(i)));
        row_weights.extend(std::iter::repeat(lam.powi(-k)).take(d));
        tk = tk.mul(t);
    }
    let g = Matrix::from_rows(field, rows)?;
    orthogonalize(&g, &row_weights)
}

/// Reduces a full-rank set of generator columns to a basis of the lattice
/// they span, using only integral column operations.
fn lattice_basis(gens: &Matrix) -> Result<Matrix> {
    let field = gens.field();
    let d = gens.rows();
    let mut cols = gens.columns();
    let mut used = vec![false; d];
    let mut basis = Vec::with_capacity(d);
    for _ in 0..d {
        let mut best: Option<(usize, usize, i64)> = None;
        for (j, col) in cols.iter().enumerate() {
            for i in (0..d).filter(|&i| !used[i]) {
                if let Some(v) = col[i].val() {
                    if best.map_or(true, |(_, _, bv)| v < bv) {
                        best = Some((i, j, v));
                    }
                }
            }
        }
        let (i, j, _) = best.ok_or_else(|| {
            Error::WindowNotStabilized("lattice generators do not span at working precision".into())
        })?;
        let piv = cols.swap_remove(j);
        let inv = piv[i].inv()?;
        for col in cols.iter_mut() {
            let c = &col[i] * &inv;
            if !c.is_exact_zero() {
                for (x, y) in col.iter_mut().zip(&piv) {
                    *x -= &(&c * y);
                }
            }
        }
        used[i] = true;
        basis.push(piv);
    }
    Ok(Matrix::from_columns(field, d, &basis))
}

/// Finds `S` and weights `u` with `max_j w_j |(G S z)_j| = max_i u_i |z_i|`.
///
/// Greedy: the globally largest weighted entry becomes a pivot and its row
/// is cleared from the remaining columns; multipliers are integral because
/// the pivot dominates its row.
fn orthogonalize(g: &Matrix, w: &[AbsValue]) -> Result<(Matrix, Vec<AbsValue>)> {
    let field = g.field();
    let (r, d) = (g.rows(), g.cols());
    let mut h = g.columns();
    let mut s = Matrix::identity(field, d).columns();
    let mut done = vec![false; d];
    let mut u = vec![AbsValue::ZERO; d];
    for _ in 0..d {
        let mut best: Option<(usize, usize, AbsValue)> = None;
        for i in (0..d).filter(|&i| !done[i]) {
            for j in 0..r {
                if let Ok(a) = h[i][j].valuation() {
                    let v = a * w[j];
                    if !v.is_zero() && best.map_or(true, |(_, _, b)| v > b) {
                        best = Some((j, i, v));
                    }
                }
            }
        }
        let (j, i, v) = best.ok_or_else(|| {
            Error::WindowNotStabilized("functionals do not separate at working precision".into())
        })?;
        let inv = h[i][j].inv()?;
        let (hi, si) = (h[i].clone(), s[i].clone());
        for k in (0..d).filter(|&k| k != i && !done[k]) {
            let c = &h[k][j] * &inv;
            if c.is_exact_zero() {
                continue;
            }
            for (x, y) in h[k].iter_mut().zip(&hi) {
                *x -= &(&c * y);
            }
            for (x, y) in s[k].iter_mut().zip(&si) {
                *x -= &(&c * y);
            }
        }
        done[i] = true;
        u[i] = v;
    }
    Ok((Matrix::from_columns(field, d, &s), u))
}

/// Checks the defining properties on adapted basis vectors and on seeded
/// random vectors of each component.
fn certify(m: &Matrix, split: &SpectralSplit, norm: &WeightedNorm, eps: AbsValue) -> Result<()> {
    let field = m.field();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    let n = m.rows();
    for (c, range) in split.components.iter().zip(split.ranges()) {
        if c.radius.is_zero() {
            let t = norm.inverse.mul(m).mul(&norm.basis);
            let r: Vec<usize> = range.collect();
            let w: Vec<AbsValue> = r.iter().map(|&i| norm.weights[i]).collect();
            if t.select(&r, &r).weighted_norm(&w, &w) >= eps {
                return Err(Error::WindowNotStabilized(
                    "nilpotent part is not contracted below the window".into(),
                ));
            }
            continue;
        }
        let mut samples: Vec<Vec<UltraScalar>> = range.clone().map(|i| norm.basis.col(i)).collect();
        for _ in 0..100 {
            let mut y = vec![field.zero(); n];
            for i in range.clone() {
                let shift = rand::Rng::gen_range(&mut rng, 0..4);
                y[i] = field.random_integral(&mut rng, shift);
            }
            samples.push(norm.basis.mul_vec(&y));
        }
        for x in samples {
            let nx = norm.norm_exact(&x)?;
            if nx.is_zero() {
                continue;
            }
            if norm.norm_exact(&m.mul_vec(&x))? != c.radius * nx {
                return Err(Error::WindowNotStabilized(format!(
                    "norm is not scaled by {} on its component",
                    c.radius
                )));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{spectral_split, Poly};

    fn q5() -> FieldSpec {
        FieldSpec::padic(5, 30).unwrap()
    }

    #[test]
    fn ramified_block_scales_exactly() {
        let f = q5();
        let chi = Poly::new(f, vec![f.int(-5), f.zero(), f.one()]);
        let m = Matrix::companion(f, chi.coeffs());
        let split = spectral_split(&m).unwrap();
        let norm = adapted_norm(&m, &split, AbsValue::from_int_exponent(3)).unwrap();
        assert_eq!(norm.operator_norm(&m), AbsValue::from_ratio(1, 2));
        let x = vec![f.int(1), f.int(7)];
        assert_eq!(norm.norm_exact(&m.mul_vec(&x)).unwrap(), AbsValue::from_ratio(1, 2) * norm.norm_exact(&x).unwrap());
    }

    #[test]
    fn nilpotent_jordan_block_is_contracted() {
        let f = q5();
        let m = Matrix::from_rows(f, vec![vec![f.zero(), f.one()], vec![f.zero(), f.zero()]]).unwrap();
        let split = spectral_split(&m).unwrap();
        let eps = AbsValue::from_int_exponent(2);
        let norm = adapted_norm(&m, &split, eps).unwrap();
        assert!(norm.operator_norm(&m) < eps);
    }

    #[test]
    fn non_diagonalizable_unit_block() {
        // Jordan block with eigenvalue 1 plus an expanding eigenvalue.
        let f = q5();
        let m = Matrix::from_rows(
            f,
            vec![
                vec![f.one(), f.one(), f.zero()],
                vec![f.zero(), f.one(), f.zero()],
                vec![f.zero(), f.zero(), f.rational(1, 5).unwrap()],
            ],
        )
        .unwrap();
        let split = spectral_split(&m).unwrap();
        let norm = adapted_norm(&m, &split, AbsValue::from_int_exponent(1)).unwrap();
        assert_eq!(norm.operator_norm(&m), AbsValue::from_int_exponent(-1));
        let minv = m.inverse().unwrap();
        assert_eq!(norm.operator_norm(&minv), AbsValue::ONE);
    }

    #[test]
    fn weighted_coordinates() {
        let f = q5();
        let n = WeightedNorm::diagonal(f, vec![AbsValue::ONE, AbsValue::from_int_exponent(1)]);
        assert_eq!(n.norm_exact(&[f.int(5), f.int(1)]).unwrap(), AbsValue::from_int_exponent(1));
        assert!(n.norm_exact(&[f.vanishing(0), f.int(5)]).is_err());
    }
}
