//! Spectral splitting `K^n = ⊕ E_ρ` by absolute value of eigenvalues.

use std::ops::Range;

use serde::Serialize;

use super::factor::slope_factorize;
use super::{char_poly, Matrix, Poly};
use crate::error::{Error, Result};
use crate::field::AbsValue;

/// One summand `E_ρ = ker g_ρ(M)`.
#[derive(Clone, Debug, Serialize)]
pub struct SpectralComponent {
    pub radius: AbsValue,
    pub factor: Poly,
    /// Columns span `E_ρ`.
    pub basis: Matrix,
    /// `M` restricted to `E_ρ` in that basis.
    pub block: Matrix,
}

impl SpectralComponent {
    pub fn dim(&self) -> usize {
        self.block.rows()
    }
}

/// Components sorted by increasing radius, zero first. `change_of_basis`
/// is the concatenation of the component bases; in those coordinates `M`
/// is block diagonal.
#[derive(Clone, Debug, Serialize)]
pub struct SpectralSplit {
    pub components: Vec<SpectralComponent>,
    pub change_of_basis: Matrix,
    #[serde(skip)]
    pub inverse: Matrix,
}

impl SpectralSplit {
    pub fn dim(&self) -> usize {
        self.change_of_basis.rows()
    }

    pub fn radii(&self) -> Vec<(AbsValue, usize)> {
        self.components.iter().map(|c| (c.radius, c.dim())).collect()
    }

    /// Coordinate range of each component in the adapted basis.
    pub fn ranges(&self) -> Vec<Range<usize>> {
        let mut start = 0;
        self.components
            .iter()
            .map(|c| {
                let r = start..start + c.dim();
                start = r.end;
                r
            })
            .collect()
    }

    pub fn has_zero_radius(&self) -> bool {
        self.components.first().is_some_and(|c| c.radius.is_zero())
    }

    /// The block diagonal form `P⁻¹ M P`.
    pub fn block_diagonal(&self) -> Matrix {
        let blocks: Vec<Matrix> = self.components.iter().map(|c| c.block.clone()).collect();
        Matrix::block_diag(self.change_of_basis.field(), &blocks)
    }
}

pub fn spectral_split(m: &Matrix) -> Result<SpectralSplit> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch("spectral split of a non-square matrix".into()));
    }
    let field = m.field();
    let n = m.rows();
    let chi = char_poly(m)?;
    let mut factors = slope_factorize(&chi)?;
    factors.sort_by(|a, b| a.radius.cmp(&b.radius));
    let mut bases = Vec::with_capacity(factors.len());
    for f in &factors {
        let d = f.factor.degree().expect("nonzero factor");
        bases.push(f.factor.eval_matrix(m).kernel(d)?);
    }
    let p = Matrix::hcat(field, n, &bases);
    let p_inv = p.inverse().map_err(|_| {
        Error::InconsistentSplit("component bases are not independent at working precision".into())
    })?;
    let t = p_inv.mul(m).mul(&p);
    let mut components = Vec::with_capacity(factors.len());
    let mut start = 0;
    let dims: Vec<usize> = bases.iter().map(Matrix::cols).collect();
    for (k, (f, basis)) in factors.into_iter().zip(bases).enumerate() {
        let r: Vec<usize> = (start..start + dims[k]).collect();
        for i in (0..n).filter(|i| !r.contains(i)) {
            for &j in &r {
                if !t.get(i, j).is_zero_at_precision() {
                    return Err(Error::InconsistentSplit(
                        "off-diagonal block has certified digits".into(),
                    ));
                }
            }
        }
        let block = t.select(&r, &r);
        components.push(SpectralComponent { radius: f.radius, factor: f.factor, basis, block });
        start += dims[k];
    }
    Ok(SpectralSplit { components, change_of_basis: p, inverse: p_inv })
}
