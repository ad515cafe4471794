//! Subspaces cut out of a spectral split by comparing radii with `a`.

use serde::Serialize;

use super::{spectral_split, Matrix, SpectralSplit};
use crate::error::{Error, Result};
use crate::field::AbsValue;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SubspaceKind {
    Hyperbolic,
    CentreStable,
    Centre,
    Stable,
    Unstable,
}

impl SubspaceKind {
    fn selects(self, radius: AbsValue, a: AbsValue) -> bool {
        match self {
            SubspaceKind::Hyperbolic => unreachable!("not a subspace"),
            SubspaceKind::CentreStable => radius <= a,
            SubspaceKind::Centre => radius == a,
            SubspaceKind::Stable => radius < a,
            SubspaceKind::Unstable => radius > a,
        }
    }
}

/// Span of the selected spectral components.
#[derive(Clone, Debug, Serialize)]
pub struct Subspace {
    /// Columns form a basis; empty (zero columns) when the subspace is zero.
    pub basis: Matrix,
    /// Indices into the split's components.
    pub components: Vec<usize>,
    pub radii: Vec<(AbsValue, usize)>,
}

impl Subspace {
    pub fn dim(&self) -> usize {
        self.basis.cols()
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SubspaceAnswer {
    Hyperbolic(bool),
    Subspace(Subspace),
}

/// `a`-hyperbolic exactly when no eigenvalue has absolute value `a`.
pub fn is_hyperbolic(split: &SpectralSplit, a: AbsValue) -> bool {
    split.components.iter().all(|c| c.radius != a)
}

pub fn subspace_query(m: &Matrix, a: AbsValue, kind: SubspaceKind) -> Result<SubspaceAnswer> {
    let split = spectral_split(m)?;
    split.subspace_answer(a, kind)
}

impl SpectralSplit {
    pub fn subspace_answer(&self, a: AbsValue, kind: SubspaceKind) -> Result<SubspaceAnswer> {
        if kind == SubspaceKind::Hyperbolic {
            return Ok(SubspaceAnswer::Hyperbolic(is_hyperbolic(self, a)));
        }
        self.subspace(a, kind).map(SubspaceAnswer::Subspace)
    }

    pub fn subspace(&self, a: AbsValue, kind: SubspaceKind) -> Result<Subspace> {
        if kind == SubspaceKind::Hyperbolic {
            return Err(Error::InvalidArgument("hyperbolicity is not a subspace".into()));
        }
        if matches!(kind, SubspaceKind::Centre | SubspaceKind::Unstable) && self.has_zero_radius() {
            return Err(Error::NotInvertible("the linear part has eigenvalue zero".into()));
        }
        let field = self.change_of_basis.field();
        let components: Vec<usize> = (0..self.components.len())
            .filter(|&i| kind.selects(self.components[i].radius, a))
            .collect();
        let parts: Vec<Matrix> = components.iter().map(|&i| self.components[i].basis.clone()).collect();
        let radii = components.iter().map(|&i| (self.components[i].radius, self.components[i].dim())).collect();
        Ok(Subspace { basis: Matrix::hcat(field, self.dim(), &parts), components, radii })
    }
}
