//! Block systems: a map fixing the origin, written in coordinates adapted
//! to an invariant splitting of its linear part and rescaled so that the
//! nonlinear part is small.

use std::ops::Range;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{AbsValue, FieldSpec, UltraScalar};
use crate::linalg::{adapted_norm, coordinate_norm, spectral_split, Matrix, SpectralSplit, WeightedNorm};
use crate::series::{Jet, TruncatedMap};

/// Which invariant manifold a system is prepared for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// `E₁ = ⊕_{ρ≤a} E_ρ`, `E₂ = ⊕_{ρ>a} E_ρ`, `a ≤ 1`.
    CentreStable,
    /// `E₁ = ⊕_{ρ<a} E_ρ`, `E₂ = ⊕_{ρ>a} E_ρ`, `a ≤ 1`, no radius equal to `a`.
    Stable,
    /// `E₁ = ⊕_{ρ<1}`, `E₂ = E_1`, `E₃ = ⊕_{ρ>1}`, with `a = 1`.
    Centre,
    /// As `Stable` but with `a ≥ 1`; the chart lives over `E₂`.
    Unstable,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::CentreStable => "centre-stable",
            Mode::Stable => "stable",
            Mode::Centre => "centre",
            Mode::Unstable => "unstable",
        }
    }

    pub fn parse(s: &str) -> Result<Mode> {
        match s {
            "centre-stable" => Ok(Mode::CentreStable),
            "stable" => Ok(Mode::Stable),
            "centre" => Ok(Mode::Centre),
            "unstable" => Ok(Mode::Unstable),
            _ => Err(Error::InvalidArgument(format!("unknown chart kind {s:?}"))),
        }
    }
}

/// `f(z) = L z + f̃(z)` in normalized coordinates `z`, where `L` is block
/// diagonal along `blocks` and the norm is `max w_i |z_i|`.
///
/// Normalized coordinates relate to the original ones by
/// `x = W (λ z)`.
#[derive(Clone, Debug, Serialize)]
pub struct BlockSystem {
    mode: Mode,
    a: AbsValue,
    blocks: Vec<Range<usize>>,
    linear: Matrix,
    tilde: TruncatedMap,
    weights: Vec<AbsValue>,
    radius: AbsValue,
    lambda: UltraScalar,
    basis: Matrix,
    #[serde(skip)]
    basis_inv: Matrix,
    lip: AbsValue,
    #[serde(skip)]
    map_jets: Vec<Jet>,
    #[serde(skip)]
    tilde_jets: Vec<Jet>,
}

/// Normalizes `f` for `mode` at threshold `a`, computing the spectral split
/// and adapted norm of its linear part.
pub fn normalize(f: &TruncatedMap, a: AbsValue, mode: Mode) -> Result<BlockSystem> {
    let m = f.linear_part();
    let split = spectral_split(&m)?;
    let eps = a * f.field().abs_uniformizer();
    let norm = adapted_norm(&m, &split, eps)?;
    normalize_with(f, &split, &norm, a, mode)
}

/// Normalizes `f` using a precomputed split and adapted norm of `f'(0)`.
///
/// The radius is shrunk by factors `p⁻¹` until `Lip(f̃) < a`, then `f` is
/// conjugated by the smallest `λ = π^m` making every nonlinear Gauss norm
/// `< 1`, and finally the radius is capped at 1.
pub fn normalize_with(
    f: &TruncatedMap,
    split: &SpectralSplit,
    norm: &WeightedNorm,
    a: AbsValue,
    mode: Mode,
) -> Result<BlockSystem> {
    let field = f.field();
    if f.n_in() != f.n_out() || f.n_in() != split.dim() {
        return Err(Error::DimensionMismatch("system map and split disagree".into()));
    }
    if !f.component(0).is_empty() {
        return Err(Error::InvalidArgument("the map must fix the origin".into()));
    }
    if a.is_zero() {
        return Err(Error::InvalidArgument("threshold must be positive".into()));
    }
    let n = f.n_in();
    let w = norm.basis().clone();
    let w_inv = norm.inverse_basis().clone();
    let u = norm.weights().to_vec();
    let blocks = block_ranges(split, a, mode)?;
    let conj = f.conjugate(&w, &w_inv);
    let linear = conj.linear_part();
    for (bi, r) in blocks.iter().enumerate() {
        for (bj, s) in blocks.iter().enumerate() {
            if bi != bj && !linear.select(&r.clone().collect::<Vec<_>>(), &s.clone().collect::<Vec<_>>()).is_zero_at_precision() {
                return Err(Error::InconsistentSplit("linear part is not block diagonal".into()));
            }
        }
    }
    let mut sys = BlockSystem {
        mode,
        a,
        blocks,
        linear,
        tilde: TruncatedMap::zero(field, n, n, 1, AbsValue::ONE),
        weights: u.clone(),
        radius: AbsValue::ONE,
        lambda: field.one(),
        basis: w.clone(),
        basis_inv: w_inv,
        lip: AbsValue::ZERO,
        map_jets: Vec::new(),
        tilde_jets: Vec::new(),
    };
    sys.check_mode()?;

    let ones = vec![AbsValue::ONE; n];
    let mut r = f.radius() / w.weighted_norm(&u, &ones);
    let mut tilde = conj.tilde().with_weights(u.clone(), u.clone());
    let p_inv = field.abs_uniformizer();
    let mut steps = 0;
    while tilde.lipschitz_bound(r) >= a {
        steps += 1;
        if steps > 64 {
            return Err(Error::NoValidRadius(format!("Lip(f̃) stays ≥ {a} after 64 shrink steps")));
        }
        r = r * p_inv;
    }
    let gauss = tilde.gauss_norms();
    let m = (0..=64i64)
        .find(|&m| {
            gauss.iter().enumerate().skip(2).all(|(k, g)| *g * p_inv.powi(m * (k as i64 - 1)) < AbsValue::ONE)
        })
        .ok_or_else(|| Error::NoValidRadius("nonlinear part cannot be made small by rescaling".into()))?;
    let lambda = field.pi_pow(m);
    tilde = tilde.with_radius(r).rescale_conjugate(&lambda)?;
    r = tilde.radius().min(AbsValue::ONE);
    tilde = tilde.with_radius(r);
    sys.lip = tilde.lipschitz_bound(r);
    sys.radius = r;
    sys.lambda = lambda;
    sys.tilde = tilde;
    sys.refresh_jets();
    Ok(sys)
}

fn block_ranges(split: &SpectralSplit, a: AbsValue, mode: Mode) -> Result<Vec<Range<usize>>> {
    let radii: Vec<AbsValue> = split.components.iter().map(|c| c.radius).collect();
    let ranges = split.ranges();
    let end_of = |pred: &dyn Fn(AbsValue) -> bool| {
        radii.iter().zip(&ranges).filter(|(r, _)| pred(**r)).map(|(_, rg)| rg.end).max().unwrap_or(0)
    };
    let n = split.dim();
    match mode {
        Mode::CentreStable => {
            let e1 = end_of(&|r| r <= a);
            Ok(vec![0..e1, e1..n])
        }
        Mode::Stable | Mode::Unstable => {
            if radii.contains(&a) {
                return Err(Error::ModeInequalityFailed(format!("{a} is an eigenvalue radius")));
            }
            let e1 = end_of(&|r| r < a);
            Ok(vec![0..e1, e1..n])
        }
        Mode::Centre => {
            if a != AbsValue::ONE {
                return Err(Error::ModeInequalityFailed("the centre chart needs a = 1".into()));
            }
            let e1 = end_of(&|r| r < a);
            let e2 = end_of(&|r| r <= a).max(e1);
            Ok(vec![0..e1, e1..e2, e2..n])
        }
    }
}

impl BlockSystem {
    /// Builds a system already in normalized coordinates, with `W = I` and
    /// `λ = 1`. The radius is used as given; all invariants are checked.
    pub fn from_normalized(
        map: &TruncatedMap,
        blocks: Vec<Range<usize>>,
        a: AbsValue,
        mode: Mode,
    ) -> Result<BlockSystem> {
        let field = map.field();
        let n = map.n_in();
        let sys = BlockSystem {
            mode,
            a,
            blocks,
            linear: map.linear_part(),
            tilde: map.tilde(),
            weights: map.weights_in().to_vec(),
            radius: map.radius(),
            lambda: field.one(),
            basis: Matrix::identity(field, n),
            basis_inv: Matrix::identity(field, n),
            lip: map.tilde().lipschitz_bound(map.radius()),
            map_jets: Vec::new(),
            tilde_jets: Vec::new(),
        };
        let mut sys = sys;
        sys.check_mode()?;
        sys.check_invariants()?;
        sys.refresh_jets();
        Ok(sys)
    }

    fn refresh_jets(&mut self) {
        self.map_jets = self.map().to_jets();
        self.tilde_jets = self.tilde.to_jets();
    }

    fn check_mode(&self) -> Result<()> {
        let fail = |s: String| Err(Error::ModeInequalityFailed(s));
        let a = self.a;
        let norm_a = self.block_norm(0);
        match self.mode {
            Mode::CentreStable | Mode::Stable => {
                if a > AbsValue::ONE {
                    return fail(format!("a = {a} must be at most 1"));
                }
                let strict = self.mode == Mode::Stable;
                if norm_a > a || (strict && norm_a == a) {
                    return fail(format!("‖A‖ = {norm_a} against a = {a}"));
                }
                let b_inv = self.block_inverse_norm(1)?;
                if b_inv * a >= AbsValue::ONE {
                    return fail(format!("1/‖B⁻¹‖ = {} is not above a = {a}", b_inv.recip()));
                }
            }
            Mode::Unstable => {
                if a < AbsValue::ONE {
                    return fail(format!("a = {a} must be at least 1"));
                }
                if norm_a >= a {
                    return fail(format!("‖A‖ = {norm_a} is not below a = {a}"));
                }
                let b_inv = self.block_inverse_norm(1)?;
                if b_inv * a >= AbsValue::ONE {
                    return fail(format!("1/‖B⁻¹‖ = {} is not above a = {a}", b_inv.recip()));
                }
            }
            Mode::Centre => {
                if a != AbsValue::ONE {
                    return fail("the centre chart needs a = 1".into());
                }
                if norm_a >= AbsValue::ONE {
                    return fail(format!("‖A‖ = {norm_a} is not below 1"));
                }
                let (b, b_inv) = (self.block_norm(1), self.block_inverse_norm(1)?);
                if self.blocks[1].len() > 0 && (b != AbsValue::ONE || b_inv != AbsValue::ONE) {
                    return fail("the centre block is not an isometry".into());
                }
                let c_inv = self.block_inverse_norm(2)?;
                if c_inv >= AbsValue::ONE {
                    return fail(format!("‖C⁻¹‖ = {c_inv} is not below 1"));
                }
            }
        }
        Ok(())
    }

    fn check_invariants(&self) -> Result<()> {
        if self.radius > AbsValue::ONE {
            return Err(Error::NoValidRadius("radius exceeds 1".into()));
        }
        if self.lip >= self.a {
            return Err(Error::NoValidRadius(format!("Lip(f̃) = {} is not below a", self.lip)));
        }
        if self.tilde.gauss_norms().iter().any(|g| *g >= AbsValue::ONE) {
            return Err(Error::NoValidRadius("a nonlinear Gauss norm is not below 1".into()));
        }
        Ok(())
    }

    pub fn field(&self) -> FieldSpec {
        self.linear.field()
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn a(&self) -> AbsValue {
        self.a
    }

    pub fn dim(&self) -> usize {
        self.linear.rows()
    }

    pub fn blocks(&self) -> &[Range<usize>] {
        &self.blocks
    }

    pub fn linear(&self) -> &Matrix {
        &self.linear
    }

    pub fn tilde(&self) -> &TruncatedMap {
        &self.tilde
    }

    pub fn weights(&self) -> &[AbsValue] {
        &self.weights
    }

    pub fn radius(&self) -> AbsValue {
        self.radius
    }

    pub fn lambda(&self) -> &UltraScalar {
        &self.lambda
    }

    /// Certified `Lip(f̃)` on the working ball.
    pub fn lip(&self) -> AbsValue {
        self.lip
    }

    /// `L + f̃` as one map.
    pub fn map(&self) -> TruncatedMap {
        let deg = self.tilde.degree().max(1);
        TruncatedMap::linear(&self.linear, deg, self.radius)
            .with_weights(self.weights.clone(), self.weights.clone())
            .add(&self.tilde.with_degree(deg))
    }

    pub(crate) fn map_jets(&self) -> &[Jet] {
        &self.map_jets
    }

    pub fn block_indices(&self, i: usize) -> Vec<usize> {
        self.blocks[i].clone().collect()
    }

    pub fn block(&self, i: usize) -> Matrix {
        let idx = self.block_indices(i);
        self.linear.select(&idx, &idx)
    }

    pub fn block_weights(&self, i: usize) -> Vec<AbsValue> {
        self.blocks[i].clone().map(|j| self.weights[j]).collect()
    }

    /// Operator norm of block `i` in the adapted norm.
    pub fn block_norm(&self, i: usize) -> AbsValue {
        let w = self.block_weights(i);
        self.block(i).weighted_norm(&w, &w)
    }

    /// `‖(block i)⁻¹‖`; zero for an empty block.
    pub fn block_inverse_norm(&self, i: usize) -> Result<AbsValue> {
        let w = self.block_weights(i);
        Ok(self.block(i).inverse()?.weighted_norm(&w, &w))
    }

    /// `Lip(f̃_i)` on the working ball, for the outputs of block `i`.
    pub fn tilde_lip(&self, i: usize) -> AbsValue {
        self.tilde.select_outputs(&self.block_indices(i)).lipschitz_bound(self.radius)
    }

    /// Tangent coordinates of the chart this mode describes.
    pub fn tangent(&self) -> Vec<usize> {
        match self.mode {
            Mode::CentreStable | Mode::Stable => self.block_indices(0),
            Mode::Centre | Mode::Unstable => self.block_indices(1),
        }
    }

    /// Complementary coordinates, the values of the chart.
    pub fn complement(&self) -> Vec<usize> {
        match self.mode {
            Mode::CentreStable | Mode::Stable => self.block_indices(1),
            Mode::Unstable => self.block_indices(0),
            Mode::Centre => self.block_indices(0).into_iter().chain(self.block_indices(2)).collect(),
        }
    }

    pub fn norm(&self, z: &[UltraScalar]) -> AbsValue {
        coordinate_norm(z, &self.weights)
    }

    pub fn sub_norm(&self, idx: &[usize], v: &[UltraScalar]) -> AbsValue {
        let w: Vec<AbsValue> = idx.iter().map(|&i| self.weights[i]).collect();
        coordinate_norm(v, &w)
    }

    /// `f(z)` without the radius check.
    pub fn apply(&self, z: &[UltraScalar]) -> Vec<UltraScalar> {
        self.map_jets.iter().map(|j| j.eval(z)).collect()
    }

    /// `f̃_i(z)` for the outputs `idx`.
    pub fn apply_tilde(&self, idx: &[usize], z: &[UltraScalar]) -> Vec<UltraScalar> {
        idx.iter().map(|&i| self.tilde_jets[i].eval(z)).collect()
    }

    /// Original coordinates `W(λz)` of a normalized point.
    pub fn to_original(&self, z: &[UltraScalar]) -> Vec<UltraScalar> {
        let scaled: Vec<UltraScalar> = z.iter().map(|c| c * &self.lambda).collect();
        self.basis.mul_vec(&scaled)
    }

    /// Normalized coordinates `λ⁻¹ W⁻¹ x`.
    pub fn from_original(&self, x: &[UltraScalar]) -> Result<Vec<UltraScalar>> {
        let lam_inv = self.lambda.inv()?;
        Ok(self.basis_inv.mul_vec(x).iter().map(|c| c * &lam_inv).collect())
    }

    /// Basis `W` of the adapted coordinates.
    pub fn basis(&self) -> &Matrix {
        &self.basis
    }
}
