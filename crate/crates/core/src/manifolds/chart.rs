//! Graph charts from the formal invariance equation, solved degree by
//! degree.
//!
//! With tangent coordinates `x`, complement `y = φ(x)` and
//! `f = (R x + f̃_T, L y + f̃_K)`, the degree-`n` part of
//! `φ(f_T(x, φ(x))) = f_K(x, φ(x))` reads
//!
//! `L c_n − c_n ∘ R = [φ_{<n} ∘ F_T]_n − [f̃_K ∘ Φ]_n`,
//!
//! where `Φ = (x, φ_{<n})` and `F_T = f_T ∘ Φ`. The operator on the left is
//! inverted by a Neumann series, in whichever form contracts.

use serde::Serialize;

use super::system::{BlockSystem, Mode};
use super::verify::{verify_invariance, Certification};
use crate::error::{Error, Result};
use crate::field::{AbsValue, UltraScalar};
use crate::linalg::Matrix;
use crate::series::{compose_jets, HomogPoly, Jet, TruncatedMap};

/// Default number of pointwise verification samples.
pub const DEFAULT_SAMPLES: usize = 50;

/// `y = φ(x)` over the tangent coordinates of a block system, in its
/// normalized coordinates.
#[derive(Clone, Debug, Serialize)]
pub struct GraphChart {
    pub kind: Mode,
    pub phi: TruncatedMap,
    pub tangent: Vec<usize>,
    pub complement: Vec<usize>,
    pub gauss_norms: Vec<AbsValue>,
    pub certification: Certification,
}

impl GraphChart {
    pub fn degree(&self) -> u32 {
        self.phi.degree()
    }

    /// `φ(x)` by direct evaluation of the truncated series.
    pub fn eval(&self, x: &[UltraScalar]) -> Vec<UltraScalar> {
        self.phi.eval_unchecked(x)
    }

    /// The full point `(x, φ(x))` in system coordinates.
    pub fn graph_point(&self, x: &[UltraScalar]) -> Vec<UltraScalar> {
        let y = self.eval(x);
        let n = self.tangent.len() + self.complement.len();
        let field = self.phi.field();
        let mut z = vec![field.zero(); n];
        for (i, &t) in self.tangent.iter().enumerate() {
            z[t] = x[i].clone();
        }
        for (i, &c) in self.complement.iter().enumerate() {
            z[c] = y[i].clone();
        }
        z
    }

    /// Distance of `z` from the graph: `‖z_K − φ(z_T)‖` as an upper bound.
    pub fn graph_distance(&self, sys: &BlockSystem, z: &[UltraScalar]) -> AbsValue {
        let x: Vec<UltraScalar> = self.tangent.iter().map(|&i| z[i].clone()).collect();
        let y = self.eval(&x);
        let diff: Vec<UltraScalar> = self.complement.iter().zip(&y).map(|(&i, v)| &z[i] - v).collect();
        sys.sub_norm(&self.complement, &diff)
    }

    /// The chart in unscaled adapted coordinates: `λ φ(x/λ)`, so degree `k`
    /// is multiplied by `λ^{1-k}`.
    pub fn unscaled(&self, sys: &BlockSystem) -> Result<TruncatedMap> {
        self.phi.rescale_conjugate(&sys.lambda().inv()?)
    }
}

/// Largest allowed Gauss norm of the degree-`k` chart coefficient.
pub(crate) fn coefficient_bound(sys: &BlockSystem, k: u32) -> AbsValue {
    match sys.mode() {
        Mode::CentreStable | Mode::Stable => sys.a().powi(1 - k as i64),
        Mode::Centre => AbsValue::ONE,
        Mode::Unstable => sys.a().powi(k as i64 - 1),
    }
}

/// Series chart of the centre-stable (or stable) manifold.
pub fn centre_stable_chart(sys: &BlockSystem, degree: u32) -> Result<GraphChart> {
    if !matches!(sys.mode(), Mode::CentreStable | Mode::Stable) {
        return Err(Error::InvalidArgument("system is not prepared for a centre-stable chart".into()));
    }
    series_chart(sys, degree)
}

/// Series chart of the centre manifold of a three-block system.
pub fn centre_chart(sys: &BlockSystem, degree: u32) -> Result<GraphChart> {
    if sys.mode() != Mode::Centre {
        return Err(Error::InvalidArgument("system is not prepared for a centre chart".into()));
    }
    series_chart(sys, degree)
}

/// Series chart over the tangent block of any mode, certified by
/// [`verify_invariance`].
pub fn series_chart(sys: &BlockSystem, degree: u32) -> Result<GraphChart> {
    let phi = solve_phi(sys, degree)?;
    let tw: Vec<AbsValue> = sys.tangent().iter().map(|&i| sys.weights()[i]).collect();
    let cw: Vec<AbsValue> = sys.complement().iter().map(|&i| sys.weights()[i]).collect();
    let phi = phi.with_weights(tw, cw);
    let gauss_norms = phi.gauss_norms();
    for (k, g) in gauss_norms.iter().enumerate().skip(2) {
        let bound = coefficient_bound(sys, k as u32);
        if *g >= bound {
            return Err(Error::BoundViolated(format!("degree {k} coefficient has norm {g}, bound {bound}")));
        }
    }
    let mut chart = GraphChart {
        kind: sys.mode(),
        phi,
        tangent: sys.tangent(),
        complement: sys.complement(),
        gauss_norms,
        certification: Certification::default(),
    };
    chart.certification = verify_invariance(sys, &chart, degree, DEFAULT_SAMPLES);
    Ok(chart)
}

enum Inverse {
    /// `c = L⁻¹(h + c∘R)`.
    Left(Matrix),
    /// `c = (L c − h)∘R⁻¹`.
    Right(Matrix),
}

struct Group {
    rows: Vec<usize>,
    inverse: Inverse,
}

fn groups(sys: &BlockSystem) -> Result<(Matrix, Option<Matrix>, Vec<Group>)> {
    let tangent = sys.tangent();
    let r = sys.linear().select(&tangent, &tangent);
    let complement = sys.complement();
    let pos = |block: usize| -> Vec<usize> {
        sys.block_indices(block).iter().map(|i| complement.iter().position(|c| c == i).unwrap()).collect()
    };
    let mut out = Vec::new();
    let mut r_inv = None;
    match sys.mode() {
        Mode::CentreStable | Mode::Stable => {
            out.push(Group { rows: pos(1), inverse: Inverse::Left(sys.block(1).inverse()?) });
        }
        Mode::Unstable => {
            r_inv = Some(r.inverse()?);
            out.push(Group { rows: pos(0), inverse: Inverse::Right(sys.block(0)) });
        }
        Mode::Centre => {
            r_inv = Some(r.inverse()?);
            out.push(Group { rows: pos(0), inverse: Inverse::Right(sys.block(0)) });
            out.push(Group { rows: pos(2), inverse: Inverse::Left(sys.block(2).inverse()?) });
        }
    }
    Ok((r, r_inv, out))
}

fn solve_phi(sys: &BlockSystem, degree: u32) -> Result<TruncatedMap> {
    let field = sys.field();
    let tangent = sys.tangent();
    let complement = sys.complement();
    let (nt, nk) = (tangent.len(), complement.len());
    let (r, r_inv, groups) = groups(sys)?;
    let f = sys.map_jets();
    let mut phi: Vec<Jet> = vec![Jet::zero(field, nt, degree); nk];
    let cap = 4 * field.precision as usize + 64;
    for n in 2..=degree {
        if nt == 0 || nk == 0 {
            break;
        }
        let big_phi = embed(sys, &phi, degree);
        let f_phi = compose_jets(f, &big_phi, n);
        let f_t: Vec<Jet> = tangent.iter().map(|&i| f_phi[i].clone()).collect();
        let f_k: Vec<Jet> = complement.iter().map(|&i| f_phi[i].clone()).collect();
        let lhs = compose_jets(&phi, &f_t, n);
        let h = HomogPoly::from_jets(field, nt, &lhs, n).sub(&HomogPoly::from_jets(field, nt, &f_k, n));
        for g in &groups {
            let hg = h.select_outputs(&g.rows);
            let c = neumann(&hg, &g.inverse, &r, r_inv.as_ref(), cap)?;
            for (o, e, v) in c.terms() {
                phi[g.rows[o]].add_term(e.clone(), v.clone());
            }
        }
    }
    Ok(TruncatedMap::from_jets(field, nt, &phi, degree, sys.radius()))
}

/// `Φ = (x, φ(x))` as jets over the tangent variables.
pub(crate) fn embed(sys: &BlockSystem, phi: &[Jet], degree: u32) -> Vec<Jet> {
    let field = sys.field();
    let tangent = sys.tangent();
    let complement = sys.complement();
    let mut out = vec![Jet::zero(field, tangent.len(), degree); sys.dim()];
    for (q, &i) in tangent.iter().enumerate() {
        out[i] = Jet::var(field, tangent.len(), degree, q);
    }
    for (q, &i) in complement.iter().enumerate() {
        out[i] = phi[q].with_max_deg(degree);
    }
    out
}

fn neumann(h: &HomogPoly, inv: &Inverse, r: &Matrix, r_inv: Option<&Matrix>, cap: usize) -> Result<HomogPoly> {
    let step = |t: &HomogPoly| match inv {
        Inverse::Left(l_inv) => t.pullback(r).pushforward(l_inv),
        Inverse::Right(l) => t.pushforward(l).pullback(r_inv.expect("invertible tangent block")),
    };
    let mut term = match inv {
        Inverse::Left(l_inv) => h.pushforward(l_inv),
        Inverse::Right(_) => h.pullback(r_inv.expect("invertible tangent block")).scale(&-h.field().one()),
    };
    let mut acc = term.clone();
    for _ in 0..cap {
        if term.is_zero_at_precision() {
            return Ok(acc);
        }
        term = step(&term);
        acc = acc.add(&term);
    }
    Err(Error::PrecisionExhausted(format!(
        "Neumann series for degree {} did not reach working precision in {cap} terms",
        h.degree()
    )))
}
