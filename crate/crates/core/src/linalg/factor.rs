//! Slope factorization by Hensel lifting along Newton polygon vertices.

use num_rational::Rational64;
use num_traits::{Signed, Zero};

use super::newton::newton_polygon;
use super::Poly;
use crate::error::{Error, Result};
use crate::field::AbsValue;

/// A monic factor whose roots all share one absolute value.
#[derive(Clone, Debug)]
pub struct SlopeFactor {
    pub radius: AbsValue,
    pub factor: Poly,
}

/// Factors a monic `chi` into single-slope monic factors.
///
/// Factors are ordered by increasing root valuation (decreasing radius); the
/// factor `t^m` carrying the zero roots comes last.
pub fn slope_factorize(chi: &Poly) -> Result<Vec<SlopeFactor>> {
    if chi.degree().is_none() || !chi.is_monic() {
        return Err(Error::InvalidArgument("slope factorization needs a monic polynomial".into()));
    }
    let field = chi.field();
    let np = newton_polygon(chi)?;
    let mut out = Vec::new();
    let mut rest = chi.shift_down(np.zero_roots);
    let segs = &np.segments;
    for (k, seg) in segs.iter().enumerate() {
        if k + 1 == segs.len() {
            out.push(SlopeFactor { radius: seg.radius(), factor: rest.clone() });
            break;
        }
        let c = (seg.root_valuation() + segs[k + 1].root_valuation()) / 2;
        let (g, h) = hensel_split(&rest, seg.length(), c)?;
        out.push(SlopeFactor { radius: seg.radius(), factor: g });
        rest = h;
    }
    out.reverse();
    if np.zero_roots > 0 {
        out.push(SlopeFactor {
            radius: AbsValue::ZERO,
            factor: Poly::monomial(field, np.zero_roots),
        });
    }
    let product = out.iter().fold(Poly::one(field), |acc, f| acc.mul(&f.factor));
    if !product.eq_at_precision(chi) {
        return Err(Error::LiftingStall("factor product does not reproduce the input".into()));
    }
    Ok(out)
}

/// Splits `p = g·h` where `g` is monic of degree `i` carrying the roots of
/// valuation above `c` and `h` those below.
///
/// Weighted valuations `w_j = v(a_j) + j·c` have a unique minimum at `i`;
/// every correction step gains at least the gap to the next smallest weight.
fn hensel_split(p: &Poly, i: usize, c: Rational64) -> Result<(Poly, Poly)> {
    let field = p.field();
    let n = p.degree().expect("nonzero");
    let a_i = p.coeff(i);
    let v_i = a_i.val().ok_or(Error::IndeterminateValuation)?;
    let a_inv = a_i.inv()?;
    let weight = |j: usize, v: i64| Rational64::from_integer(v) + c * j as i64;
    let w_i = weight(i, v_i);
    let gap = p
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != i)
        .filter_map(|(j, a)| a.val().or(a.precision()).map(|v| weight(j, v) - w_i))
        .min()
        .ok_or_else(|| Error::LiftingStall("no coefficient away from the vertex".into()))?;
    if gap <= Rational64::zero() {
        return Err(Error::LiftingStall("split vertex is not isolated".into()));
    }
    let span = Rational64::from_integer(field.precision) - w_i
        + if c.is_positive() { c * n as i64 } else { Rational64::zero() };
    let cap = (span / gap).ceil().to_integer().max(0) as usize + 4;

    let mut g = p.slice(0, i + 1);
    let mut hc = p.slice(i, n + 1).scale(&a_inv).coeffs().to_vec();
    hc[0] = field.one();
    let mut h = Poly::new(field, hc);
    let mut done = false;
    for _ in 0..cap {
        let e = p.sub(&g.mul(&h));
        if e.coeffs().iter().all(|x| x.is_zero_at_precision()) {
            done = true;
            break;
        }
        g = g.add(&e.slice(0, i));
        h = h.add(&e.slice(i, n).scale(&a_inv));
    }
    if !done {
        return Err(Error::LiftingStall(format!("no convergence after {cap} steps")));
    }
    let g_monic = g.scale(&a_inv);
    let h_scaled = h.scale(&a_i);
    Ok((g_monic, h_scaled))
}
