//! Newton polygons.
//!
//! Coefficients `a_i` are plotted as `(i, v(a_i))`. A lower-hull segment of
//! slope `-s` carries roots of valuation `s`, i.e. of absolute value `p^{-s}`.
//! Segments are listed left to right, which is increasing root size.

use num_rational::Rational64;
use serde::Serialize;

use super::Poly;
use crate::error::{Error, Result};
use crate::field::AbsValue;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Segment {
    pub start: usize,
    pub end: usize,
    /// Hull slope `Δv / Δi`.
    #[serde(serialize_with = "ser_ratio")]
    pub slope: Rational64,
}

impl Segment {
    pub fn length(&self) -> usize {
        self.end - self.start
    }

    /// Common valuation of the roots on this segment.
    pub fn root_valuation(&self) -> Rational64 {
        -self.slope
    }

    pub fn radius(&self) -> AbsValue {
        AbsValue::from_exponent(self.root_valuation())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NewtonPolygon {
    /// Hull vertices `(i, v(a_i))`.
    pub vertices: Vec<(usize, i64)>,
    pub segments: Vec<Segment>,
    /// Multiplicity of the root zero: coefficients below the first vertex.
    pub zero_roots: usize,
}

impl NewtonPolygon {
    /// Root absolute values with multiplicities, increasing; zero first.
    pub fn radii(&self) -> Vec<(AbsValue, usize)> {
        let mut out = Vec::new();
        if self.zero_roots > 0 {
            out.push((AbsValue::ZERO, self.zero_roots));
        }
        out.extend(self.segments.iter().map(|s| (s.radius(), s.length())));
        out
    }
}

/// Lower convex hull of the coefficient valuations of `chi`.
///
/// A coefficient without a certified digit must lie strictly above the hull
/// of the certified ones; otherwise its valuation matters and
/// [`Error::IndeterminateValuation`] is returned. Leading coefficients that
/// vanish to full working precision count as zero roots.
pub fn newton_polygon(chi: &Poly) -> Result<NewtonPolygon> {
    let field = chi.field();
    let cs = chi.coeffs();
    let first = cs.iter().position(|c| c.val().is_some()).ok_or(Error::IndeterminateValuation)?;
    for c in &cs[..first] {
        if let Some(prec) = c.precision() {
            if prec < field.precision {
                return Err(Error::IndeterminateValuation);
            }
        }
    }
    let pts: Vec<(usize, i64)> =
        cs.iter().enumerate().skip(first).filter_map(|(i, c)| c.val().map(|v| (i, v))).collect();
    let mut hull: Vec<(usize, i64)> = Vec::new();
    for &pt in &pts {
        while hull.len() >= 2 {
            let (o, a) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (a.0 as i128 - o.0 as i128) * (pt.1 as i128 - o.1 as i128)
                - (a.1 as i128 - o.1 as i128) * (pt.0 as i128 - o.0 as i128);
            if cross <= 0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }
    let segments: Vec<Segment> = hull
        .windows(2)
        .map(|w| Segment {
            start: w[0].0,
            end: w[1].0,
            slope: Rational64::new(w[1].1 - w[0].1, (w[1].0 - w[0].0) as i64),
        })
        .collect();
    // Uncertified interior coefficients must sit strictly above the hull.
    for (i, c) in cs.iter().enumerate().skip(first) {
        if c.val().is_some() || c.is_exact_zero() {
            continue;
        }
        let prec = c.precision().expect("not exact zero");
        let seg = segments.iter().find(|s| s.start <= i && i <= s.end);
        if let Some(s) = seg {
            let v0 = hull.iter().find(|h| h.0 == s.start).unwrap().1;
            let hull_at = Rational64::from_integer(v0) + s.slope * (i - s.start) as i64;
            if Rational64::from_integer(prec) <= hull_at {
                return Err(Error::IndeterminateValuation);
            }
        }
    }
    Ok(NewtonPolygon { vertices: hull, segments, zero_roots: first })
}

fn ser_ratio<S: serde::Serializer>(r: &Rational64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&crate::field::format_exponent(Some(*r)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldSpec;

    #[test]
    fn two_radii() {
        let f = FieldSpec::padic(5, 30).unwrap();
        let p = f.int(5);
        let chi = Poly::new(f, vec![p.clone(), -(f.one() + &p), f.one()]);
        let np = newton_polygon(&chi).unwrap();
        assert_eq!(np.radii(), vec![(AbsValue::from_int_exponent(1), 1), (AbsValue::ONE, 1)]);
    }

    #[test]
    fn eisenstein_half_slope() {
        let f = FieldSpec::padic(5, 30).unwrap();
        let chi = Poly::new(f, vec![f.int(-5), f.zero(), f.one()]);
        let np = newton_polygon(&chi).unwrap();
        assert_eq!(np.radii(), vec![(AbsValue::from_ratio(1, 2), 2)]);
    }

    #[test]
    fn collinear_points_merge() {
        let f = FieldSpec::padic(5, 30).unwrap();
        let chi = Poly::from_roots(f, &[f.one(), f.one(), f.one()]);
        let np = newton_polygon(&chi).unwrap();
        assert_eq!(np.radii(), vec![(AbsValue::ONE, 3)]);
        assert_eq!(np.vertices.len(), 2);
    }

    #[test]
    fn zero_roots_counted() {
        let f = FieldSpec::padic(5, 30).unwrap();
        let chi = Poly::new(f, vec![f.zero(), f.zero(), f.int(5), f.one()]);
        let np = newton_polygon(&chi).unwrap();
        assert_eq!(np.radii(), vec![(AbsValue::ZERO, 2), (AbsValue::from_int_exponent(1), 1)]);
    }

    #[test]
    fn uncertified_constant_term_is_indeterminate() {
        let f = FieldSpec::padic(5, 30).unwrap();
        let chi = Poly::new(f, vec![f.vanishing(10), f.one()]);
        assert_eq!(newton_polygon(&chi), Err(Error::IndeterminateValuation));
    }
}
