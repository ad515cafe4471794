use serde::Serialize;

use crate::error::Result;
use crate::field::AbsValue;
use crate::linalg::{char_poly, newton_polygon, Matrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SubspaceDims {
    pub stable: usize,
    pub centre: usize,
    pub unstable: usize,
}

/// Spectral data of a fixed point. All flags are functions of `radii` and
/// `a` alone.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FixedPointReport {
    /// Radii ascending with algebraic multiplicities; zero first.
    pub radii: Vec<(AbsValue, usize)>,
    pub invertible: bool,
    pub all_at_most_one: bool,
    pub all_equal_one: bool,
    pub all_below_one: bool,
    pub a: Option<AbsValue>,
    pub hyperbolic: Option<bool>,
    pub dims: Option<SubspaceDims>,
}

pub fn classify_fixed_point(m: &Matrix, a: Option<AbsValue>) -> Result<FixedPointReport> {
    let radii = newton_polygon(&char_poly(m)?)?.radii();
    let all = |pred: &dyn Fn(AbsValue) -> bool| radii.iter().all(|(r, _)| pred(*r));
    let count = |pred: &dyn Fn(AbsValue) -> bool| radii.iter().filter(|(r, _)| pred(*r)).map(|(_, k)| k).sum();
    let dims = a.map(|a| SubspaceDims {
        stable: count(&|r| r < a),
        centre: count(&|r| r == a),
        unstable: count(&|r| r > a),
    });
    Ok(FixedPointReport {
        invertible: all(&|r| !r.is_zero()),
        all_at_most_one: all(&|r| r <= AbsValue::ONE),
        all_equal_one: all(&|r| r == AbsValue::ONE),
        all_below_one: all(&|r| r < AbsValue::ONE),
        a,
        hyperbolic: dims.map(|d| d.centre == 0),
        dims,
        radii,
    })
}
