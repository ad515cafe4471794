//! Absolute values in `p^Q ∪ {0}`, stored as exact exponents.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Div, Mul};

use num_rational::Rational64;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// An absolute value `p^{-e}` with `e` an exact rational, or zero (`e = +∞`).
///
/// The ordering is that of the real numbers the values denote, so a larger
/// exponent compares as a smaller value.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct AbsValue(Option<Rational64>);

impl AbsValue {
    pub const ZERO: AbsValue = AbsValue(None);
    pub const ONE: AbsValue = AbsValue(Some(Rational64::new_raw(0, 1)));

    /// `p^{-exp}`.
    pub fn from_exponent(exp: Rational64) -> Self {
        AbsValue(Some(exp))
    }

    /// `p^{-exp}` for an integer exponent.
    pub fn from_int_exponent(exp: i64) -> Self {
        AbsValue(Some(Rational64::from_integer(exp)))
    }

    /// `p^{-num/den}`.
    pub fn from_ratio(num: i64, den: i64) -> Self {
        AbsValue(Some(Rational64::new(num, den)))
    }

    /// The exponent `e` with `self = p^{-e}`, or `None` for zero.
    pub fn exponent(&self) -> Option<Rational64> {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_none()
    }

    pub fn powi(&self, k: i64) -> Self {
        match self.0 {
            None if k > 0 => AbsValue::ZERO,
            None if k == 0 => AbsValue::ONE,
            None => panic!("negative power of zero absolute value"),
            Some(e) => AbsValue(Some(e * k)),
        }
    }

    /// `self^q` for a rational `q > 0`.
    pub fn pow_ratio(&self, q: Rational64) -> Self {
        assert!(q.is_positive(), "rational power must be positive");
        AbsValue(self.0.map(|e| e * q))
    }

    pub fn recip(&self) -> Self {
        match self.0 {
            None => panic!("reciprocal of zero absolute value"),
            Some(e) => AbsValue(Some(-e)),
        }
    }

    /// Geometric mean: the value whose exponent is the midpoint.
    pub fn geometric_mean(&self, other: &AbsValue) -> AbsValue {
        match (self.0, other.0) {
            (Some(a), Some(b)) => AbsValue(Some((a + b) / 2)),
            _ => panic!("geometric mean with zero"),
        }
    }

    pub fn max(self, other: AbsValue) -> AbsValue {
        if self >= other {
            self
        } else {
            other
        }
    }

    pub fn min(self, other: AbsValue) -> AbsValue {
        if self <= other {
            self
        } else {
            other
        }
    }

    /// Largest value in an iterator, or zero when empty.
    pub fn max_of<I: IntoIterator<Item = AbsValue>>(it: I) -> AbsValue {
        it.into_iter().fold(AbsValue::ZERO, AbsValue::max)
    }

    /// `self ≤ p^{-k}`.
    pub fn at_most_p_pow(&self, k: i64) -> bool {
        *self <= AbsValue::from_int_exponent(k)
    }
}

impl Ord for AbsValue {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.0, other.0) {
            (None, None) => Ordering::Equal,
            (None, Some(_)) => Ordering::Less,
            (Some(_), None) => Ordering::Greater,
            (Some(a), Some(b)) => b.cmp(&a),
        }
    }
}

impl PartialOrd for AbsValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Mul for AbsValue {
    type Output = AbsValue;
    fn mul(self, rhs: AbsValue) -> AbsValue {
        match (self.0, rhs.0) {
            (Some(a), Some(b)) => AbsValue(Some(a + b)),
            _ => AbsValue::ZERO,
        }
    }
}

impl Div for AbsValue {
    type Output = AbsValue;
    fn div(self, rhs: AbsValue) -> AbsValue {
        self * rhs.recip()
    }
}

impl fmt::Debug for AbsValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for AbsValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            None => write!(f, "0"),
            Some(e) if e.is_zero() => write!(f, "1"),
            Some(e) => write!(f, "p^{}", -e),
        }
    }
}

/// Text form of an exponent: `"a/b"`, `"a"`, or `"inf"`.
pub fn format_exponent(exp: Option<Rational64>) -> String {
    match exp {
        None => "inf".to_string(),
        Some(e) if *e.denom() == 1 => e.numer().to_string(),
        Some(e) => format!("{}/{}", e.numer(), e.denom()),
    }
}

/// Parses `"a/b"`, `"a"`, or `"inf"`.
pub fn parse_exponent(s: &str) -> Result<Option<Rational64>, String> {
    let s = s.trim();
    if s == "inf" {
        return Ok(None);
    }
    let parse_i = |t: &str| t.trim().parse::<i64>().map_err(|e| format!("bad exponent {s:?}: {e}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let d = parse_i(d)?;
            if d == 0 {
                return Err(format!("bad exponent {s:?}: zero denominator"));
            }
            Ok(Some(Rational64::new(parse_i(n)?, d)))
        }
        None => Ok(Some(Rational64::from_integer(parse_i(s)?))),
    }
}

#[derive(Serialize, Deserialize)]
struct ExpJson {
    exp: String,
}

impl Serialize for AbsValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ExpJson { exp: format_exponent(self.0) }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for AbsValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = ExpJson::deserialize(d)?;
        parse_exponent(&raw.exp).map(AbsValue).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering_is_by_value() {
        let one = AbsValue::ONE;
        let small = AbsValue::from_int_exponent(1);
        let big = AbsValue::from_int_exponent(-1);
        assert!(small < one && one < big);
        assert!(AbsValue::ZERO < small);
        assert_eq!(small * big, one);
    }

    #[test]
    fn json_form() {
        let v = AbsValue::from_ratio(1, 2);
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(s, r#"{"exp":"1/2"}"#);
        let back: AbsValue = serde_json::from_str(&s).unwrap();
        assert_eq!(back, v);
        let z: AbsValue = serde_json::from_str(r#"{"exp":"inf"}"#).unwrap();
        assert!(z.is_zero());
    }
}
