//! Scalars at capped absolute precision.
//!
//! A scalar is exact zero, a vanishing remainder `O(π^prec)` with no certified
//! digit, or `π^val · u + O(π^prec)` with `u` a unit residue modulo
//! `π^{prec-val}`. Every `prec` is at most the field precision `N`.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use rand::Rng;

use super::digits::Digits;
use super::{AbsValue, FieldKind, FieldSpec};
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct UltraScalar {
    field: FieldSpec,
    repr: Repr,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Repr {
    Zero,
    Vanishing { prec: i64 },
    /// `val < prec`, `unit` reduced modulo `π^{prec-val}` with nonzero low digit.
    Known { val: i64, prec: i64, unit: Digits },
}

impl FieldSpec {
    fn make(self, repr: Repr) -> UltraScalar {
        UltraScalar { field: self, repr }
    }

    /// `π^val · raw + O(π^prec)`, normalized; `raw` need not be a unit.
    fn normalized(self, val: i64, prec: i64, raw: Digits) -> UltraScalar {
        let p = self.p;
        let prec = prec.min(self.precision);
        if prec <= val {
            return self.make(Repr::Vanishing { prec });
        }
        let mut m = raw;
        m.reduce(p, (prec - val) as u64);
        let repr = match m.valuation(p) {
            None => Repr::Vanishing { prec },
            Some(s) => {
                let val = val + s as i64;
                if val >= prec {
                    Repr::Vanishing { prec }
                } else {
                    Repr::Known { val, prec, unit: m.shift_down(p, s) }
                }
            }
        };
        self.make(repr)
    }

    pub fn zero(self) -> UltraScalar {
        self.make(Repr::Zero)
    }

    pub fn one(self) -> UltraScalar {
        self.pi_pow(0)
    }

    /// `O(π^prec)`: a value about which nothing is certified beyond its size.
    pub fn vanishing(self, prec: i64) -> UltraScalar {
        self.make(Repr::Vanishing { prec: prec.min(self.precision) })
    }

    /// The uniformizer `π` (`p` or `t`).
    pub fn uniformizer(self) -> UltraScalar {
        self.pi_pow(1)
    }

    /// `π^k`, exact up to the precision cap.
    pub fn pi_pow(self, k: i64) -> UltraScalar {
        self.normalized(k, self.precision, Digits::one(self.kind))
    }

    pub fn int(self, n: i64) -> UltraScalar {
        self.bigint(&BigInt::from(n))
    }

    /// Image of an integer. In `F_p((t))` multiples of `p` are exactly zero.
    pub fn bigint(self, n: &BigInt) -> UltraScalar {
        if n.is_zero() {
            return self.zero();
        }
        match self.kind {
            FieldKind::PAdic => {
                let raw = Digits::from_bigint(self.kind, self.p, n, self.precision as u64);
                self.normalized(0, self.precision, raw)
            }
            FieldKind::FormalLaurent => {
                if n.mod_floor(&BigInt::from(self.p)).is_zero() {
                    self.zero()
                } else {
                    self.normalized(0, self.precision, Digits::from_bigint(self.kind, self.p, n, 1))
                }
            }
        }
    }

    pub fn rational(self, num: i64, den: i64) -> Result<UltraScalar> {
        self.big_rational(&BigInt::from(num), &BigInt::from(den))
    }

    /// `num/den` computed directly at full precision.
    pub fn big_rational(self, num: &BigInt, den: &BigInt) -> Result<UltraScalar> {
        let d = self.bigint(den);
        if d.is_exact_zero() {
            return Err(Error::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(self.zero());
        }
        if self.kind == FieldKind::FormalLaurent {
            return self.bigint(num).div(&d);
        }
        let pb = BigInt::from(self.p);
        let split = |n: &BigInt| {
            let mut n = n.clone();
            let mut v = 0i64;
            while n.mod_floor(&pb).is_zero() {
                n /= &pb;
                v += 1;
            }
            (v, n)
        };
        let (vn, un) = split(num);
        let (vd, ud) = split(den);
        let val = vn - vd;
        let prec = self.precision;
        if val >= prec {
            return Ok(self.vanishing(prec));
        }
        let k = (prec - val) as u64;
        let un = Digits::from_bigint(self.kind, self.p, &un, k);
        let ud = Digits::from_bigint(self.kind, self.p, &ud, k).inv_unit(self.p, k);
        Ok(self.normalized(val, prec, un.mul(&ud, self.p, k)))
    }

    /// `Σ digits[i] π^{shift+i} + O(π^{shift+len})`; digits must lie in `0..p`.
    pub fn from_digits(self, digits: &[u32], shift: i64) -> Result<UltraScalar> {
        if let Some(d) = digits.iter().find(|&&d| d >= self.p) {
            return Err(Error::Parse(format!("digit {d} out of range for p = {}", self.p)));
        }
        let prec = shift + digits.len() as i64;
        let raw = Digits::from_digit_slice(self.kind, self.p, digits);
        Ok(self.normalized(shift, prec, raw))
    }

    /// Random unit with all `N` digits drawn uniformly, times `π^shift`.
    pub fn random_unit<R: Rng + ?Sized>(self, rng: &mut R, shift: i64) -> UltraScalar {
        let mut digits: Vec<u32> = (0..self.precision).map(|_| rng.gen_range(0..self.p)).collect();
        digits[0] = rng.gen_range(1..self.p);
        self.from_digits(&digits, 0).expect("digits in range").mul_pi_pow(shift)
    }

    /// Random element of `π^shift · O` (possibly exact zero-free but small).
    pub fn random_integral<R: Rng + ?Sized>(self, rng: &mut R, shift: i64) -> UltraScalar {
        let digits: Vec<u32> = (0..self.precision).map(|_| rng.gen_range(0..self.p)).collect();
        self.from_digits(&digits, 0).expect("digits in range").mul_pi_pow(shift)
    }
}

impl UltraScalar {
    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn is_exact_zero(&self) -> bool {
        matches!(self.repr, Repr::Zero)
    }

    /// Exact zero or a vanishing remainder: indistinguishable from zero.
    pub fn is_zero_at_precision(&self) -> bool {
        !matches!(self.repr, Repr::Known { .. })
    }

    /// Exponent `v` with `|x| = p^{-v}`, when a digit is certified.
    pub fn val(&self) -> Option<i64> {
        match self.repr {
            Repr::Known { val, .. } => Some(val),
            _ => None,
        }
    }

    /// Absolute precision: the value is known modulo `π^prec`. `None` for exact zero.
    pub fn precision(&self) -> Option<i64> {
        match self.repr {
            Repr::Zero => None,
            Repr::Vanishing { prec } | Repr::Known { prec, .. } => Some(prec),
        }
    }

    /// `|x|`, exact.
    pub fn valuation(&self) -> Result<AbsValue> {
        match self.repr {
            Repr::Zero => Ok(AbsValue::ZERO),
            Repr::Vanishing { .. } => Err(Error::IndeterminateValuation),
            Repr::Known { val, .. } => Ok(AbsValue::from_int_exponent(val)),
        }
    }

    /// Certified upper bound for `|x|`; exact when a digit is known.
    pub fn abs_bound(&self) -> AbsValue {
        match self.repr {
            Repr::Zero => AbsValue::ZERO,
            Repr::Vanishing { prec } => AbsValue::from_int_exponent(prec),
            Repr::Known { val, .. } => AbsValue::from_int_exponent(val),
        }
    }

    /// `|self - other| ≤ p^{-k}` is certified.
    pub fn agrees_to(&self, other: &UltraScalar, k: i64) -> bool {
        match (self - other).repr {
            Repr::Zero => true,
            Repr::Vanishing { prec } => prec >= k,
            Repr::Known { val, .. } => val >= k,
        }
    }

    /// `self - other` has no certified digit.
    pub fn eq_at_precision(&self, other: &UltraScalar) -> bool {
        (self - other).is_zero_at_precision()
    }

    /// Digit expansion `(digits, shift)`; `None` for exact zero.
    pub fn digits(&self) -> Option<(Vec<u32>, i64)> {
        match &self.repr {
            Repr::Zero => None,
            Repr::Vanishing { prec } => Some((Vec::new(), *prec)),
            Repr::Known { val, prec, unit } => {
                Some((unit.to_digit_vec(self.field.p, (prec - val) as u64), *val))
            }
        }
    }

    /// Multiplication by `π^k`, which loses no information.
    pub fn mul_pi_pow(&self, k: i64) -> UltraScalar {
        let f = self.field;
        match &self.repr {
            Repr::Zero => self.clone(),
            Repr::Vanishing { prec } => f.vanishing(prec + k),
            Repr::Known { val, prec, unit } => f.normalized(val + k, prec + k, unit.clone()),
        }
    }

    /// Forgets digits at or beyond `π^prec`.
    pub fn truncate(&self, prec: i64) -> UltraScalar {
        let f = self.field;
        match &self.repr {
            Repr::Zero => self.clone(),
            Repr::Vanishing { prec: q } => f.vanishing(prec.min(*q)),
            Repr::Known { val, prec: q, unit } => f.normalized(*val, prec.min(*q), unit.clone()),
        }
    }

    pub fn inv(&self) -> Result<UltraScalar> {
        let f = self.field;
        match &self.repr {
            Repr::Zero => Err(Error::DivisionByZero),
            Repr::Vanishing { .. } => Err(Error::PrecisionExhausted(
                "inverse of a value with no certified digit".into(),
            )),
            Repr::Known { val, prec, unit } => {
                let nval = -val;
                let nprec = (prec - 2 * val).min(f.precision);
                if nprec <= nval {
                    return Ok(f.vanishing(nprec));
                }
                let k = (nprec - nval) as u64;
                Ok(f.normalized(nval, nprec, unit.inv_unit(f.p, k)))
            }
        }
    }

    pub fn div(&self, other: &UltraScalar) -> Result<UltraScalar> {
        Ok(self * &other.inv()?)
    }

    pub fn pow(&self, e: i64) -> Result<UltraScalar> {
        if e < 0 {
            return self.inv()?.pow(-e);
        }
        let mut base = self.clone();
        let mut acc = self.field.one();
        let mut e = e as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        Ok(acc)
    }

    /// Field operation that must yield a certified digit or exact zero.
    pub fn certified(self) -> Result<UltraScalar> {
        match self.repr {
            Repr::Vanishing { prec } => Err(Error::PrecisionExhausted(format!(
                "result O(π^{prec}) has no certified digit"
            ))),
            _ => Ok(self),
        }
    }

    fn add_impl(&self, other: &UltraScalar) -> UltraScalar {
        assert_eq!(self.field, other.field, "arithmetic across different fields");
        let f = self.field;
        match (&self.repr, &other.repr) {
            (Repr::Zero, _) => other.clone(),
            (_, Repr::Zero) => self.clone(),
            _ => {
                let prec = self.precision().unwrap().min(other.precision().unwrap());
                let known: Vec<(i64, &Digits)> = [&self.repr, &other.repr]
                    .into_iter()
                    .filter_map(|r| match r {
                        Repr::Known { val, unit, .. } if *val < prec => Some((*val, unit)),
                        _ => None,
                    })
                    .collect();
                let Some(vmin) = known.iter().map(|t| t.0).min() else {
                    return f.vanishing(prec);
                };
                let k = (prec - vmin) as u64;
                let mut acc = Digits::zero(f.kind);
                for (v, u) in known {
                    acc = acc.add(&u.shift_up(f.p, (v - vmin) as u64, k), f.p, k);
                }
                f.normalized(vmin, prec, acc)
            }
        }
    }

    fn neg_impl(&self) -> UltraScalar {
        match &self.repr {
            Repr::Known { val, prec, unit } => {
                let unit = unit.neg(self.field.p, (prec - val) as u64);
                self.field.make(Repr::Known { val: *val, prec: *prec, unit })
            }
            _ => self.clone(),
        }
    }

    fn mul_impl(&self, other: &UltraScalar) -> UltraScalar {
        assert_eq!(self.field, other.field, "arithmetic across different fields");
        let f = self.field;
        match (&self.repr, &other.repr) {
            (Repr::Zero, _) | (_, Repr::Zero) => f.zero(),
            (Repr::Vanishing { prec: a }, Repr::Vanishing { prec: b }) => f.vanishing(a + b),
            (Repr::Vanishing { prec: a }, Repr::Known { val, .. })
            | (Repr::Known { val, .. }, Repr::Vanishing { prec: a }) => f.vanishing(a + val),
            (
                Repr::Known { val: v1, prec: p1, unit: u1 },
                Repr::Known { val: v2, prec: p2, unit: u2 },
            ) => {
                let val = v1 + v2;
                let prec = (v1 + p2).min(v2 + p1).min(f.precision);
                if prec <= val {
                    return f.vanishing(prec);
                }
                let k = (prec - val) as u64;
                f.normalized(val, prec, u1.mul(u2, f.p, k))
            }
        }
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $imp:expr) => {
        impl $tr<&UltraScalar> for &UltraScalar {
            type Output = UltraScalar;
            fn $m(self, rhs: &UltraScalar) -> UltraScalar {
                $imp(self, rhs)
            }
        }
        impl $tr<UltraScalar> for UltraScalar {
            type Output = UltraScalar;
            fn $m(self, rhs: UltraScalar) -> UltraScalar {
                $imp(&self, &rhs)
            }
        }
        impl $tr<&UltraScalar> for UltraScalar {
            type Output = UltraScalar;
            fn $m(self, rhs: &UltraScalar) -> UltraScalar {
                $imp(&self, rhs)
            }
        }
        impl $tr<UltraScalar> for &UltraScalar {
            type Output = UltraScalar;
            fn $m(self, rhs: UltraScalar) -> UltraScalar {
                $imp(self, &rhs)
            }
        }
    };
}

binop!(Add, add, UltraScalar::add_impl);
binop!(Mul, mul, UltraScalar::mul_impl);
binop!(Sub, sub, |a: &UltraScalar, b: &UltraScalar| a.add_impl(&b.neg_impl()));

impl Neg for &UltraScalar {
    type Output = UltraScalar;
    fn neg(self) -> UltraScalar {
        self.neg_impl()
    }
}

impl Neg for UltraScalar {
    type Output = UltraScalar;
    fn neg(self) -> UltraScalar {
        self.neg_impl()
    }
}

impl AddAssign<&UltraScalar> for UltraScalar {
    fn add_assign(&mut self, rhs: &UltraScalar) {
        *self = self.add_impl(rhs);
    }
}

impl SubAssign<&UltraScalar> for UltraScalar {
    fn sub_assign(&mut self, rhs: &UltraScalar) {
        *self = self.add_impl(&rhs.neg_impl());
    }
}

impl MulAssign<&UltraScalar> for UltraScalar {
    fn mul_assign(&mut self, rhs: &UltraScalar) {
        *self = self.mul_impl(rhs);
    }
}

impl fmt::Display for UltraScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pi = match self.field.kind {
            FieldKind::PAdic => "p",
            FieldKind::FormalLaurent => "t",
        };
        match &self.repr {
            Repr::Zero => write!(f, "0"),
            Repr::Vanishing { prec } => write!(f, "O({pi}^{prec})"),
            Repr::Known { val, prec, unit } => {
                match unit {
                    Digits::Int(n) if n.bits() <= 63 => write!(f, "{n}")?,
                    _ => {
                        let d = unit.to_digit_vec(self.field.p, (prec - val) as u64);
                        let shown: Vec<String> = d.iter().take(8).map(u32::to_string).collect();
                        let more = if d.len() > 8 { ",…" } else { "" };
                        write!(f, "[{}{more}]", shown.join(","))?
                    }
                }
                if *val != 0 {
                    write!(f, "·{pi}^{val}")?;
                }
                write!(f, " + O({pi}^{prec})")
            }
        }
    }
}

impl fmt::Debug for UltraScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
