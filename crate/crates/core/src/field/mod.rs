//! Complete ultrametric fields at capped absolute precision.
//!
//! Two instances share one interface: the p-adic numbers `Q_p` and the
//! Laurent series field `F_p((t))`. In both the uniformizer is written `π`
//! (`p` resp. `t`) and `|π| = p^{-1}`.

mod abs;
mod digits;
mod scalar;
mod serial;

pub use abs::{format_exponent, parse_exponent, AbsValue};
pub use scalar::UltraScalar;
pub use serial::ScalarJson;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FieldKind {
    #[serde(rename = "p-adic")]
    PAdic,
    #[serde(rename = "formal-Laurent")]
    FormalLaurent,
}

/// Field instance and working precision: every scalar is known modulo
/// `π^precision`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawFieldSpec")]
pub struct FieldSpec {
    pub kind: FieldKind,
    pub p: u32,
    pub precision: i64,
}

#[derive(Deserialize)]
struct RawFieldSpec {
    kind: FieldKind,
    p: u32,
    precision: i64,
}

impl TryFrom<RawFieldSpec> for FieldSpec {
    type Error = Error;
    fn try_from(r: RawFieldSpec) -> Result<Self> {
        FieldSpec::new(r.kind, r.p, r.precision)
    }
}

impl FieldSpec {
    pub fn new(kind: FieldKind, p: u32, precision: i64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidField(format!("{p} is not prime")));
        }
        if precision < 1 {
            return Err(Error::InvalidField(format!("precision {precision} < 1")));
        }
        Ok(FieldSpec { kind, p, precision })
    }

    /// `Q_p` with `precision` digits.
    pub fn padic(p: u32, precision: i64) -> Result<Self> {
        Self::new(FieldKind::PAdic, p, precision)
    }

    /// `F_p((t))` with `precision` coefficients.
    pub fn laurent(p: u32, precision: i64) -> Result<Self> {
        Self::new(FieldKind::FormalLaurent, p, precision)
    }

    /// Same field with a different working precision.
    pub fn with_precision(self, precision: i64) -> Result<Self> {
        Self::new(self.kind, self.p, precision)
    }

    /// `|π|`.
    pub fn abs_uniformizer(&self) -> AbsValue {
        AbsValue::from_int_exponent(1)
    }
}

fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= p as u64 {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}
