//! JSON forms of scalars.
//!
//! A scalar is either text or a digit array:
//!
//! * `"num/den"`, `"num"`, optionally multiplied by powers of the uniformizer,
//!   e.g. `"-3/2*pi^-1"`. Text values are exact and get full precision.
//! * `{"digits":[d0,d1,...],"shift":k}` meaning `Σ d_i π^{k+i} + O(π^{k+len})`.
//!
//! Serialization always emits the digit form (or `"0"` for exact zero), so
//! `parse(serialize(x)) == x` bit for bit.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize, Serializer};

use super::{FieldKind, FieldSpec, UltraScalar};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScalarJson {
    Text(String),
    Digits { digits: Vec<u32>, shift: i64 },
}

impl FieldSpec {
    pub fn parse_scalar(self, j: &ScalarJson) -> Result<UltraScalar> {
        match j {
            ScalarJson::Text(s) => self.parse_text(s),
            ScalarJson::Digits { digits, shift } => self.from_digits(digits, *shift),
        }
    }

    pub fn parse_scalar_value(self, v: &serde_json::Value) -> Result<UltraScalar> {
        let j: ScalarJson =
            serde_json::from_value(v.clone()).map_err(|e| Error::Parse(format!("scalar {v}: {e}")))?;
        self.parse_scalar(&j)
    }

    /// Parses the text form: `[-] factor (* factor)*` with factors `a`, `a/b`, `pi`, `pi^k`.
    pub fn parse_text(self, s: &str) -> Result<UltraScalar> {
        let bad = |why: &str| Error::Parse(format!("scalar {s:?}: {why}"));
        let mut body = s.trim();
        let mut negate = false;
        if let Some(rest) = body.strip_prefix('-') {
            if rest.trim_start().starts_with("pi") {
                negate = true;
                body = rest.trim_start();
            }
        }
        if body.is_empty() {
            return Err(bad("empty"));
        }
        let mut num = BigInt::from(1);
        let mut den = BigInt::from(1);
        let mut k = 0i64;
        for factor in body.split('*') {
            let factor = factor.trim();
            if let Some(rest) = factor.strip_prefix("pi") {
                k += match rest.trim() {
                    "" => 1,
                    e => e
                        .strip_prefix('^')
                        .ok_or_else(|| bad("expected ^ after pi"))?
                        .trim()
                        .trim_start_matches('(')
                        .trim_end_matches(')')
                        .parse::<i64>()
                        .map_err(|_| bad("bad exponent"))?,
                };
            } else {
                let (n, d) = factor.split_once('/').unwrap_or((factor, "1"));
                num *= n.trim().parse::<BigInt>().map_err(|_| bad("bad numerator"))?;
                den *= d.trim().parse::<BigInt>().map_err(|_| bad("bad denominator"))?;
            }
        }
        // Fold π^k into the rational where π is an integer, so nothing is lost.
        let acc = match self.kind {
            FieldKind::PAdic => {
                let pk = BigInt::from(self.p).pow(k.unsigned_abs() as u32);
                if k >= 0 {
                    num *= pk;
                } else {
                    den *= pk;
                }
                self.big_rational(&num, &den)?
            }
            FieldKind::FormalLaurent => match self.big_rational(&num, &den)?.digits() {
                None => self.zero(),
                Some((d, _)) => {
                    let mut digits = vec![0; (self.precision - k).max(1) as usize];
                    digits[0] = d[0];
                    self.from_digits(&digits, k)?
                }
            },
        };
        Ok(if negate { -acc } else { acc })
    }
}

impl UltraScalar {
    pub fn to_json(&self) -> ScalarJson {
        match self.digits() {
            None => ScalarJson::Text("0".into()),
            Some((digits, shift)) => ScalarJson::Digits { digits, shift },
        }
    }
}

impl Serialize for UltraScalar {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}
