//! The input document: a field, a linear part and a list of higher-order
//! terms.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use ultramani_core::field::{parse_exponent, AbsValue, FieldSpec, UltraScalar};
use ultramani_core::series::{parse_terms, TruncatedMap};
use ultramani_core::{Error, Result};

pub const SCHEMA: &str = "ultramani.system/1";

/// Defaults for run parameters; command-line flags take precedence.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    pub degree: Option<u32>,
    pub budget: Option<usize>,
    /// Threshold `a = p^{-e}` given as the text of `e`, like `"1/2"`.
    pub a: Option<String>,
    pub b: Option<String>,
    pub kind: Option<String>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub points: Option<Vec<Value>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDocument {
    schema: String,
    field: FieldSpec,
    dim: usize,
    linear: Value,
    #[serde(default)]
    terms: Option<Value>,
    #[serde(default)]
    radius: Option<AbsValue>,
    #[serde(default)]
    options: Options,
}

pub struct SystemDocument {
    pub field: FieldSpec,
    pub dim: usize,
    pub map: TruncatedMap,
    pub options: Options,
    /// The parsed input, for the report digest.
    pub source: Value,
}

/// Parses and validates a document; `precision` overrides the declared one.
pub fn parse_document(text: &str, precision: Option<i64>) -> Result<SystemDocument> {
    let source: Value = serde_json::from_str(text).map_err(|e| Error::Parse(format!("input: {e}")))?;
    let raw: RawDocument = serde_json::from_value(source.clone()).map_err(|e| Error::Parse(format!("input: {e}")))?;
    if raw.schema != SCHEMA {
        return Err(Error::Parse(format!("unknown schema {:?}, expected {SCHEMA:?}", raw.schema)));
    }
    let field = match precision {
        Some(n) => raw.field.with_precision(n)?,
        None => raw.field,
    };
    let linear = field.parse_matrix(&raw.linear)?;
    if linear.rows() != raw.dim || linear.cols() != raw.dim {
        return Err(Error::DimensionMismatch(format!("linear part is not {0}x{0}", raw.dim)));
    }
    let terms = match &raw.terms {
        Some(t) => parse_terms(field, t, raw.dim, raw.dim)?,
        None => Vec::new(),
    };
    if terms.iter().any(|(_, e, _)| e.degree() < 2) {
        return Err(Error::Parse("terms must have degree at least 2; use \"linear\" for degree 1".into()));
    }
    let degree = terms.iter().map(|(_, e, _)| e.degree()).max().unwrap_or(1);
    let mut map = TruncatedMap::linear(&linear, degree, raw.radius.unwrap_or(AbsValue::ONE));
    for (o, e, c) in terms {
        map.add_term(o, e, c);
    }
    Ok(SystemDocument { field, dim: raw.dim, map, options: raw.options, source })
}

/// `"e"` as `p^{-e}`, the convention of every `{"exp": …}` value.
pub fn parse_abs(text: &str) -> Result<AbsValue> {
    match parse_exponent(text).map_err(Error::Parse)? {
        Some(e) => Ok(AbsValue::from_exponent(e)),
        None => Ok(AbsValue::ZERO),
    }
}

pub fn parse_point(field: FieldSpec, v: &Value, dim: usize) -> Result<Vec<UltraScalar>> {
    let arr = v.as_array().ok_or_else(|| Error::Parse("point must be an array of scalars".into()))?;
    if arr.len() != dim {
        return Err(Error::DimensionMismatch(format!("point has {} coordinates, expected {dim}", arr.len())));
    }
    arr.iter().map(|x| field.parse_scalar_value(x)).collect()
}
