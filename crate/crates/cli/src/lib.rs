//! Batch front end: reads a system document, runs one command and emits a
//! deterministic JSON report.

pub mod doc;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use ultramani_core::dynamics::{classify_fixed_point, orbit, stable_membership_batch};
use ultramani_core::linalg::{adapted_norm, char_poly, newton_polygon, spectral_split};
use ultramani_core::manifolds::{
    irwin_stable_chart, irwin_unstable_chart, normalize, series_chart, shell_samples, verify_invariance,
    BlockSystem, GraphChart, Mode, DEFAULT_SAMPLES,
};
use ultramani_core::series::TruncatedMap;
use ultramani_core::{AbsValue, Error, ErrorClass, Result, UltraScalar};

pub use doc::{parse_document, Options, SystemDocument, SCHEMA};

pub const REPORT_SCHEMA: &str = "ultramani.report/1";
pub const DEFAULT_DEGREE: u32 = 8;
pub const DEFAULT_BUDGET: usize = 200;
const DEFAULT_POINT_SAMPLES: usize = 10;
const DEFAULT_SEED: u64 = 0x5eed_0002;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Spectrum,
    Split,
    Norm,
    Chart,
    Stable,
    Unstable,
    Classify,
    Orbit,
    Member,
    Verify,
}

/// Command-line overrides of the document options.
#[derive(Clone, Debug, Default)]
pub struct Flags {
    pub a: Option<String>,
    pub b: Option<String>,
    pub degree: Option<u32>,
    pub budget: Option<usize>,
    pub kind: Option<String>,
    pub point: Option<String>,
    pub samples: Option<usize>,
    /// Contents of a previously printed chart report.
    pub chart: Option<String>,
}

/// Parameters after merging flags over document options over defaults.
#[derive(Clone, Debug, Serialize)]
pub struct Resolved {
    pub a: Option<AbsValue>,
    pub b: Option<AbsValue>,
    pub degree: u32,
    pub budget: usize,
    pub kind: Option<Mode>,
    pub samples: usize,
    pub seed: u64,
    pub points: Option<Vec<Value>>,
}

fn resolve(cmd: Command, doc: &SystemDocument, flags: &Flags) -> Result<Resolved> {
    let o: &Options = &doc.options;
    let abs = |f: &Option<String>, d: &Option<String>| f.as_ref().or(d.as_ref()).map(|t| doc::parse_abs(t)).transpose();
    let kind = match flags.kind.as_ref().or(o.kind.as_ref()) {
        Some(k) => Some(Mode::parse(k)?),
        None => match cmd {
            Command::Chart | Command::Member => Some(Mode::CentreStable),
            Command::Stable => Some(Mode::Stable),
            Command::Unstable => Some(Mode::Unstable),
            _ => None,
        },
    };
    let points = match &flags.point {
        Some(text) => {
            let v: Value = serde_json::from_str(text).map_err(|e| Error::Parse(format!("--point: {e}")))?;
            Some(vec![v])
        }
        None => o.points.clone(),
    };
    Ok(Resolved {
        a: abs(&flags.a, &o.a)?,
        b: abs(&flags.b, &o.b)?,
        degree: flags.degree.or(o.degree).unwrap_or(DEFAULT_DEGREE),
        budget: flags.budget.or(o.budget).unwrap_or(DEFAULT_BUDGET),
        kind,
        samples: flags.samples.or(o.samples).unwrap_or(DEFAULT_POINT_SAMPLES),
        seed: o.seed.unwrap_or(DEFAULT_SEED),
        points,
    })
}

/// Outputs of a successful command plus the certification it produced,
/// if any.
pub struct Outcome {
    pub outputs: Value,
    pub verification: Option<Value>,
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report values serialize")
}

fn system_summary(sys: &BlockSystem) -> Value {
    json!({
        "mode": sys.mode(),
        "a": sys.a(),
        "blocks": sys.blocks().iter().map(|r| [r.start, r.end]).collect::<Vec<_>>(),
        "lambda": sys.lambda(),
        "radius": sys.radius(),
        "lip": sys.lip(),
        "weights": sys.weights(),
        "basis": sys.basis(),
        "linear": sys.linear(),
    })
}

fn points_or_samples(
    r: &Resolved,
    sys: &BlockSystem,
    idx: &[usize],
    original: bool,
) -> Result<Vec<Vec<UltraScalar>>> {
    let field = sys.field();
    match &r.points {
        Some(pts) => pts
            .iter()
            .map(|v| {
                let z = doc::parse_point(field, v, idx.len())?;
                if original {
                    sys.from_original(&z)
                } else {
                    Ok(z)
                }
            })
            .collect(),
        None => {
            let w: Vec<AbsValue> = idx.iter().map(|&i| sys.weights()[i]).collect();
            Ok(shell_samples(field, &w, sys.radius(), r.samples, r.seed))
        }
    }
}

fn prepared(doc: &SystemDocument, r: &Resolved) -> Result<BlockSystem> {
    let kind = r.kind.ok_or_else(|| Error::InvalidArgument("missing --kind".into()))?;
    normalize(&doc.map, r.a.unwrap_or(AbsValue::ONE), kind)
}

fn chart_from_report(sys: &BlockSystem, text: &str) -> Result<GraphChart> {
    let v: Value = serde_json::from_str(text).map_err(|e| Error::Parse(format!("chart report: {e}")))?;
    let phi = v
        .pointer("/outputs/chart")
        .ok_or_else(|| Error::Parse("chart report has no outputs.chart".into()))?;
    let phi = TruncatedMap::from_json(sys.field(), phi)?;
    let (tangent, complement) = (sys.tangent(), sys.complement());
    if phi.n_in() != tangent.len() || phi.n_out() != complement.len() {
        return Err(Error::DimensionMismatch("chart does not match the system blocks".into()));
    }
    let tw = tangent.iter().map(|&i| sys.weights()[i]).collect();
    let cw = complement.iter().map(|&i| sys.weights()[i]).collect();
    let phi = phi.with_weights(tw, cw);
    Ok(GraphChart {
        kind: sys.mode(),
        gauss_norms: phi.gauss_norms(),
        phi,
        tangent,
        complement,
        certification: Default::default(),
    })
}

/// Resolved parameters of a chart report, for `verify`.
fn chart_report_params(text: &str) -> Result<(Option<String>, Option<String>)> {
    let v: Value = serde_json::from_str(text).map_err(|e| Error::Parse(format!("chart report: {e}")))?;
    let get = |p: &str| v.pointer(p).and_then(Value::as_str).map(str::to_string);
    Ok((get("/options/kind"), get("/outputs/system/a/exp")))
}

pub fn run(cmd: Command, doc: &SystemDocument, flags: &Flags) -> Result<(Resolved, Outcome)> {
    let mut flags = flags.clone();
    if cmd == Command::Verify {
        let text = flags.chart.clone().ok_or_else(|| Error::InvalidArgument("verify needs --chart".into()))?;
        let (kind, a) = chart_report_params(&text)?;
        flags.kind = flags.kind.or(kind);
        flags.a = flags.a.or(a);
    }
    let r = resolve(cmd, doc, &flags)?;
    let linear = doc.map.linear_part();
    let plain = |outputs| Outcome { outputs, verification: None };
    let outcome = match cmd {
        Command::Spectrum => {
            let chi = char_poly(&linear)?;
            let radii = newton_polygon(&chi)?.radii();
            plain(json!({
                "char_poly": chi,
                "radii": radii.iter().map(|(r, k)| json!({"radius": r, "multiplicity": k})).collect::<Vec<_>>(),
            }))
        }
        Command::Split => {
            let split = spectral_split(&linear)?;
            plain(json!({ "radii": split.radii(), "split": split }))
        }
        Command::Norm => {
            let split = spectral_split(&linear)?;
            let eps = r.a.unwrap_or(AbsValue::ONE) * doc.field.abs_uniformizer();
            let norm = adapted_norm(&linear, &split, eps)?;
            plain(json!({ "eps": eps, "norm": norm }))
        }
        Command::Classify => plain(to_value(&classify_fixed_point(&linear, r.a)?)),
        Command::Orbit => {
            let v = r.points.as_ref().and_then(|p| p.first()).ok_or_else(|| Error::InvalidArgument("orbit needs --point".into()))?;
            let z = doc::parse_point(doc.field, v, doc.dim)?;
            if doc.map.input_norm(&z) >= doc.map.radius() {
                return Err(Error::OutsideRadius);
            }
            plain(to_value(&orbit(&doc.map, &z, r.budget)))
        }
        Command::Chart => {
            let sys = prepared(doc, &r)?;
            let chart = series_chart(&sys, r.degree)?;
            let cert = to_value(&chart.certification);
            Outcome {
                outputs: json!({
                    "kind": chart.kind,
                    "system": system_summary(&sys),
                    "tangent": chart.tangent,
                    "complement": chart.complement,
                    "chart": chart.phi,
                    "unscaled": chart.unscaled(&sys)?,
                    "gauss_norms": chart.gauss_norms,
                    "certification": cert,
                }),
                verification: Some(cert),
            }
        }
        Command::Verify => {
            let sys = prepared(doc, &r)?;
            let chart = chart_from_report(&sys, flags.chart.as_deref().unwrap_or_default())?;
            let cert = to_value(&verify_invariance(&sys, &chart, chart.degree(), DEFAULT_SAMPLES));
            Outcome { outputs: json!({ "certification": cert }), verification: Some(cert) }
        }
        Command::Stable | Command::Unstable => {
            let sys = prepared(doc, &r)?;
            let idx = if cmd == Command::Stable { sys.block_indices(0) } else { sys.block_indices(1) };
            let pts = points_or_samples(&r, &sys, &idx, false)?;
            let sols = pts
                .par_iter()
                .map(|x| {
                    let s = if cmd == Command::Stable {
                        irwin_stable_chart(&sys, x, None)?
                    } else {
                        irwin_unstable_chart(&sys, x, None)?
                    };
                    Ok(json!({
                        "point": x,
                        "value": s.value,
                        "lip_g": s.lip_g,
                        "iterations": s.iterations,
                        "orbit_length": s.orbit.len(),
                        "tail_bound": s.orbit.tail_bound,
                    }))
                })
                .collect::<Result<Vec<_>>>()?;
            plain(json!({ "system": system_summary(&sys), "solutions": sols }))
        }
        Command::Member => {
            let sys = prepared(doc, &r)?;
            let chart = series_chart(&sys, r.degree)?;
            let all: Vec<usize> = (0..sys.dim()).collect();
            let pts = points_or_samples(&r, &sys, &all, true)?;
            let certs = stable_membership_batch(&sys, &chart, &pts, r.b, r.budget)?;
            let rows: Vec<Value> = pts
                .iter()
                .zip(&certs)
                .map(|(z, c)| json!({ "point": z, "certificate": c }))
                .collect();
            Outcome {
                outputs: json!({ "system": system_summary(&sys), "results": rows }),
                verification: Some(to_value(&chart.certification)),
            }
        }
    };
    Ok((r, outcome))
}

/// SHA-256 of the canonical input: document, command and flags.
pub fn inputs_digest(cmd: Command, doc: &SystemDocument, flags: &Flags) -> String {
    let canon = json!({
        "command": cmd,
        "document": doc.source,
        "precision": doc.field.precision,
        "flags": {
            "a": flags.a, "b": flags.b, "degree": flags.degree, "budget": flags.budget,
            "kind": flags.kind, "point": flags.point, "samples": flags.samples, "chart": flags.chart,
        },
    });
    let bytes = serde_json::to_vec(&canon).expect("canonical input serializes");
    Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn exit_code(class: ErrorClass) -> i32 {
    match class {
        ErrorClass::Input => 1,
        ErrorClass::Precondition => 2,
        ErrorClass::Precision => 3,
    }
}

/// The full report and process exit code. Input errors produce no report.
pub fn report(cmd: Command, doc: &SystemDocument, flags: &Flags) -> std::result::Result<(Value, i32), Error> {
    let digest = inputs_digest(cmd, doc, flags);
    let mut rep = json!({
        "schema": REPORT_SCHEMA,
        "command": cmd,
        "inputs_digest": digest,
        "field": doc.field,
    });
    let code = match run(cmd, doc, flags) {
        Ok((r, out)) => {
            rep["options"] = to_value(&r);
            rep["status"] = json!("ok");
            rep["outputs"] = out.outputs;
            rep["verification"] = out.verification.unwrap_or(Value::Null);
            0
        }
        Err(e) if e.class() == ErrorClass::Input => return Err(e),
        Err(e) => {
            rep["status"] = json!("error");
            rep["error"] = json!({ "code": e.code(), "message": e.to_string() });
            exit_code(e.class())
        }
    };
    Ok((rep, code))
}
