//! Invariance certification for graph charts.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::chart::{coefficient_bound, embed, GraphChart};
use super::system::{BlockSystem, Mode};
use crate::field::{AbsValue, FieldSpec, UltraScalar};
use crate::linalg::coordinate_norm;
use crate::series::{compose_jets, Jet};

/// Outcome of [`verify_invariance`]. Degrees `0` and `1` of the residual
/// vanish by construction, so `invariance_residual_zero_through ≥ 1`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Certification {
    pub kind: String,
    pub degree: u32,
    pub invariance_residual_zero_through: u32,
    pub first_failing_degree: Option<u32>,
    pub samples_checked: usize,
    pub first_failing_sample: Option<usize>,
    pub bounds_ok: bool,
    pub pass: bool,
}

/// Number of forward steps checked from each sample.
const STEPS: usize = 3;

/// Checks a chart against its system: the formal invariance identity
/// through `degree`, the coefficient bounds, and one-step invariance with
/// re-projection along `STEPS` steps from `samples` shell points.
pub fn verify_invariance(sys: &BlockSystem, chart: &GraphChart, degree: u32, samples: usize) -> Certification {
    let field = sys.field();
    let degree = degree.min(chart.phi.degree());
    let phi: Vec<Jet> = chart.phi.with_degree(degree).to_jets();
    let tangent = sys.tangent();
    let complement = sys.complement();

    let mut first_failing_degree = None;
    if !tangent.is_empty() && !complement.is_empty() {
        let big = embed(sys, &phi, degree);
        let f_phi = compose_jets(sys.map_jets(), &big, degree);
        let f_t: Vec<Jet> = tangent.iter().map(|&i| f_phi[i].clone()).collect();
        let lhs = compose_jets(&phi, &f_t, degree);
        let residual: Vec<Jet> = complement.iter().zip(&lhs).map(|(&i, l)| l.sub(&f_phi[i])).collect();
        first_failing_degree =
            (0..=degree).find(|&k| residual.iter().any(|r| !r.homogeneous(k).is_zero_at_precision()));
    }

    let gauss = chart.phi.with_degree(degree).gauss_norms();
    let bounds_ok = gauss.iter().take(2).all(|g| g.is_zero())
        && gauss.iter().enumerate().skip(2).all(|(k, g)| *g < coefficient_bound(sys, k as u32));

    let tw: Vec<AbsValue> = tangent.iter().map(|&i| sys.weights()[i]).collect();
    let points = shell_samples(field, &tw, sys.radius(), samples, 0x5a3d_0000 + degree as u64);
    let first_failing_sample = points
        .par_iter()
        .enumerate()
        .filter(|(_, x)| !pointwise_ok(sys, chart, &phi, x, degree))
        .map(|(i, _)| i)
        .min();

    let pass = first_failing_degree.is_none() && bounds_ok && first_failing_sample.is_none();
    Certification {
        kind: chart.kind.name().to_string(),
        degree,
        invariance_residual_zero_through: first_failing_degree.map_or(degree, |d| d - 1),
        first_failing_degree,
        samples_checked: points.len(),
        first_failing_sample,
        bounds_ok,
        pass,
    }
}

fn pointwise_ok(sys: &BlockSystem, chart: &GraphChart, phi: &[Jet], x0: &[UltraScalar], degree: u32) -> bool {
    let field = sys.field();
    let tangent = sys.tangent();
    let complement = sys.complement();
    let floor = AbsValue::from_int_exponent(field.precision - 4);
    let expand = (0..sys.blocks().len())
        .filter(|&b| complement.contains(&sys.blocks()[b].start) && !sys.blocks()[b].is_empty())
        .map(|b| sys.block_norm(b).max(sys.tilde_lip(b)))
        .fold(AbsValue::ONE, AbsValue::max);
    let contraction = match sys.mode() {
        Mode::CentreStable | Mode::Stable => Some(sys.block_norm(0).max(sys.tilde_lip(0))),
        _ => None,
    };
    let tail_coeff = coefficient_bound(sys, degree + 1);
    let eval_phi = |x: &[UltraScalar]| -> Vec<UltraScalar> { phi.iter().map(|j| j.eval(x)).collect() };
    let mut x = x0.to_vec();
    for _ in 0..STEPS {
        let xn = sys.sub_norm(&tangent, &x);
        if xn >= sys.radius() {
            break;
        }
        let tol = floor.max(expand * tail_coeff * xn.powi(degree as i64 + 1));
        let mut z = vec![field.zero(); sys.dim()];
        for (q, &i) in tangent.iter().enumerate() {
            z[i] = x[q].clone();
        }
        let y = eval_phi(&x);
        for (q, &i) in complement.iter().enumerate() {
            z[i] = y[q].clone();
        }
        let fz = sys.apply(&z);
        if let Some(c) = contraction {
            if sys.norm(&fz) > (c * sys.norm(&z)).max(tol) {
                return false;
            }
        }
        if chart.graph_distance(sys, &fz) > tol {
            return false;
        }
        x = tangent.iter().map(|&i| fz[i].clone()).collect();
    }
    true
}

/// Deterministic sample points `π^j · u`, `j = 1..=5`, one coordinate a unit
/// and the rest integral, pushed inside the open ball of radius `radius`.
pub fn shell_samples(field: FieldSpec, weights: &[AbsValue], radius: AbsValue, count: usize, seed: u64) -> Vec<Vec<UltraScalar>> {
    let dim = weights.len();
    if dim == 0 {
        return Vec::new();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|s| {
            let j = 1 + (s % 5) as i64;
            let lead = s % dim;
            let mut x: Vec<UltraScalar> = (0..dim)
                .map(|i| {
                    if i == lead {
                        field.random_unit(&mut rng, j)
                    } else if rng.gen_bool(0.5) {
                        field.random_integral(&mut rng, j)
                    } else {
                        field.zero()
                    }
                })
                .collect();
            while coordinate_norm(&x, weights) >= radius {
                x = x.iter().map(|c| c.mul_pi_pow(1)).collect();
            }
            x
        })
        .collect()
}
