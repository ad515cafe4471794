//! Three-valued membership in the local stable manifold `Γ` of a prepared
//! block system.
//!
//! On the ball `B_r`, `Γ` is the set of `z` with `‖fⁿ(z)‖ ≤ bⁿ‖z‖` for all
//! `n`, whenever `‖A‖ ≤ b < 1/‖B⁻¹‖` and `Lip(f̃) ≤ b`. A single violation
//! therefore certifies `z ∉ Γ`. Conversely, `fⁿ(z)` certified on the chart
//! graph places `z` in `f⁻ⁿ(Γ)`, inside the stable set.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{AbsValue, UltraScalar};
use crate::linalg::coordinate_norm_exact;
use crate::manifolds::{BlockSystem, GraphChart, Mode};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Member,
    NonMember,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Witness {
    /// `‖fⁿ(z)‖ = norm > bound ≥ bⁿ‖z‖`, with `norm` exact.
    BoundViolated { step: usize, norm: AbsValue, bound: AbsValue },
    /// `fⁿ(z)` lies within `distance ≤ tolerance` of the graph.
    OnGraph { step: usize, distance: AbsValue, tolerance: AbsValue },
    /// The budget ran out, or the orbit left the ball without a verdict.
    None { steps: usize },
}

#[derive(Clone, Debug, Serialize)]
pub struct MembershipCertificate {
    pub verdict: Verdict,
    pub witness: Witness,
    pub b: AbsValue,
}

/// Midpoint exponent between `‖A‖` and `min(a, 1/‖B⁻¹‖)`, raised to
/// `Lip(f̃)` if needed. With `A = 0` the lower end is taken as
/// `p⁻¹ · min(a, 1/‖B⁻¹‖)`.
pub fn default_b(sys: &BlockSystem) -> Result<AbsValue> {
    let upper = sys.a().min(sys.block_inverse_norm(1)?.recip());
    let lower = sys.block_norm(0);
    let lower = if lower.is_zero() { upper * sys.field().abs_uniformizer() } else { lower };
    Ok(lower.geometric_mean(&upper).max(sys.lip()))
}

fn check_b(sys: &BlockSystem, b: AbsValue) -> Result<()> {
    if !matches!(sys.mode(), Mode::Stable | Mode::CentreStable) {
        return Err(Error::InvalidArgument("membership needs a stable or centre-stable system".into()));
    }
    let upper = sys.block_inverse_norm(1)?.recip();
    if !(sys.block_norm(0) <= b && b < upper && sys.lip() <= b) {
        return Err(Error::ModeInequalityFailed(format!("b = {b} violates ‖A‖ ≤ b < 1/‖B⁻¹‖, Lip(f̃) ≤ b")));
    }
    Ok(())
}

/// Classifies `z` (in the normalized coordinates of `sys`) within `budget`
/// forward steps. `b` defaults to [`default_b`].
pub fn stable_membership(
    sys: &BlockSystem,
    chart: &GraphChart,
    z: &[UltraScalar],
    b: Option<AbsValue>,
    budget: usize,
) -> Result<MembershipCertificate> {
    let b = match b {
        Some(b) => b,
        None => default_b(sys)?,
    };
    check_b(sys, b)?;
    if z.len() != sys.dim() {
        return Err(Error::DimensionMismatch(format!("point has {} coordinates, system {}", z.len(), sys.dim())));
    }
    let prec = sys.field().precision;
    let tolerance = AbsValue::from_int_exponent(prec - 4);
    let z0 = sys.norm(z);
    let in_ball = z0 < sys.radius();
    let mut cur = z.to_vec();
    let cert = |verdict, witness| MembershipCertificate { verdict, witness, b };
    for step in 0..=budget {
        let norm = sys.norm(&cur);
        if norm >= sys.radius() {
            if !in_ball {
                return Ok(cert(Verdict::Inconclusive, Witness::None { steps: step }));
            }
        } else {
            let distance = chart.graph_distance(sys, &cur);
            if distance <= tolerance {
                return Ok(cert(Verdict::Member, Witness::OnGraph { step, distance, tolerance }));
            }
        }
        if in_ball && step > 0 {
            let bound = b.powi(step as i64) * z0;
            if let Ok(exact) = coordinate_norm_exact(&cur, sys.weights()) {
                if exact > bound {
                    return Ok(cert(Verdict::NonMember, Witness::BoundViolated { step, norm: exact, bound }));
                }
            }
        }
        if step < budget {
            cur = sys.apply(&cur);
        }
    }
    Ok(cert(Verdict::Inconclusive, Witness::None { steps: budget }))
}

/// [`stable_membership`] over a batch of points, in parallel.
pub fn stable_membership_batch(
    sys: &BlockSystem,
    chart: &GraphChart,
    zs: &[Vec<UltraScalar>],
    b: Option<AbsValue>,
    budget: usize,
) -> Result<Vec<MembershipCertificate>> {
    zs.par_iter().map(|z| stable_membership(sys, chart, z, b, budget)).collect()
}
