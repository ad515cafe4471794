//! Pointwise stable and unstable manifolds as fixed points of contractions
//! on weighted sequence spaces.
//!
//! Stable: for `x ∈ E₁` the orbit `w = (z_n)` solves `w = ((x,0),0,…) + g(w)`
//! with `g(w)_0 = (0, B⁻¹(y_1 − f̃₂(z_0)))` and
//! `g(w)_n = (f₁(z_{n-1}), B⁻¹(y_{n+1} − f̃₂(z_n)))`. Then
//! `φ(x) = B⁻¹(y_1 − f̃₂(z_0))`.
//!
//! Unstable: for `y ∈ E₂` the backward orbit solves
//! `w = ((0,y),0,…) + g(w)` with `g(w)_0 = (f₁(z_1), 0)` and
//! `g(w)_n = (f₁(z_{n+1}), B⁻¹(y_{n-1} − f̃₂(z_n)))`, and `φ(y) = f₁(z_1)`.
//!
//! Sequences are truncated after `N` entries; `N` and the iteration count
//! are chosen from the certified Lipschitz constant of `g` before iterating.

use serde::Serialize;

use super::orbit::WeightedOrbit;
use super::system::{BlockSystem, Mode};
use crate::error::{Error, Result};
use crate::field::{AbsValue, UltraScalar};
use crate::linalg::{coordinate_norm_exact, Matrix};

#[derive(Clone, Debug, Serialize)]
pub struct IrwinSolution {
    /// `φ` at the requested point.
    pub value: Vec<UltraScalar>,
    pub orbit: WeightedOrbit,
    /// Certified Lipschitz constant of the contraction.
    pub lip_g: AbsValue,
    pub iterations: usize,
    /// Exact `‖w^{m+1} − w^m‖` per iteration when determinable.
    pub residuals: Vec<Option<AbsValue>>,
}

const MAX_LENGTH: usize = 100_000;

struct Setup {
    idx1: Vec<usize>,
    idx2: Vec<usize>,
    b_inv: Matrix,
    b_inv_norm: AbsValue,
    c1: AbsValue,
    lip2: AbsValue,
    target: AbsValue,
    tol_floor: AbsValue,
    expand: AbsValue,
}

fn setup(sys: &BlockSystem) -> Result<Setup> {
    let b = sys.block(1);
    let b_inv = b.inverse()?;
    let w2 = sys.block_weights(1);
    let b_inv_norm = b_inv.weighted_norm(&w2, &w2);
    let c1 = sys.block_norm(0).max(sys.tilde_lip(0));
    let lip2 = sys.tilde_lip(1);
    let prec = sys.field().precision;
    let expand = sys.block_norm(1).max(c1).max(lip2).max(AbsValue::ONE);
    Ok(Setup {
        idx1: sys.block_indices(0),
        idx2: sys.block_indices(1),
        b_inv,
        b_inv_norm,
        c1,
        lip2,
        target: AbsValue::from_int_exponent(prec),
        tol_floor: AbsValue::from_int_exponent(prec - 4),
        expand,
    })
}

/// Smallest `k` with `start · ratio^k ≤ target`.
fn steps_to(start: AbsValue, ratio: AbsValue, target: AbsValue) -> Result<usize> {
    let mut v = start;
    let mut k = 0;
    while v > target {
        if ratio >= AbsValue::ONE || k >= MAX_LENGTH {
            return Err(Error::PrecisionExhausted("truncation bound does not decay".into()));
        }
        v = v * ratio;
        k += 1;
    }
    Ok(k)
}

fn flat_weights(sys: &BlockSystem, len: usize, seq_weight: AbsValue) -> Vec<AbsValue> {
    (0..len)
        .flat_map(|n| {
            let s = seq_weight.powi(-(n as i64));
            sys.weights().iter().map(move |w| *w * s)
        })
        .collect()
}

fn sequence_residual(old: &[Vec<UltraScalar>], new: &[Vec<UltraScalar>], weights: &[AbsValue]) -> (bool, Option<AbsValue>) {
    let diff: Vec<UltraScalar> =
        old.iter().zip(new).flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| y - x).collect::<Vec<_>>()).collect();
    let settled = diff.iter().all(UltraScalar::is_zero_at_precision);
    let exact = coordinate_norm_exact(&diff, weights).ok().filter(|v| !v.is_zero());
    (settled, exact)
}

fn check_contraction(residuals: &[Option<AbsValue>], lip_g: AbsValue) -> Result<()> {
    for w in residuals.windows(2) {
        if let (Some(prev), Some(next)) = (w[0], w[1]) {
            if next > prev * lip_g {
                return Err(Error::ContractionCertificateFailed(format!(
                    "residual went from {prev} to {next}, certified factor {lip_g}"
                )));
            }
        }
    }
    Ok(())
}

fn set_block(z: &mut [UltraScalar], idx: &[usize], v: &[UltraScalar]) {
    for (&i, x) in idx.iter().zip(v) {
        z[i] = x.clone();
    }
}

fn take(z: &[UltraScalar], idx: &[usize]) -> Vec<UltraScalar> {
    idx.iter().map(|&i| z[i].clone()).collect()
}

fn sub(a: &[UltraScalar], b: &[UltraScalar]) -> Vec<UltraScalar> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Point `(x, φ(x))` of the stable manifold and its forward orbit.
///
/// `length` requests a minimum number of stored orbit entries beyond
/// `z_0`; the solver uses more if the truncation bound demands it.
pub fn irwin_stable_chart(sys: &BlockSystem, x: &[UltraScalar], length: Option<usize>) -> Result<IrwinSolution> {
    if !matches!(sys.mode(), Mode::Stable | Mode::CentreStable) {
        return Err(Error::InvalidArgument("system is not prepared for a stable chart".into()));
    }
    let s = setup(sys)?;
    let a = sys.a();
    let field = sys.field();
    let n_dim = sys.dim();
    if x.len() != s.idx1.len() {
        return Err(Error::DimensionMismatch("point is not in the stable block".into()));
    }
    if s.c1 >= a {
        return Err(Error::ModeInequalityFailed(format!("max(‖A‖, Lip f̃₁) = {} is not below a", s.c1)));
    }
    let xn = sys.sub_norm(&s.idx1, x);
    if xn >= sys.radius() {
        return Err(Error::OutsideRadius);
    }
    let lip_g = (s.c1 / a).max(s.b_inv_norm * a.max(s.lip2));
    if lip_g >= AbsValue::ONE {
        return Err(Error::ContractionCertificateFailed(format!("Lip(g) = {lip_g} is not below 1")));
    }
    let needed = if xn.is_zero() || s.c1.is_zero() {
        1
    } else {
        steps_to(s.b_inv_norm * s.c1 * xn, s.c1 / a, s.target)?.max(1)
    };
    let len = needed.max(length.unwrap_or(0));
    let iterations = if xn.is_zero() { 1 } else { steps_to(xn, lip_g, s.target)? + 1 };

    let zero = vec![field.zero(); n_dim];
    let mut w: Vec<Vec<UltraScalar>> = vec![zero.clone(); len + 1];
    set_block(&mut w[0], &s.idx1, x);
    let weights = flat_weights(sys, len + 1, a);
    let mut residuals = Vec::new();
    let mut done = 0;
    for _ in 0..iterations {
        done += 1;
        let images: Vec<Vec<UltraScalar>> = w.iter().map(|z| sys.apply(z)).collect();
        let tilde2: Vec<Vec<UltraScalar>> = w.iter().map(|z| sys.apply_tilde(&s.idx2, z)).collect();
        let mut next = vec![zero.clone(); len + 1];
        for n in 0..=len {
            let first = if n == 0 { x.to_vec() } else { take(&images[n - 1], &s.idx1) };
            let y_next = if n < len { take(&w[n + 1], &s.idx2) } else { vec![field.zero(); s.idx2.len()] };
            let second = s.b_inv.mul_vec(&sub(&y_next, &tilde2[n]));
            set_block(&mut next[n], &s.idx1, &first);
            set_block(&mut next[n], &s.idx2, &second);
        }
        let (settled, exact) = sequence_residual(&w, &next, &weights);
        residuals.push(exact);
        w = next;
        if settled {
            break;
        }
    }
    check_contraction(&residuals, lip_g)?;

    let value = {
        let y1 = take(&w[1.min(len)], &s.idx2);
        let y1 = if len == 0 { vec![field.zero(); s.idx2.len()] } else { y1 };
        s.b_inv.mul_vec(&sub(&y1, &sys.apply_tilde(&s.idx2, &w[0])))
    };

    // The stored prefix must be an orbit and decay strictly in the a-norm.
    let tol = s.tol_floor.max(s.expand * s.target);
    for n in 0..len {
        let step = sub(&w[n + 1], &sys.apply(&w[n]));
        if sys.norm(&step) > tol {
            return Err(Error::ContractionCertificateFailed(format!("entry {} is not the image of entry {n}", n + 1)));
        }
    }
    let mut prev: Option<AbsValue> = None;
    for (n, z) in w.iter().enumerate() {
        let Ok(v) = coordinate_norm_exact(z, sys.weights()) else { break };
        if v.is_zero() {
            break;
        }
        let scaled = v * a.powi(-(n as i64));
        if prev.is_some_and(|p| scaled >= p) {
            return Err(Error::ContractionCertificateFailed(format!("a-weighted norm does not decrease at entry {n}")));
        }
        prev = Some(scaled);
    }

    let tail_bound = (s.c1 / a).powi(len as i64 + 1) * xn;
    Ok(IrwinSolution {
        value,
        orbit: WeightedOrbit { entries: w, weight: a, tail_bound, norm_weights: sys.weights().to_vec() },
        lip_g,
        iterations: done,
        residuals,
    })
}

/// Point `(φ(y), y)` of the unstable manifold and a backward orbit
/// `f(z_{n+1}) = z_n`. The block `A` need not be invertible.
pub fn irwin_unstable_chart(sys: &BlockSystem, y: &[UltraScalar], length: Option<usize>) -> Result<IrwinSolution> {
    if sys.mode() != Mode::Unstable {
        return Err(Error::InvalidArgument("system is not prepared for an unstable chart".into()));
    }
    let s = setup(sys)?;
    let a = sys.a();
    let field = sys.field();
    let n_dim = sys.dim();
    if y.len() != s.idx2.len() {
        return Err(Error::DimensionMismatch("point is not in the unstable block".into()));
    }
    let yn = sys.sub_norm(&s.idx2, y);
    if yn >= sys.radius() {
        return Err(Error::OutsideRadius);
    }
    let lip_g = (s.c1 / a).max(s.b_inv_norm * a.max(s.lip2));
    if lip_g >= AbsValue::ONE {
        return Err(Error::ContractionCertificateFailed(format!("Lip(g) = {lip_g} is not below 1")));
    }
    let decay = a * s.b_inv_norm;
    let needed = if yn.is_zero() || s.c1.is_zero() {
        1
    } else {
        steps_to(s.c1 * s.b_inv_norm * yn, decay, s.target)?.max(1)
    };
    let len = needed.max(length.unwrap_or(0));
    let iterations = if yn.is_zero() { 1 } else { steps_to(yn, lip_g, s.target)? + 1 };

    let b = a.recip();
    let zero = vec![field.zero(); n_dim];
    let mut w: Vec<Vec<UltraScalar>> = vec![zero.clone(); len + 1];
    set_block(&mut w[0], &s.idx2, y);
    let weights = flat_weights(sys, len + 1, b);
    let mut residuals = Vec::new();
    let mut done = 0;
    for _ in 0..iterations {
        done += 1;
        let images: Vec<Vec<UltraScalar>> = w.iter().map(|z| sys.apply(z)).collect();
        let tilde2: Vec<Vec<UltraScalar>> = w.iter().map(|z| sys.apply_tilde(&s.idx2, z)).collect();
        let mut next = vec![zero.clone(); len + 1];
        for n in 0..=len {
            let first =
                if n < len { take(&images[n + 1], &s.idx1) } else { vec![field.zero(); s.idx1.len()] };
            let second = if n == 0 {
                y.to_vec()
            } else {
                s.b_inv.mul_vec(&sub(&take(&w[n - 1], &s.idx2), &tilde2[n]))
            };
            set_block(&mut next[n], &s.idx1, &first);
            set_block(&mut next[n], &s.idx2, &second);
        }
        let (settled, exact) = sequence_residual(&w, &next, &weights);
        residuals.push(exact);
        w = next;
        if settled {
            break;
        }
    }
    check_contraction(&residuals, lip_g)?;

    let value = if len == 0 { vec![field.zero(); s.idx1.len()] } else { take(&sys.apply(&w[1]), &s.idx1) };

    let tol = s.tol_floor.max(s.expand * s.target);
    for n in 0..len {
        let step = sub(&sys.apply(&w[n + 1]), &w[n]);
        if sys.norm(&step) > tol {
            return Err(Error::ContractionCertificateFailed(format!("entry {n} is not the image of entry {}", n + 1)));
        }
    }
    for (n, z) in w.iter().enumerate() {
        let bound = decay.powi(n as i64) * yn;
        let scaled = sys.norm(z) * a.powi(n as i64);
        if scaled > bound.max(tol * a.powi(n as i64)) || scaled >= sys.radius() {
            return Err(Error::ContractionCertificateFailed(format!("backward orbit entry {n} exceeds its bound")));
        }
    }

    let tail_bound = decay.powi(len as i64 + 1) * yn;
    Ok(IrwinSolution {
        value,
        orbit: WeightedOrbit { entries: w, weight: b, tail_bound, norm_weights: sys.weights().to_vec() },
        lip_g,
        iterations: done,
        residuals,
    })
}
