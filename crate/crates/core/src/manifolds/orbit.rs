//! Finite representations of weighted sequence spaces: a stored prefix
//! `z_0..z_N` plus a certified bound on `sup_{n>N} a^{-n}‖z_n‖`.

use serde::Serialize;

use crate::error::Result;
use crate::field::{AbsValue, UltraScalar};
use crate::linalg::{coordinate_norm, coordinate_norm_exact};
use crate::series::TruncatedMap;

#[derive(Clone, Debug, Serialize)]
pub struct WeightedOrbit {
    pub entries: Vec<Vec<UltraScalar>>,
    /// The weight `a` of `‖z‖_a = sup_n a^{-n}‖z_n‖`.
    pub weight: AbsValue,
    pub tail_bound: AbsValue,
    /// Weights of the max norm on each entry.
    pub norm_weights: Vec<AbsValue>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrbitOp {
    LeftShift,
    RightShift,
    Lift,
    WeightedNorm,
}

#[derive(Clone, Debug)]
pub enum OrbitOpResult {
    Orbit(WeightedOrbit),
    Norm(AbsValue),
}

impl WeightedOrbit {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Weights `w_i · a^{-n}` for all coordinates of all stored entries.
    fn flat_weights(&self) -> Vec<AbsValue> {
        (0..self.entries.len())
            .flat_map(|n| {
                let s = self.weight.powi(-(n as i64));
                self.norm_weights.iter().map(move |w| *w * s)
            })
            .collect()
    }

    /// Upper bound for `‖z‖_a`, including the tail.
    pub fn weighted_norm(&self) -> AbsValue {
        let flat: Vec<UltraScalar> = self.entries.iter().flatten().cloned().collect();
        coordinate_norm(&flat, &self.flat_weights()).max(self.tail_bound)
    }

    /// `max_n a^{-n}‖z_n − z'_n‖` over the stored prefix, exactly.
    pub fn distance_exact(&self, other: &WeightedOrbit) -> Result<AbsValue> {
        let diff: Vec<UltraScalar> = self
            .entries
            .iter()
            .zip(&other.entries)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| x - y).collect::<Vec<_>>())
            .collect();
        coordinate_norm_exact(&diff, &self.flat_weights())
    }

    /// `(z_1, z_2, …)`: the norm scales by at most `a`.
    pub fn left_shift(&self) -> WeightedOrbit {
        WeightedOrbit {
            entries: self.entries.iter().skip(1).cloned().collect(),
            tail_bound: self.tail_bound * self.weight,
            ..self.clone()
        }
    }

    /// `(0, z_0, z_1, …)`: the norm scales by at most `a⁻¹`.
    pub fn right_shift(&self) -> WeightedOrbit {
        let field = self.entries.first().and_then(|e| e.first()).map(UltraScalar::field);
        let zero = match field {
            Some(f) => vec![f.zero(); self.norm_weights.len()],
            None => Vec::new(),
        };
        let mut entries = vec![zero];
        entries.extend(self.entries.iter().cloned());
        WeightedOrbit { entries, tail_bound: self.tail_bound / self.weight, ..self.clone() }
    }

    /// `(f(z_n))_n` for `f(0) = 0`; the tail scales by `Lip(f)` on the ball.
    pub fn lift(&self, f: &TruncatedMap) -> WeightedOrbit {
        let lip = f.lipschitz_bound(f.radius());
        WeightedOrbit {
            entries: self.entries.iter().map(|z| f.eval_unchecked(z)).collect(),
            weight: self.weight,
            tail_bound: self.tail_bound * lip,
            norm_weights: f.weights_out().to_vec(),
        }
    }
}

/// Dispatches the sequence-space operations.
pub fn orbit_space_ops(op: OrbitOp, x: &WeightedOrbit, f: Option<&TruncatedMap>) -> OrbitOpResult {
    match op {
        OrbitOp::LeftShift => OrbitOpResult::Orbit(x.left_shift()),
        OrbitOp::RightShift => OrbitOpResult::Orbit(x.right_shift()),
        OrbitOp::Lift => OrbitOpResult::Orbit(x.lift(f.expect("lift needs a map"))),
        OrbitOp::WeightedNorm => OrbitOpResult::Norm(x.weighted_norm()),
    }
}
