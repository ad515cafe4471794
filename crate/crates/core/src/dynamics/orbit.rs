use serde::Serialize;

use crate::field::{AbsValue, UltraScalar};
use crate::series::TruncatedMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    Budget,
    LeftBall,
    ConvergedToZero,
}

/// `z_0, …, z_n` with `z_{k+1} = f(z_k)` at working precision.
#[derive(Clone, Debug, Serialize)]
pub struct OrbitTrace {
    pub points: Vec<Vec<UltraScalar>>,
    /// Upper bounds for `‖z_k‖` in the input weights of `f`.
    pub norms: Vec<AbsValue>,
    pub termination: Termination,
}

/// Iterates `f` from `z` for at most `budget` steps. Stops as soon as a
/// point leaves the open ball of `f` or vanishes at working precision.
pub fn orbit(f: &TruncatedMap, z: &[UltraScalar], budget: usize) -> OrbitTrace {
    let mut points = vec![z.to_vec()];
    let mut norms = vec![f.input_norm(z)];
    loop {
        let cur = points.last().unwrap();
        let norm = *norms.last().unwrap();
        if norm >= f.radius() {
            return OrbitTrace { points, norms, termination: Termination::LeftBall };
        }
        if cur.iter().all(UltraScalar::is_zero_at_precision) {
            return OrbitTrace { points, norms, termination: Termination::ConvergedToZero };
        }
        if points.len() > budget {
            return OrbitTrace { points, norms, termination: Termination::Budget };
        }
        let next = f.eval_unchecked(cur);
        norms.push(f.input_norm(&next));
        points.push(next);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldSpec;
    use crate::linalg::Matrix;
    use crate::series::MultiIndex;

    #[test]
    fn zero_is_fixed() {
        let f = FieldSpec::padic(5, 20).unwrap();
        let m = TruncatedMap::linear(&Matrix::identity(f, 2), 2, AbsValue::ONE);
        let t = orbit(&m, &[f.zero(), f.zero()], 10);
        assert_eq!(t.termination, Termination::ConvergedToZero);
        assert_eq!(t.points.len(), 1);
    }

    #[test]
    fn contraction_norms_decay() {
        let f = FieldSpec::padic(5, 20).unwrap();
        let m = TruncatedMap::linear(&Matrix::diag(f, &[f.int(5)]), 2, AbsValue::from_int_exponent(-1));
        let t = orbit(&m, &[f.one()], 6);
        assert_eq!(t.termination, Termination::Budget);
        for (n, v) in t.norms.iter().enumerate() {
            assert_eq!(*v, AbsValue::from_int_exponent(n as i64));
        }
    }

    #[test]
    fn expanding_direction_leaves_the_ball() {
        let f = FieldSpec::padic(5, 20).unwrap();
        let p = f.uniformizer();
        let mut m = TruncatedMap::zero(f, 2, 2, 2, AbsValue::ONE);
        m.add_term(0, MultiIndex::new(vec![1, 0]), p.clone());
        m.add_term(0, MultiIndex::new(vec![0, 2]), p.clone());
        m.add_term(1, MultiIndex::new(vec![0, 1]), p.inv().unwrap());
        m.add_term(1, MultiIndex::new(vec![2, 0]), p.clone());
        let t = orbit(&m, &[f.zero(), p.clone()], 10);
        assert_eq!(t.termination, Termination::LeftBall);
        assert_eq!(t.norms, vec![AbsValue::from_int_exponent(1), AbsValue::ONE]);
    }
}
