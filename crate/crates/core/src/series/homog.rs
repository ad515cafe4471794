use std::collections::BTreeMap;

use super::{compose_jets, Jet, MultiIndex};
use crate::field::{AbsValue, FieldSpec, UltraScalar};
use crate::linalg::Matrix;

/// A homogeneous polynomial map `K^{n_in} → K^{n_out}` of one degree.
/// Exact zeros are never stored; coefficients without a certified digit are
/// kept since they carry a bound.
#[derive(Clone, Debug, PartialEq)]
pub struct HomogPoly {
    field: FieldSpec,
    degree: u32,
    n_in: usize,
    n_out: usize,
    terms: BTreeMap<(usize, MultiIndex), UltraScalar>,
}

impl HomogPoly {
    pub fn zero(field: FieldSpec, n_in: usize, n_out: usize, degree: u32) -> Self {
        HomogPoly { field, degree, n_in, n_out, terms: BTreeMap::new() }
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn n_in(&self) -> usize {
        self.n_in
    }

    pub fn n_out(&self) -> usize {
        self.n_out
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, &MultiIndex, &UltraScalar)> {
        self.terms.iter().map(|((o, e), c)| (*o, e, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, out: usize, idx: &MultiIndex) -> UltraScalar {
        self.terms.get(&(out, idx.clone())).cloned().unwrap_or_else(|| self.field.zero())
    }

    /// Adds `c·x^idx` to output coordinate `out`.
    pub fn add_term(&mut self, out: usize, idx: MultiIndex, c: UltraScalar) {
        assert_eq!(idx.degree(), self.degree, "term degree");
        assert!(out < self.n_out && idx.nvars() == self.n_in, "term shape");
        if c.is_exact_zero() {
            return;
        }
        let key = (out, idx);
        let sum = match self.terms.get(&key) {
            Some(old) => old + &c,
            None => c,
        };
        if sum.is_exact_zero() {
            self.terms.remove(&key);
        } else {
            self.terms.insert(key, sum);
        }
    }

    /// Majorant `max |c|·w_out[i] / Π w_in[j]^{e_j}` of the operator-style
    /// norm `sup ‖q(x)‖/‖x‖^k`.
    pub fn gauss_norm(&self, w_in: &[AbsValue], w_out: &[AbsValue]) -> AbsValue {
        AbsValue::max_of(self.terms().map(|(o, e, c)| {
            let mut v = c.abs_bound() * w_out[o];
            for (j, &k) in e.exps().iter().enumerate() {
                v = v / w_in[j].powi(k as i64);
            }
            v
        }))
    }

    /// Every coefficient has no certified digit.
    pub fn is_zero_at_precision(&self) -> bool {
        self.terms.values().all(UltraScalar::is_zero_at_precision)
    }

    pub fn eq_at_precision(&self, other: &HomogPoly) -> bool {
        self.sub(other).is_zero_at_precision()
    }

    pub fn add(&self, other: &HomogPoly) -> HomogPoly {
        let mut out = self.clone();
        for (o, e, c) in other.terms() {
            out.add_term(o, e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &HomogPoly) -> HomogPoly {
        self.add(&other.scale(&-self.field.one()))
    }

    pub fn scale(&self, s: &UltraScalar) -> HomogPoly {
        let mut out = Self::zero(self.field, self.n_in, self.n_out, self.degree);
        for (o, e, c) in self.terms() {
            out.add_term(o, e.clone(), c * s);
        }
        out
    }

    pub fn eval(&self, x: &[UltraScalar]) -> Vec<UltraScalar> {
        self.to_jets().iter().map(|j| j.eval(x)).collect()
    }

    /// One jet per output coordinate.
    pub fn to_jets(&self) -> Vec<Jet> {
        let mut jets = vec![Jet::zero(self.field, self.n_in, self.degree); self.n_out];
        for (o, e, c) in self.terms() {
            jets[o].add_term(e.clone(), c.clone());
        }
        jets
    }

    /// Degree-`degree` part of the given jets.
    pub fn from_jets(field: FieldSpec, n_in: usize, jets: &[Jet], degree: u32) -> HomogPoly {
        let mut out = Self::zero(field, n_in, jets.len(), degree);
        for (o, j) in jets.iter().enumerate() {
            for (e, c) in j.terms().iter().filter(|(e, _)| e.degree() == degree) {
                out.add_term(o, e.clone(), c.clone());
            }
        }
        out
    }

    /// `q ∘ A` for `A: K^m → K^{n_in}`.
    pub fn pullback(&self, a: &Matrix) -> HomogPoly {
        assert_eq!(a.rows(), self.n_in, "pullback shape");
        let lin: Vec<Jet> = (0..a.rows()).map(|i| Jet::linear(self.field, self.degree, &a.row(i))).collect();
        let jets = compose_jets(&self.to_jets(), &lin, self.degree);
        HomogPoly::from_jets(self.field, a.cols(), &jets, self.degree)
    }

    /// `B ∘ q` for `B: K^{n_out} → K^m`.
    pub fn pushforward(&self, b: &Matrix) -> HomogPoly {
        assert_eq!(b.cols(), self.n_out, "pushforward shape");
        let mut out = Self::zero(self.field, self.n_in, b.rows(), self.degree);
        for (o, e, c) in self.terms() {
            for i in 0..b.rows() {
                let bij = b.get(i, o);
                if !bij.is_exact_zero() {
                    out.add_term(i, e.clone(), bij * c);
                }
            }
        }
        out
    }

    /// Output coordinates `rows`, renumbered from zero.
    pub fn select_outputs(&self, rows: &[usize]) -> HomogPoly {
        let mut out = Self::zero(self.field, self.n_in, rows.len(), self.degree);
        for (new, &old) in rows.iter().enumerate() {
            for ((o, e), c) in self.terms.range((old, MultiIndex::zero(0))..) {
                if *o != old {
                    break;
                }
                out.add_term(new, e.clone(), c.clone());
            }
        }
        out
    }

    /// Re-embeds outputs: coordinate `i` goes to `rows[i]` of `n_out`.
    pub fn embed_outputs(&self, rows: &[usize], n_out: usize) -> HomogPoly {
        let mut out = Self::zero(self.field, self.n_in, n_out, self.degree);
        for (o, e, c) in self.terms() {
            out.add_term(rows[o], e.clone(), c.clone());
        }
        out
    }
}
