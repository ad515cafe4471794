//! Truncated polynomials in several variables.

use std::collections::{BTreeMap, HashMap};

use super::MultiIndex;
use crate::field::{FieldSpec, UltraScalar};

/// A polynomial in `nvars` variables with every term of degree above
/// `max_deg` discarded. Exact zeros are never stored.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet {
    field: FieldSpec,
    nvars: usize,
    max_deg: u32,
    terms: BTreeMap<MultiIndex, UltraScalar>,
}

impl Jet {
    pub fn zero(field: FieldSpec, nvars: usize, max_deg: u32) -> Self {
        Jet { field, nvars, max_deg, terms: BTreeMap::new() }
    }

    pub fn constant(field: FieldSpec, nvars: usize, max_deg: u32, c: UltraScalar) -> Self {
        let mut j = Self::zero(field, nvars, max_deg);
        j.add_term(MultiIndex::zero(nvars), c);
        j
    }

    pub fn var(field: FieldSpec, nvars: usize, max_deg: u32, v: usize) -> Self {
        let mut j = Self::zero(field, nvars, max_deg);
        j.add_term(MultiIndex::unit(nvars, v), field.one());
        j
    }

    /// `Σ_j c_j x_j`.
    pub fn linear(field: FieldSpec, max_deg: u32, coeffs: &[UltraScalar]) -> Self {
        let n = coeffs.len();
        let mut j = Self::zero(field, n, max_deg);
        for (v, c) in coeffs.iter().enumerate() {
            j.add_term(MultiIndex::unit(n, v), c.clone());
        }
        j
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn max_deg(&self) -> u32 {
        self.max_deg
    }

    pub fn terms(&self) -> &BTreeMap<MultiIndex, UltraScalar> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, idx: &MultiIndex) -> UltraScalar {
        self.terms.get(idx).cloned().unwrap_or_else(|| self.field.zero())
    }

    /// Adds `c·x^idx`; terms above the truncation degree are dropped.
    pub fn add_term(&mut self, idx: MultiIndex, c: UltraScalar) {
        debug_assert_eq!(idx.nvars(), self.nvars);
        if idx.degree() > self.max_deg || c.is_exact_zero() {
            return;
        }
        match self.terms.entry(idx) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get() + &c;
                if s.is_exact_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn with_max_deg(&self, max_deg: u32) -> Jet {
        let mut out = Jet::zero(self.field, self.nvars, max_deg);
        for (k, c) in &self.terms {
            out.add_term(k.clone(), c.clone());
        }
        out
    }

    /// Terms of degree exactly `k`.
    pub fn homogeneous(&self, k: u32) -> Jet {
        let mut out = Jet::zero(self.field, self.nvars, self.max_deg);
        for (i, c) in self.terms.iter().filter(|(i, _)| i.degree() == k) {
            out.terms.insert(i.clone(), c.clone());
        }
        out
    }

    /// Terms with degree in `lo..=hi`.
    pub fn degrees(&self, lo: u32, hi: u32) -> Jet {
        let mut out = Jet::zero(self.field, self.nvars, self.max_deg);
        for (i, c) in self.terms.iter().filter(|(i, _)| (lo..=hi).contains(&i.degree())) {
            out.terms.insert(i.clone(), c.clone());
        }
        out
    }

    pub fn add(&self, other: &Jet) -> Jet {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Jet) -> Jet {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.clone(), -c);
        }
        out
    }

    pub fn scale(&self, s: &UltraScalar) -> Jet {
        let mut out = Jet::zero(self.field, self.nvars, self.max_deg);
        for (k, c) in &self.terms {
            out.add_term(k.clone(), c * s);
        }
        out
    }

    pub fn mul(&self, other: &Jet) -> Jet {
        let max_deg = self.max_deg.min(other.max_deg);
        let mut out = Jet::zero(self.field, self.nvars, max_deg);
        let rhs: Vec<(&MultiIndex, &UltraScalar, u32)> =
            other.terms.iter().map(|(k, c)| (k, c, k.degree())).collect();
        for (k1, c1) in &self.terms {
            let d1 = k1.degree();
            for &(k2, c2, d2) in &rhs {
                if d1 + d2 <= max_deg {
                    out.add_term(k1.add(k2), c1 * c2);
                }
            }
        }
        out
    }

    /// Lowest degree of a stored term.
    pub fn order(&self) -> Option<u32> {
        self.terms.keys().map(MultiIndex::degree).min()
    }

    pub fn eval(&self, x: &[UltraScalar]) -> UltraScalar {
        let mut powers: Vec<Vec<UltraScalar>> = vec![vec![self.field.one()]; self.nvars];
        let mut acc = self.field.zero();
        for (k, c) in &self.terms {
            let mut term = c.clone();
            for (v, &e) in k.exps().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while powers[v].len() <= e as usize {
                    let next = powers[v].last().unwrap() * &x[v];
                    powers[v].push(next);
                }
                term = term * &powers[v][e as usize];
            }
            acc += &term;
        }
        acc
    }

    /// Every coefficient has no certified digit.
    pub fn is_zero_at_precision(&self) -> bool {
        self.terms.values().all(UltraScalar::is_zero_at_precision)
    }
}

/// `g ∘ f` truncated at `max_deg`, where `g` has `f.len()` variables and
/// every `f_j` has no constant term.
pub fn compose_jets(g: &[Jet], f: &[Jet], max_deg: u32) -> Vec<Jet> {
    let field = f.first().map(Jet::field).or_else(|| g.first().map(Jet::field)).expect("nonempty");
    let nvars = f.first().map_or(0, Jet::nvars);
    let f: Vec<Jet> = f.iter().map(|j| j.with_max_deg(max_deg)).collect();
    let mut memo: HashMap<MultiIndex, Jet> = HashMap::new();
    g.iter()
        .map(|gi| {
            let mut out = Jet::zero(field, nvars, max_deg);
            for (e, c) in gi.terms() {
                if e.degree() > max_deg {
                    continue;
                }
                let mono = monomial(e, &f, field, nvars, max_deg, &mut memo);
                for (k, m) in &mono.terms {
                    out.add_term(k.clone(), m * c);
                }
            }
            out
        })
        .collect()
}

fn monomial(
    e: &MultiIndex,
    f: &[Jet],
    field: FieldSpec,
    nvars: usize,
    max_deg: u32,
    memo: &mut HashMap<MultiIndex, Jet>,
) -> Jet {
    if let Some(m) = memo.get(e) {
        return m.clone();
    }
    let m = match e.split_last() {
        None => Jet::constant(field, nvars, max_deg, field.one()),
        Some((rest, j)) => monomial(&rest, f, field, nvars, max_deg, memo).mul(&f[j]),
    };
    memo.insert(e.clone(), m.clone());
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_of_x_plus_x2() {
        let f = FieldSpec::padic(5, 20).unwrap();
        let mut inner = Jet::var(f, 1, 3, 0);
        inner.add_term(MultiIndex::new(vec![2]), f.one());
        let mut outer = Jet::zero(f, 1, 3);
        outer.add_term(MultiIndex::new(vec![2]), f.one());
        let h = &compose_jets(&[outer], &[inner], 3)[0];
        assert_eq!(h.coeff(&MultiIndex::new(vec![2])), f.one());
        assert_eq!(h.coeff(&MultiIndex::new(vec![3])), f.int(2));
        assert_eq!(h.terms().len(), 2);
    }

    #[test]
    fn truncated_product() {
        let f = FieldSpec::padic(5, 20).unwrap();
        let x = Jet::var(f, 2, 2, 0);
        let y = Jet::var(f, 2, 2, 1);
        assert!(x.mul(&y).mul(&x).is_zero());
        assert_eq!(x.mul(&y).terms().len(), 1);
    }
}
