use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use serde_json::Value;

use super::{compose_jets, HomogPoly, Jet, MultiIndex};
use crate::error::{Error, Result};
use crate::field::{AbsValue, FieldSpec, UltraScalar};
use crate::linalg::{coordinate_norm, Matrix};

/// A polynomial map `Σ_{k≤D} F_k` on the open ball of radius `r` for the
/// weighted max norm `max w_j |x_j|`.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedMap {
    field: FieldSpec,
    n_in: usize,
    n_out: usize,
    degree: u32,
    comps: Vec<HomogPoly>,
    radius: AbsValue,
    weights_in: Vec<AbsValue>,
    weights_out: Vec<AbsValue>,
}

impl TruncatedMap {
    pub fn zero(field: FieldSpec, n_in: usize, n_out: usize, degree: u32, radius: AbsValue) -> Self {
        TruncatedMap {
            field,
            n_in,
            n_out,
            degree,
            comps: (0..=degree).map(|k| HomogPoly::zero(field, n_in, n_out, k)).collect(),
            radius,
            weights_in: vec![AbsValue::ONE; n_in],
            weights_out: vec![AbsValue::ONE; n_out],
        }
    }

    pub fn linear(a: &Matrix, degree: u32, radius: AbsValue) -> Self {
        let mut m = Self::zero(a.field(), a.cols(), a.rows(), degree.max(1), radius);
        for i in 0..a.rows() {
            for j in 0..a.cols() {
                m.comps[1].add_term(i, MultiIndex::unit(a.cols(), j), a.get(i, j).clone());
            }
        }
        m
    }

    /// Builds a map from per-output jets.
    pub fn from_jets(field: FieldSpec, n_in: usize, jets: &[Jet], degree: u32, radius: AbsValue) -> Self {
        let mut m = Self::zero(field, n_in, jets.len(), degree, radius);
        for k in 0..=degree {
            m.comps[k as usize] = HomogPoly::from_jets(field, n_in, jets, k);
        }
        m
    }

    pub fn with_weights(mut self, w_in: Vec<AbsValue>, w_out: Vec<AbsValue>) -> Self {
        assert_eq!((w_in.len(), w_out.len()), (self.n_in, self.n_out), "weight lengths");
        self.weights_in = w_in;
        self.weights_out = w_out;
        self
    }

    pub fn with_radius(mut self, radius: AbsValue) -> Self {
        self.radius = radius;
        self
    }

    /// Same map truncated (or padded) to degree `d`.
    pub fn with_degree(&self, d: u32) -> Self {
        let mut m = self.clone();
        m.comps.truncate(d as usize + 1);
        while m.comps.len() <= d as usize {
            let k = m.comps.len() as u32;
            m.comps.push(HomogPoly::zero(self.field, self.n_in, self.n_out, k));
        }
        m.degree = d;
        m
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn n_in(&self) -> usize {
        self.n_in
    }

    pub fn n_out(&self) -> usize {
        self.n_out
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn radius(&self) -> AbsValue {
        self.radius
    }

    pub fn weights_in(&self) -> &[AbsValue] {
        &self.weights_in
    }

    pub fn weights_out(&self) -> &[AbsValue] {
        &self.weights_out
    }

    pub fn component(&self, k: u32) -> &HomogPoly {
        &self.comps[k as usize]
    }

    pub fn set_component(&mut self, q: HomogPoly) {
        assert!(q.degree() <= self.degree && q.n_in() == self.n_in && q.n_out() == self.n_out);
        let k = q.degree() as usize;
        self.comps[k] = q;
    }

    pub fn add_term(&mut self, out: usize, idx: MultiIndex, c: UltraScalar) {
        let k = idx.degree() as usize;
        if k <= self.degree as usize {
            self.comps[k].add_term(out, idx, c);
        }
    }

    /// Matrix of the degree-one component.
    pub fn linear_part(&self) -> Matrix {
        let mut a = Matrix::zeros(self.field, self.n_out, self.n_in);
        if self.degree >= 1 {
            for (o, e, c) in self.comps[1].terms() {
                let j = e.exps().iter().position(|&x| x == 1).expect("degree one");
                a.set(o, j, c.clone());
            }
        }
        a
    }

    /// The map without its constant and linear parts.
    pub fn tilde(&self) -> TruncatedMap {
        let mut m = self.clone();
        for k in 0..=1.min(self.degree as usize) {
            m.comps[k] = HomogPoly::zero(self.field, self.n_in, self.n_out, k as u32);
        }
        m
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(HomogPoly::is_empty)
    }

    pub fn add(&self, other: &TruncatedMap) -> TruncatedMap {
        assert_eq!((self.n_in, self.n_out), (other.n_in, other.n_out), "map shapes");
        let mut m = self.clone();
        for k in 0..=self.degree.min(other.degree) as usize {
            m.comps[k] = self.comps[k].add(&other.comps[k]);
        }
        m
    }

    pub fn sub(&self, other: &TruncatedMap) -> TruncatedMap {
        assert_eq!((self.n_in, self.n_out), (other.n_in, other.n_out), "map shapes");
        let mut m = self.clone();
        for k in 0..=self.degree.min(other.degree) as usize {
            m.comps[k] = self.comps[k].sub(&other.comps[k]);
        }
        m
    }

    pub fn to_jets(&self) -> Vec<Jet> {
        let mut jets = vec![Jet::zero(self.field, self.n_in, self.degree); self.n_out];
        for q in &self.comps {
            for (o, e, c) in q.terms() {
                jets[o].add_term(e.clone(), c.clone());
            }
        }
        jets
    }

    /// Gauss norm of each homogeneous component, degree `0..=D`.
    pub fn gauss_norms(&self) -> Vec<AbsValue> {
        self.comps.iter().map(|q| q.gauss_norm(&self.weights_in, &self.weights_out)).collect()
    }

    /// Certified upper bound for the input norm of `z`.
    pub fn input_norm(&self, z: &[UltraScalar]) -> AbsValue {
        coordinate_norm(z, &self.weights_in)
    }

    /// `F(z)` for `‖z‖ < r`.
    pub fn evaluate(&self, z: &[UltraScalar]) -> Result<Vec<UltraScalar>> {
        if z.len() != self.n_in {
            return Err(Error::DimensionMismatch(format!("point of length {} for {} inputs", z.len(), self.n_in)));
        }
        if self.input_norm(z) >= self.radius {
            return Err(Error::OutsideRadius);
        }
        Ok(self.eval_unchecked(z))
    }

    /// Polynomial value without the radius check.
    pub fn eval_unchecked(&self, z: &[UltraScalar]) -> Vec<UltraScalar> {
        self.to_jets().iter().map(|j| j.eval(z)).collect()
    }

    /// `G ∘ F` through degree `d`.
    pub fn compose(g: &TruncatedMap, f: &TruncatedMap, d: u32) -> Result<TruncatedMap> {
        if g.n_in != f.n_out {
            return Err(Error::DimensionMismatch("inner output does not match outer input".into()));
        }
        if !f.comps[0].is_empty() {
            return Err(Error::InvalidArgument("inner map must fix the origin".into()));
        }
        let reach = AbsValue::max_of(
            f.gauss_norms().into_iter().enumerate().map(|(k, n)| n * f.radius.powi(k as i64)),
        );
        if reach > g.radius {
            return Err(Error::RadiusViolation(format!(
                "inner map reaches {reach}, outer radius is {}",
                g.radius
            )));
        }
        Ok(Self::compose_formal(g, f, d)
            .with_weights(f.weights_in.clone(), g.weights_out.clone())
            .with_radius(f.radius))
    }

    /// `G ∘ F` through degree `d` with no radius bookkeeping.
    pub fn compose_formal(g: &TruncatedMap, f: &TruncatedMap, d: u32) -> TruncatedMap {
        let jets = compose_jets(&g.to_jets(), &f.to_jets(), d);
        TruncatedMap::from_jets(f.field, f.n_in, &jets, d, f.radius)
    }

    /// `F ∘ A` for a linear `A: K^m → K^{n_in}`.
    pub fn pullback(&self, a: &Matrix) -> TruncatedMap {
        let mut m = Self::zero(self.field, a.cols(), self.n_out, self.degree, self.radius);
        m.weights_out = self.weights_out.clone();
        m.weights_in = vec![AbsValue::ONE; a.cols()];
        for q in &self.comps {
            m.comps[q.degree() as usize] = q.pullback(a);
        }
        m
    }

    /// `B ∘ F` for a linear `B: K^{n_out} → K^m`.
    pub fn pushforward(&self, b: &Matrix) -> TruncatedMap {
        let mut m = Self::zero(self.field, self.n_in, b.rows(), self.degree, self.radius);
        m.weights_in = self.weights_in.clone();
        m.weights_out = vec![AbsValue::ONE; b.rows()];
        for q in &self.comps {
            m.comps[q.degree() as usize] = q.pushforward(b);
        }
        m
    }

    /// `max_{k≥1} gauss(F_k)·s^{k-1}`: a Lipschitz constant on the ball of
    /// radius `s`.
    pub fn lipschitz_bound(&self, s: AbsValue) -> AbsValue {
        AbsValue::max_of(self.gauss_norms().into_iter().enumerate().skip(1).map(|(k, g)| g * s.powi(k as i64 - 1)))
    }

    /// `λ^{-1} F(λx)`: degree `k` scales by `λ^{k-1}`, the radius by `|λ|^{-1}`.
    pub fn rescale_conjugate(&self, lambda: &UltraScalar) -> Result<TruncatedMap> {
        let size = lambda.valuation()?;
        if size.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let mut m = self.clone();
        for q in m.comps.iter_mut() {
            let s = lambda.pow(q.degree() as i64 - 1)?;
            *q = q.scale(&s);
        }
        m.radius = self.radius / size;
        Ok(m)
    }

    /// Series reversion: `G` with `F∘G = id` through degree `d`, valid on the
    /// ball of radius `r/‖A⁻¹‖`.
    pub fn local_inverse(&self, d: u32) -> Result<TruncatedMap> {
        if self.n_in != self.n_out {
            return Err(Error::DimensionMismatch("local inverse of a non-square map".into()));
        }
        if !self.comps[0].is_empty() {
            return Err(Error::InvalidArgument("map must fix the origin".into()));
        }
        let a = self.linear_part();
        let a_inv = a.inverse()?;
        let inv_norm = a_inv.weighted_norm(&self.weights_out, &self.weights_in);
        let tilde = self.tilde();
        let lip = tilde.lipschitz_bound(self.radius);
        if lip * inv_norm >= AbsValue::ONE {
            return Err(Error::DominationViolated(format!(
                "Lip of the nonlinear part {lip} is not below 1/‖A⁻¹‖ = {}",
                inv_norm.recip()
            )));
        }
        let n = self.n_in;
        let tilde_jets = tilde.to_jets();
        let mut g: Vec<Jet> = (0..n).map(|i| Jet::linear(self.field, d, &a_inv.row(i))).collect();
        for k in 2..=d {
            let h = compose_jets(&tilde_jets, &g, k);
            let hk = HomogPoly::from_jets(self.field, n, &h, k).pushforward(&a_inv).scale(&-self.field.one());
            for (o, e, c) in hk.terms() {
                g[o].add_term(e.clone(), c.clone());
            }
        }
        Ok(TruncatedMap::from_jets(self.field, n, &g, d, self.radius / inv_norm)
            .with_weights(self.weights_out.clone(), self.weights_in.clone()))
    }

    /// `W⁻¹ F(W y)`.
    pub fn conjugate(&self, w: &Matrix, w_inv: &Matrix) -> TruncatedMap {
        self.pullback(w).pushforward(w_inv)
    }

    /// Output coordinates `rows` as a map of their own.
    pub fn select_outputs(&self, rows: &[usize]) -> TruncatedMap {
        let mut m = Self::zero(self.field, self.n_in, rows.len(), self.degree, self.radius);
        m.weights_in = self.weights_in.clone();
        m.weights_out = rows.iter().map(|&i| self.weights_out[i]).collect();
        for q in &self.comps {
            m.comps[q.degree() as usize] = q.select_outputs(rows);
        }
        m
    }

    /// Every coefficient through degree `d` has no certified digit.
    pub fn vanishes_through(&self, d: u32) -> bool {
        self.comps.iter().take(d as usize + 1).all(HomogPoly::is_zero_at_precision)
    }

    /// First degree `≤ d` with a certified nonzero coefficient.
    pub fn first_nonvanishing_degree(&self, d: u32) -> Option<u32> {
        self.comps.iter().take(d as usize + 1).find(|q| !q.is_zero_at_precision()).map(HomogPoly::degree)
    }

    /// Parses `{"dim_in","dim_out","radius"?,"degree"?,"terms":[...]}`.
    pub fn from_json(field: FieldSpec, v: &Value) -> Result<TruncatedMap> {
        let get_dim = |k: &str| {
            v.get(k)
                .and_then(Value::as_u64)
                .map(|x| x as usize)
                .ok_or_else(|| Error::Parse(format!("missing or invalid \"{k}\"")))
        };
        let (n_in, n_out) = (get_dim("dim_in")?, get_dim("dim_out")?);
        let radius = match v.get("radius") {
            Some(r) => serde_json::from_value(r.clone()).map_err(|e| Error::Parse(e.to_string()))?,
            None => AbsValue::ONE,
        };
        let terms = parse_terms(field, v.get("terms").unwrap_or(&Value::Array(vec![])), n_in, n_out)?;
        let degree = match v.get("degree") {
            Some(d) => d.as_u64().ok_or_else(|| Error::Parse("invalid \"degree\"".into()))? as u32,
            None => terms.iter().map(|t| t.1.degree()).max().unwrap_or(1).max(1),
        };
        let mut m = TruncatedMap::zero(field, n_in, n_out, degree, radius);
        for (o, e, c) in terms {
            m.add_term(o, e, c);
        }
        Ok(m)
    }
}

/// Parses a list of `{"out": i, "exps": [...], "coeff": scalar}`.
pub fn parse_terms(
    field: FieldSpec,
    v: &Value,
    n_in: usize,
    n_out: usize,
) -> Result<Vec<(usize, MultiIndex, UltraScalar)>> {
    let arr = v.as_array().ok_or_else(|| Error::Parse("\"terms\" must be an array".into()))?;
    arr.iter()
        .map(|t| {
            let out = t
                .get("out")
                .and_then(Value::as_u64)
                .ok_or_else(|| Error::Parse("term without \"out\"".into()))? as usize;
            let exps: Vec<u32> = serde_json::from_value(t.get("exps").cloned().unwrap_or(Value::Null))
                .map_err(|_| Error::Parse("term without valid \"exps\"".into()))?;
            if out >= n_out || exps.len() != n_in {
                return Err(Error::DimensionMismatch(format!("term out={out} exps={exps:?}")));
            }
            let coeff = field.parse_scalar_value(t.get("coeff").unwrap_or(&Value::Null))?;
            Ok((out, MultiIndex::new(exps), coeff))
        })
        .collect()
}

impl Serialize for TruncatedMap {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Term<'a> {
            out: usize,
            exps: &'a [u32],
            coeff: &'a UltraScalar,
        }
        let terms: Vec<Term> = self
            .comps
            .iter()
            .flat_map(|q| q.terms())
            .map(|(out, e, coeff)| Term { out, exps: e.exps(), coeff })
            .collect();
        let mut st = s.serialize_struct("TruncatedMap", 7)?;
        st.serialize_field("dim_in", &self.n_in)?;
        st.serialize_field("dim_out", &self.n_out)?;
        st.serialize_field("degree", &self.degree)?;
        st.serialize_field("radius", &self.radius)?;
        st.serialize_field("weights_in", &self.weights_in)?;
        st.serialize_field("weights_out", &self.weights_out)?;
        st.serialize_field("terms", &terms)?;
        st.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q5() -> FieldSpec {
        FieldSpec::padic(5, 30).unwrap()
    }

    fn x_plus_x2(f: FieldSpec, d: u32) -> TruncatedMap {
        let mut m = TruncatedMap::zero(f, 1, 1, d, AbsValue::ONE);
        m.add_term(0, MultiIndex::new(vec![1]), f.one());
        m.add_term(0, MultiIndex::new(vec![2]), f.one());
        m
    }

    #[test]
    fn evaluate_worked_map() {
        let f = q5();
        let p = f.int(5);
        let mut m = TruncatedMap::zero(f, 2, 2, 2, AbsValue::from_int_exponent(-1));
        m.add_term(0, MultiIndex::new(vec![1, 0]), p.clone());
        m.add_term(0, MultiIndex::new(vec![0, 2]), p.clone());
        m.add_term(1, MultiIndex::new(vec![0, 1]), p.inv().unwrap());
        m.add_term(1, MultiIndex::new(vec![2, 0]), p.clone());
        let v = m.evaluate(&[p.clone(), f.zero()]).unwrap();
        assert_eq!(v, vec![f.int(25), f.int(125)]);
        assert_eq!(m.evaluate(&[f.rational(1, 5).unwrap(), f.zero()]), Err(Error::OutsideRadius));
    }

    #[test]
    fn compose_hand_expansion() {
        let f = q5();
        let mut sq = TruncatedMap::zero(f, 1, 1, 3, AbsValue::from_int_exponent(-5));
        sq.add_term(0, MultiIndex::new(vec![2]), f.one());
        let h = TruncatedMap::compose(&sq, &x_plus_x2(f, 3), 3).unwrap();
        assert_eq!(h.component(2).coeff(0, &MultiIndex::new(vec![2])), f.one());
        assert_eq!(h.component(3).coeff(0, &MultiIndex::new(vec![3])), f.int(2));
    }

    #[test]
    fn compose_checks_radius() {
        let f = q5();
        let mut g = TruncatedMap::zero(f, 1, 1, 2, AbsValue::from_int_exponent(1));
        g.add_term(0, MultiIndex::new(vec![2]), f.one());
        assert!(matches!(TruncatedMap::compose(&g, &x_plus_x2(f, 2), 2), Err(Error::RadiusViolation(_))));
    }

    #[test]
    fn reversion_of_x_plus_x2() {
        let f = q5();
        let m = x_plus_x2(f, 4).with_radius(AbsValue::from_int_exponent(1));
        let g = m.local_inverse(4).unwrap();
        let want = [1, -1, 2, -5];
        for (k, w) in want.iter().enumerate() {
            let e = MultiIndex::new(vec![k as u32 + 1]);
            assert_eq!(g.component(k as u32 + 1).coeff(0, &e), f.int(*w));
        }
        let id = TruncatedMap::compose_formal(&m, &g, 4);
        assert!(id.sub(&TruncatedMap::linear(&Matrix::identity(f, 1), 4, AbsValue::ONE)).vanishes_through(4));
    }

    #[test]
    fn domination_is_required() {
        let f = q5();
        assert!(matches!(x_plus_x2(f, 3).local_inverse(3), Err(Error::DominationViolated(_))));
    }

    #[test]
    fn rescale_scales_by_degree() {
        let f = q5();
        let p = f.int(5);
        let m = x_plus_x2(f, 3);
        let r = m.rescale_conjugate(&p).unwrap();
        assert_eq!(r.component(2).coeff(0, &MultiIndex::new(vec![2])), p);
        assert_eq!(r.component(1), m.component(1));
        assert_eq!(r.radius(), AbsValue::from_int_exponent(-1));
        let back = r.rescale_conjugate(&p.inv().unwrap()).unwrap();
        assert_eq!(back.radius(), m.radius());
        assert!(back.sub(&m).vanishes_through(3));
    }

    #[test]
    fn lipschitz_examples() {
        let f = q5();
        let mut m = TruncatedMap::zero(f, 1, 1, 2, AbsValue::ONE);
        m.add_term(0, MultiIndex::new(vec![2]), f.int(5));
        assert_eq!(m.lipschitz_bound(AbsValue::ONE), AbsValue::from_int_exponent(1));
        assert_eq!(m.lipschitz_bound(AbsValue::from_int_exponent(1)), AbsValue::from_int_exponent(2));
    }

    #[test]
    fn json_roundtrip() {
        let f = q5();
        let m = x_plus_x2(f, 3);
        let v = serde_json::to_value(&m).unwrap();
        let back = TruncatedMap::from_json(f, &v).unwrap();
        assert_eq!(back.radius(), m.radius());
        assert!(back.sub(&m).vanishes_through(3));
    }
}
