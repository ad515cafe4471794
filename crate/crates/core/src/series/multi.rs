use serde::{Deserialize, Serialize};

/// Exponent vector of a monomial `x^e = Π x_j^{e_j}`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(exps: Vec<u32>) -> Self {
        MultiIndex(exps)
    }

    pub fn zero(nvars: usize) -> Self {
        MultiIndex(vec![0; nvars])
    }

    pub fn unit(nvars: usize, j: usize) -> Self {
        let mut e = vec![0; nvars];
        e[j] = 1;
        MultiIndex(e)
    }

    pub fn exps(&self) -> &[u32] {
        &self.0
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Removes one factor `x_j` for the last variable present.
    pub fn split_last(&self) -> Option<(MultiIndex, usize)> {
        let j = self.0.iter().rposition(|&e| e > 0)?;
        let mut rest = self.0.clone();
        rest[j] -= 1;
        Some((MultiIndex(rest), j))
    }

    /// All exponent vectors of total degree `k` in `nvars` variables.
    pub fn of_degree(nvars: usize, k: u32) -> Vec<MultiIndex> {
        fn go(prefix: &mut Vec<u32>, left: u32, slots: usize, out: &mut Vec<MultiIndex>) {
            if slots == 1 {
                prefix.push(left);
                out.push(MultiIndex(prefix.clone()));
                prefix.pop();
                return;
            }
            for e in (0..=left).rev() {
                prefix.push(e);
                go(prefix, left - e, slots - 1, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        if nvars == 0 {
            if k == 0 {
                out.push(MultiIndex(Vec::new()));
            }
            return out;
        }
        go(&mut Vec::with_capacity(nvars), k, nvars, &mut out);
        out
    }
}
