//! Residue arithmetic for scalar mantissas.
//!
//! A mantissa is an element of `Z/p^k` (p-adic kind) or `F_p[t]/t^k`
//! (formal Laurent kind). The caller always passes the relative length `k`;
//! values are kept fully reduced so derived equality is bit-exact.

use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::FieldKind;

thread_local! {
    static POW_CACHE: RefCell<HashMap<(u32, u64), Rc<BigUint>>> = RefCell::new(HashMap::new());
}

/// `p^k` as a big integer, memoized per thread.
pub(crate) fn p_pow(p: u32, k: u64) -> Rc<BigUint> {
    POW_CACHE.with(|cache| {
        cache
            .borrow_mut()
            .entry((p, k))
            .or_insert_with(|| Rc::new(BigUint::from(p).pow(k as u32)))
            .clone()
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) enum Digits {
    Int(BigUint),
    /// Coefficients of `t^0, t^1, ...`, each in `0..p`, no trailing zeros.
    Poly(Vec<u32>),
}

impl Digits {
    pub(crate) fn zero(kind: FieldKind) -> Self {
        match kind {
            FieldKind::PAdic => Digits::Int(BigUint::zero()),
            FieldKind::FormalLaurent => Digits::Poly(Vec::new()),
        }
    }

    pub(crate) fn one(kind: FieldKind) -> Self {
        match kind {
            FieldKind::PAdic => Digits::Int(BigUint::one()),
            FieldKind::FormalLaurent => Digits::Poly(vec![1]),
        }
    }

    /// Reduces an integer into the residue ring. For the Laurent kind an
    /// integer maps to its class in `F_p`.
    pub(crate) fn from_bigint(kind: FieldKind, p: u32, n: &BigInt, k: u64) -> Self {
        match kind {
            FieldKind::PAdic => {
                let m = BigInt::from_biguint(Sign::Plus, (*p_pow(p, k)).clone());
                let r = n.mod_floor(&m);
                Digits::Int(r.to_biguint().expect("mod_floor is non-negative"))
            }
            FieldKind::FormalLaurent => {
                let r = n.mod_floor(&BigInt::from(p)).to_u32().unwrap_or(0);
                let mut d = Digits::Poly(if r == 0 { vec![] } else { vec![r] });
                d.reduce(p, k);
                d
            }
        }
    }

    /// Builds a mantissa from base-p digits (least significant first).
    pub(crate) fn from_digit_slice(kind: FieldKind, p: u32, digits: &[u32]) -> Self {
        match kind {
            FieldKind::PAdic => {
                let mut acc = BigUint::zero();
                for &d in digits.iter().rev() {
                    acc = acc * p + d;
                }
                Digits::Int(acc)
            }
            FieldKind::FormalLaurent => {
                let mut c = digits.to_vec();
                trim(&mut c);
                Digits::Poly(c)
            }
        }
    }

    /// Exactly `len` base-p digits, least significant first.
    pub(crate) fn to_digit_vec(&self, p: u32, len: u64) -> Vec<u32> {
        let len = len as usize;
        match self {
            Digits::Int(n) => {
                let mut out = n.to_radix_le(p);
                if n.is_zero() {
                    out.clear();
                }
                let mut out: Vec<u32> = out.into_iter().map(u32::from).collect();
                out.resize(len, 0);
                out
            }
            Digits::Poly(c) => {
                let mut out = c.clone();
                out.resize(len, 0);
                out
            }
        }
    }

    pub(crate) fn reduce(&mut self, p: u32, k: u64) {
        match self {
            Digits::Int(n) => {
                let m = p_pow(p, k);
                if *n >= *m {
                    *n = &*n % &*m;
                }
            }
            Digits::Poly(c) => {
                c.truncate(k as usize);
                trim(c);
            }
        }
    }

    pub(crate) fn add(&self, other: &Self, p: u32, k: u64) -> Self {
        let mut out = match (self, other) {
            (Digits::Int(a), Digits::Int(b)) => Digits::Int(a + b),
            (Digits::Poly(a), Digits::Poly(b)) => {
                let n = a.len().max(b.len());
                let mut c = vec![0u32; n];
                for (i, slot) in c.iter_mut().enumerate() {
                    let x = a.get(i).copied().unwrap_or(0) + b.get(i).copied().unwrap_or(0);
                    *slot = x % p;
                }
                Digits::Poly(c)
            }
            _ => unreachable!("mixed mantissa kinds"),
        };
        out.reduce(p, k);
        out
    }

    pub(crate) fn neg(&self, p: u32, k: u64) -> Self {
        match self {
            Digits::Int(a) => {
                if a.is_zero() {
                    return self.clone();
                }
                let m = p_pow(p, k);
                let mut r = a.clone();
                if r >= *m {
                    r = &r % &*m;
                }
                Digits::Int(&*m - r)
            }
            Digits::Poly(a) => {
                let mut c: Vec<u32> = a.iter().map(|&x| (p - x) % p).collect();
                c.truncate(k as usize);
                trim(&mut c);
                Digits::Poly(c)
            }
        }
    }

    pub(crate) fn mul(&self, other: &Self, p: u32, k: u64) -> Self {
        match (self, other) {
            (Digits::Int(a), Digits::Int(b)) => {
                let mut out = Digits::Int(a * b);
                out.reduce(p, k);
                out
            }
            (Digits::Poly(a), Digits::Poly(b)) => {
                let k = k as usize;
                let n = (a.len() + b.len()).saturating_sub(1).min(k);
                let mut acc = vec![0u64; n];
                for (i, &x) in a.iter().enumerate() {
                    if x == 0 || i >= n {
                        continue;
                    }
                    for (j, &y) in b.iter().enumerate() {
                        if i + j >= n {
                            break;
                        }
                        acc[i + j] = (acc[i + j] + x as u64 * y as u64) % p as u64;
                    }
                }
                let mut c: Vec<u32> = acc.into_iter().map(|x| x as u32).collect();
                trim(&mut c);
                Digits::Poly(c)
            }
            _ => unreachable!("mixed mantissa kinds"),
        }
    }

    /// Multiplies by `p^s` (resp. `t^s`) modulo `p^k`.
    pub(crate) fn shift_up(&self, p: u32, s: u64, k: u64) -> Self {
        if s == 0 {
            let mut out = self.clone();
            out.reduce(p, k);
            return out;
        }
        match self {
            Digits::Int(a) => {
                let mut out = Digits::Int(a * &*p_pow(p, s));
                out.reduce(p, k);
                out
            }
            Digits::Poly(a) => {
                if a.is_empty() {
                    return self.clone();
                }
                let mut c = vec![0u32; s as usize];
                c.extend_from_slice(a);
                c.truncate(k as usize);
                trim(&mut c);
                Digits::Poly(c)
            }
        }
    }

    /// Number of trailing zero digits; `None` for the zero residue.
    pub(crate) fn valuation(&self, p: u32) -> Option<u64> {
        match self {
            Digits::Int(a) => {
                if a.is_zero() {
                    return None;
                }
                let pb = BigUint::from(p);
                let mut v = 0u64;
                let mut x = a.clone();
                loop {
                    let (q, r) = x.div_rem(&pb);
                    if !r.is_zero() {
                        return Some(v);
                    }
                    x = q;
                    v += 1;
                }
            }
            Digits::Poly(c) => c.iter().position(|&x| x != 0).map(|i| i as u64),
        }
    }

    /// Exact division by `p^s`; the caller guarantees divisibility.
    pub(crate) fn shift_down(&self, p: u32, s: u64) -> Self {
        if s == 0 {
            return self.clone();
        }
        match self {
            Digits::Int(a) => Digits::Int(a / &*p_pow(p, s)),
            Digits::Poly(c) => Digits::Poly(c[(s as usize).min(c.len())..].to_vec()),
        }
    }

    /// Inverse of a unit residue modulo `p^k`.
    pub(crate) fn inv_unit(&self, p: u32, k: u64) -> Self {
        match self {
            Digits::Int(a) => {
                let m = p_pow(p, k);
                if k == 0 {
                    return Digits::Int(BigUint::zero());
                }
                Digits::Int(a.modinv(&m).expect("unit residue is invertible"))
            }
            Digits::Poly(c) => {
                let k = k as usize;
                let f0 = c[0];
                let f0_inv = inv_mod_prime(f0, p);
                let mut g = vec![0u32; k];
                if k > 0 {
                    g[0] = f0_inv;
                }
                for n in 1..k {
                    let mut s = 0u64;
                    for i in 1..=n.min(c.len() - 1) {
                        s = (s + c[i] as u64 * g[n - i] as u64) % p as u64;
                    }
                    g[n] = ((p as u64 - s) % p as u64 * f0_inv as u64 % p as u64) as u32;
                }
                trim(&mut g);
                Digits::Poly(g)
            }
        }
    }

}

fn trim(c: &mut Vec<u32>) {
    while c.last() == Some(&0) {
        c.pop();
    }
}

fn inv_mod_prime(x: u32, p: u32) -> u32 {
    let e = BigInt::from(x).extended_gcd(&BigInt::from(p));
    e.x.mod_floor(&BigInt::from(p)).to_u32().expect("residue fits")
}
