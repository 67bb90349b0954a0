//! Exact arithmetic in GF(p^k) and its Frobenius automorphism group.
//!
//! Elements are stored as the packed integer `c_0 + c_1 p + ... + c_{k-1} p^{k-1}`
//! of their polynomial-basis coordinates, so two elements are equal exactly
//! when their coefficient tuples are. All arithmetic goes through precomputed
//! tables owned by [`Field`], which is cheap to clone and safe to share
//! across threads.
//!
//! Default moduli (little-endian coefficient lists, monic):
//!
//! | q | modulus          |
//! |---|------------------|
//! | 2, 3, 5, 7 | `x`     |
//! | 4 | `x^2 + x + 1`    |
//! | 8 | `x^3 + x + 1`    |
//! | 9 | `x^2 + 1`        |
//!
//! Orders outside the table (reachable only by raising the order bound) use
//! the lexicographically first monic irreducible polynomial.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default bound on the field order; every downstream verification is exhaustive.
pub const DEFAULT_MAX_ORDER: u64 = 9;

/// Environment variable overriding [`DEFAULT_MAX_ORDER`].
pub const MAX_ORDER_ENV: &str = "FGLAB_MAX_ORDER";

/// Elements are packed into a byte, so no bound can exceed this.
pub const HARD_MAX_ORDER: u64 = 256;

/// Reads the order bound from `FGLAB_MAX_ORDER`, falling back to the default.
pub fn configured_max_order() -> u64 {
    std::env::var(MAX_ORDER_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<u64>().ok())
        .unwrap_or(DEFAULT_MAX_ORDER)
        .min(HARD_MAX_ORDER)
}

/// An element of a finite field, identified by its packed coefficient tuple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Elem(u8);

impl Elem {
    pub const ZERO: Elem = Elem(0);
    pub const ONE: Elem = Elem(1);

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// The automorphism `t -> t^(p^power)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Automorphism {
    pub frobenius_power: u32,
}

impl Automorphism {
    pub const IDENTITY: Automorphism = Automorphism { frobenius_power: 0 };

    pub fn frobenius(power: u32) -> Self {
        Automorphism { frobenius_power: power }
    }

    pub fn is_identity(self) -> bool {
        self.frobenius_power == 0
    }

    pub fn compose(self, other: Automorphism, degree: u32) -> Automorphism {
        Automorphism::frobenius((self.frobenius_power + other.frobenius_power) % degree)
    }

    pub fn inverse(self, degree: u32) -> Automorphism {
        Automorphism::frobenius((degree - self.frobenius_power % degree) % degree)
    }
}

impl fmt::Display for Automorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.frobenius_power {
            0 => write!(f, "id"),
            1 => write!(f, "frob"),
            j => write!(f, "frob^{j}"),
        }
    }
}

struct Tables {
    p: u32,
    k: u32,
    q: usize,
    modulus: Vec<u32>,
    add: Vec<u8>,
    mul: Vec<u8>,
    neg: Vec<u8>,
    inv: Vec<u8>,
    // frob[j][t] = t^(p^j)
    frob: Vec<Vec<u8>>,
}

/// A validated finite field GF(p^k) together with its arithmetic tables.
#[derive(Clone)]
pub struct Field {
    t: Arc<Tables>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{}, modulus {:?})", self.t.p, self.t.k, self.t.modulus)
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.t, &other.t)
            || (self.t.p == other.t.p && self.t.k == other.t.k && self.t.modulus == other.t.modulus)
    }
}

impl Eq for Field {}

/// Serializable parameters of a field.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldParams {
    pub p: u32,
    pub k: u32,
    pub modulus: Vec<u32>,
}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Built-in modulus for the orders listed in the module docs.
pub fn default_modulus(p: u32, k: u32) -> Option<Vec<u32>> {
    match (p, k) {
        (_, 1) => Some(vec![0, 1]),
        (2, 2) => Some(vec![1, 1, 1]),
        (2, 3) => Some(vec![1, 1, 0, 1]),
        (3, 2) => Some(vec![1, 0, 1]),
        _ => None,
    }
}

/// Builds GF(p^k) under the order bound from the environment.
pub fn make_field(p: u32, k: u32, modulus: Option<&[u32]>) -> Result<Field> {
    make_field_with_bound(p, k, modulus, configured_max_order())
}

pub fn make_field_with_bound(p: u32, k: u32, modulus: Option<&[u32]>, bound: u64) -> Result<Field> {
    if !is_prime(p) {
        return Err(Error::NonPrime(p));
    }
    if k == 0 {
        return Err(Error::ZeroDegree);
    }
    let bound = bound.min(HARD_MAX_ORDER);
    let order = (p as u64).checked_pow(k).unwrap_or(u64::MAX);
    if order > bound {
        return Err(Error::OrderTooLarge { order, bound });
    }
    let modulus = match modulus {
        Some(m) => {
            let m: Vec<u32> = m.to_vec();
            if m.len() != k as usize + 1 || m[k as usize] != 1 || m.iter().any(|&c| c >= p) {
                return Err(Error::BadModulus { expected: k });
            }
            if !poly::is_irreducible(&m, p) {
                return Err(Error::ReducibleModulus { p, modulus: m });
            }
            m
        }
        None => default_modulus(p, k).unwrap_or_else(|| poly::first_irreducible(p, k)),
    };
    Ok(Field { t: Arc::new(build_tables(p, k, modulus)) })
}

fn build_tables(p: u32, k: u32, modulus: Vec<u32>) -> Tables {
    let q = p.pow(k) as usize;
    let coeffs: Vec<Vec<u32>> = (0..q).map(|i| digits(i as u32, p, k)).collect();
    let pack = |c: &[u32]| -> u8 {
        c.iter().rev().fold(0u32, |acc, &d| acc * p + d) as u8
    };
    let mut add = vec![0u8; q * q];
    let mut mul = vec![0u8; q * q];
    for a in 0..q {
        for b in 0..q {
            let s: Vec<u32> = coeffs[a].iter().zip(&coeffs[b]).map(|(x, y)| (x + y) % p).collect();
            add[a * q + b] = pack(&s);
            let prod = poly::mul_mod(&coeffs[a], &coeffs[b], &modulus, p);
            mul[a * q + b] = pack(&prod);
        }
    }
    let neg: Vec<u8> = (0..q)
        .map(|a| pack(&coeffs[a].iter().map(|&c| (p - c) % p).collect::<Vec<_>>()))
        .collect();
    let mut inv = vec![0u8; q];
    for a in 1..q {
        inv[a] = (1..q).find(|&b| mul[a * q + b] == 1).expect("field element without inverse") as u8;
    }
    let mut frob = Vec::with_capacity(k as usize);
    let mut current: Vec<u8> = (0..q).map(|a| a as u8).collect();
    for _ in 0..k {
        frob.push(current.clone());
        // raise to the p-th power
        current = current
            .iter()
            .map(|&a| {
                let mut r = 1u8;
                for _ in 0..p {
                    r = mul[r as usize * q + a as usize];
                }
                r
            })
            .collect();
    }
    Tables { p, k, q, modulus, add, mul, neg, inv, frob }
}

fn digits(mut v: u32, p: u32, k: u32) -> Vec<u32> {
    let mut out = Vec::with_capacity(k as usize);
    for _ in 0..k {
        out.push(v % p);
        v /= p;
    }
    out
}

impl Field {
    #[inline]
    pub fn p(&self) -> u32 {
        self.t.p
    }

    #[inline]
    pub fn k(&self) -> u32 {
        self.t.k
    }

    /// Number of elements q = p^k.
    #[inline]
    pub fn order(&self) -> usize {
        self.t.q
    }

    pub fn modulus(&self) -> &[u32] {
        &self.t.modulus
    }

    pub fn params(&self) -> FieldParams {
        FieldParams { p: self.p(), k: self.k(), modulus: self.t.modulus.clone() }
    }

    /// All elements in packed-index order (zero first, one second).
    pub fn elements(&self) -> impl Iterator<Item = Elem> + Clone {
        (0..self.t.q).map(|i| Elem(i as u8))
    }

    pub fn nonzero_elements(&self) -> impl Iterator<Item = Elem> + Clone {
        (1..self.t.q).map(|i| Elem(i as u8))
    }

    /// Element with the given packed index, if it is in range.
    pub fn elem(&self, index: usize) -> Option<Elem> {
        (index < self.t.q).then_some(Elem(index as u8))
    }

    /// Element from little-endian polynomial-basis coefficients.
    pub fn from_coeffs(&self, coeffs: &[u32]) -> Result<Elem> {
        if coeffs.len() > self.t.k as usize {
            return Err(Error::DimensionMismatch { expected: self.t.k as usize, found: coeffs.len() });
        }
        if let Some(&c) = coeffs.iter().find(|&&c| c >= self.t.p) {
            return Err(Error::Parse { pos: 0, msg: format!("coefficient {c} not below p = {}", self.t.p) });
        }
        let v = coeffs.iter().rev().fold(0u32, |acc, &d| acc * self.t.p + d);
        Ok(Elem(v as u8))
    }

    pub fn coeffs(&self, a: Elem) -> Vec<u32> {
        digits(a.0 as u32, self.t.p, self.t.k)
    }

    /// Image of an integer in the prime subfield.
    pub fn from_int(&self, v: i64) -> Elem {
        Elem(v.rem_euclid(self.t.p as i64) as u8)
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        Elem(self.t.add[a.index() * self.t.q + b.index()])
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        Elem(self.t.neg[a.index()])
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        Elem(self.t.mul[a.index() * self.t.q + b.index()])
    }

    /// `a + b * c`, the inner step of every elimination loop.
    #[inline]
    pub fn mul_add(&self, a: Elem, b: Elem, c: Elem) -> Elem {
        self.add(a, self.mul(b, c))
    }

    pub fn inv(&self, a: Elem) -> Option<Elem> {
        (!a.is_zero()).then(|| Elem(self.t.inv[a.index()]))
    }

    pub fn div(&self, a: Elem, b: Elem) -> Option<Elem> {
        self.inv(b).map(|bi| self.mul(a, bi))
    }

    /// `a^e` with the convention `0^0 = 1`.
    pub fn pow(&self, a: Elem, mut e: u64) -> Elem {
        let mut base = a;
        let mut acc = Elem::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn sum<I: IntoIterator<Item = Elem>>(&self, items: I) -> Elem {
        items.into_iter().fold(Elem::ZERO, |acc, x| self.add(acc, x))
    }

    #[inline]
    pub fn apply(&self, a: Elem, sigma: Automorphism) -> Elem {
        Elem(self.t.frob[sigma.frobenius_power as usize % self.t.k as usize][a.index()])
    }

    pub fn check_automorphism(&self, sigma: Automorphism) -> Result<()> {
        if sigma.frobenius_power < self.t.k {
            Ok(())
        } else {
            Err(Error::BadAutomorphism { power: sigma.frobenius_power, degree: self.t.k })
        }
    }

    /// The cyclic group Aut(GF(p^k)), identity first.
    pub fn automorphisms(&self) -> Vec<Automorphism> {
        (0..self.t.k).map(Automorphism::frobenius).collect()
    }

    /// Coefficient list used in JSON output.
    pub fn to_json(&self, a: Elem) -> serde_json::Value {
        serde_json::Value::from(self.coeffs(a))
    }
}

mod poly {
    //! Dense polynomials over GF(p), little-endian, used only to build tables.

    fn trim(v: &mut Vec<u32>) {
        while v.len() > 1 && *v.last().unwrap() == 0 {
            v.pop();
        }
    }

    fn inv_mod_p(a: u32, p: u32) -> u32 {
        (1..p).find(|&b| a * b % p == 1).expect("zero has no inverse")
    }

    pub fn rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
        let mut r: Vec<u32> = a.to_vec();
        trim(&mut r);
        let dm = m.len() - 1;
        let lead_inv = inv_mod_p(m[dm], p);
        while r.len() > dm && !(r.len() == 1 && r[0] == 0) {
            let dr = r.len() - 1;
            let c = r[dr] * lead_inv % p;
            if c != 0 {
                for (i, &mi) in m.iter().enumerate() {
                    let idx = dr - dm + i;
                    r[idx] = (r[idx] + p * p - c * mi % p) % p;
                }
            }
            r.pop();
            trim(&mut r);
        }
        r
    }

    pub fn mul_mod(a: &[u32], b: &[u32], m: &[u32], p: u32) -> Vec<u32> {
        let mut prod = vec![0u32; a.len() + b.len()];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % p;
            }
        }
        let mut r = rem(&prod, m, p);
        r.resize(m.len() - 1, 0);
        r
    }

    /// Exhaustive search for a monic factor of degree at most half the degree.
    pub fn is_irreducible(m: &[u32], p: u32) -> bool {
        let k = m.len() - 1;
        for d in 1..=k / 2 {
            let count = p.pow(d as u32);
            for low in 0..count {
                let mut f: Vec<u32> = (0..d)
                    .scan(low, |v, _| {
                        let c = *v % p;
                        *v /= p;
                        Some(c)
                    })
                    .collect();
                f.push(1);
                let r = rem(m, &f, p);
                if r.iter().all(|&c| c == 0) {
                    return false;
                }
            }
        }
        true
    }

    pub fn first_irreducible(p: u32, k: u32) -> Vec<u32> {
        let count = p.pow(k);
        for low in 0..count {
            let mut f: Vec<u32> = super::digits(low, p, k);
            f.push(1);
            if is_irreducible(&f, p) {
                return f;
            }
        }
        unreachable!("irreducible polynomials exist in every degree")
    }
}
