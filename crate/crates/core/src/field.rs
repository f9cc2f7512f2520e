//! Exact arithmetic for finite fields GF(p) and GF(p^e).
//!
//! Elements are integer codes in `[0, q)`. For prime fields the code is the
//! residue itself; for extensions the base-p digits of the code are the
//! coefficients of a polynomial c_0 + c_1 x + ... + c_{e-1} x^{e-1}
//! (little-endian), reduced modulo a fixed irreducible monic modulus.
//!
//! Prime fields use 128-bit-widened modular arithmetic and accept any 64-bit
//! prime. Extension fields are table-backed (discrete-log multiplication) and
//! are limited to q <= 2^16.
//!
//! The extension modulus is chosen deterministically: the lexicographically
//! smallest monic irreducible polynomial of degree e, comparing coefficient
//! tuples (c_{e-1}, ..., c_0). This is not the Conway polynomial; it needs no
//! external tables and repeated constructions always agree.
//!
//! ```
//! use mortal_core::field::Field;
//!
//! let f = Field::new(7, 1).unwrap();
//! let a = f.elem(3).unwrap();
//! let b = f.elem(5).unwrap();
//! assert_eq!(f.mul(a, b).code(), 1); // 15 mod 7
//! ```

use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::Arc;

use crate::primes;

/// Largest permitted order of a table-backed extension field.
pub const MAX_EXTENSION_ORDER: u64 = 1 << 16;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum FieldError {
    #[error("characteristic {0} is not prime")]
    CompositeCharacteristic(u64),
    #[error("extension degree must be >= 1")]
    InvalidDegree,
    #[error("field order {q} exceeds the supported limit {limit}")]
    OrderTooLarge { q: u128, limit: u64 },
    #[error("division or inversion by zero")]
    DivisionByZero,
    #[error("element code {code} out of range for field of order {q}")]
    ElementOutOfRange { code: u64, q: u64 },
    #[error("modulus is not a monic irreducible polynomial of degree {expected}")]
    BadModulus { expected: u32 },
    #[error("{q} is not a prime power")]
    NotPrimePower { q: u64 },
    #[error("field designation mismatch: q = {q} but p^e = {pe}")]
    DesignationMismatch { q: u64, pe: u64 },
}

/// Value-level description of a finite field: order, characteristic, degree,
/// and (for extensions) the irreducible modulus as a little-endian
/// coefficient list `[c_0, ..., c_{e-1}, 1]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldSpec {
    pub p: u64,
    pub e: u32,
    pub q: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub modulus: Option<Vec<u64>>,
}

/// An element, stored as its integer code in `[0, q)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Elem(pub(crate) u64);

impl Elem {
    #[inline]
    pub fn code(self) -> u64 {
        self.0
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

enum Repr {
    Prime,
    // Discrete-log tables over a fixed multiplicative generator:
    // exp[i] = g^i for i in [0, q-1), log[exp[i]] = i, log[0] unused.
    Ext { log: Vec<u32>, exp: Vec<u32> },
}

/// A finite field with whatever precomputation its arithmetic needs.
/// Immutable once built; share via `Arc`.
pub struct Field {
    spec: FieldSpec,
    repr: Repr,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field").field("spec", &self.spec).finish()
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec
    }
}
impl Eq for Field {}

impl Field {
    /// Builds GF(p^e). For e > 1 the modulus is the lexicographically smallest
    /// irreducible monic polynomial of degree e over GF(p).
    pub fn new(p: u64, e: u32) -> Result<Field, FieldError> {
        if e < 1 {
            return Err(FieldError::InvalidDegree);
        }
        if !primes::is_prime(p) {
            return Err(FieldError::CompositeCharacteristic(p));
        }
        if e == 1 {
            return Ok(Field {
                spec: FieldSpec { p, e: 1, q: p, modulus: None },
                repr: Repr::Prime,
            });
        }
        let q128 = (p as u128).checked_pow(e).unwrap_or(u128::MAX);
        if q128 > MAX_EXTENSION_ORDER as u128 {
            return Err(FieldError::OrderTooLarge { q: q128, limit: MAX_EXTENSION_ORDER });
        }
        let q = q128 as u64;
        let modulus = smallest_irreducible(p, e);
        let repr = build_tables(p, e, q, &modulus);
        Ok(Field { spec: FieldSpec { p, e, q, modulus: Some(modulus) }, repr })
    }

    /// Rebuilds a field from its spec, re-validating everything (including
    /// irreducibility of a supplied modulus).
    pub fn from_spec(spec: &FieldSpec) -> Result<Field, FieldError> {
        if spec.e == 1 {
            if spec.modulus.is_some() || spec.q != spec.p {
                return Err(FieldError::DesignationMismatch {
                    q: spec.q,
                    pe: spec.p,
                });
            }
            return Field::new(spec.p, 1);
        }
        let pe = (spec.p as u128).checked_pow(spec.e).unwrap_or(u128::MAX);
        if pe != spec.q as u128 {
            return Err(FieldError::DesignationMismatch { q: spec.q, pe: pe.min(u64::MAX as u128) as u64 });
        }
        let built = Field::new(spec.p, spec.e)?;
        match &spec.modulus {
            None => Ok(built),
            Some(m) => {
                if !is_valid_modulus(spec.p, spec.e, m) {
                    return Err(FieldError::BadModulus { expected: spec.e });
                }
                if Some(m) == built.spec.modulus.as_ref() {
                    Ok(built)
                } else {
                    // A different (but valid) irreducible modulus: honor it.
                    let repr = build_tables(spec.p, spec.e, spec.q, m);
                    Ok(Field { spec: spec.clone(), repr })
                }
            }
        }
    }

    /// Resolves a field from any of `q`, `p`, `e` (file/flag designation).
    pub fn from_designation(
        q: Option<u64>,
        p: Option<u64>,
        e: Option<u32>,
    ) -> Result<Field, FieldError> {
        match (q, p, e) {
            (Some(q), p, e) => {
                let (fp, fe) =
                    primes::prime_power(q).ok_or(FieldError::NotPrimePower { q })?;
                if let Some(p) = p {
                    if p != fp {
                        return Err(FieldError::DesignationMismatch { q, pe: p.pow(e.unwrap_or(1)) });
                    }
                }
                if let Some(e) = e {
                    if e != fe {
                        return Err(FieldError::DesignationMismatch { q, pe: fp.saturating_pow(e) });
                    }
                }
                Field::new(fp, fe)
            }
            (None, Some(p), e) => Field::new(p, e.unwrap_or(1)),
            (None, None, _) => Err(FieldError::NotPrimePower { q: 0 }),
        }
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.spec
    }
    #[inline]
    pub fn p(&self) -> u64 {
        self.spec.p
    }
    #[inline]
    pub fn e(&self) -> u32 {
        self.spec.e
    }
    #[inline]
    pub fn q(&self) -> u64 {
        self.spec.q
    }

    #[inline]
    pub fn zero(&self) -> Elem {
        Elem(0)
    }
    #[inline]
    pub fn one(&self) -> Elem {
        Elem(1)
    }

    /// Validates a code into an element.
    pub fn elem(&self, code: u64) -> Result<Elem, FieldError> {
        if code < self.spec.q {
            Ok(Elem(code))
        } else {
            Err(FieldError::ElementOutOfRange { code, q: self.spec.q })
        }
    }

    /// All q elements, by ascending code.
    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        (0..self.spec.q).map(Elem)
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        debug_assert!(a.0 < self.spec.q && b.0 < self.spec.q);
        match &self.repr {
            Repr::Prime => {
                let s = a.0 as u128 + b.0 as u128;
                let p = self.spec.p as u128;
                Elem(if s >= p { (s - p) as u64 } else { s as u64 })
            }
            Repr::Ext { .. } => {
                if self.spec.p == 2 {
                    Elem(a.0 ^ b.0)
                } else {
                    Elem(digitwise(a.0, b.0, self.spec.p, self.spec.e, |x, y, p| (x + y) % p))
                }
            }
        }
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        debug_assert!(a.0 < self.spec.q);
        match &self.repr {
            Repr::Prime => Elem(if a.0 == 0 { 0 } else { self.spec.p - a.0 }),
            Repr::Ext { .. } => {
                if self.spec.p == 2 {
                    a
                } else {
                    Elem(digitwise(a.0, 0, self.spec.p, self.spec.e, |x, _, p| (p - x) % p))
                }
            }
        }
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        debug_assert!(a.0 < self.spec.q && b.0 < self.spec.q);
        match &self.repr {
            Repr::Prime => Elem(primes::mul_mod(a.0, b.0, self.spec.p)),
            Repr::Ext { log, exp } => {
                if a.0 == 0 || b.0 == 0 {
                    return Elem(0);
                }
                let n = self.spec.q - 1;
                let s = (log[a.0 as usize] as u64 + log[b.0 as usize] as u64) % n;
                Elem(exp[s as usize] as u64)
            }
        }
    }

    /// Multiplicative inverse; errors on zero.
    pub fn inv(&self, a: Elem) -> Result<Elem, FieldError> {
        if a.0 == 0 {
            return Err(FieldError::DivisionByZero);
        }
        match &self.repr {
            Repr::Prime => Ok(Elem(primes::pow_mod(a.0, self.spec.p - 2, self.spec.p))),
            Repr::Ext { log, exp } => {
                let n = self.spec.q - 1;
                let s = (n - log[a.0 as usize] as u64) % n;
                Ok(Elem(exp[s as usize] as u64))
            }
        }
    }

    pub fn div(&self, a: Elem, b: Elem) -> Result<Elem, FieldError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: Elem, k: u64) -> Elem {
        if a.0 == 0 {
            return if k == 0 { Elem(1) } else { Elem(0) };
        }
        match &self.repr {
            Repr::Prime => Elem(primes::pow_mod(a.0, k, self.spec.p)),
            Repr::Ext { log, exp } => {
                let n = self.spec.q - 1;
                let s = (log[a.0 as usize] as u128 * (k % n) as u128 % n as u128) as u64;
                Elem(exp[s as usize] as u64)
            }
        }
    }

    /// Shared handle constructor, the usual way the rest of the crate holds a
    /// field.
    pub fn shared(p: u64, e: u32) -> Result<Arc<Field>, FieldError> {
        Field::new(p, e).map(Arc::new)
    }
}

#[inline]
fn digitwise(a: u64, b: u64, p: u64, e: u32, op: fn(u64, u64, u64) -> u64) -> u64 {
    let (mut a, mut b) = (a, b);
    let mut out = 0u64;
    let mut place = 1u64;
    for _ in 0..e {
        out += op(a % p, b % p, p) * place;
        place *= p;
        a /= p;
        b /= p;
    }
    out
}

// --- polynomial helpers on little-endian coefficient slices over GF(p) ---

fn poly_rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    // m monic of degree d; returns a mod m, length d.
    let d = m.len() - 1;
    let mut r: Vec<u64> = a.to_vec();
    while r.len() > d {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - d;
        if lead != 0 {
            for (i, &mc) in m.iter().enumerate() {
                let sub = primes::mul_mod(lead, mc, p);
                r[shift + i] = (r[shift + i] + p - sub) % p;
            }
        }
        r.pop();
    }
    r.resize(d, 0);
    r
}

fn poly_mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + primes::mul_mod(x, y, p)) % p;
        }
    }
    out
}

fn is_zero_poly(a: &[u64]) -> bool {
    a.iter().all(|&c| c == 0)
}

/// Irreducibility by exhaustive trial division: no monic divisor of degree
/// 1..=e/2.
fn poly_is_irreducible(f: &[u64], p: u64) -> bool {
    let e = (f.len() - 1) as u32;
    for d in 1..=(e / 2) {
        // All monic polynomials of degree d: low coefficients from a counter.
        let count = (p as u128).pow(d) as u64;
        for t in 0..count {
            let mut g: Vec<u64> = Vec::with_capacity(d as usize + 1);
            let mut tt = t;
            for _ in 0..d {
                g.push(tt % p);
                tt /= p;
            }
            g.push(1);
            if is_zero_poly(&poly_rem(f, &g, p)) {
                return false;
            }
        }
    }
    true
}

/// The lexicographically smallest monic irreducible of degree e over GF(p)
/// (tuples `(c_{e-1}, ..., c_0)` compared after the leading 1). Irreducibles
/// of every degree exist, so the scan always terminates.
fn smallest_irreducible(p: u64, e: u32) -> Vec<u64> {
    let count = (p as u128).pow(e) as u64;
    for t in 0..count {
        // Digit i of t is coefficient c_i; ascending t is ascending
        // (c_{e-1}, ..., c_0) lexicographic order.
        let mut f: Vec<u64> = Vec::with_capacity(e as usize + 1);
        let mut tt = t;
        for _ in 0..e {
            f.push(tt % p);
            tt /= p;
        }
        f.push(1);
        if poly_is_irreducible(&f, p) {
            return f;
        }
    }
    unreachable!("irreducible polynomial of degree {e} over GF({p}) exists");
}

fn is_valid_modulus(p: u64, e: u32, m: &[u64]) -> bool {
    m.len() == e as usize + 1
        && *m.last().unwrap() == 1
        && m.iter().all(|&c| c < p)
        && poly_is_irreducible(m, p)
}

fn code_to_poly(code: u64, p: u64, e: u32) -> Vec<u64> {
    let mut out = Vec::with_capacity(e as usize);
    let mut c = code;
    for _ in 0..e {
        out.push(c % p);
        c /= p;
    }
    out
}

fn poly_to_code(poly: &[u64], p: u64) -> u64 {
    let mut out = 0u64;
    for &c in poly.iter().rev() {
        out = out * p + c;
    }
    out
}

fn ext_mul_raw(a: u64, b: u64, p: u64, e: u32, modulus: &[u64]) -> u64 {
    if a == 0 || b == 0 {
        return 0;
    }
    let prod = poly_mul(&code_to_poly(a, p, e), &code_to_poly(b, p, e), p);
    poly_to_code(&poly_rem(&prod, modulus, p), p)
}

fn build_tables(p: u64, e: u32, q: u64, modulus: &[u64]) -> Repr {
    // Find a generator of the multiplicative group by checking the order
    // criterion against the prime factorization of q - 1.
    let n = q - 1;
    let prime_factors: Vec<u64> = primes::factor(n).into_iter().map(|(f, _)| f).collect();
    let pow_raw = |base: u64, mut k: u64| -> u64 {
        let mut acc = 1u64;
        let mut b = base;
        while k != 0 {
            if k & 1 == 1 {
                acc = ext_mul_raw(acc, b, p, e, modulus);
            }
            b = ext_mul_raw(b, b, p, e, modulus);
            k >>= 1;
        }
        acc
    };
    let mut generator = 0u64;
    for g in 2..q {
        if prime_factors.iter().all(|&f| pow_raw(g, n / f) != 1) {
            generator = g;
            break;
        }
    }
    assert!(generator != 0, "multiplicative group of GF({q}) is cyclic");

    let mut exp = vec![0u32; n as usize];
    let mut log = vec![0u32; q as usize];
    let mut acc = 1u64;
    for i in 0..n {
        exp[i as usize] = acc as u32;
        log[acc as usize] = i as u32;
        acc = ext_mul_raw(acc, generator, p, e, modulus);
    }
    debug_assert_eq!(acc, 1, "generator order must be q - 1");
    Repr::Ext { log, exp }
}
