//! Finite fields GF(p^m) with a canonical integer encoding of elements.
//!
//! An element is stored as the integer `r_0 + r_1 p + ... + r_{m-1} p^{m-1}`
//! where `r_0 + r_1 t + ...` is its residue modulo the defining polynomial.
//! The encoding doubles as the canonical element order.

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest field order accepted for enumeration work.
pub const SMALL_FIELD_CAP: u64 = 1 << 16;
/// Exclusive upper bound on the prime in large-prime mode.
pub const LARGE_PRIME_CAP: u64 = 1 << 61;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("characteristic {0} is not prime")]
    NonPrimeCharacteristic(u64),
    #[error("field order {p}^{m} exceeds 2^16 (use large-prime mode for m = 1)")]
    DegreeTooLarge { p: u64, m: u32 },
    #[error("large-prime mode needs m = 1 and p < 2^61, got p = {0}")]
    PrimeTooLarge(u64),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("cannot parse field spec {0:?}")]
    BadSpec(String),
}

/// A field element in canonical encoding. Only meaningful together with the
/// [`Field`] it came from.
#[derive(
    Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct Scalar(pub u64);

impl Scalar {
    pub const ZERO: Scalar = Scalar(0);
    pub const ONE: Scalar = Scalar(1);

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

struct Inner {
    p: u64,
    m: u32,
    q: u64,
    /// Monic modulus, low degree first, length m + 1. Empty for prime fields.
    modulus: Vec<u64>,
    /// Discrete log / antilog tables for extension fields.
    log: Vec<u32>,
    exp: Vec<u64>,
}

/// A finite field. Cheap to clone and safe to share between threads.
#[derive(Clone)]
pub struct Field(Arc<Inner>);

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.p == other.0.p && self.0.m == other.0.m && self.0.modulus == other.0.modulus)
    }
}
impl Eq for Field {}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.m == 1 {
            write!(f, "GF({})", self.0.p)
        } else {
            write!(f, "GF({}^{})", self.0.p, self.0.m)
        }
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for sp in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % sp == 0 {
            return n == sp;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    let mulmod = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let powmod = |mut b: u64, mut e: u64| {
        let mut r = 1u64;
        b %= n;
        while e > 0 {
            if e & 1 == 1 {
                r = mulmod(r, b);
            }
            b = mulmod(b, b);
            e >>= 1;
        }
        r
    };
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

// Dense polynomials over GF(p), low degree first.
fn poly_trim(mut a: Vec<u64>) -> Vec<u64> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn poly_rem(mut a: Vec<u64>, b: &[u64], p: u64) -> Vec<u64> {
    let db = b.len() - 1;
    let lead_inv = modpow(b[db], p - 2, p);
    while a.len() > db {
        let c = a.last().copied().unwrap_or(0);
        let shift = a.len() - 1 - db;
        if c != 0 {
            let f = c * lead_inv % p;
            for (i, &bi) in b.iter().enumerate() {
                a[shift + i] = (a[shift + i] + p - f * bi % p) % p;
            }
        }
        a.pop();
        a = poly_trim(a);
    }
    a
}

fn modpow(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = (r as u128 * b as u128 % p as u128) as u64;
        }
        b = (b as u128 * b as u128 % p as u128) as u64;
        e >>= 1;
    }
    r
}

fn digits(mut x: u64, p: u64, m: u32) -> Vec<u64> {
    (0..m)
        .map(|_| {
            let d = x % p;
            x /= p;
            d
        })
        .collect()
}

fn monic_of_index(idx: u64, p: u64, deg: u32) -> Vec<u64> {
    let mut v = digits(idx, p, deg);
    v.push(1);
    v
}

fn is_irreducible(f: &[u64], p: u64) -> bool {
    let m = (f.len() - 1) as u32;
    for d in 1..=m / 2 {
        for idx in 0..p.pow(d) {
            let g = monic_of_index(idx, p, d);
            if poly_rem(f.to_vec(), &g, p).is_empty() {
                return false;
            }
        }
    }
    true
}

impl Field {
    /// GF(p^m) with the lexicographically least monic irreducible modulus.
    pub fn new(p: u64, m: u32) -> Result<Field, FieldError> {
        if m == 0 {
            return Err(FieldError::ZeroDegree);
        }
        if !is_prime(p) {
            return Err(FieldError::NonPrimeCharacteristic(p));
        }
        let q = p
            .checked_pow(m)
            .filter(|&q| q <= SMALL_FIELD_CAP)
            .ok_or(FieldError::DegreeTooLarge { p, m })?;
        if m == 1 {
            return Ok(Field(Arc::new(Inner {
                p,
                m,
                q,
                modulus: Vec::new(),
                log: Vec::new(),
                exp: Vec::new(),
            })));
        }
        let modulus = (0..q)
            .map(|i| monic_of_index(i, p, m))
            .find(|f| is_irreducible(f, p))
            .expect("an irreducible polynomial of every degree exists");
        let (log, exp) = build_tables(p, m, q, &modulus);
        Ok(Field(Arc::new(Inner {
            p,
            m,
            q,
            modulus,
            log,
            exp,
        })))
    }

    pub fn prime(p: u64) -> Result<Field, FieldError> {
        Field::new(p, 1)
    }

    /// Prime field without the enumeration cap, for identity testing.
    pub fn large_prime(p: u64) -> Result<Field, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NonPrimeCharacteristic(p));
        }
        if p >= LARGE_PRIME_CAP {
            return Err(FieldError::PrimeTooLarge(p));
        }
        Ok(Field(Arc::new(Inner {
            p,
            m: 1,
            q: p,
            modulus: Vec::new(),
            log: Vec::new(),
            exp: Vec::new(),
        })))
    }

    /// Parses `p`, `p^m`, or `large:p`.
    pub fn parse_spec(s: &str) -> Result<Field, FieldError> {
        let bad = || FieldError::BadSpec(s.to_string());
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("large:") {
            return Field::large_prime(rest.trim().parse().map_err(|_| bad())?);
        }
        let (p, m) = match s.split_once('^') {
            Some((p, m)) => (
                p.trim().parse().map_err(|_| bad())?,
                m.trim().parse().map_err(|_| bad())?,
            ),
            None => (s.parse().map_err(|_| bad())?, 1),
        };
        Field::new(p, m)
    }

    #[inline]
    pub fn characteristic(&self) -> u64 {
        self.0.p
    }
    #[inline]
    pub fn degree(&self) -> u32 {
        self.0.m
    }
    #[inline]
    pub fn order(&self) -> u64 {
        self.0.q
    }
    /// Modulus coefficients (low degree first, monic), `None` for prime fields.
    pub fn modulus(&self) -> Option<&[u64]> {
        (self.0.m > 1).then_some(&self.0.modulus[..])
    }
    pub fn is_enumerable(&self) -> bool {
        self.0.q <= SMALL_FIELD_CAP
    }
    /// Short spec string as accepted by [`Field::parse_spec`].
    pub fn spec(&self) -> String {
        if self.0.m > 1 {
            format!("{}^{}", self.0.p, self.0.m)
        } else if self.0.q > SMALL_FIELD_CAP {
            format!("large:{}", self.0.p)
        } else {
            self.0.p.to_string()
        }
    }

    pub fn zero(&self) -> Scalar {
        Scalar::ZERO
    }
    pub fn one(&self) -> Scalar {
        Scalar::ONE
    }

    /// Image of an integer in the prime subfield.
    pub fn from_i64(&self, v: i64) -> Scalar {
        let p = self.0.p as i128;
        Scalar((v as i128).rem_euclid(p) as u64)
    }

    /// The element with canonical index `idx` (panics when `idx >= q`).
    pub fn element(&self, idx: u64) -> Scalar {
        assert!(idx < self.0.q, "element index out of range");
        Scalar(idx)
    }

    pub fn elements(&self) -> impl Iterator<Item = Scalar> {
        (0..self.0.q).map(Scalar)
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Scalar {
        Scalar(rng.gen_range(0..self.0.q))
    }

    pub fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> Scalar {
        Scalar(rng.gen_range(1..self.0.q))
    }

    /// Residue coefficients (length m) of an element.
    pub fn residues(&self, a: Scalar) -> Vec<u64> {
        digits(a.0, self.0.p, self.0.m)
    }

    pub fn from_residues(&self, r: &[u64]) -> Scalar {
        let p = self.0.p;
        Scalar(r.iter().rev().fold(0u64, |acc, &d| acc * p + d % p))
    }

    #[inline]
    pub fn add(&self, a: Scalar, b: Scalar) -> Scalar {
        let Inner { p, m, .. } = *self.0;
        if m == 1 {
            let s = a.0 + b.0;
            Scalar(if s >= p { s - p } else { s })
        } else if p == 2 {
            Scalar(a.0 ^ b.0)
        } else {
            let (mut x, mut y, mut out, mut place) = (a.0, b.0, 0u64, 1u64);
            for _ in 0..m {
                out += ((x % p + y % p) % p) * place;
                x /= p;
                y /= p;
                place *= p;
            }
            Scalar(out)
        }
    }

    #[inline]
    pub fn neg(&self, a: Scalar) -> Scalar {
        let Inner { p, m, .. } = *self.0;
        if a.0 == 0 || p == 2 {
            a
        } else if m == 1 {
            Scalar(p - a.0)
        } else {
            let (mut x, mut out, mut place) = (a.0, 0u64, 1u64);
            for _ in 0..m {
                out += ((p - x % p) % p) * place;
                x /= p;
                place *= p;
            }
            Scalar(out)
        }
    }

    #[inline]
    pub fn sub(&self, a: Scalar, b: Scalar) -> Scalar {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Scalar, b: Scalar) -> Scalar {
        let inner = &*self.0;
        if a.0 == 0 || b.0 == 0 {
            return Scalar::ZERO;
        }
        if inner.m == 1 {
            let p = inner.p;
            if p < (1 << 32) {
                Scalar(a.0 * b.0 % p)
            } else {
                Scalar((a.0 as u128 * b.0 as u128 % p as u128) as u64)
            }
        } else {
            let l = inner.log[a.0 as usize] as u64 + inner.log[b.0 as usize] as u64;
            Scalar(inner.exp[(l % (inner.q - 1)) as usize])
        }
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: Scalar) -> Option<Scalar> {
        if a.0 == 0 {
            return None;
        }
        let inner = &*self.0;
        if inner.m == 1 {
            Some(Scalar(modpow(a.0, inner.p - 2, inner.p)))
        } else {
            let l = inner.log[a.0 as usize] as u64;
            Some(Scalar(
                inner.exp[((inner.q - 1 - l) % (inner.q - 1)) as usize],
            ))
        }
    }

    pub fn div(&self, a: Scalar, b: Scalar) -> Option<Scalar> {
        self.inv(b).map(|bi| self.mul(a, bi))
    }

    pub fn pow(&self, a: Scalar, mut e: u64) -> Scalar {
        let mut r = Scalar::ONE;
        let mut b = a;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, b);
            }
            b = self.mul(b, b);
            e >>= 1;
        }
        r
    }

    pub fn sum<I: IntoIterator<Item = Scalar>>(&self, it: I) -> Scalar {
        it.into_iter().fold(Scalar::ZERO, |acc, x| self.add(acc, x))
    }

    /// Canonical text form: the residue for prime fields, `#k` otherwise.
    pub fn format(&self, a: Scalar) -> String {
        if self.0.m == 1 {
            a.0.to_string()
        } else {
            format!("#{}", a.0)
        }
    }

    /// Inverse of [`Field::format`]; plain integers are reduced into the
    /// prime subfield, `#k` names the element with canonical index k.
    pub fn parse_scalar(&self, s: &str) -> Option<Scalar> {
        let s = s.trim();
        if let Some(idx) = s.strip_prefix('#') {
            let v: u64 = idx.parse().ok()?;
            return (v < self.0.q).then_some(Scalar(v));
        }
        let v: i128 = s.parse().ok()?;
        Some(Scalar(v.rem_euclid(self.0.p as i128) as u64))
    }
}

fn build_tables(p: u64, m: u32, q: u64, modulus: &[u64]) -> (Vec<u32>, Vec<u64>) {
    let mulpoly = |a: u64, b: u64| -> u64 {
        let da = digits(a, p, m);
        let db = digits(b, p, m);
        let mut prod = vec![0u64; 2 * m as usize];
        for (i, &x) in da.iter().enumerate() {
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % p;
            }
        }
        let r = poly_rem(poly_trim(prod), modulus, p);
        r.iter().rev().fold(0u64, |acc, &d| acc * p + d)
    };
    for g in 2..q {
        let mut exp = Vec::with_capacity((q - 1) as usize);
        let mut x = 1u64;
        loop {
            exp.push(x);
            x = mulpoly(x, g);
            if x == 1 || exp.len() as u64 > q - 1 {
                break;
            }
        }
        if exp.len() as u64 == q - 1 {
            let mut log = vec![0u32; q as usize];
            for (i, &e) in exp.iter().enumerate() {
                log[e as usize] = i as u32;
            }
            return (log, exp);
        }
    }
    unreachable!("the multiplicative group of a finite field is cyclic")
}
