//! Sparse multivariate polynomials over the integers or a finite field.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::field::{Field, Scalar};

/// Coefficient ring of a [`SparsePoly`].
pub trait Ring: Clone + Send + Sync {
    type Elem: Clone + PartialEq + fmt::Debug + Send + Sync;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn from_int(&self, v: &BigInt) -> Self::Elem;
}

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq)]
pub struct Integers;

impl Ring for Integers {
    type Elem = BigInt;
    fn zero(&self) -> BigInt {
        BigInt::zero()
    }
    fn one(&self) -> BigInt {
        BigInt::one()
    }
    fn add(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a + b
    }
    fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a * b
    }
    fn neg(&self, a: &BigInt) -> BigInt {
        -a
    }
    fn is_zero(&self, a: &BigInt) -> bool {
        a.is_zero()
    }
    fn from_int(&self, v: &BigInt) -> BigInt {
        v.clone()
    }
}

impl Ring for Field {
    type Elem = Scalar;
    fn zero(&self) -> Scalar {
        Scalar::ZERO
    }
    fn one(&self) -> Scalar {
        Scalar::ONE
    }
    fn add(&self, a: &Scalar, b: &Scalar) -> Scalar {
        Field::add(self, *a, *b)
    }
    fn mul(&self, a: &Scalar, b: &Scalar) -> Scalar {
        Field::mul(self, *a, *b)
    }
    fn neg(&self, a: &Scalar) -> Scalar {
        Field::neg(self, *a)
    }
    fn is_zero(&self, a: &Scalar) -> bool {
        a.is_zero()
    }
    fn from_int(&self, v: &BigInt) -> Scalar {
        let p = BigInt::from(self.characteristic());
        let r = ((v % &p) + &p) % &p;
        self.from_i64(r.to_i64().expect("residue below 2^61"))
    }
}

pub type Monomial = Vec<u32>;

#[derive(Clone)]
pub struct SparsePoly<R: Ring> {
    ring: R,
    vars: Arc<Vec<String>>,
    terms: BTreeMap<Monomial, R::Elem>,
}

pub type IntPoly = SparsePoly<Integers>;
pub type FieldPoly = SparsePoly<Field>;

impl<R: Ring> PartialEq for SparsePoly<R> {
    fn eq(&self, other: &Self) -> bool {
        self.vars == other.vars && self.terms == other.terms
    }
}

impl<R: Ring> fmt::Debug for SparsePoly<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.terms.iter()).finish()
    }
}

pub fn var_names(names: &[&str]) -> Arc<Vec<String>> {
    Arc::new(names.iter().map(|s| s.to_string()).collect())
}

impl<R: Ring> SparsePoly<R> {
    pub fn zero(ring: &R, vars: &Arc<Vec<String>>) -> Self {
        SparsePoly {
            ring: ring.clone(),
            vars: vars.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(ring: &R, vars: &Arc<Vec<String>>, c: R::Elem) -> Self {
        let mut p = Self::zero(ring, vars);
        p.add_term(vec![0; vars.len()], c);
        p
    }

    pub fn var(ring: &R, vars: &Arc<Vec<String>>, i: usize) -> Self {
        let mut e = vec![0; vars.len()];
        e[i] = 1;
        let mut p = Self::zero(ring, vars);
        p.add_term(e, ring.one());
        p
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }
    pub fn vars(&self) -> &Arc<Vec<String>> {
        &self.vars
    }
    pub fn terms(&self) -> &BTreeMap<Monomial, R::Elem> {
        &self.terms
    }
    pub fn len(&self) -> usize {
        self.terms.len()
    }
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Adds `c * x^e`, dropping the entry if it cancels.
    pub fn add_term(&mut self, e: Monomial, c: R::Elem) {
        assert_eq!(e.len(), self.vars.len());
        if self.ring.is_zero(&c) {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(v) => {
                let s = self.ring.add(v, &c);
                if self.ring.is_zero(&s) {
                    self.terms.remove(&e);
                } else {
                    *v = s;
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    pub fn coeff(&self, e: &[u32]) -> R::Elem {
        self.terms
            .get(e)
            .cloned()
            .unwrap_or_else(|| self.ring.zero())
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        let mut out = Self::zero(&self.ring, &self.vars);
        for (e, c) in &self.terms {
            out.terms.insert(e.clone(), self.ring.neg(c));
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &R::Elem) -> Self {
        let mut out = Self::zero(&self.ring, &self.vars);
        for (e, v) in &self.terms {
            out.add_term(e.clone(), self.ring.mul(v, c));
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(&self.ring, &self.vars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Monomial = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, self.ring.mul(c1, c2));
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::constant(&self.ring, &self.vars, self.ring.one());
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    pub fn eval(&self, values: &[R::Elem]) -> R::Elem {
        assert_eq!(values.len(), self.vars.len());
        let r = &self.ring;
        let mut acc = r.zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (x, &k) in values.iter().zip(e) {
                for _ in 0..k {
                    t = r.mul(&t, x);
                }
            }
            acc = r.add(&acc, &t);
        }
        acc
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    /// Degree of a monomial in the variables `idx`.
    pub fn partial_degree(e: &[u32], idx: &[usize]) -> u32 {
        idx.iter().map(|&i| e[i]).sum()
    }

    pub fn is_homogeneous_in(&self, idx: &[usize], d: u32) -> bool {
        self.terms.keys().all(|e| Self::partial_degree(e, idx) == d)
    }

    /// Every exponent of variable `i` is at least one; returns the quotient.
    pub fn div_by_var(&self, i: usize) -> Option<Self> {
        let mut out = Self::zero(&self.ring, &self.vars);
        for (e, c) in &self.terms {
            if e[i] == 0 {
                return None;
            }
            let mut e2 = e.clone();
            e2[i] -= 1;
            out.terms.insert(e2, c.clone());
        }
        Some(out)
    }

    /// Substitutes `x_i = 1`.
    pub fn dehomogenize(&self, i: usize) -> Self {
        let mut out = Self::zero(&self.ring, &self.vars);
        for (e, c) in &self.terms {
            let mut e2 = e.clone();
            e2[i] = 0;
            out.add_term(e2, c.clone());
        }
        out
    }

    /// Keeps the terms of total degree <= d and pads them with powers of
    /// `x_i` up to degree d.
    pub fn homogenize_truncated(&self, i: usize, d: u32) -> Self {
        let mut out = Self::zero(&self.ring, &self.vars);
        for (e, c) in &self.terms {
            let deg: u32 = e.iter().sum();
            if deg <= d {
                let mut e2 = e.clone();
                e2[i] += d - deg;
                out.add_term(e2, c.clone());
            }
        }
        out
    }

    pub fn map_ring<S: Ring>(&self, ring: &S) -> SparsePoly<S>
    where
        R: Ring<Elem = BigInt>,
    {
        let mut out = SparsePoly::zero(ring, &self.vars);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), ring.from_int(c));
        }
        out
    }
}

impl IntPoly {
    /// Reduction of the coefficients into `f`.
    pub fn reduce(&self, f: &Field) -> FieldPoly {
        self.map_ring(f)
    }

    /// Evaluates with coefficients and values in `f`.
    pub fn eval_in(&self, f: &Field, values: &[Scalar]) -> Scalar {
        assert_eq!(values.len(), self.vars.len());
        let mut acc = Scalar::ZERO;
        for (e, c) in &self.terms {
            let mut t = f.from_int(c);
            for (&x, &k) in values.iter().zip(e) {
                if k > 0 {
                    t = f.mul(t, f.pow(x, k as u64));
                }
            }
            acc = f.add(acc, t);
        }
        acc
    }

    /// Canonical text: terms in descending monomial order, explicit `*`.
    pub fn to_text(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, (e, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mut factors: Vec<String> = Vec::new();
            for (v, &k) in self.vars.iter().zip(e) {
                match k {
                    0 => {}
                    1 => factors.push(v.clone()),
                    _ => factors.push(format!("{v}^{k}")),
                }
            }
            if !mag.is_one() || factors.is_empty() {
                factors.insert(0, mag.to_string());
            }
            out.push_str(&factors.join("*"));
        }
        out
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Pfaffian of an antisymmetric matrix of polynomials by perfect-matching
/// expansion along the first row. Returns `None` if the matrix is not
/// antisymmetric with zero diagonal or has odd size.
pub fn symbolic_pfaffian<R: Ring>(m: &[Vec<SparsePoly<R>>]) -> Option<SparsePoly<R>> {
    let n = m.len();
    if n % 2 == 1 || m.iter().any(|r| r.len() != n) {
        return None;
    }
    for i in 0..n {
        if !m[i][i].is_zero() {
            return None;
        }
        for j in i + 1..n {
            if m[i][j].add(&m[j][i]) != SparsePoly::zero(m[i][j].ring(), m[i][j].vars()) {
                return None;
            }
        }
    }
    if n == 0 {
        return None;
    }
    let idx: Vec<usize> = (0..n).collect();
    Some(pf_rec(m, &idx))
}

fn pf_rec<R: Ring>(m: &[Vec<SparsePoly<R>>], idx: &[usize]) -> SparsePoly<R> {
    let proto = &m[0][0];
    if idx.is_empty() {
        return SparsePoly::constant(proto.ring(), proto.vars(), proto.ring().one());
    }
    let i = idx[0];
    let mut acc = SparsePoly::zero(proto.ring(), proto.vars());
    for (pos, &j) in idx.iter().enumerate().skip(1) {
        if m[i][j].is_zero() {
            continue;
        }
        let rest: Vec<usize> = idx.iter().copied().filter(|&x| x != i && x != j).collect();
        let t = m[i][j].mul(&pf_rec(m, &rest));
        acc = if pos % 2 == 1 {
            acc.add(&t)
        } else {
            acc.sub(&t)
        };
    }
    acc
}
