//! Univariate polynomials over a finite field.

use crate::field::{Field, Scalar};

/// Coefficients low degree first; no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct UniPoly {
    coeffs: Vec<Scalar>,
}

impl UniPoly {
    pub fn new(_f: &Field, mut coeffs: Vec<Scalar>) -> UniPoly {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn zero() -> UniPoly {
        UniPoly { coeffs: Vec::new() }
    }

    pub fn monomial(f: &Field, c: Scalar, deg: usize) -> UniPoly {
        let mut v = vec![Scalar::ZERO; deg + 1];
        v[deg] = c;
        UniPoly::new(f, v)
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn eval(&self, f: &Field, x: Scalar) -> Scalar {
        self.coeffs
            .iter()
            .rev()
            .fold(Scalar::ZERO, |acc, &c| f.add(f.mul(acc, x), c))
    }

    pub fn sub(&self, f: &Field, other: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let get = |v: &[Scalar], i: usize| v.get(i).copied().unwrap_or(Scalar::ZERO);
        UniPoly::new(
            f,
            (0..n)
                .map(|i| f.sub(get(&self.coeffs, i), get(&other.coeffs, i)))
                .collect(),
        )
    }

    pub fn mul(&self, f: &Field, other: &UniPoly) -> UniPoly {
        if self.is_zero() || other.is_zero() {
            return UniPoly::zero();
        }
        let mut out = vec![Scalar::ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = f.add(out[i + j], f.mul(a, b));
            }
        }
        UniPoly::new(f, out)
    }

    /// Remainder of division by a nonzero polynomial.
    pub fn rem(&self, f: &Field, d: &UniPoly) -> UniPoly {
        let dd = d.degree().expect("division by zero polynomial");
        let lead_inv = f.inv(d.coeffs[dd]).unwrap();
        let mut r = self.coeffs.clone();
        while r.len() > dd {
            let top = r.len() - 1;
            let c = f.mul(r[top], lead_inv);
            if !c.is_zero() {
                for (i, &di) in d.coeffs.iter().enumerate() {
                    let k = top - dd + i;
                    r[k] = f.sub(r[k], f.mul(c, di));
                }
            }
            r.pop();
        }
        UniPoly::new(f, r)
    }

    pub fn gcd(&self, f: &Field, other: &UniPoly) -> UniPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(f, &b);
            a = b;
            b = r;
        }
        a
    }

    /// `x^e mod m` by square and multiply.
    pub fn pow_mod(&self, f: &Field, mut e: u64, m: &UniPoly) -> UniPoly {
        let mut result = UniPoly::new(f, vec![Scalar::ONE]).rem(f, m);
        let mut base = self.rem(f, m);
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(f, &base).rem(f, m);
            }
            base = base.mul(f, &base).rem(f, m);
            e >>= 1;
        }
        result
    }

    /// Root existence via `gcd(t^q - t, self)`; works for any field size.
    pub fn has_root_gcd(&self, f: &Field) -> bool {
        match self.degree() {
            None => true,
            Some(0) => false,
            Some(_) => {
                let t = UniPoly::monomial(f, Scalar::ONE, 1);
                let tq = t.pow_mod(f, f.order(), self);
                let g = tq.sub(f, &t).gcd(f, self);
                g.degree().is_some_and(|d| d > 0)
            }
        }
    }
}
