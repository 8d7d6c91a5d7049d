//! Subspaces of GF(q)^n in canonical (reduced row echelon) form,
//! enumeration of Grassmannians and Grassmann lines.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use rand::Rng;
use thiserror::Error;

use crate::field::{Field, Scalar};
use crate::matrix::Matrix;

/// Default upper bound on the number of subspaces one enumeration may emit.
pub const DEFAULT_ENUMERATION_CAP: u64 = 1 << 27;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeometryError {
    #[error("enumeration of {count} items exceeds the cap {cap}")]
    EnumerationTooLarge { count: String, cap: u64 },
    #[error("subspaces are not nested")]
    NotNested,
    #[error("subspace is the whole space")]
    FullSpace,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

/// A subspace of GF(q)^n stored by its RREF basis. Two subspaces are equal
/// iff their stored bases are equal.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subspace {
    n: usize,
    basis: Matrix,
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = (0..self.dim())
            .map(|i| {
                self.basis
                    .row(i)
                    .iter()
                    .map(|s| s.0.to_string())
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect();
        write!(f, "<{}>", rows.join("; "))
    }
}

impl Subspace {
    /// Span of the rows of `rows`.
    pub fn span(f: &Field, n: usize, rows: &Matrix) -> Subspace {
        if rows.rows() == 0 {
            return Subspace::zero(n);
        }
        assert_eq!(rows.cols(), n);
        let r = rows.rref(f);
        let mut basis = r.matrix;
        basis.truncate_rows(r.rank);
        Subspace { n, basis }
    }

    pub fn span_vectors(f: &Field, n: usize, vectors: &[Vec<Scalar>]) -> Subspace {
        Subspace::span(
            f,
            n,
            &Matrix::from_rows_with_width(vectors.to_vec(), Some(n)),
        )
    }

    /// Trusts that `basis` is already in reduced row echelon form.
    pub fn from_basis_unchecked(n: usize, basis: Matrix) -> Subspace {
        let basis = if basis.rows() == 0 {
            Matrix::zeros(0, n)
        } else {
            basis
        };
        Subspace { n, basis }
    }

    pub fn zero(n: usize) -> Subspace {
        Subspace {
            n,
            basis: Matrix::zeros(0, n),
        }
    }

    pub fn full(n: usize) -> Subspace {
        Subspace {
            n,
            basis: Matrix::identity(n),
        }
    }

    /// Span of the standard basis vectors with the given 0-based indices.
    pub fn coordinate(n: usize, idx: &[usize]) -> Subspace {
        let mut idx = idx.to_vec();
        idx.sort_unstable();
        idx.dedup();
        let basis = Matrix::from_fn(idx.len(), n, |i, j| {
            if j == idx[i] {
                Scalar::ONE
            } else {
                Scalar::ZERO
            }
        });
        Subspace::from_basis_unchecked(n, basis)
    }

    pub fn random<R: Rng + ?Sized>(f: &Field, n: usize, d: usize, rng: &mut R) -> Subspace {
        loop {
            let m = Matrix::from_fn(d, n, |_, _| f.random(rng));
            let s = Subspace::span(f, n, &m);
            if s.dim() == d {
                return s;
            }
        }
    }

    #[inline]
    pub fn ambient(&self) -> usize {
        self.n
    }
    #[inline]
    pub fn dim(&self) -> usize {
        self.basis.rows()
    }
    pub fn basis(&self) -> &Matrix {
        &self.basis
    }
    pub fn basis_vectors(&self) -> Vec<Vec<Scalar>> {
        self.basis.row_vecs()
    }

    pub fn pivots(&self) -> Vec<usize> {
        (0..self.dim())
            .map(|i| {
                self.basis
                    .row(i)
                    .iter()
                    .position(|s| !s.is_zero())
                    .expect("RREF rows are nonzero")
            })
            .collect()
    }

    pub fn contains_vector(&self, f: &Field, v: &[Scalar]) -> bool {
        // reduce v against the RREF basis
        let mut w = v.to_vec();
        for (i, p) in self.pivots().into_iter().enumerate() {
            let c = w[p];
            if c.is_zero() {
                continue;
            }
            for (j, slot) in w.iter_mut().enumerate() {
                *slot = f.sub(*slot, f.mul(c, self.basis.get(i, j)));
            }
        }
        w.iter().all(|s| s.is_zero())
    }

    pub fn contains(&self, f: &Field, other: &Subspace) -> bool {
        other.dim() <= self.dim()
            && (0..other.dim()).all(|i| self.contains_vector(f, other.basis.row(i)))
    }

    pub fn join(&self, f: &Field, other: &Subspace) -> Subspace {
        Subspace::span(f, self.n, &self.basis.stack(&other.basis))
    }

    /// The orthogonal complement under the standard dot product.
    pub fn annihilator(&self, f: &Field) -> Subspace {
        if self.dim() == 0 {
            return Subspace::full(self.n);
        }
        Subspace::from_basis_unchecked(self.n, self.basis.null_space(f))
    }

    pub fn meet(&self, f: &Field, other: &Subspace) -> Subspace {
        self.annihilator(f)
            .join(f, &other.annihilator(f))
            .annihilator(f)
    }

    /// All projective points, each as its normalized representative
    /// (first nonzero coordinate 1), in the order of coefficient vectors.
    pub fn points(&self, f: &Field) -> Vec<Vec<Scalar>> {
        projective_vectors(f, self.dim())
            .map(|c| combine(f, &c, &self.basis))
            .collect()
    }

    pub fn quotient_frame(&self) -> Result<QuotientFrame, GeometryError> {
        if self.dim() == self.n {
            return Err(GeometryError::FullSpace);
        }
        let piv = self.pivots();
        let free: Vec<usize> = (0..self.n).filter(|c| !piv.contains(c)).collect();
        let complement = Matrix::from_fn(free.len(), self.n, |i, j| {
            if j == free[i] {
                Scalar::ONE
            } else {
                Scalar::ZERO
            }
        });
        Ok(QuotientFrame {
            base: self.clone(),
            complement,
            free,
        })
    }

    /// Lifts coordinates in this subspace's basis to GF(q)^n.
    pub fn lift(&self, f: &Field, coords: &[Scalar]) -> Vec<Scalar> {
        combine(f, coords, &self.basis)
    }

    /// Coordinates of `v` (assumed inside) in the RREF basis: its pivot
    /// entries.
    pub fn coordinates(&self, v: &[Scalar]) -> Vec<Scalar> {
        self.pivots().into_iter().map(|p| v[p]).collect()
    }
}

/// Linear combination `sum c_i * row_i`.
pub fn combine(f: &Field, coeffs: &[Scalar], rows: &Matrix) -> Vec<Scalar> {
    let mut out = vec![Scalar::ZERO; rows.cols()];
    for (i, &c) in coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        for (j, slot) in out.iter_mut().enumerate() {
            *slot = f.add(*slot, f.mul(c, rows.get(i, j)));
        }
    }
    out
}

/// Normalized nonzero vectors of GF(q)^d, one per projective point.
pub fn projective_vectors(f: &Field, d: usize) -> impl Iterator<Item = Vec<Scalar>> + '_ {
    (0..d).flat_map(move |lead| {
        let tail = d - lead - 1;
        let q = f.order();
        let count = q.pow(tail as u32);
        (0..count).map(move |mut idx| {
            let mut v = vec![Scalar::ZERO; d];
            v[lead] = Scalar::ONE;
            for j in (lead + 1..d).rev() {
                v[j] = Scalar(idx % q);
                idx /= q;
            }
            v
        })
    })
}

/// Complement of a subspace, used to move between V and V/X.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientFrame {
    pub base: Subspace,
    /// Standard basis vectors at the non-pivot columns of `base`.
    pub complement: Matrix,
    free: Vec<usize>,
}

impl QuotientFrame {
    pub fn quotient_dim(&self) -> usize {
        self.complement.rows()
    }

    pub fn lift(&self, f: &Field, coords: &[Scalar]) -> Vec<Scalar> {
        combine(f, coords, &self.complement)
    }

    /// Coordinates of the coset `v + X` in the complement basis.
    pub fn project(&self, f: &Field, v: &[Scalar]) -> Vec<Scalar> {
        let b = self.base.basis();
        let mut w = v.to_vec();
        for (i, p) in self.base.pivots().into_iter().enumerate() {
            let c = w[p];
            if c.is_zero() {
                continue;
            }
            for (j, slot) in w.iter_mut().enumerate() {
                *slot = f.sub(*slot, f.mul(c, b.get(i, j)));
            }
        }
        self.free.iter().map(|&j| w[j]).collect()
    }
}

pub fn gaussian_binomial(q: u64, n: usize, d: usize) -> BigUint {
    if d > n {
        return BigUint::from(0u32);
    }
    let q = BigUint::from(q);
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for i in 0..d {
        num *= q.pow((n - i) as u32) - 1u32;
        den *= q.pow((i + 1) as u32) - 1u32;
    }
    num / den
}

/// All d-subsets of `[0, n)` in lexicographic order, as pivot patterns.
pub fn pivot_patterns(n: usize, d: usize) -> Vec<Vec<usize>> {
    crate::exterior::KSubset::all(n, d)
        .into_iter()
        .map(|s| s.indices().to_vec())
        .collect()
}

/// Subspaces with a fixed pivot pattern, free entries counted
/// lexicographically in row-major order.
pub struct PivotBlock {
    f: Field,
    n: usize,
    pivots: Vec<usize>,
    free: Vec<(usize, usize)>,
    counter: Option<Vec<u64>>,
}

impl PivotBlock {
    pub fn new(f: &Field, n: usize, pivots: &[usize]) -> PivotBlock {
        let mut free = Vec::new();
        for (i, &p) in pivots.iter().enumerate() {
            for j in p + 1..n {
                if !pivots.contains(&j) {
                    free.push((i, j));
                }
            }
        }
        PivotBlock {
            f: f.clone(),
            n,
            pivots: pivots.to_vec(),
            counter: Some(vec![0; free.len()]),
            free,
        }
    }

    pub fn len(&self) -> BigUint {
        BigUint::from(self.f.order()).pow(self.free.len() as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

impl Iterator for PivotBlock {
    type Item = Subspace;

    fn next(&mut self) -> Option<Subspace> {
        let counter = self.counter.as_mut()?;
        let d = self.pivots.len();
        let mut m = Matrix::zeros(d, self.n);
        for (i, &p) in self.pivots.iter().enumerate() {
            m.set(i, p, Scalar::ONE);
        }
        for (&(i, j), &v) in self.free.iter().zip(counter.iter()) {
            m.set(i, j, Scalar(v));
        }
        let out = Subspace::from_basis_unchecked(self.n, m);
        // advance, least significant digit last
        let q = self.f.order();
        let mut pos = counter.len();
        loop {
            if pos == 0 {
                self.counter = None;
                break;
            }
            pos -= 1;
            counter[pos] += 1;
            if counter[pos] < q {
                break;
            }
            counter[pos] = 0;
        }
        Some(out)
    }
}

/// Stream of all d-subspaces of GF(q)^n, by pivot pattern then free
/// entries. Fails before emitting anything if the count exceeds `cap`.
pub fn enumerate_subspaces(
    f: &Field,
    n: usize,
    d: usize,
    cap: u64,
) -> Result<impl Iterator<Item = Subspace>, GeometryError> {
    let count = gaussian_binomial(f.order(), n, d);
    if count.to_u64().map_or(true, |c| c > cap) {
        return Err(GeometryError::EnumerationTooLarge {
            count: count.to_string(),
            cap,
        });
    }
    let f = f.clone();
    Ok(pivot_patterns(n, d)
        .into_iter()
        .flat_map(move |p| PivotBlock::new(&f, n, &p)))
}

/// Normalized representatives of all points of PG(n-1, q).
pub fn all_points(f: &Field, n: usize) -> Vec<Vec<Scalar>> {
    projective_vectors(f, n).collect()
}

/// The pencil of k-spaces between `y` (dim k-1) and `z` (dim k+1).
pub fn grassmann_line(
    f: &Field,
    y: &Subspace,
    z: &Subspace,
) -> Result<Vec<Subspace>, GeometryError> {
    if z.dim() != y.dim() + 2 {
        return Err(GeometryError::DimensionMismatch(format!(
            "dims {} and {}",
            y.dim(),
            z.dim()
        )));
    }
    if !z.contains(f, y) {
        return Err(GeometryError::NotNested);
    }
    // two vectors of z independent modulo y
    let frame = y.quotient_frame().map_err(|_| GeometryError::NotNested)?;
    let zq: Vec<Vec<Scalar>> = z
        .basis_vectors()
        .iter()
        .map(|v| frame.project(f, v))
        .collect();
    let qspan = Subspace::span_vectors(f, frame.quotient_dim(), &zq);
    let a = frame.lift(f, qspan.basis().row(0));
    let b = frame.lift(f, qspan.basis().row(1));
    let with = |v: Vec<Scalar>| y.join(f, &Subspace::span_vectors(f, y.ambient(), &[v]));
    let mut out = vec![with(a.clone())];
    for t in f.elements() {
        let v: Vec<Scalar> = b
            .iter()
            .zip(&a)
            .map(|(&bi, &ai)| f.add(bi, f.mul(t, ai)))
            .collect();
        out.push(with(v));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn gf(p: u64) -> Field {
        Field::new(p, 1).unwrap()
    }

    fn vecs(f: &Field, rows: &[&[i64]]) -> Matrix {
        Matrix::from_ints(f, rows)
    }

    #[test]
    fn canonicalize_examples() {
        let f = gf(2);
        let a = Subspace::span(&f, 2, &vecs(&f, &[&[0, 1], &[1, 0]]));
        assert_eq!(a.basis(), &Matrix::identity(2));
        let b = Subspace::span(&f, 2, &vecs(&f, &[&[1, 0], &[1, 1]]));
        assert_eq!(a, b);
        let c = Subspace::span(&f, 3, &vecs(&f, &[&[1, 1, 0], &[0, 1, 1]]));
        assert_eq!(c.basis(), &vecs(&f, &[&[1, 0, 1], &[0, 1, 1]]));
    }

    #[test]
    fn enumeration_counts() {
        for (p, n, d, want) in [(2u64, 2, 1, 3usize), (2, 5, 2, 155), (3, 6, 2, 11011)] {
            let f = gf(p);
            let all: Vec<Subspace> = enumerate_subspaces(&f, n, d, DEFAULT_ENUMERATION_CAP)
                .unwrap()
                .collect();
            assert_eq!(all.len(), want);
            assert_eq!(gaussian_binomial(p, n, d), BigUint::from(want));
            let set: HashSet<_> = all.iter().cloned().collect();
            assert_eq!(set.len(), want);
            for s in &all {
                assert_eq!(s.dim(), d);
                assert_eq!(&Subspace::span(&f, n, s.basis()), s);
            }
        }
        assert!(matches!(
            enumerate_subspaces(&gf(2), 35, 2, DEFAULT_ENUMERATION_CAP),
            Err(GeometryError::EnumerationTooLarge { .. })
        ));
    }

    #[test]
    fn enumeration_extension_field() {
        let f = Field::new(2, 2).unwrap();
        assert_eq!(enumerate_subspaces(&f, 4, 2, 1 << 20).unwrap().count(), 357);
    }

    #[test]
    fn line_examples() {
        let f = gf(2);
        let y = Subspace::coordinate(3, &[0]);
        let z = Subspace::full(3);
        let line = grassmann_line(&f, &y, &z).unwrap();
        let want: HashSet<Subspace> = [
            Subspace::coordinate(3, &[0, 1]),
            Subspace::coordinate(3, &[0, 2]),
            Subspace::span(&f, 3, &vecs(&f, &[&[1, 0, 0], &[0, 1, 1]])),
        ]
        .into_iter()
        .collect();
        assert_eq!(line.iter().cloned().collect::<HashSet<_>>(), want);
        let f3 = gf(3);
        let line = grassmann_line(&f3, &y, &z).unwrap();
        assert_eq!(line.len(), 4);
        assert_eq!(line.iter().collect::<HashSet<_>>().len(), 4);
        for x in &line {
            assert!(x.contains(&f3, &y) && z.contains(&f3, x));
        }
        let z2 = Subspace::coordinate(4, &[0, 2, 3]);
        assert!(grassmann_line(&f3, &Subspace::coordinate(4, &[1]), &z2).is_err());
    }

    #[test]
    fn quotient_frame_examples() {
        let f = gf(2);
        let x = Subspace::coordinate(3, &[0]);
        let fr = x.quotient_frame().unwrap();
        assert_eq!(fr.complement, vecs(&f, &[&[0, 1, 0], &[0, 0, 1]]));
        let x = Subspace::span(&f, 2, &vecs(&f, &[&[1, 1]]));
        let fr = x.quotient_frame().unwrap();
        assert_eq!(fr.complement, vecs(&f, &[&[0, 1]]));
        assert_eq!(
            Subspace::full(2).quotient_frame(),
            Err(GeometryError::FullSpace)
        );
    }

    #[test]
    fn points_count() {
        let f = gf(3);
        assert_eq!(all_points(&f, 4).len(), 40);
        let s = Subspace::coordinate(5, &[1, 3]);
        let pts = s.points(&f);
        assert_eq!(pts.len(), 4);
        assert!(pts.iter().all(|p| s.contains_vector(&f, p)));
    }
}
