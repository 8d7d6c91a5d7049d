//! Dense matrices over a [`Field`], with a bit-packed twin for GF(2).

use std::fmt;

use thiserror::Error;

use crate::field::{Field, Scalar};
use crate::unipoly::UniPoly;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatrixError {
    #[error("matrix is not antisymmetric with zero diagonal")]
    NotAntisymmetric,
    #[error("Pfaffian of odd-size matrix requested")]
    OddSize,
    #[error("expected a square matrix, got {0}x{1}")]
    NotSquare(usize, usize),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

/// Row-major dense matrix. The field is passed to every arithmetic operation
/// so that matrices stay plain data.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = self.row(r).iter().map(|s| s.0.to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Output of row reduction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rref {
    pub matrix: Matrix,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Matrix {
        Matrix {
            rows,
            cols,
            data: vec![Scalar::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Matrix {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Scalar::ONE);
        }
        m
    }

    /// Panics on ragged input.
    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Matrix {
        Matrix::from_rows_with_width(rows, None)
    }

    /// Like [`Matrix::from_rows`] but keeps the column count when there are
    /// no rows.
    pub fn from_rows_with_width(rows: Vec<Vec<Scalar>>, width: Option<usize>) -> Matrix {
        let cols = rows.first().map(|r| r.len()).or(width).unwrap_or(0);
        let r = rows.len();
        let mut data = Vec::with_capacity(r * cols);
        for row in rows {
            assert_eq!(row.len(), cols, "ragged rows");
            data.extend(row);
        }
        Matrix {
            rows: r,
            cols,
            data,
        }
    }

    /// Integer entries reduced into the prime subfield.
    pub fn from_ints(f: &Field, rows: &[&[i64]]) -> Matrix {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| f.from_i64(v)).collect())
                .collect(),
        )
    }

    pub fn from_fn(rows: usize, cols: usize, mut g: impl FnMut(usize, usize) -> Scalar) -> Matrix {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(g(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }
    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Scalar {
        self.data[i * self.cols + j]
    }
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.data[i * self.cols + j] = v;
    }
    #[inline]
    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }
    pub fn row_vecs(&self) -> Vec<Vec<Scalar>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }
    pub fn entries(&self) -> &[Scalar] {
        &self.data
    }
    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|s| s.is_zero())
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn mul(&self, f: &Field, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "inner dimensions differ");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.get(i, l);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = f.add(out.get(i, j), f.mul(a, other.get(l, j)));
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, f: &Field, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(self.cols, v.len());
        (0..self.rows).map(|i| dot(f, self.row(i), v)).collect()
    }

    /// Rows of `self` followed by rows of `other`.
    pub fn stack(&self, other: &Matrix) -> Matrix {
        if self.rows == 0 {
            return other.clone();
        }
        if other.rows == 0 {
            return self.clone();
        }
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Matrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Matrix {
        Matrix::from_fn(rows.len(), cols.len(), |i, j| self.get(rows[i], cols[j]))
    }

    pub fn scale(&self, f: &Field, c: Scalar) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| f.mul(c, x)).collect(),
        }
    }

    pub fn add(&self, f: &Field, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f.add(a, b))
                .collect(),
        }
    }

    /// Reduced row echelon form. Uses the bit-packed path over GF(2).
    pub fn rref(&self, f: &Field) -> Rref {
        if f.order() == 2 {
            let (m, rank, pivots) = Gf2Matrix::from_matrix(self).rref();
            return Rref {
                matrix: m.to_matrix(),
                rank,
                pivots,
            };
        }
        self.rref_generic(f)
    }

    /// Scalar-by-scalar Gauss-Jordan elimination, valid over any field.
    pub fn rref_generic(&self, f: &Field) -> Rref {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(pr) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            m.swap_rows(r, pr);
            let inv = f.inv(m.get(r, c)).unwrap();
            for j in c..m.cols {
                let v = f.mul(inv, m.get(r, j));
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let factor = m.get(i, c);
                if factor.is_zero() {
                    continue;
                }
                for j in c..m.cols {
                    let v = f.sub(m.get(i, j), f.mul(factor, m.get(r, j)));
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        Rref {
            matrix: m,
            rank: r,
            pivots,
        }
    }

    pub fn rank(&self, f: &Field) -> usize {
        self.rref(f).rank
    }

    /// Basis of the right null space `{x : M x = 0}`, as rows, in reduced
    /// row echelon form.
    pub fn null_space(&self, f: &Field) -> Matrix {
        let Rref {
            matrix: r, pivots, ..
        } = self.rref(f);
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut basis = Vec::with_capacity(free.len());
        for &fc in &free {
            let mut v = vec![Scalar::ZERO; self.cols];
            v[fc] = Scalar::ONE;
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = f.neg(r.get(i, fc));
            }
            basis.push(v);
        }
        // the vectors above are already in reduced echelon form once sorted
        // by the free column, but leading entries sit at the free columns
        // only after reduction; canonicalize to be safe
        let m = Matrix::from_rows_with_width(basis, Some(self.cols));
        let rr = m.rref(f);
        let mut out = rr.matrix;
        out.truncate_rows(rr.rank);
        out
    }

    pub(crate) fn truncate_rows(&mut self, rows: usize) {
        self.rows = rows;
        self.data.truncate(rows * self.cols);
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn det(&self, f: &Field) -> Result<Scalar, MatrixError> {
        if self.rows != self.cols {
            return Err(MatrixError::NotSquare(self.rows, self.cols));
        }
        let n = self.rows;
        let mut m = self.clone();
        let mut d = Scalar::ONE;
        for c in 0..n {
            let Some(pr) = (c..n).find(|&i| !m.get(i, c).is_zero()) else {
                return Ok(Scalar::ZERO);
            };
            if pr != c {
                m.swap_rows(pr, c);
                d = f.neg(d);
            }
            let piv = m.get(c, c);
            d = f.mul(d, piv);
            let inv = f.inv(piv).unwrap();
            for i in c + 1..n {
                let factor = f.mul(m.get(i, c), inv);
                if factor.is_zero() {
                    continue;
                }
                for j in c..n {
                    let v = f.sub(m.get(i, j), f.mul(factor, m.get(c, j)));
                    m.set(i, j, v);
                }
            }
        }
        Ok(d)
    }

    pub fn inverse(&self, f: &Field) -> Option<Matrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let aug = Matrix::from_fn(n, 2 * n, |i, j| {
            if j < n {
                self.get(i, j)
            } else if j - n == i {
                Scalar::ONE
            } else {
                Scalar::ZERO
            }
        });
        let r = aug.rref_generic(f);
        if r.pivots.iter().take(n).copied().ne(0..n) {
            return None;
        }
        let cols: Vec<usize> = (n..2 * n).collect();
        let rows: Vec<usize> = (0..n).collect();
        Some(r.matrix.submatrix(&rows, &cols))
    }

    /// Antisymmetric with zero diagonal. The diagonal condition matters in
    /// characteristic 2, where `M^T = -M` alone allows nonzero diagonals.
    pub fn is_alternating(&self, f: &Field) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| {
                self.get(i, i).is_zero()
                    && (i + 1..self.cols).all(|j| f.add(self.get(i, j), self.get(j, i)).is_zero())
            })
    }

    /// Pfaffian by expansion over perfect matchings.
    pub fn pfaffian(&self, f: &Field) -> Result<Scalar, MatrixError> {
        if !self.is_alternating(f) {
            return Err(MatrixError::NotAntisymmetric);
        }
        if self.rows % 2 == 1 {
            return Err(MatrixError::OddSize);
        }
        let idx: Vec<usize> = (0..self.rows).collect();
        Ok(pf_rec(f, self, &idx))
    }

    /// Characteristic polynomial `det(tI - M)` by the division-free
    /// Berkowitz recursion.
    pub fn charpoly(&self, f: &Field) -> Result<UniPoly, MatrixError> {
        if self.rows != self.cols {
            return Err(MatrixError::NotSquare(self.rows, self.cols));
        }
        let n = self.rows;
        // coefficients high-to-low of det(tI - A_k) for the leading k x k block
        let mut v: Vec<Scalar> = vec![Scalar::ONE];
        for k in 0..n {
            // A_{k+1} = [[A_k, c], [r, a]] with r the row k, c the column k
            let a = self.get(k, k);
            let r: Vec<Scalar> = (0..k).map(|j| self.get(k, j)).collect();
            let c: Vec<Scalar> = (0..k).map(|i| self.get(i, k)).collect();
            // Toeplitz column: 1, -a, -r c, -r A c, -r A^2 c, ...
            let mut col = vec![Scalar::ONE, f.neg(a)];
            let mut w = c.clone();
            for _ in 0..k {
                col.push(f.neg(dot(f, &r, &w)));
                let mut nw = vec![Scalar::ZERO; k];
                for (i, slot) in nw.iter_mut().enumerate() {
                    *slot = f.sum((0..k).map(|j| f.mul(self.get(i, j), w[j])));
                }
                w = nw;
            }
            // new coefficients = lower-triangular Toeplitz(col) of size (k+2)x(k+1) times v
            let mut nv = vec![Scalar::ZERO; k + 2];
            for (i, slot) in nv.iter_mut().enumerate() {
                let mut s = Scalar::ZERO;
                for (j, &vj) in v.iter().enumerate() {
                    if i >= j && i - j < col.len() {
                        s = f.add(s, f.mul(col[i - j], vj));
                    }
                }
                *slot = s;
            }
            v = nv;
        }
        v.reverse();
        Ok(UniPoly::new(f, v))
    }
}

pub fn dot(f: &Field, a: &[Scalar], b: &[Scalar]) -> Scalar {
    a.iter()
        .zip(b)
        .fold(Scalar::ZERO, |acc, (&x, &y)| f.add(acc, f.mul(x, y)))
}

fn pf_rec(f: &Field, m: &Matrix, idx: &[usize]) -> Scalar {
    if idx.is_empty() {
        return Scalar::ONE;
    }
    let i = idx[0];
    let mut acc = Scalar::ZERO;
    for pos in 1..idx.len() {
        let a = m.get(i, idx[pos]);
        if a.is_zero() {
            continue;
        }
        let rest: Vec<usize> = idx[1..]
            .iter()
            .enumerate()
            .filter(|&(p, _)| p + 1 != pos)
            .map(|(_, &x)| x)
            .collect();
        let t = f.mul(a, pf_rec(f, m, &rest));
        acc = if pos % 2 == 1 {
            f.add(acc, t)
        } else {
            f.sub(acc, t)
        };
    }
    acc
}

/// Whether the characteristic polynomial of `m` has a root in the field.
///
/// Small fields are searched exhaustively. Beyond 2^16 elements the root
/// test is `deg gcd(t^q - t, chi) > 0`.
pub fn has_eigenvalue(m: &Matrix, f: &Field) -> Result<bool, MatrixError> {
    let chi = m.charpoly(f)?;
    if f.is_enumerable() {
        Ok(f.elements().any(|x| chi.eval(f, x).is_zero()))
    } else {
        Ok(chi.has_root_gcd(f))
    }
}

/// Which quadratic from the canonical form table is used for the field.
#[derive(Copy, Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum QuadraticVariant {
    /// `t^2 - lambda`, odd characteristic.
    One,
    /// `t^2 + lambda t + 1`, characteristic 2.
    Two,
}

impl QuadraticVariant {
    pub fn index(self) -> u8 {
        match self {
            QuadraticVariant::One => 1,
            QuadraticVariant::Two => 2,
        }
    }
}

/// Smallest lambda making the variant's quadratic irreducible over `f`.
pub fn irreducible_quadratic_param(f: &Field) -> (QuadraticVariant, Scalar) {
    let variant = if f.characteristic() == 2 {
        QuadraticVariant::Two
    } else {
        QuadraticVariant::One
    };
    let lam = f
        .elements()
        .find(|&l| quadratic_is_irreducible(f, variant, l))
        .expect("every finite field has an irreducible quadratic");
    (variant, lam)
}

pub fn quadratic_is_irreducible(f: &Field, variant: QuadraticVariant, lam: Scalar) -> bool {
    let poly = match variant {
        QuadraticVariant::One => UniPoly::new(f, vec![f.neg(lam), Scalar::ZERO, Scalar::ONE]),
        QuadraticVariant::Two => UniPoly::new(f, vec![Scalar::ONE, lam, Scalar::ONE]),
    };
    !f.elements().any(|x| poly.eval(f, x).is_zero())
}

/// Bit-packed GF(2) matrix, 64 columns per word.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Gf2Matrix {
    rows: usize,
    cols: usize,
    words: usize,
    bits: Vec<u64>,
}

impl Gf2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Gf2Matrix {
        let words = cols.div_ceil(64).max(1);
        Gf2Matrix {
            rows,
            cols,
            words,
            bits: vec![0; rows * words],
        }
    }

    /// Entries are taken mod 2 (callers pass GF(2) matrices).
    pub fn from_matrix(m: &Matrix) -> Gf2Matrix {
        let mut g = Gf2Matrix::zeros(m.rows(), m.cols());
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                if m.get(i, j).0 & 1 == 1 {
                    g.set(i, j, true);
                }
            }
        }
        g
    }

    pub fn to_matrix(&self) -> Matrix {
        Matrix::from_fn(self.rows, self.cols, |i, j| Scalar(self.get(i, j) as u64))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.words + j / 64] >> (j % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        let w = &mut self.bits[i * self.words + j / 64];
        if v {
            *w |= 1 << (j % 64);
        } else {
            *w &= !(1 << (j % 64));
        }
    }

    fn xor_row_into(&mut self, src: usize, dst: usize) {
        for w in 0..self.words {
            let s = self.bits[src * self.words + w];
            self.bits[dst * self.words + w] ^= s;
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for w in 0..self.words {
                self.bits.swap(a * self.words + w, b * self.words + w);
            }
        }
    }

    pub fn rref(&self) -> (Gf2Matrix, usize, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(pr) = (r..m.rows).find(|&i| m.get(i, c)) else {
                continue;
            };
            m.swap_rows(r, pr);
            for i in 0..m.rows {
                if i != r && m.get(i, c) {
                    m.xor_row_into(r, i);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, r, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1
    }
}

/// Rank of a row-major `rows x cols` buffer, destroying it. Avoids the
/// allocation of [`Matrix::rref`] in tight loops.
pub fn rank_in_place(f: &Field, data: &mut [Scalar], rows: usize, cols: usize) -> usize {
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(pr) = (r..rows).find(|&i| !data[i * cols + c].is_zero()) else {
            continue;
        };
        if pr != r {
            for j in 0..cols {
                data.swap(pr * cols + j, r * cols + j);
            }
        }
        let inv = f.inv(data[r * cols + c]).unwrap();
        for i in r + 1..rows {
            let factor = data[i * cols + c];
            if factor.is_zero() {
                continue;
            }
            let factor = f.mul(factor, inv);
            for j in c..cols {
                let v = f.sub(data[i * cols + j], f.mul(factor, data[r * cols + j]));
                data[i * cols + j] = v;
            }
        }
        r += 1;
    }
    r
}

/// Rank of a GF(2) matrix given as row bitmasks. Consumes the rows.
pub fn gf2_rank(rows: &mut [u64]) -> usize {
    let mut rank = 0;
    for i in 0..rows.len() {
        let r = rows[i];
        if r == 0 {
            continue;
        }
        rank += 1;
        let low = r & r.wrapping_neg();
        for row in rows[i + 1..].iter_mut() {
            if *row & low != 0 {
                *row ^= r;
            }
        }
    }
    rank
}

/// Null space of a GF(2) matrix with at most 64 columns, rows as bitmasks.
/// Returns basis vectors as bitmasks.
pub fn gf2_null_space(rows: &[u64], cols: usize) -> Vec<u64> {
    let mut m: Vec<u64> = rows.to_vec();
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let bit = 1u64 << c;
        let Some(pr) = (r..m.len()).find(|&i| m[i] & bit != 0) else {
            continue;
        };
        m.swap(r, pr);
        for i in 0..m.len() {
            if i != r && m[i] & bit != 0 {
                m[i] ^= m[r];
            }
        }
        pivots.push((r, c));
        r += 1;
    }
    let pivot_cols: u64 = pivots.iter().map(|&(_, c)| 1u64 << c).sum();
    (0..cols)
        .filter(|&c| pivot_cols >> c & 1 == 0)
        .map(|fc| {
            let mut v = 1u64 << fc;
            for &(pr, pc) in &pivots {
                if m[pr] >> fc & 1 == 1 {
                    v |= 1 << pc;
                }
            }
            v
        })
        .collect()
}
