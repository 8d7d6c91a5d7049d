//! The eight-dimensional forms `T9 + sum a_ij * ij8` and the spread test
//! through hyperplane sections.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::signature::is_hexagonal;
use super::types::{canonical_form, TypeLabel};
use super::{Hyperplane, HyperplaneError, Restriction, Result};
use crate::exterior::AlternatingFunctional;
use crate::field::{Field, Scalar};
use crate::geometry::{all_points, Subspace};
use crate::matrix::{has_eigenvalue, Matrix};

/// The index pairs (i, j), 1 <= i < j <= 6, in lexicographic order.
pub const EIGHT_PAIRS: [(usize, usize); 15] = [
    (1, 2),
    (1, 3),
    (1, 4),
    (1, 5),
    (1, 6),
    (2, 3),
    (2, 4),
    (2, 5),
    (2, 6),
    (3, 4),
    (3, 5),
    (3, 6),
    (4, 5),
    (4, 6),
    (5, 6),
];

fn pair_index(i: usize, j: usize) -> usize {
    EIGHT_PAIRS
        .iter()
        .position(|&p| p == (i, j))
        .unwrap_or_else(|| panic!("({i}, {j}) is not a pair of 1..6"))
}

/// Coefficients a_ij of `h = 123+456+147+257+367 + sum a_ij * ij8`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CanonicalEightForm {
    /// in `EIGHT_PAIRS` order
    pub a: [Scalar; 15],
}

impl CanonicalEightForm {
    pub fn zero() -> CanonicalEightForm {
        CanonicalEightForm {
            a: [Scalar::ZERO; 15],
        }
    }

    pub fn get(&self, i: usize, j: usize) -> Scalar {
        self.a[pair_index(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.a[pair_index(i, j)] = v;
    }

    /// The 3x3 block A with entries a_{i, 3+j}.
    pub fn block(&self) -> Matrix {
        Matrix::from_fn(3, 3, |r, c| self.get(r + 1, c + 4))
    }

    pub fn set_block(&mut self, m: &Matrix) {
        for r in 0..3 {
            for c in 0..3 {
                self.set(r + 1, c + 4, m.get(r, c));
            }
        }
    }

    pub fn is_normalized(&self) -> bool {
        [(2, 5), (2, 6), (3, 4), (3, 6)]
            .iter()
            .all(|&(i, j)| self.get(i, j).is_zero())
    }

    pub fn functional(&self, f: &Field) -> AlternatingFunctional {
        let t9 = canonical_form(TypeLabel::T9, 8, f, None).expect("T9 fits in dimension 8");
        let terms: Vec<(Scalar, [usize; 3])> = EIGHT_PAIRS
            .iter()
            .zip(&self.a)
            .filter(|(_, c)| !c.is_zero())
            .map(|(&(i, j), &c)| (c, [i, j, 8]))
            .collect();
        let t: Vec<(Scalar, &[usize])> = terms.iter().map(|(c, i)| (*c, &i[..])).collect();
        t9.add(&AlternatingFunctional::from_terms(f, 8, 3, &t).expect("valid terms"))
    }

    /// Reads the a_ij back; `None` unless `h` has exactly this shape.
    pub fn from_functional(h: &AlternatingFunctional) -> Option<CanonicalEightForm> {
        let f = h.field();
        if h.n() != 8 || h.k() != 3 {
            return None;
        }
        let mut out = CanonicalEightForm::zero();
        for (r, &(i, j)) in EIGHT_PAIRS.iter().enumerate() {
            out.a[r] = h.coeff(&crate::exterior::KSubset::from_one_based(&[i, j, 8]));
        }
        (out.functional(f) == *h).then_some(out)
    }

    pub fn to_text(&self, f: &Field) -> String {
        self.functional(f).to_text()
    }
}

pub fn build_canonical_eight(c8: &CanonicalEightForm, f: &Field) -> Result<Hyperplane> {
    Hyperplane::new(c8.functional(f))
}

/// Uniformly random a_ij conditioned on A having no eigenvalue in the field.
pub fn random_eigfree(f: &Field, seed: u64) -> CanonicalEightForm {
    random_eigfree_with(f, &mut ChaCha8Rng::seed_from_u64(seed))
}

pub fn random_eigfree_with<R: Rng + ?Sized>(f: &Field, rng: &mut R) -> CanonicalEightForm {
    loop {
        let mut c8 = CanonicalEightForm::zero();
        for a in c8.a.iter_mut() {
            *a = f.random(rng);
        }
        if !has_eigenvalue(&c8.block(), f).unwrap() {
            return c8;
        }
    }
}

// blockdiag(P, P^-T, 1, 1): preserves T9 when det P = 1 and conjugates A by P
fn block_map(f: &Field, p: &Matrix) -> Matrix {
    let pit = p.inverse(f).expect("invertible").transpose();
    let mut m = Matrix::identity(8);
    for r in 0..3 {
        for c in 0..3 {
            m.set(r, c, p.get(r, c));
            m.set(r + 3, c + 3, pit.get(r, c));
        }
    }
    m
}

/// Normalizes so that a25 = a26 = a34 = a36 = 0. Also returns the 8x8
/// matrix M with `normalized = h.pullback(M)`.
pub fn normalize_eight_with_map(
    c8: &CanonicalEightForm,
    f: &Field,
) -> Result<(CanonicalEightForm, Matrix)> {
    if has_eigenvalue(&c8.block(), f).unwrap() {
        return Err(HyperplaneError::EigenvaluePresent);
    }
    let mut h = c8.functional(f);
    let mut total = Matrix::identity(8);
    let mut step = |h: &mut AlternatingFunctional, p: Matrix| -> CanonicalEightForm {
        let m = block_map(f, &p);
        *h = h.pullback(&m);
        total = m.mul(f, &total);
        CanonicalEightForm::from_functional(h).expect("block maps keep the T9 part")
    };
    let mut a = c8.clone();
    let neg1 = f.neg(Scalar::ONE);
    let z = Scalar::ZERO;
    let o = Scalar::ONE;
    if a.get(1, 6).is_zero() {
        // swap e1, e2 (and e4, e5) with one sign; moves a26 into the a16 slot
        a = step(
            &mut h,
            Matrix::from_rows(vec![vec![z, o, z], vec![neg1, z, z], vec![z, z, o]]),
        );
    }
    // no eigenvalue forces a column of A to leave the span of e3
    let a16 = a.get(1, 6);
    let u1 = Matrix::from_rows(vec![
        vec![o, z, z],
        vec![f.neg(f.div(a.get(2, 6), a16).unwrap()), o, z],
        vec![f.neg(f.div(a.get(3, 6), a16).unwrap()), z, o],
    ]);
    a = step(&mut h, u1);
    let a24 = a.get(2, 4);
    if a24.is_zero() {
        // only possible with an eigenvalue; kept as a guard
        return Err(HyperplaneError::EigenvaluePresent);
    }
    let u2 = Matrix::from_rows(vec![
        vec![o, f.div(a.get(2, 5), a24).unwrap(), z],
        vec![z, o, z],
        vec![z, f.neg(f.div(a.get(3, 4), a24).unwrap()), o],
    ]);
    a = step(&mut h, u2);
    debug_assert!(a.is_normalized());
    Ok((a, total))
}

pub fn normalize_eight(c8: &CanonicalEightForm, f: &Field) -> Result<CanonicalEightForm> {
    normalize_eight_with_map(c8, f).map(|(a, _)| a)
}

/// The hyperplane `sum c_i x_i = 0` of GF(q)^n.
pub fn dual_hyperplane(f: &Field, c: &[Scalar]) -> Subspace {
    Subspace::span_vectors(f, c.len(), &[c.to_vec()]).annihilator(f)
}

/// Sigma(V'): members of the spread R_up(H) contained in V'.
pub fn sigma_in_hyperplane(h: &Hyperplane, v: &Subspace) -> Result<Vec<Subspace>> {
    if v.ambient() != h.n() || v.dim() + 1 != h.n() {
        return Err(HyperplaneError::DimensionMismatch(
            "V' must be a hyperplane of V".into(),
        ));
    }
    if h.k() != 3 {
        return Err(HyperplaneError::NeedsTrivector(h.k()));
    }
    if !h.is_spread_like(u64::MAX)? {
        return Err(HyperplaneError::NotASpread);
    }
    let fld = h.field();
    Ok(h.upper_radical_from_poles()?
        .into_iter()
        .filter(|l| v.contains(fld, l))
        .collect())
}

/// Both sides of the spread/hexagonal-sections equivalence for n = 8.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SectionScan {
    pub spread: bool,
    pub hyperplanes: u64,
    pub hexagonal_sections: u64,
}

impl SectionScan {
    pub fn holds(&self) -> bool {
        self.spread == (self.hexagonal_sections == self.hyperplanes)
    }
}

/// Whether `H(V')` is hexagonal for the hyperplane with coefficients `c`.
pub fn section_is_hexagonal(h: &Hyperplane, c: &[Scalar]) -> Result<bool> {
    let v = dual_hyperplane(h.field(), c);
    match h.restrict(&v)? {
        Restriction::Full => Ok(false),
        Restriction::Hyperplane(r) => is_hexagonal(&r),
    }
}

pub fn section_scan(h: &Hyperplane) -> Result<SectionScan> {
    if h.n() != 8 {
        return Err(HyperplaneError::WrongDimension {
            want: 8,
            got: h.n(),
        });
    }
    let spread = h.is_spread_like(u64::MAX)?;
    let duals = all_points(h.field(), 8);
    let flags: Vec<bool> = duals
        .par_iter()
        .map(|c| section_is_hexagonal(h, c))
        .collect::<Result<_>>()?;
    Ok(SectionScan {
        spread,
        hyperplanes: duals.len() as u64,
        hexagonal_sections: flags.iter().filter(|&&b| b).count() as u64,
    })
}
