//! The discriminant Delta(c1..c8) of the n = 8 normal form: sparse
//! polynomial arithmetic, the embedded transcription, the quadric pipeline
//! and the two verifications built on it.

mod parse;
mod poly;

use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

pub use parse::parse_poly;
pub use poly::{symbolic_pfaffian, var_names, FieldPoly, IntPoly, Integers, Ring, SparsePoly};

use crate::exterior::KSubset;
use crate::field::{Field, Scalar};
use crate::geometry::all_points;
use crate::hyperplane::{
    build_canonical_eight, random_eigfree_with, section_is_hexagonal, CanonicalEightForm,
    HyperplaneError, EIGHT_PAIRS,
};
use crate::matrix::{has_eigenvalue, Matrix};

/// The shipped transcription of Delta.
pub const DELTA_SOURCE: &str = include_str!("../../data/delta.poly");

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DeltaError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown variable {name:?} at byte {pos}")]
    UnknownVariable { name: String, pos: usize },
    #[error("transcription failed validation: {0}")]
    TranscriptionInvalid(String),
    #[error("matrix is not antisymmetric with zero diagonal")]
    NotAntisymmetric,
    #[error("the quadric pipeline needs odd characteristic")]
    CharacteristicTwo,
    #[error("the 3x3 block has an eigenvalue in the field")]
    EigenvaluePresent,
    #[error("the two quadric extractions disagree: {0}")]
    InconsistentExtraction(String),
    #[error("no calibration sample with nonzero Delta after {0} attempts")]
    CalibrationDegenerate(usize),
    #[error("need c1 != 0")]
    ZeroLeadingCoefficient,
    #[error(transparent)]
    Hyperplane(#[from] HyperplaneError),
}

pub type Result<T> = std::result::Result<T, DeltaError>;

/// a12, a13, ..., a56 followed by c1, ..., c8.
pub fn delta_vars() -> Arc<Vec<String>> {
    static VARS: OnceLock<Arc<Vec<String>>> = OnceLock::new();
    VARS.get_or_init(|| {
        let mut v: Vec<String> = EIGHT_PAIRS
            .iter()
            .map(|(i, j)| format!("a{i}{j}"))
            .collect();
        v.extend((1..=8).map(|i| format!("c{i}")));
        Arc::new(v)
    })
    .clone()
}

const C_VARS: [usize; 8] = [15, 16, 17, 18, 19, 20, 21, 22];
const A_VARS: [usize; 15] = [0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14];

/// Parsed Delta together with the checksum of its source text.
#[derive(Clone, Debug)]
pub struct DeltaBundle {
    pub poly: IntPoly,
    pub sha256: String,
}

fn strip_comments(text: &str) -> String {
    text.lines()
        .filter(|l| !l.trim_start().starts_with('#'))
        .collect::<Vec<_>>()
        .join("\n")
}

impl DeltaBundle {
    /// Parses without validating.
    pub fn parse(text: &str) -> Result<DeltaBundle> {
        let poly = parse_poly(&strip_comments(text), &delta_vars())?;
        let sha256 = Sha256::digest(text.as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect();
        Ok(DeltaBundle { poly, sha256 })
    }

    pub fn from_source(text: &str) -> Result<DeltaBundle> {
        let b = DeltaBundle::parse(text)?;
        b.validate()?;
        Ok(b)
    }

    /// Cubic in c, at most cubic in a, and Delta(0, ..., 0, 1) = -1.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(DeltaError::TranscriptionInvalid(m));
        if !self.poly.is_homogeneous_in(&C_VARS, 3) {
            return bad("not homogeneous of degree 3 in c".into());
        }
        if let Some(e) = self
            .poly
            .terms()
            .keys()
            .find(|e| IntPoly::partial_degree(e, &A_VARS) > 3)
        {
            return bad(format!("term of degree > 3 in a: {e:?}"));
        }
        let mut anchor = vec![0u32; 23];
        anchor[22] = 3;
        let c8_block: Vec<_> = self
            .poly
            .terms()
            .iter()
            .filter(|(e, _)| {
                C_VARS
                    .iter()
                    .zip([0, 0, 0, 0, 0, 0, 0, 3])
                    .all(|(&i, d)| e[i] == d)
            })
            .collect();
        if c8_block.len() != 1 || c8_block[0].0 != &anchor || *c8_block[0].1 != BigInt::from(-1) {
            return bad("Delta(0, ..., 0, 1) is not -1 for all a".into());
        }
        Ok(())
    }

    /// The coefficient of `c^e` as a polynomial in the a variables.
    pub fn c_block(&self, e: [u32; 8]) -> IntPoly {
        let mut out = IntPoly::zero(&Integers, self.poly.vars());
        for (m, c) in self.poly.terms() {
            if C_VARS.iter().zip(e).all(|(&i, d)| m[i] == d) {
                out.add_term(m.clone(), c.clone());
            }
        }
        out
    }

    /// Delta(a; c) computed in the field.
    pub fn eval(&self, f: &Field, a: &CanonicalEightForm, c: &[Scalar]) -> Scalar {
        assert_eq!(c.len(), 8);
        let mut vals = a.a.to_vec();
        vals.extend_from_slice(c);
        self.poly.eval_in(f, &vals)
    }
}

/// The shipped Delta, parsed and validated once.
pub fn delta_polynomial() -> Result<&'static DeltaBundle> {
    static CELL: OnceLock<Result<DeltaBundle>> = OnceLock::new();
    CELL.get_or_init(|| DeltaBundle::from_source(DELTA_SOURCE))
        .as_ref()
        .map_err(Clone::clone)
}

fn pipeline_vars() -> Arc<Vec<String>> {
    static VARS: OnceLock<Arc<Vec<String>>> = OnceLock::new();
    VARS.get_or_init(|| Arc::new((2..=8).map(|i| format!("u{i}")).collect()))
        .clone()
}

/// The 7x7 matrix of linear forms `M(u)[i][j] = h(phi(u), E_i, E_j)` where
/// `E_k = b_{k+2} e_1 + e_{k+2}` spans the hyperplane `x1 = sum b_k x_k`.
pub fn pipeline_matrix(c8: &CanonicalEightForm, b: &[Scalar], f: &Field) -> Vec<Vec<FieldPoly>> {
    assert_eq!(b.len(), 7);
    let images = Matrix::from_fn(7, 8, |k, j| {
        if j == 0 {
            b[k]
        } else if j == k + 1 {
            Scalar::ONE
        } else {
            Scalar::ZERO
        }
    });
    let g = c8.functional(f).pullback(&images);
    let vars = pipeline_vars();
    let mut m = vec![vec![FieldPoly::zero(f, &vars); 7]; 7];
    let u = |i: usize, c: Scalar| FieldPoly::var(f, &vars, i).scale(&c);
    for (r, &c) in g.coeffs().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let s = KSubset::unrank(r, 7, 3);
        let [x, y, z] = [s.indices()[0], s.indices()[1], s.indices()[2]];
        let nc = f.neg(c);
        for (i, j, k, v) in [
            (y, z, x, c),
            (z, y, x, nc),
            (x, z, y, nc),
            (z, x, y, c),
            (x, y, z, c),
            (y, x, z, nc),
        ] {
            m[i][j] = m[i][j].add(&u(k, v));
        }
    }
    m
}

/// Output of the quadric extraction.
#[derive(Clone, Debug)]
pub struct QuadricExtraction {
    /// Pfaffian of the leading 6x6 minor, a cubic in u2..u8
    pub pfaffian: FieldPoly,
    /// Pf / u8
    pub quadric: FieldPoly,
    /// symmetric 7x7 with q(u) = u^T G u
    pub gram: Matrix,
}

/// Builds the quadric whose points are the poles of H(V') for the
/// hyperplane `x1 = b2 x2 + ... + b8 x8`.
pub fn quadric_from_pipeline(
    c8: &CanonicalEightForm,
    b: &[Scalar],
    f: &Field,
) -> Result<QuadricExtraction> {
    if f.characteristic() == 2 {
        return Err(DeltaError::CharacteristicTwo);
    }
    if has_eigenvalue(&c8.block(), f).unwrap() {
        return Err(DeltaError::EigenvaluePresent);
    }
    let m = pipeline_matrix(c8, b, f);
    let minor: Vec<Vec<FieldPoly>> = m[..6].iter().map(|r| r[..6].to_vec()).collect();
    let pf = symbolic_pfaffian(&minor).ok_or(DeltaError::NotAntisymmetric)?;
    let by_division = pf
        .div_by_var(6)
        .ok_or_else(|| DeltaError::InconsistentExtraction("Pf is not divisible by u8".into()))?;
    let rehom = pf.dehomogenize(6).homogenize_truncated(6, 2);
    if rehom != by_division {
        return Err(DeltaError::InconsistentExtraction(
            "u8-division and rehomogenization differ".into(),
        ));
    }
    let half = f.inv(f.from_i64(2)).unwrap();
    let mut gram = Matrix::zeros(7, 7);
    for (e, &c) in by_division.terms() {
        let idx: Vec<usize> = (0..7)
            .flat_map(|i| std::iter::repeat(i).take(e[i] as usize))
            .collect();
        let (i, j) = (idx[0], idx[1]);
        if i == j {
            gram.set(i, i, c);
        } else {
            let h = f.mul(c, half);
            gram.set(i, j, h);
            gram.set(j, i, h);
        }
    }
    Ok(QuadricExtraction {
        pfaffian: pf,
        quadric: by_division,
        gram,
    })
}

/// b = -c / c1 for the hyperplane `sum c_i x_i = 0`.
pub fn slope_from_hyperplane(f: &Field, c: &[Scalar]) -> Result<Vec<Scalar>> {
    let inv = f.inv(c[0]).ok_or(DeltaError::ZeroLeadingCoefficient)?;
    Ok(c[1..].iter().map(|&ci| f.neg(f.mul(ci, inv))).collect())
}

/// Xi^1(c): det of the Gram matrix at b = -c/c1, homogenized to degree 21
/// in c by the factor c1^21.
pub fn discriminant(c8: &CanonicalEightForm, c: &[Scalar], f: &Field) -> Result<Scalar> {
    let b = slope_from_hyperplane(f, c)?;
    let q = quadric_from_pipeline(c8, &b, f)?;
    Ok(f.mul(q.gram.det(f).unwrap(), f.pow(c[0], 21)))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EhomMismatch {
    pub trial: u64,
    pub reason: String,
}

/// Result of testing `Xi^1 = kappa * Delta^3 * c1^12` on random samples.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EhomReport {
    pub field: String,
    pub seed: u64,
    pub trials: u64,
    pub kappa: String,
    pub calibration_attempts: usize,
    pub passes: u64,
    pub failures: u64,
    pub mismatches: Vec<EhomMismatch>,
    pub delta_sha256: String,
}

impl EhomReport {
    pub fn passed(&self) -> bool {
        self.failures == 0 && self.passes == self.trials
    }
}

fn ehom_sample(f: &Field, rng: &mut ChaCha8Rng) -> (CanonicalEightForm, Vec<Scalar>) {
    let a = random_normalized(f, rng);
    let mut c: Vec<Scalar> = (0..8).map(|_| f.random(rng)).collect();
    c[0] = f.random_nonzero(rng);
    (a, c)
}

fn ehom_sides(
    delta: &DeltaBundle,
    f: &Field,
    a: &CanonicalEightForm,
    c: &[Scalar],
) -> Result<(Scalar, Scalar)> {
    let xi = discriminant(a, c, f)?;
    let d = delta.eval(f, a, c);
    let rhs = f.mul(f.pow(d, 3), f.pow(c[0], 12));
    Ok((xi, rhs))
}

pub const CALIBRATION_ATTEMPTS: usize = 16;

/// Checks the cube identity on `trials` random (a, c) samples, after
/// fixing kappa from a calibration sample with Delta != 0.
pub fn verify_ehom(f: &Field, trials: u64, seed: u64, delta: &DeltaBundle) -> Result<EhomReport> {
    if f.characteristic() == 2 {
        return Err(DeltaError::CharacteristicTwo);
    }
    let mut cal = ChaCha8Rng::seed_from_u64(seed);
    let mut kappa = None;
    let mut attempts = 0;
    while attempts < CALIBRATION_ATTEMPTS {
        attempts += 1;
        let (a, c) = ehom_sample(f, &mut cal);
        let (xi, rhs) = ehom_sides(delta, f, &a, &c)?;
        if !rhs.is_zero() {
            kappa = Some(f.div(xi, rhs).unwrap());
            break;
        }
    }
    let kappa = kappa.ok_or(DeltaError::CalibrationDegenerate(attempts))?;
    let outcomes: Vec<Option<String>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t + 1);
            let (a, c) = ehom_sample(f, &mut rng);
            match ehom_sides(delta, f, &a, &c) {
                Ok((xi, rhs)) if xi == f.mul(kappa, rhs) => None,
                Ok((xi, rhs)) => Some(format!(
                    "Xi = {}, kappa * Delta^3 * c1^12 = {}",
                    f.format(xi),
                    f.format(f.mul(kappa, rhs))
                )),
                Err(e) => Some(e.to_string()),
            }
        })
        .collect();
    let mismatches: Vec<EhomMismatch> = outcomes
        .into_iter()
        .enumerate()
        .filter_map(|(t, o)| {
            o.map(|reason| EhomMismatch {
                trial: t as u64,
                reason,
            })
        })
        .collect();
    Ok(EhomReport {
        field: f.spec(),
        seed,
        trials,
        kappa: f.format(kappa),
        calibration_attempts: attempts,
        passes: trials - mismatches.len() as u64,
        failures: mismatches.len() as u64,
        mismatches,
        delta_sha256: delta.sha256.clone(),
    })
}

/// Result of comparing `Delta(c) = 0` with non-hexagonality of H(V'_c).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeltaHexReport {
    pub field: String,
    pub form: String,
    pub hyperplanes: u64,
    pub hexagonal: u64,
    pub delta_zeros: u64,
    pub anchor_hexagonal: bool,
    pub anchor_delta: String,
    /// hyperplane coefficients (as residues) where the equivalence fails
    pub mismatches: Vec<Vec<String>>,
    pub delta_sha256: String,
}

impl DeltaHexReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty() && self.anchor_hexagonal
    }
}

/// For every hyperplane c of GF(q)^8: `Delta(c) = 0` iff `H(V'_c)` is not
/// hexagonal.
pub fn verify_delta_hexagonal(
    c8: &CanonicalEightForm,
    f: &Field,
    delta: &DeltaBundle,
) -> Result<DeltaHexReport> {
    if has_eigenvalue(&c8.block(), f).unwrap() {
        return Err(DeltaError::EigenvaluePresent);
    }
    let h = build_canonical_eight(c8, f)?;
    let reduced = delta.poly.reduce(f);
    let eval = |c: &[Scalar]| {
        let mut vals = c8.a.to_vec();
        vals.extend_from_slice(c);
        reduced.eval(&vals)
    };
    let duals = all_points(f, 8);
    let rows: Vec<(bool, bool)> = duals
        .par_iter()
        .map(|c| Ok((eval(c).is_zero(), section_is_hexagonal(&h, c)?)))
        .collect::<std::result::Result<_, HyperplaneError>>()?;
    let mut anchor = vec![Scalar::ZERO; 8];
    anchor[7] = Scalar::ONE;
    let mismatches = duals
        .iter()
        .zip(&rows)
        .filter(|(_, &(zero, hex))| zero == hex)
        .map(|(c, _)| c.iter().map(|&s| f.format(s)).collect())
        .collect();
    Ok(DeltaHexReport {
        field: f.spec(),
        form: c8.to_text(f),
        hyperplanes: duals.len() as u64,
        hexagonal: rows.iter().filter(|r| r.1).count() as u64,
        delta_zeros: rows.iter().filter(|r| r.0).count() as u64,
        anchor_hexagonal: section_is_hexagonal(&h, &anchor)?,
        anchor_delta: f.format(eval(&anchor)),
        mismatches,
        delta_sha256: delta.sha256.clone(),
    })
}

/// Delta is written in the normalized coordinates, so every sample goes
/// through the normalization first.
pub fn random_normalized<R: Rng + ?Sized>(f: &Field, rng: &mut R) -> CanonicalEightForm {
    let a = random_eigfree_with(f, rng);
    crate::hyperplane::normalize_eight(&a, f).expect("eigenvalue-free input")
}
