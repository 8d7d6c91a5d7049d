//! Canonical representatives of the trivector types of rank at most 7.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{HyperplaneError, Result};
use crate::exterior::AlternatingFunctional;
use crate::field::{Field, Scalar};
use crate::matrix::{irreducible_quadratic_param, quadratic_is_irreducible, QuadraticVariant};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TypeLabel {
    T1,
    T2,
    T3,
    T4,
    T5,
    T6,
    T7,
    T8,
    T9,
    /// The rank-6 type depending on an irreducible quadratic; its variant
    /// follows the characteristic.
    T10,
    /// T10 plus `147`.
    T11,
}

impl TypeLabel {
    pub const ALL: [TypeLabel; 11] = [
        TypeLabel::T1,
        TypeLabel::T2,
        TypeLabel::T3,
        TypeLabel::T4,
        TypeLabel::T5,
        TypeLabel::T6,
        TypeLabel::T7,
        TypeLabel::T8,
        TypeLabel::T9,
        TypeLabel::T10,
        TypeLabel::T11,
    ];

    pub const RANK_SEVEN: [TypeLabel; 6] = [
        TypeLabel::T5,
        TypeLabel::T6,
        TypeLabel::T7,
        TypeLabel::T8,
        TypeLabel::T9,
        TypeLabel::T11,
    ];

    pub fn rank(self) -> usize {
        use TypeLabel::*;
        match self {
            T1 => 3,
            T2 => 5,
            T3 | T4 | T10 => 6,
            _ => 7,
        }
    }

    pub fn name(self) -> &'static str {
        use TypeLabel::*;
        match self {
            T1 => "T1",
            T2 => "T2",
            T3 => "T3",
            T4 => "T4",
            T5 => "T5",
            T6 => "T6",
            T7 => "T7",
            T8 => "T8",
            T9 => "T9",
            T10 => "T10",
            T11 => "T11",
        }
    }

    /// Types with parameters: the quadratic variant is fixed by the field.
    pub fn needs_lambda(self) -> bool {
        matches!(self, TypeLabel::T10 | TypeLabel::T11)
    }
}

impl fmt::Display for TypeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TypeLabel {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        TypeLabel::ALL
            .iter()
            .copied()
            .find(|t| t.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| format!("unknown type label {s:?}"))
    }
}

fn terms(f: &Field, n: usize, list: &[(Scalar, [usize; 3])]) -> Result<AlternatingFunctional> {
    let t: Vec<(Scalar, &[usize])> = list.iter().map(|(c, i)| (*c, &i[..])).collect();
    Ok(AlternatingFunctional::from_terms(f, n, 3, &t)?)
}

/// The table representative of `label` on GF(q)^n. Indices written out of
/// order (like `162`) are stored at the sorted subset with the permutation
/// sign. For T10/T11 `lambda` defaults to the smallest admissible value.
pub fn canonical_form(
    label: TypeLabel,
    n: usize,
    f: &Field,
    lambda: Option<Scalar>,
) -> Result<AlternatingFunctional> {
    if label.rank() > n {
        return Err(HyperplaneError::RankExceedsDimension {
            label: label.to_string(),
            rank: label.rank(),
            n,
        });
    }
    let one = Scalar::ONE;
    use TypeLabel::*;
    let simple: &[[usize; 3]] = match label {
        T1 => &[[1, 2, 3]],
        T2 => &[[1, 2, 3], [1, 4, 5]],
        T3 => &[[1, 2, 3], [4, 5, 6]],
        T4 => &[[1, 6, 2], [2, 4, 3], [1, 3, 5]],
        T5 => &[[1, 2, 3], [4, 5, 6], [1, 4, 7]],
        T6 => &[[1, 5, 2], [1, 7, 4], [1, 6, 3], [2, 4, 3]],
        T7 => &[[1, 4, 6], [1, 5, 7], [2, 4, 5], [3, 6, 7]],
        T8 => &[[1, 2, 3], [1, 4, 5], [1, 6, 7]],
        T9 => &[[1, 2, 3], [4, 5, 6], [1, 4, 7], [2, 5, 7], [3, 6, 7]],
        T10 | T11 => &[],
    };
    if !simple.is_empty() {
        let list: Vec<(Scalar, [usize; 3])> = simple.iter().map(|&i| (one, i)).collect();
        return terms(f, n, &list);
    }
    let (variant, default_lambda) = irreducible_quadratic_param(f);
    let lam = lambda.unwrap_or(default_lambda);
    if !quadratic_is_irreducible(f, variant, lam) {
        return Err(HyperplaneError::InvalidLambda);
    }
    let mut list: Vec<(Scalar, [usize; 3])> = match variant {
        QuadraticVariant::One => vec![
            (one, [1, 2, 3]),
            (lam, [1, 5, 6]),
            (lam, [3, 4, 5]),
            (lam, [4, 2, 6]),
        ],
        QuadraticVariant::Two => vec![
            (one, [1, 2, 6]),
            (one, [1, 5, 3]),
            (one, [2, 3, 4]),
            (f.add(f.mul(lam, lam), one), [4, 5, 6]),
            (lam, [1, 5, 6]),
            (lam, [3, 4, 5]),
            (lam, [4, 2, 6]),
        ],
    };
    if label == T11 {
        list.push((one, [1, 4, 7]));
    }
    terms(f, n, &list)
}
