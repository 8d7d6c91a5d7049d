//! Flag counting for spread-like hyperplanes of G_3(V) with dim V even: a
//! spread forces q^2+q+1 to divide M (q^n-1)/(q-1), and that fails exactly
//! when r = (n-2)/2 is 1 mod 3.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::is_prime;
use crate::geometry::{all_points, enumerate_subspaces, GeometryError};
use crate::hyperplane::{Hyperplane, HyperplaneError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CountingError {
    #[error("n = {0} is odd; the count needs n even")]
    OddDimension(usize),
    #[error("n = {0} is below 6")]
    DimensionTooSmall(usize),
    #[error("q = {0} is not a prime power")]
    NotAPrimePower(u64),
    #[error("r must be at least 1")]
    RankZero,
    #[error("the flag count needs k = 3, got {0}")]
    NeedsTrivector(usize),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Hyperplane(#[from] HyperplaneError),
}

pub type Result<T> = std::result::Result<T, CountingError>;

pub fn is_prime_power(q: u64) -> bool {
    if q < 2 {
        return false;
    }
    let p = (2..=q).find(|d| q % d == 0).unwrap();
    let mut x = q;
    while x % p == 0 {
        x /= p;
    }
    x == 1 && is_prime(p)
}

fn big(q: u64) -> BigUint {
    BigUint::from(q)
}

// (q^e - 1) / (q - 1)
fn gauss(q: u64, e: u32) -> BigUint {
    (big(q).pow(e) - 1u32) / (big(q) - 1u32)
}

/// Number of lines of the symplectic polar space of rank r over GF(q).
pub fn lines_count_m(q: u64, r: u32) -> Result<BigUint> {
    if !is_prime_power(q) {
        return Err(CountingError::NotAPrimePower(q));
    }
    if r == 0 {
        return Err(CountingError::RankZero);
    }
    let q2 = big(q).pow(2);
    let second = BigUint::one() + &q2 * ((big(q).pow(2 * r - 2) - 1u32) / (&q2 - 1u32));
    Ok(gauss(q, 2 * r) * second)
}

/// `(q^i - 1) | (q^j - 1)`.
pub fn qpower_divides(q: u64, i: u32, j: u32) -> bool {
    let a = big(q).pow(i) - 1u32;
    let b = big(q).pow(j) - 1u32;
    if a.is_zero() {
        return b.is_zero();
    }
    (b % a).is_zero()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    NotASpreadPossible,
    DivisibilityHolds,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::NotASpreadPossible => "NotASpreadPossible",
            Verdict::DivisibilityHolds => "DivisibilityHolds",
        })
    }
}

/// Big integers are carried as decimal strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountReport {
    pub q: u64,
    pub n: usize,
    pub r: u32,
    pub m: String,
    /// M (q^n-1)/(q-1): flags counted through the points
    pub psi: String,
    /// psi / (q^2+q+1), the number of planes a spread would force; absent
    /// when not integral
    pub planes: Option<String>,
    pub modulus: u64,
    pub residue: u64,
    pub verdict: Verdict,
}

pub const CSV_HEADER: [&str; 6] = ["q", "n", "r", "r_mod_3", "residue", "verdict"];

impl CountReport {
    pub fn csv_record(&self) -> [String; 6] {
        [
            self.q.to_string(),
            self.n.to_string(),
            self.r.to_string(),
            (self.r % 3).to_string(),
            self.residue.to_string(),
            self.verdict.to_string(),
        ]
    }
}

pub fn residue_check(q: u64, n: usize) -> Result<CountReport> {
    if n % 2 == 1 {
        return Err(CountingError::OddDimension(n));
    }
    if n < 6 {
        return Err(CountingError::DimensionTooSmall(n));
    }
    let r = ((n - 2) / 2) as u32;
    let m = lines_count_m(q, r)?;
    let psi = &m * gauss(q, n as u32);
    let modulus = q * q + q + 1;
    let residue = (&psi % modulus).to_u64().unwrap();
    let planes = (residue == 0).then(|| (&psi / modulus).to_string());
    let verdict = if residue == 0 {
        Verdict::DivisibilityHolds
    } else {
        Verdict::NotASpreadPossible
    };
    Ok(CountReport {
        q,
        n,
        r,
        m: m.to_string(),
        psi: psi.to_string(),
        planes,
        modulus,
        residue,
        verdict,
    })
}

/// Both sides of the flag count for an actual hyperplane, by enumeration.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlagCount {
    /// |H|, planes of PG(V) in H
    pub members: u64,
    /// (q^2+q+1) |H|
    pub psi_by_planes: u64,
    /// sum over points of the members through them
    pub psi_by_points: u64,
    /// smallest and largest number of members through a point
    pub through_point: (u64, u64),
}

pub fn brute_force_flags(h: &Hyperplane, cap: u64) -> Result<FlagCount> {
    if h.k() != 3 {
        return Err(CountingError::NeedsTrivector(h.k()));
    }
    let f = h.field();
    let n = h.n();
    let mut members = Vec::new();
    for x in enumerate_subspaces(f, n, 3, cap)? {
        if h.contains(&x)? {
            members.push(x);
        }
    }
    let counts: Vec<u64> = all_points(f, n)
        .iter()
        .map(|p| members.iter().filter(|x| x.contains_vector(f, p)).count() as u64)
        .collect();
    let q = f.order();
    Ok(FlagCount {
        members: members.len() as u64,
        psi_by_planes: (q * q + q + 1) * members.len() as u64,
        psi_by_points: counts.iter().sum(),
        through_point: (*counts.iter().min().unwrap(), *counts.iter().max().unwrap()),
    })
}
