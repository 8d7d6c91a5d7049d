//! Invariant signatures of trivector hyperplanes and type identification.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use super::types::{canonical_form, TypeLabel};
use super::{Hyperplane, HyperplaneError, Result};
use crate::exterior::{binom, AlternatingFunctional, KSubset};
use crate::field::{Field, Scalar};
use crate::matrix::{gf2_null_space, gf2_rank};

/// Point-counting invariants of a hyperplane of G_3(V).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TypeSignature {
    pub n: usize,
    pub q: u64,
    pub rank: usize,
    pub poles: u64,
    /// degree -> number of points of that degree (degree 0 omitted)
    pub degree_hist: BTreeMap<usize, u64>,
    pub upper_radical_size: u64,
    pub spread: bool,
    pub singular_plane_free: bool,
}

impl TypeSignature {
    fn from_degrees(n: usize, q: u64, rank: usize, degrees: &[u8], spf: bool) -> TypeSignature {
        let mut hist = BTreeMap::new();
        let mut members = 0u64;
        for &d in degrees {
            if d > 0 {
                *hist.entry(d as usize).or_insert(0u64) += 1;
            }
            members += (q.pow(d as u32) - 1) / (q - 1);
        }
        TypeSignature {
            n,
            q,
            rank,
            poles: hist.values().sum(),
            degree_hist: hist,
            upper_radical_size: members / (q + 1),
            spread: degrees.iter().all(|&d| d == 1),
            singular_plane_free: spf,
        }
    }

    pub fn depth(&self) -> usize {
        self.degree_hist.keys().next_back().copied().unwrap_or(0)
    }

    /// JSON report with the identified type (or "Unknown").
    pub fn to_report(&self, label: Option<TypeLabel>) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("signature serializes");
        v["type"] = serde_json::Value::String(
            label.map_or_else(|| "Unknown".to_string(), |l| l.to_string()),
        );
        v
    }
}

pub fn signature(h: &Hyperplane) -> Result<TypeSignature> {
    let degrees = h.degrees()?;
    let spf = singular_plane_free(h)?;
    Ok(TypeSignature::from_degrees(
        h.n(),
        h.field().order(),
        h.rank(),
        degrees,
        spf,
    ))
}

/// No plane of the line Grassmannian lies in R_up: no point of degree >= 3
/// (a star of lines in a solid) and no projective plane all of whose lines
/// are members.
pub fn singular_plane_free(h: &Hyperplane) -> Result<bool> {
    let fld = h.field();
    let degrees = h.degrees()?;
    for (p, &d) in h.points().iter().zip(degrees) {
        if d >= 3 {
            return Ok(false);
        }
        if d == 2 {
            // radical of p is a plane <p, a, b>; it is singular iff f(a, b, .) = 0
            let rad = h.point_gram(p)?.null_space(fld).row_vecs();
            let mut all_zero = true;
            'pairs: for i in 0..rad.len() {
                let g = h.point_gram(&rad[i])?;
                for v in &rad[i + 1..] {
                    if g.mul_vec(fld, v).iter().any(|s| !s.is_zero()) {
                        all_zero = false;
                        break 'pairs;
                    }
                }
            }
            if all_zero {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Proper, rank 7 and every pole of degree exactly 2 (n = 7 only).
pub fn is_hexagonal(h: &Hyperplane) -> Result<bool> {
    if h.n() != 7 {
        return Err(HyperplaneError::WrongDimension {
            want: 7,
            got: h.n(),
        });
    }
    if h.rank() != 7 {
        return Ok(false);
    }
    let d = h.degrees()?;
    Ok(d.iter().all(|&r| r == 0 || r == 2) && d.iter().any(|&r| r == 2))
}

/// A trivector over GF(2) with n <= 8, coefficients packed in a u64 (bit r
/// is the subset of rank r). Poles are computed on bitmask matrices.
#[derive(Clone, Debug)]
pub struct Gf2Trivector {
    n: usize,
    bits: u64,
    // slab i, row x: bitmask of y with f(e_i, e_x, e_y) = 1
    slabs: Vec<u64>,
}

impl Gf2Trivector {
    pub const MAX_N: usize = 8;

    pub fn from_bits(n: usize, bits: u64) -> Gf2Trivector {
        assert!((3..=Self::MAX_N).contains(&n));
        let mut slabs = vec![0u64; n * n];
        for r in 0..binom(n, 3) {
            if bits >> r & 1 == 0 {
                continue;
            }
            let s = KSubset::unrank(r, n, 3);
            let [a, b, c] = [s.indices()[0], s.indices()[1], s.indices()[2]];
            for (i, x, y) in [
                (a, b, c),
                (a, c, b),
                (b, a, c),
                (b, c, a),
                (c, a, b),
                (c, b, a),
            ] {
                slabs[i * n + x] |= 1 << y;
            }
        }
        Gf2Trivector { n, bits, slabs }
    }

    pub fn from_functional(f: &AlternatingFunctional) -> Option<Gf2Trivector> {
        if f.field().order() != 2 || f.k() != 3 || f.n() > Self::MAX_N {
            return None;
        }
        let bits = f
            .coeffs()
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .fold(0u64, |acc, (r, _)| acc | 1 << r);
        Some(Gf2Trivector::from_bits(f.n(), bits))
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn to_functional(&self) -> AlternatingFunctional {
        let f = Field::new(2, 1).unwrap();
        let coeffs = (0..binom(self.n, 3))
            .map(|r| Scalar(self.bits >> r & 1))
            .collect();
        AlternatingFunctional::new(&f, self.n, 3, coeffs).unwrap()
    }

    fn gram(&self, p: u64, out: &mut [u64]) {
        let n = self.n;
        out[..n].iter_mut().for_each(|r| *r = 0);
        let mut m = p;
        while m != 0 {
            let i = m.trailing_zeros() as usize;
            m &= m - 1;
            for (o, s) in out[..n].iter_mut().zip(&self.slabs[i * n..(i + 1) * n]) {
                *o ^= s;
            }
        }
    }

    pub fn degree(&self, p: u64) -> usize {
        let mut rows = [0u64; Self::MAX_N];
        self.gram(p, &mut rows);
        self.n - 1 - gf2_rank(&mut rows[..self.n])
    }

    /// Degrees of the points 1..2^n (index = mask - 1).
    pub fn degrees(&self) -> Vec<u8> {
        (1u64..1 << self.n).map(|p| self.degree(p) as u8).collect()
    }

    /// Radical of the local polar space at p, including p itself.
    pub fn point_radical(&self, p: u64) -> Vec<u64> {
        let mut rows = [0u64; Self::MAX_N];
        self.gram(p, &mut rows);
        gf2_null_space(&rows[..self.n], self.n)
    }

    fn plane_is_singular(&self, rad: &[u64]) -> bool {
        let mut rows = [0u64; Self::MAX_N];
        for (i, &u) in rad.iter().enumerate() {
            self.gram(u, &mut rows);
            for &v in &rad[i + 1..] {
                let mut w = 0u64;
                let mut m = v;
                while m != 0 {
                    w ^= rows[m.trailing_zeros() as usize];
                    m &= m - 1;
                }
                if w != 0 {
                    return false;
                }
            }
        }
        true
    }

    pub fn signature(&self) -> TypeSignature {
        let degrees = self.degrees();
        let full = degrees
            .iter()
            .filter(|&&d| d as usize == self.n - 1)
            .count() as u64;
        let rad_dim = (full + 1).trailing_zeros() as usize;
        let spf = degrees.iter().enumerate().all(|(i, &d)| match d {
            0 | 1 => true,
            2 => !self.plane_is_singular(&self.point_radical(i as u64 + 1)),
            _ => false,
        });
        TypeSignature::from_degrees(self.n, 2, self.n - rad_dim, &degrees, spf)
    }

    /// If every point has degree 1, the spread lines as point triples;
    /// `None` when the radical lines fail to partition the points.
    pub fn spread_lines(&self) -> Option<Vec<[u64; 3]>> {
        let mut seen = vec![false; 1 << self.n];
        let mut lines = Vec::new();
        for p in 1u64..1 << self.n {
            if seen[p as usize] {
                continue;
            }
            let rad = self.point_radical(p);
            if rad.len() != 2 {
                return None;
            }
            let mut line = [rad[0], rad[1], rad[0] ^ rad[1]];
            line.sort_unstable();
            if !line.contains(&p) {
                return None;
            }
            for &x in &line {
                if seen[x as usize] {
                    return None;
                }
                let rx = self.point_radical(x);
                if rx.len() != 2 || !line.contains(&rx[0]) || !line.contains(&rx[1]) {
                    return None;
                }
                seen[x as usize] = true;
            }
            lines.push(line);
        }
        Some(lines)
    }
}

/// Signature of the trivector with packed GF(2) coefficients `bits`.
pub fn signature_gf2_bits(n: usize, bits: u64) -> TypeSignature {
    Gf2Trivector::from_bits(n, bits).signature()
}

/// Signatures of the canonical forms available for (n, q).
#[derive(Clone, Debug)]
pub struct ReferenceTable {
    pub n: usize,
    pub field: String,
    pub entries: Vec<(TypeLabel, TypeSignature)>,
}

impl ReferenceTable {
    pub fn build(f: &Field, n: usize) -> Result<ReferenceTable> {
        let mut entries = Vec::new();
        for label in TypeLabel::ALL {
            if label.rank() > n {
                continue;
            }
            let h = Hyperplane::new(canonical_form(label, n, f, None)?)?;
            entries.push((label, signature(&h)?));
        }
        Ok(ReferenceTable {
            n,
            field: f.spec(),
            entries,
        })
    }

    /// The unique label with this signature; shared signatures give None.
    pub fn lookup(&self, sig: &TypeSignature) -> Option<TypeLabel> {
        let mut hits = self.entries.iter().filter(|(_, s)| s == sig);
        match (hits.next(), hits.next()) {
            (Some((l, _)), None) => Some(*l),
            _ => None,
        }
    }

    pub fn get(&self, label: TypeLabel) -> Option<&TypeSignature> {
        self.entries
            .iter()
            .find(|(l, _)| *l == label)
            .map(|(_, s)| s)
    }
}

type TableCache = Mutex<HashMap<(String, usize), Arc<ReferenceTable>>>;

/// Reference table for (field, n), built once per process.
pub fn reference_table(f: &Field, n: usize) -> Result<Arc<ReferenceTable>> {
    static CACHE: OnceLock<TableCache> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let key = (f.spec(), n);
    if let Some(t) = cache.lock().unwrap().get(&key) {
        return Ok(t.clone());
    }
    let t = Arc::new(ReferenceTable::build(f, n)?);
    cache.lock().unwrap().insert(key, t.clone());
    Ok(t)
}

/// Type of a hyperplane of G_3(V) with n <= 7, by signature. `None` when
/// the signature matches no canonical form or several of them.
pub fn identify_type(h: &Hyperplane) -> Result<Option<TypeLabel>> {
    if h.k() != 3 {
        return Err(HyperplaneError::NeedsTrivector(h.k()));
    }
    if h.n() > 7 {
        return Ok(None);
    }
    let sig = signature(h)?;
    Ok(reference_table(h.field(), h.n())?.lookup(&sig))
}
