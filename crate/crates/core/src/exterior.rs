//! Exterior powers of V = GF(q)^n: subset bases, wedges, alternating
//! functionals and the map sending a functional to its contraction matrix.
//!
//! Indices are 0-based in the API and 1-based in text (`123` is e1^e2^e3).

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::field::{Field, Scalar};
use crate::geometry::Subspace;
use crate::matrix::{dot, Matrix};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExteriorError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("functional is identically zero")]
    ZeroFunctional,
    #[error("multivector is zero")]
    ZeroInput,
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

pub fn binom(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * (n - i) as u128 / (i + 1) as u128;
    }
    r as usize
}

/// A strictly increasing index tuple, 0-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct KSubset(Vec<usize>);

impl KSubset {
    /// Panics unless strictly increasing.
    pub fn new(idx: Vec<usize>) -> KSubset {
        assert!(idx.windows(2).all(|w| w[0] < w[1]), "indices must increase");
        KSubset(idx)
    }

    pub fn from_one_based(idx: &[usize]) -> KSubset {
        KSubset::new(idx.iter().map(|&i| i - 1).collect())
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mask(&self) -> u64 {
        self.0.iter().fold(0, |m, &i| m | 1 << i)
    }

    pub fn from_mask(mask: u64) -> KSubset {
        KSubset((0..64).filter(|i| mask >> i & 1 == 1).collect())
    }

    /// Lexicographic rank among k-subsets of `[0, n)`.
    pub fn rank(&self, n: usize) -> usize {
        let k = self.0.len();
        let mut r = 0;
        let mut start = 0;
        for (i, &s) in self.0.iter().enumerate() {
            for j in start..s {
                r += binom(n - 1 - j, k - 1 - i);
            }
            start = s + 1;
        }
        r
    }

    pub fn unrank(mut r: usize, n: usize, k: usize) -> KSubset {
        let mut out = Vec::with_capacity(k);
        let mut j = 0;
        for i in 0..k {
            loop {
                let c = binom(n - 1 - j, k - 1 - i);
                if r < c {
                    break;
                }
                r -= c;
                j += 1;
            }
            out.push(j);
            j += 1;
        }
        KSubset(out)
    }

    /// All k-subsets of `[0, n)` in lexicographic order.
    pub fn all(n: usize, k: usize) -> Vec<KSubset> {
        (0..binom(n, k)).map(|r| KSubset::unrank(r, n, k)).collect()
    }

    /// Text form, 1-based digits with `[10]` style brackets above 9.
    pub fn label(&self) -> String {
        self.0
            .iter()
            .map(|&i| {
                if i < 9 {
                    (i + 1).to_string()
                } else {
                    format!("[{}]", i + 1)
                }
            })
            .collect()
    }
}

/// Sign of moving the sorted index set `s` past index `x` so that the
/// result is sorted: `(-1)^{#{s in S : s > x}}`.
#[inline]
pub fn shuffle_sign(s_mask: u64, x: usize) -> bool {
    (s_mask >> x >> 1).count_ones() % 2 == 1
}

/// Sign (true = negative) of merging two disjoint sorted sets.
#[inline]
pub fn merge_sign(a_mask: u64, b_mask: u64) -> bool {
    let mut inv = 0u32;
    let mut b = b_mask;
    while b != 0 {
        let t = b.trailing_zeros();
        inv += (a_mask >> t >> 1).count_ones();
        b &= b - 1;
    }
    inv % 2 == 1
}

/// Sort an index list, returning (sorted, negative?) or `None` on a repeat.
pub fn sort_with_sign(idx: &[usize]) -> Option<(Vec<usize>, bool)> {
    let mut v = idx.to_vec();
    let mut neg = false;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            neg = !neg;
            j -= 1;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some((v, neg))
    }
}

/// Element of the d-th exterior power, coefficients in lexicographic
/// subset order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MultiVector {
    pub n: usize,
    pub d: usize,
    pub coeffs: Vec<Scalar>,
}

impl MultiVector {
    pub fn zero(n: usize, d: usize) -> MultiVector {
        MultiVector {
            n,
            d,
            coeffs: vec![Scalar::ZERO; binom(n, d)],
        }
    }

    pub fn from_vector(v: &[Scalar]) -> MultiVector {
        MultiVector {
            n: v.len(),
            d: 1,
            coeffs: v.to_vec(),
        }
    }

    pub fn basis(n: usize, s: &KSubset) -> MultiVector {
        let mut m = MultiVector::zero(n, s.len());
        m.coeffs[s.rank(n)] = Scalar::ONE;
        m
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn get(&self, s: &KSubset) -> Scalar {
        self.coeffs[s.rank(self.n)]
    }

    pub fn wedge(&self, f: &Field, other: &MultiVector) -> Result<MultiVector, ExteriorError> {
        if self.n != other.n {
            return Err(ExteriorError::DimensionMismatch(format!(
                "ambient {} vs {}",
                self.n, other.n
            )));
        }
        let n = self.n;
        let d = self.d + other.d;
        let mut out = MultiVector::zero(n, d);
        for (ra, &ca) in self.coeffs.iter().enumerate() {
            if ca.is_zero() {
                continue;
            }
            let ma = KSubset::unrank(ra, n, self.d).mask();
            for (rb, &cb) in other.coeffs.iter().enumerate() {
                if cb.is_zero() {
                    continue;
                }
                let mb = KSubset::unrank(rb, n, other.d).mask();
                if ma & mb != 0 {
                    continue;
                }
                let r = KSubset::from_mask(ma | mb).rank(n);
                let t = f.mul(ca, cb);
                out.coeffs[r] = if merge_sign(ma, mb) {
                    f.sub(out.coeffs[r], t)
                } else {
                    f.add(out.coeffs[r], t)
                };
            }
        }
        Ok(out)
    }

    /// Normalizes so that the first nonzero coefficient is 1.
    pub fn projective_normal(&self, f: &Field) -> MultiVector {
        let mut out = self.clone();
        if let Some(&lead) = self.coeffs.iter().find(|c| !c.is_zero()) {
            let inv = f.inv(lead).unwrap();
            for c in out.coeffs.iter_mut() {
                *c = f.mul(*c, inv);
            }
        }
        out
    }

    /// `{v : v ^ self = 0}` as a subspace.
    pub fn annihilator(&self, f: &Field) -> Subspace {
        let n = self.n;
        // column x of the matrix holds e_x ^ self
        let cols: Vec<MultiVector> = (0..n)
            .map(|x| {
                let mut e = vec![Scalar::ZERO; n];
                e[x] = Scalar::ONE;
                MultiVector::from_vector(&e).wedge(f, self).unwrap()
            })
            .collect();
        let rows = cols.first().map(|c| c.coeffs.len()).unwrap_or(0);
        let m = Matrix::from_fn(rows, n, |i, j| cols[j].coeffs[i]);
        Subspace::from_basis_unchecked(n, m.null_space(f))
    }

    /// The subspace this multivector represents, if it is a nonzero pure
    /// wedge. General degree, via the annihilator.
    pub fn decompose(&self, f: &Field) -> Option<Subspace> {
        if self.is_zero() {
            return None;
        }
        let a = self.annihilator(f);
        (a.dim() == self.d).then_some(a)
    }
}

/// Plucker coordinates of the span of `vectors`: the maximal minors.
pub fn wedge_of_vectors(f: &Field, vectors: &[Vec<Scalar>]) -> Result<MultiVector, ExteriorError> {
    let d = vectors.len();
    let n = vectors.first().map(|v| v.len()).unwrap_or(0);
    if d == 0 || d > n || vectors.iter().any(|v| v.len() != n) {
        return Err(ExteriorError::DimensionMismatch(format!(
            "{d} vectors in dimension {n}"
        )));
    }
    let mut acc = MultiVector::from_vector(&vectors[0]);
    for v in &vectors[1..] {
        acc = acc.wedge(f, &MultiVector::from_vector(v))?;
    }
    Ok(acc)
}

/// Bivector criterion: nonzero and all Plucker relations
/// `w_ij w_kl - w_ik w_jl + w_il w_jk = 0` hold.
///
/// Testing `w ^ w = 0` instead is wrong in characteristic 2, where every
/// coefficient of `w ^ w` carries a factor 2.
pub fn is_decomposable_bivector(f: &Field, w: &MultiVector) -> Result<bool, ExteriorError> {
    if w.d != 2 {
        return Err(ExteriorError::DimensionMismatch(format!("degree {}", w.d)));
    }
    if w.is_zero() {
        return Err(ExteriorError::ZeroInput);
    }
    let n = w.n;
    let at = |i: usize, j: usize| w.coeffs[KSubset(vec![i, j]).rank(n)];
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                for l in k + 1..n {
                    let a = f.mul(at(i, j), at(k, l));
                    let b = f.mul(at(i, k), at(j, l));
                    let c = f.mul(at(i, l), at(j, k));
                    if !f.add(f.sub(a, b), c).is_zero() {
                        return Ok(false);
                    }
                }
            }
        }
    }
    Ok(true)
}

/// The 2-space of a decomposable bivector: row space of its matrix.
pub fn decode_bivector(f: &Field, w: &MultiVector) -> Option<Subspace> {
    if !is_decomposable_bivector(f, w).ok()? {
        return None;
    }
    let n = w.n;
    let mut m = Matrix::zeros(n, n);
    for (r, &c) in w.coeffs.iter().enumerate() {
        let s = KSubset::unrank(r, n, 2);
        let (i, j) = (s.0[0], s.0[1]);
        m.set(i, j, c);
        m.set(j, i, f.neg(c));
    }
    Some(Subspace::span(f, n, &m))
}

/// A linear functional on the k-th exterior power, i.e. an alternating
/// k-linear form.
#[derive(Clone, PartialEq, Eq)]
pub struct AlternatingFunctional {
    field: Field,
    n: usize,
    k: usize,
    coeffs: Vec<Scalar>,
}

impl fmt::Debug for AlternatingFunctional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [n={}, {}]", self.to_text(), self.n, self.field)
    }
}

impl AlternatingFunctional {
    pub fn new(
        field: &Field,
        n: usize,
        k: usize,
        coeffs: Vec<Scalar>,
    ) -> Result<AlternatingFunctional, ExteriorError> {
        if k == 0 || k > n || coeffs.len() != binom(n, k) {
            return Err(ExteriorError::DimensionMismatch(format!(
                "{} coefficients for n={n}, k={k}",
                coeffs.len()
            )));
        }
        Ok(AlternatingFunctional {
            field: field.clone(),
            n,
            k,
            coeffs,
        })
    }

    pub fn zero(field: &Field, n: usize, k: usize) -> AlternatingFunctional {
        AlternatingFunctional {
            field: field.clone(),
            n,
            k,
            coeffs: vec![Scalar::ZERO; binom(n, k)],
        }
    }

    /// Builds from `(coefficient, 1-based indices)` terms; unsorted indices
    /// pick up the permutation sign and repeated indices vanish.
    pub fn from_terms(
        field: &Field,
        n: usize,
        k: usize,
        terms: &[(Scalar, &[usize])],
    ) -> Result<AlternatingFunctional, ExteriorError> {
        let mut f = AlternatingFunctional::zero(field, n, k);
        for &(c, idx) in terms {
            f.add_term(c, idx)?;
        }
        Ok(f)
    }

    fn add_term(&mut self, c: Scalar, idx_one_based: &[usize]) -> Result<(), ExteriorError> {
        if idx_one_based.len() != self.k {
            return Err(ExteriorError::DimensionMismatch(format!(
                "term of arity {} in a {}-form",
                idx_one_based.len(),
                self.k
            )));
        }
        if idx_one_based.iter().any(|&i| i == 0 || i > self.n) {
            return Err(ExteriorError::DimensionMismatch(format!(
                "index out of range 1..={}",
                self.n
            )));
        }
        let zero_based: Vec<usize> = idx_one_based.iter().map(|i| i - 1).collect();
        let Some((sorted, neg)) = sort_with_sign(&zero_based) else {
            return Ok(());
        };
        let r = KSubset(sorted).rank(self.n);
        let fld = &self.field;
        self.coeffs[r] = if neg {
            fld.sub(self.coeffs[r], c)
        } else {
            fld.add(self.coeffs[r], c)
        };
        Ok(())
    }

    pub fn field(&self) -> &Field {
        &self.field
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn k(&self) -> usize {
        self.k
    }
    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }
    pub fn coeff(&self, s: &KSubset) -> Scalar {
        self.coeffs[s.rank(self.n)]
    }

    pub fn scale(&self, c: Scalar) -> AlternatingFunctional {
        let mut g = self.clone();
        for x in g.coeffs.iter_mut() {
            *x = self.field.mul(c, *x);
        }
        g
    }

    pub fn add(&self, other: &AlternatingFunctional) -> AlternatingFunctional {
        assert_eq!((self.n, self.k), (other.n, other.k));
        let mut g = self.clone();
        for (x, &y) in g.coeffs.iter_mut().zip(&other.coeffs) {
            *x = self.field.add(*x, y);
        }
        g
    }

    /// Same coefficients viewed in a larger ambient space (new basis vectors
    /// appended at the end).
    pub fn embed(&self, n: usize) -> AlternatingFunctional {
        assert!(n >= self.n);
        let mut g = AlternatingFunctional::zero(&self.field, n, self.k);
        for (r, &c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                let s = KSubset::unrank(r, self.n, self.k);
                g.coeffs[s.rank(n)] = c;
            }
        }
        g
    }

    pub fn eval_multivector(&self, w: &MultiVector) -> Scalar {
        assert_eq!((w.n, w.d), (self.n, self.k));
        dot(&self.field, &self.coeffs, &w.coeffs)
    }

    /// `f(v_1 ^ ... ^ v_k)`.
    pub fn apply(&self, vectors: &[Vec<Scalar>]) -> Result<Scalar, ExteriorError> {
        if vectors.len() != self.k || vectors.iter().any(|v| v.len() != self.n) {
            return Err(ExteriorError::DimensionMismatch(format!(
                "need {} vectors of length {}",
                self.k, self.n
            )));
        }
        Ok(self.eval_multivector(&wedge_of_vectors(&self.field, vectors)?))
    }

    /// The n x C(n, k-1) matrix with entry `f(e_S ^ e_x)` at (x, S).
    pub fn ftilde_matrix(&self) -> Matrix {
        let (n, k) = (self.n, self.k);
        assert!(k >= 2, "contraction matrix needs k >= 2");
        let fld = &self.field;
        let cols = binom(n, k - 1);
        let mut m = Matrix::zeros(n, cols);
        for c in 0..cols {
            let s = KSubset::unrank(c, n, k - 1);
            let mask = s.mask();
            for x in 0..n {
                if mask >> x & 1 == 1 {
                    continue;
                }
                let v = self.coeffs[KSubset::from_mask(mask | 1 << x).rank(n)];
                if v.is_zero() {
                    continue;
                }
                m.set(x, c, if shuffle_sign(mask, x) { fld.neg(v) } else { v });
            }
        }
        m
    }

    /// Functional on GF(q)^d given by `g(e_T) = f(img_{t1} ^ ... ^ img_{tk})`
    /// where row t of `images` (d x n) is the image of the t-th basis vector.
    pub fn pullback(&self, images: &Matrix) -> AlternatingFunctional {
        assert_eq!(images.cols(), self.n);
        let d = images.rows();
        let fld = &self.field;
        let mut g = AlternatingFunctional::zero(fld, d, self.k);
        if self.k > d {
            return g;
        }
        let nonzero: Vec<(Vec<usize>, Scalar)> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(r, &c)| (KSubset::unrank(r, self.n, self.k).0, c))
            .collect();
        for (r, slot) in g.coeffs.iter_mut().enumerate() {
            let t = KSubset::unrank(r, d, self.k);
            let sub: Vec<usize> = t.0.clone();
            let mut acc = Scalar::ZERO;
            for (s, c) in &nonzero {
                let minor = images.submatrix(&sub, s);
                let det = minor.det(fld).unwrap();
                acc = fld.add(acc, fld.mul(*c, det));
            }
            *slot = acc;
        }
        g
    }

    /// Canonical text: terms in lexicographic subset order.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (r, &c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !out.is_empty() {
                out.push('+');
            }
            if c != Scalar::ONE {
                out.push_str(&self.field.format(c));
                out.push('*');
            }
            out.push_str(&KSubset::unrank(r, self.n, self.k).label());
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }

    /// Parses the additive notation, e.g. `123+456-2*147` or `#3*[10]12`.
    /// `k` is taken from the first term when not given.
    pub fn parse(
        field: &Field,
        n: usize,
        k: Option<usize>,
        text: &str,
    ) -> Result<AlternatingFunctional, ExteriorError> {
        let terms = parse_terms(field, text)?;
        let k = match (k, terms.first()) {
            (Some(k), _) => k,
            (None, Some((_, idx, _))) => idx.len(),
            (None, None) => {
                return Err(ExteriorError::Parse {
                    pos: 0,
                    msg: "cannot infer arity of the zero functional".into(),
                })
            }
        };
        if k == 0 || k > n {
            return Err(ExteriorError::DimensionMismatch(format!("k={k}, n={n}")));
        }
        let mut f = AlternatingFunctional::zero(field, n, k);
        for (c, idx, pos) in terms {
            f.add_term(c, &idx).map_err(|e| ExteriorError::Parse {
                pos,
                msg: e.to_string(),
            })?;
        }
        Ok(f)
    }

    /// JSON object mapping index labels to coefficients (integers or `#k`
    /// strings), e.g. `{"123": 1, "456": "#2"}`.
    pub fn from_json_map(
        field: &Field,
        n: usize,
        k: Option<usize>,
        value: &serde_json::Value,
    ) -> Result<AlternatingFunctional, ExteriorError> {
        let bad = |msg: String| ExteriorError::Parse { pos: 0, msg };
        let obj = value
            .as_object()
            .ok_or_else(|| bad("expected a JSON object".into()))?;
        let mut entries: BTreeMap<usize, (Scalar, Vec<usize>)> = BTreeMap::new();
        for (i, (key, v)) in obj.iter().enumerate() {
            let idx = parse_index_string(key).map_err(|(_, m)| bad(m))?;
            let c = match v {
                serde_json::Value::Number(num) => num
                    .as_i64()
                    .map(|x| field.from_i64(x))
                    .ok_or_else(|| bad(format!("bad coefficient for {key}")))?,
                serde_json::Value::String(s) => field
                    .parse_scalar(s)
                    .ok_or_else(|| bad(format!("bad coefficient for {key}")))?,
                _ => return Err(bad(format!("bad coefficient for {key}"))),
            };
            entries.insert(i, (c, idx));
        }
        let k = k
            .or_else(|| entries.values().next().map(|(_, i)| i.len()))
            .ok_or_else(|| bad("empty map".into()))?;
        let mut f = AlternatingFunctional::zero(field, n, k);
        for (c, idx) in entries.into_values() {
            f.add_term(c, &idx)?;
        }
        Ok(f)
    }

    pub fn to_json_map(&self) -> serde_json::Value {
        let mut m = serde_json::Map::new();
        for (r, &c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                let key = KSubset::unrank(r, self.n, self.k).label();
                let v = if self.field.degree() == 1 {
                    serde_json::Value::from(c.0)
                } else {
                    serde_json::Value::from(self.field.format(c))
                };
                m.insert(key, v);
            }
        }
        serde_json::Value::Object(m)
    }
}

fn parse_index_string(s: &str) -> Result<Vec<usize>, (usize, String)> {
    let b = s.as_bytes();
    let mut i = 0;
    let mut out = Vec::new();
    while i < b.len() {
        match b[i] {
            b'1'..=b'9' => {
                out.push((b[i] - b'0') as usize);
                i += 1;
            }
            b'[' => {
                let end = s[i..].find(']').ok_or((i, "unclosed '['".to_string()))? + i;
                let v: usize = s[i + 1..end]
                    .trim()
                    .parse()
                    .map_err(|_| (i, "bad bracketed index".to_string()))?;
                if v == 0 {
                    return Err((i, "indices start at 1".into()));
                }
                out.push(v);
                i = end + 1;
            }
            _ => return Err((i, format!("unexpected {:?} in index list", b[i] as char))),
        }
    }
    if out.is_empty() {
        return Err((0, "empty index list".into()));
    }
    Ok(out)
}

// Terms as (coefficient, 1-based indices, byte offset).
fn parse_terms(
    field: &Field,
    text: &str,
) -> Result<Vec<(Scalar, Vec<usize>, usize)>, ExteriorError> {
    let err = |pos: usize, msg: &str| ExteriorError::Parse {
        pos,
        msg: msg.to_string(),
    };
    let s: Vec<(usize, char)> = text
        .char_indices()
        .filter(|(_, c)| !c.is_whitespace())
        .map(|(i, c)| (i, if c == '\u{2212}' { '-' } else { c }))
        .collect();
    let mut out = Vec::new();
    let mut i = 0;
    if s.len() == 1 && s[0].1 == '0' {
        return Ok(out);
    }
    if s.is_empty() {
        return Err(err(0, "empty functional"));
    }
    while i < s.len() {
        let start = s[i].0;
        let mut neg = false;
        if s[i].1 == '+' || s[i].1 == '-' {
            neg = s[i].1 == '-';
            i += 1;
        } else if !out.is_empty() {
            return Err(err(start, "expected '+' or '-'"));
        }
        let tok_start = i;
        while i < s.len() && s[i].1 != '+' && s[i].1 != '-' {
            i += 1;
        }
        if tok_start == i {
            let pos = s.get(i).map(|x| x.0).unwrap_or(text.len());
            return Err(err(pos, "missing term"));
        }
        let tok: String = s[tok_start..i].iter().map(|x| x.1).collect();
        let tpos = s[tok_start].0;
        let (coef, idx) = match tok.split_once('*') {
            Some((c, rest)) => (
                field
                    .parse_scalar(c)
                    .ok_or_else(|| err(tpos, "bad coefficient"))?,
                rest.to_string(),
            ),
            None => (Scalar::ONE, tok.clone()),
        };
        let idx = parse_index_string(&idx).map_err(|(p, m)| err(tpos + p, &m))?;
        let coef = if neg { field.neg(coef) } else { coef };
        out.push((coef, idx, start));
    }
    Ok(out)
}
