//! Hyperplanes of the Grassmannian G_k(V) cut out by alternating k-forms:
//! membership, radicals, poles, spreads and the standard constructions.

mod eight;
mod signature;
mod types;

use std::collections::BTreeSet;
use std::sync::OnceLock;

use thiserror::Error;

use crate::exterior::{
    binom, decode_bivector, is_decomposable_bivector, wedge_of_vectors, AlternatingFunctional,
    ExteriorError, KSubset, MultiVector,
};
use crate::field::{Field, Scalar};
use crate::geometry::{
    all_points, combine, enumerate_subspaces, projective_vectors, GeometryError, QuotientFrame,
    Subspace,
};
use crate::matrix::{rank_in_place, Matrix};

pub use eight::{
    build_canonical_eight, dual_hyperplane, normalize_eight, normalize_eight_with_map,
    random_eigfree, random_eigfree_with, section_is_hexagonal, section_scan, sigma_in_hyperplane,
    CanonicalEightForm, SectionScan, EIGHT_PAIRS,
};
pub use signature::{
    identify_type, is_hexagonal, reference_table, signature, signature_gf2_bits,
    singular_plane_free, Gf2Trivector, ReferenceTable, TypeSignature,
};
pub use types::{canonical_form, TypeLabel};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HyperplaneError {
    #[error("the zero functional does not define a hyperplane")]
    ZeroFunctional,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("operation needs k = 3, got k = {0}")]
    NeedsTrivector(usize),
    #[error("subspaces are not complementary")]
    NotComplementary,
    #[error("subspace of dimension {dim} is too small for k = {k}")]
    DimensionTooSmall { dim: usize, k: usize },
    #[error("type {label} has rank {rank} > n = {n}")]
    RankExceedsDimension {
        label: String,
        rank: usize,
        n: usize,
    },
    #[error("lambda does not make the defining quadratic irreducible")]
    InvalidLambda,
    #[error("type {0} is not defined over this field")]
    TypeUnavailable(String),
    #[error("expected ambient dimension {want}, got {got}")]
    WrongDimension { want: usize, got: usize },
    #[error("the upper radical is not a spread")]
    NotASpread,
    #[error("the 3x3 block has an eigenvalue in the field")]
    EigenvaluePresent,
    #[error(transparent)]
    Exterior(#[from] ExteriorError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

pub type Result<T> = std::result::Result<T, HyperplaneError>;

/// How to compute the upper radical.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum UpperRadicalMethod {
    /// Decomposable points of the kernel of the contraction matrix.
    Kernel,
    /// Test every (k-1)-subspace.
    BruteForce,
}

/// The hyperplane H_f. Derived data is cached lazily; caches never change
/// what a method returns.
#[derive(Clone)]
pub struct Hyperplane {
    f: AlternatingFunctional,
    tensor: OnceLock<Vec<Scalar>>,
    lower: OnceLock<Subspace>,
    points: OnceLock<Vec<Vec<Scalar>>>,
    degrees: OnceLock<Vec<u8>>,
}

impl std::fmt::Debug for Hyperplane {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Hyperplane({:?})", self.f)
    }
}

impl PartialEq for Hyperplane {
    fn eq(&self, other: &Self) -> bool {
        self.f == other.f
    }
}

/// Result of restricting to a subspace.
#[derive(Clone, Debug)]
pub enum Restriction {
    Hyperplane(Hyperplane),
    /// The restricted form vanishes: every k-subspace of W lies in H.
    Full,
}

impl Restriction {
    pub fn hyperplane(self) -> Option<Hyperplane> {
        match self {
            Restriction::Hyperplane(h) => Some(h),
            Restriction::Full => None,
        }
    }
}

/// The local polar space at a (k-2)-subspace X: the form
/// `(u, v) -> f(xi ^ u ^ v)` on a complement of X.
#[derive(Clone, Debug)]
pub struct LocalPolarSpace {
    pub base: Subspace,
    pub frame: QuotientFrame,
    pub gram: Matrix,
}

impl LocalPolarSpace {
    /// Radical of the Gram matrix, in quotient coordinates.
    pub fn radical(&self, f: &Field) -> Subspace {
        Subspace::from_basis_unchecked(self.gram.rows(), self.gram.null_space(f))
    }

    pub fn radical_dim(&self, f: &Field) -> usize {
        self.gram.rows() - self.gram.rank(f)
    }

    /// R_X(H): the (k-1)-spaces `X + <r>` for projective points r of the
    /// radical.
    pub fn members(&self, f: &Field) -> Vec<Subspace> {
        let rad = self.radical(f);
        let mut out: Vec<Subspace> = rad
            .points(f)
            .into_iter()
            .map(|r| {
                let v = self.frame.lift(f, &r);
                self.base
                    .join(f, &Subspace::span_vectors(f, self.base.ambient(), &[v]))
            })
            .collect();
        out.sort();
        out
    }
}

impl Hyperplane {
    pub fn new(f: AlternatingFunctional) -> Result<Hyperplane> {
        if f.is_zero() {
            return Err(HyperplaneError::ZeroFunctional);
        }
        Ok(Hyperplane {
            f,
            tensor: OnceLock::new(),
            lower: OnceLock::new(),
            points: OnceLock::new(),
            degrees: OnceLock::new(),
        })
    }

    pub fn functional(&self) -> &AlternatingFunctional {
        &self.f
    }
    pub fn field(&self) -> &Field {
        self.f.field()
    }
    pub fn n(&self) -> usize {
        self.f.n()
    }
    pub fn k(&self) -> usize {
        self.f.k()
    }

    fn need_k3(&self) -> Result<()> {
        if self.k() == 3 {
            Ok(())
        } else {
            Err(HyperplaneError::NeedsTrivector(self.k()))
        }
    }

    /// Same hyperplane from `lambda * f`.
    pub fn scaled(&self, lambda: Scalar) -> Result<Hyperplane> {
        Hyperplane::new(self.f.scale(lambda))
    }

    /// Image under the basis change whose rows are the new basis vectors.
    pub fn transformed(&self, g: &Matrix) -> Result<Hyperplane> {
        Hyperplane::new(self.f.pullback(g))
    }

    pub fn contains(&self, x: &Subspace) -> Result<bool> {
        if x.dim() != self.k() || x.ambient() != self.n() {
            return Err(HyperplaneError::DimensionMismatch(format!(
                "need a {}-subspace of a {}-space",
                self.k(),
                self.n()
            )));
        }
        let w = wedge_of_vectors(self.field(), &x.basis_vectors())?;
        Ok(self.f.eval_multivector(&w).is_zero())
    }

    /// R_down: vectors v with `f(x_1 ^ ... ^ x_{k-1} ^ v) = 0` for all x.
    pub fn lower_radical(&self) -> &Subspace {
        self.lower.get_or_init(|| {
            let m = self.f.ftilde_matrix().transpose();
            Subspace::from_basis_unchecked(self.n(), m.null_space(self.field()))
        })
    }

    /// Rank of the form: codimension of its radical.
    pub fn rank(&self) -> usize {
        self.n() - self.lower_radical().dim()
    }

    // dense alternating tensor T[i][x][y] = f(e_i ^ e_x ^ e_y), k = 3 only
    fn tensor(&self) -> &[Scalar] {
        self.tensor.get_or_init(|| {
            let n = self.n();
            let fld = self.field();
            let mut t = vec![Scalar::ZERO; n * n * n];
            for (r, &c) in self.f.coeffs().iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let s = KSubset::unrank(r, n, 3);
                let [a, b, d] = [s.indices()[0], s.indices()[1], s.indices()[2]];
                let neg = fld.neg(c);
                for (p, v) in [
                    ([a, b, d], c),
                    ([b, d, a], c),
                    ([d, a, b], c),
                    ([b, a, d], neg),
                    ([a, d, b], neg),
                    ([d, b, a], neg),
                ] {
                    t[(p[0] * n + p[1]) * n + p[2]] = v;
                }
            }
            t
        })
    }

    /// The n x n matrix `f(p ^ e_x ^ e_y)` (k = 3).
    pub fn point_gram(&self, p: &[Scalar]) -> Result<Matrix> {
        self.need_k3()?;
        let n = self.n();
        let mut out = vec![Scalar::ZERO; n * n];
        self.point_gram_into(p, &mut out);
        Ok(Matrix::from_fn(n, n, |i, j| out[i * n + j]))
    }

    fn point_gram_into(&self, p: &[Scalar], out: &mut [Scalar]) {
        let n = self.n();
        let fld = self.field();
        let t = self.tensor();
        out.iter_mut().for_each(|x| *x = Scalar::ZERO);
        for (i, &pi) in p.iter().enumerate() {
            if pi.is_zero() {
                continue;
            }
            let slab = &t[i * n * n..(i + 1) * n * n];
            for (o, &v) in out.iter_mut().zip(slab) {
                if !v.is_zero() {
                    *o = fld.add(*o, fld.mul(pi, v));
                }
            }
        }
    }

    /// Gram matrix of `(u, v) -> f(xi ^ u ^ v)` on the canonical complement
    /// of X, where xi is the wedge of X's RREF basis.
    pub fn local_polar(&self, x: &Subspace) -> Result<LocalPolarSpace> {
        let k = self.k();
        if k < 2 || x.dim() != k - 2 || x.ambient() != self.n() {
            return Err(HyperplaneError::DimensionMismatch(format!(
                "local polar space needs a {}-subspace",
                k.saturating_sub(2)
            )));
        }
        let fld = self.field();
        let frame = x.quotient_frame()?;
        let m = frame.quotient_dim();
        let comp: Vec<Vec<Scalar>> = frame.complement.row_vecs();
        let gram = if k == 3 {
            let g = self.point_gram(x.basis().row(0))?;
            let free: Vec<usize> = (0..m)
                .map(|i| comp[i].iter().position(|s| !s.is_zero()).unwrap())
                .collect();
            g.submatrix(&free, &free)
        } else {
            let xi = if x.dim() == 0 {
                None
            } else {
                Some(wedge_of_vectors(fld, &x.basis_vectors())?)
            };
            let mut g = Matrix::zeros(m, m);
            for u in 0..m {
                for v in u + 1..m {
                    let uv = wedge_of_vectors(fld, &[comp[u].clone(), comp[v].clone()])?;
                    let w = match &xi {
                        Some(xi) => xi.wedge(fld, &uv)?,
                        None => uv,
                    };
                    let val = self.f.eval_multivector(&w);
                    g.set(u, v, val);
                    g.set(v, u, fld.neg(val));
                }
            }
            g
        };
        Ok(LocalPolarSpace {
            base: x.clone(),
            frame,
            gram,
        })
    }

    /// Degree of a point: dimension of the radical of its local polar space.
    pub fn pole_degree(&self, p: &[Scalar]) -> Result<usize> {
        self.need_k3()?;
        if p.len() != self.n() || p.iter().all(|s| s.is_zero()) {
            return Err(HyperplaneError::DimensionMismatch(
                "pole degree needs a nonzero vector of V".into(),
            ));
        }
        let n = self.n();
        let mut buf = vec![Scalar::ZERO; n * n];
        self.point_gram_into(p, &mut buf);
        Ok(n - 1 - rank_in_place(self.field(), &mut buf, n, n))
    }

    /// All points of PG(V) in enumeration order (normalized vectors).
    pub fn points(&self) -> &[Vec<Scalar>] {
        self.points
            .get_or_init(|| all_points(self.field(), self.n()))
    }

    /// Degrees of all points, aligned with [`Hyperplane::points`].
    pub fn degrees(&self) -> Result<&[u8]> {
        self.need_k3()?;
        Ok(self.degrees.get_or_init(|| {
            let n = self.n();
            let fld = self.field();
            let mut buf = vec![Scalar::ZERO; n * n];
            self.points()
                .iter()
                .map(|p| {
                    self.point_gram_into(p, &mut buf);
                    (n - 1 - rank_in_place(fld, &mut buf, n, n)) as u8
                })
                .collect()
        }))
    }

    pub fn depth(&self) -> Result<usize> {
        Ok(self.degrees()?.iter().copied().max().unwrap_or(0) as usize)
    }

    /// Points of positive degree with their degrees.
    pub fn poles(&self) -> Result<Vec<(Vec<Scalar>, usize)>> {
        let d = self.degrees()?;
        Ok(self
            .points()
            .iter()
            .zip(d)
            .filter(|(_, &deg)| deg > 0)
            .map(|(p, &deg)| (p.clone(), deg as usize))
            .collect())
    }

    /// |R_up| from the degrees: each point of degree r lies on
    /// (q^r - 1)/(q - 1) members, each member has q + 1 points.
    pub fn upper_radical_size(&self) -> Result<u64> {
        let q = self.field().order();
        let total: u64 = self
            .degrees()?
            .iter()
            .map(|&r| (q.pow(r as u32) - 1) / (q - 1))
            .sum();
        Ok(total / (q + 1))
    }

    /// R_up for k = 3 read off the point radicals.
    pub fn upper_radical_from_poles(&self) -> Result<Vec<Subspace>> {
        let fld = self.field();
        let n = self.n();
        let mut set = BTreeSet::new();
        for (p, _) in self.poles()? {
            let g = self.point_gram(&p)?;
            let rad = Subspace::from_basis_unchecked(n, g.null_space(fld));
            for r in rad.points(fld) {
                let line = Subspace::span_vectors(fld, n, &[p.clone(), r]);
                if line.dim() == 2 {
                    set.insert(line);
                }
            }
        }
        Ok(set.into_iter().collect())
    }

    /// R_up: (k-1)-subspaces A with every k-space through A inside H.
    pub fn upper_radical(&self, method: UpperRadicalMethod, cap: u64) -> Result<Vec<Subspace>> {
        let fld = self.field();
        let (n, k) = (self.n(), self.k());
        let ft = self.f.ftilde_matrix();
        let mut out = match method {
            UpperRadicalMethod::BruteForce => {
                let mut v = Vec::new();
                for x in enumerate_subspaces(fld, n, k - 1, cap)? {
                    let xi = wedge_of_vectors(fld, &x.basis_vectors())?;
                    if ft.mul_vec(fld, &xi.coeffs).iter().all(|s| s.is_zero()) {
                        v.push(x);
                    }
                }
                v
            }
            UpperRadicalMethod::Kernel => {
                let kb = ft.null_space(fld);
                let m = kb.rows();
                let count = (fld.order() as u128).pow(m as u32);
                if count > cap as u128 {
                    return Err(GeometryError::EnumerationTooLarge {
                        count: count.to_string(),
                        cap,
                    }
                    .into());
                }
                let mut set = BTreeSet::new();
                for c in projective_vectors(fld, m) {
                    let w = MultiVector {
                        n,
                        d: k - 1,
                        coeffs: combine(fld, &c, &kb),
                    };
                    let decoded = if k == 3 {
                        if is_decomposable_bivector(fld, &w)? {
                            decode_bivector(fld, &w)
                        } else {
                            None
                        }
                    } else if k == 2 {
                        Some(Subspace::span_vectors(fld, n, &[w.coeffs.clone()]))
                    } else {
                        w.decompose(fld)
                    };
                    if let Some(s) = decoded {
                        set.insert(s);
                    }
                }
                set.into_iter().collect()
            }
        };
        out.sort();
        Ok(out)
    }

    /// R_i(H): i-subspaces all of whose k-superspaces lie in H.
    pub fn i_radical(&self, i: usize, cap: u64) -> Result<Vec<Subspace>> {
        let (n, k) = (self.n(), self.k());
        if i == 0 || i >= k {
            return Err(HyperplaneError::DimensionMismatch(format!(
                "need 1 <= i < {k}"
            )));
        }
        let fld = self.field();
        let comps = KSubset::all(n, k - i);
        let mut out = Vec::new();
        for x in enumerate_subspaces(fld, n, i, cap)? {
            let xi = wedge_of_vectors(fld, &x.basis_vectors())?;
            let ok = comps.iter().all(|t| {
                let w = xi.wedge(fld, &MultiVector::basis(n, t)).unwrap();
                self.f.eval_multivector(&w).is_zero()
            });
            if ok {
                out.push(x);
            }
        }
        out.sort();
        Ok(out)
    }

    /// Every (k-2)-subspace lies in exactly one member of R_up.
    pub fn is_spread_like(&self, cap: u64) -> Result<bool> {
        if self.k() == 3 {
            return Ok(self.degrees()?.iter().all(|&d| d == 1));
        }
        let fld = self.field();
        for x in enumerate_subspaces(fld, self.n(), self.k() - 2, cap)? {
            if self.local_polar(&x)?.radical_dim(fld) != 1 {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// The form induced on W, in coordinates of W's RREF basis.
    pub fn restrict(&self, w: &Subspace) -> Result<Restriction> {
        if w.dim() <= self.k() {
            return Err(HyperplaneError::DimensionTooSmall {
                dim: w.dim(),
                k: self.k(),
            });
        }
        let g = self.f.pullback(w.basis());
        Ok(if g.is_zero() {
            Restriction::Full
        } else {
            Restriction::Hyperplane(Hyperplane::new(g)?)
        })
    }
}

/// Uniformly random nonzero form on GF(q)^n.
pub fn random_hyperplane<R: rand::Rng + ?Sized>(
    f: &Field,
    n: usize,
    k: usize,
    rng: &mut R,
) -> Result<Hyperplane> {
    let len = crate::exterior::binom(n, k);
    loop {
        let c: Vec<Scalar> = (0..len).map(|_| f.random(rng)).collect();
        if c.iter().any(|s| !s.is_zero()) {
            return Hyperplane::new(AlternatingFunctional::new(f, n, k, c)?);
        }
    }
}

/// Extends `h0` (a form on V0, in coordinates of V0's basis) by zero along
/// the complement V1.
pub fn trivial_extension(
    h0: &AlternatingFunctional,
    v0: &Subspace,
    v1: &Subspace,
) -> Result<Hyperplane> {
    let fld = h0.field();
    let n = v0.ambient();
    if v1.ambient() != n || h0.n() != v0.dim() {
        return Err(HyperplaneError::DimensionMismatch(
            "form and subspaces disagree".into(),
        ));
    }
    if v0.dim() < h0.k() {
        return Err(HyperplaneError::DimensionTooSmall {
            dim: v0.dim(),
            k: h0.k(),
        });
    }
    let b = v0.basis().stack(v1.basis());
    if b.rows() != n {
        return Err(HyperplaneError::NotComplementary);
    }
    let binv = b.inverse(fld).ok_or(HyperplaneError::NotComplementary)?;
    let d0 = v0.dim();
    let cols: Vec<usize> = (0..d0).collect();
    let rows: Vec<usize> = (0..n).collect();
    // row j: V0-coordinates of the projection of e_j along V1
    let proj = binv.submatrix(&rows, &cols);
    Hyperplane::new(h0.pullback(&proj))
}

/// The hyperplane of k-spaces meeting V1, where V1 has codimension k.
pub fn trivial_hyperplane(f: &Field, v1: &Subspace, k: usize) -> Result<Hyperplane> {
    let n = v1.ambient();
    if n - v1.dim() != k {
        return Err(HyperplaneError::DimensionMismatch(format!(
            "centre must have codimension {k}"
        )));
    }
    let frame = v1.quotient_frame()?;
    let proj = Matrix::from_rows(
        (0..n)
            .map(|j| {
                let mut e = vec![Scalar::ZERO; n];
                e[j] = Scalar::ONE;
                frame.project(f, &e)
            })
            .collect(),
    );
    let det = AlternatingFunctional::new(f, k, k, vec![Scalar::ONE])?;
    Hyperplane::new(det.pullback(&proj))
}

/// E(H0): from a (k-1)-form on a hyperplane V0 of V, the k-form that pairs
/// it with the extra basis vector of the canonical complement.
pub fn expansion(h0: &AlternatingFunctional, v0: &Subspace) -> Result<Hyperplane> {
    let fld = h0.field();
    let n = v0.ambient();
    if v0.dim() + 1 != n || h0.n() != v0.dim() {
        return Err(HyperplaneError::DimensionMismatch(
            "V0 must be a hyperplane carrying the form".into(),
        ));
    }
    let k = h0.k() + 1;
    // form in the basis [V0 basis; complement vector]
    let mut coeffs = vec![Scalar::ZERO; binom(n, k)];
    for (r, &c) in h0.coeffs().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let mut idx = KSubset::unrank(r, n - 1, k - 1).indices().to_vec();
        idx.push(n - 1);
        coeffs[KSubset::new(idx).rank(n)] = c;
    }
    let g = AlternatingFunctional::new(fld, n, k, coeffs)?;
    let frame = v0.quotient_frame()?;
    let b = v0.basis().stack(&frame.complement);
    let binv = b.inverse(fld).expect("basis plus complement is invertible");
    Hyperplane::new(g.pullback(&binv))
}

/// Number of nonzero functionals up to scalars for (n, k, q).
pub fn projective_class_count(q: u64, n: usize, k: usize) -> u128 {
    ((q as u128).pow(binom(n, k) as u32) - 1) / (q as u128 - 1)
}

#[cfg(test)]
mod tests;
