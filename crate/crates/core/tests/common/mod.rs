//! Property checks shared by the proptest suite and the acceptance run.
//! Each returns `Err` with a description of the first violation.
#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use hypergrass::exterior::{binom, wedge_of_vectors};
use hypergrass::geometry::{all_points, enumerate_subspaces, grassmann_line};
use hypergrass::hyperplane::{
    expansion, signature, trivial_extension, trivial_hyperplane, Restriction,
};
use hypergrass::{AlternatingFunctional, Field, Hyperplane, Matrix, Scalar, Subspace};

pub type Check = Result<(), String>;

pub fn random_form(f: &Field, n: usize, k: usize, rng: &mut ChaCha8Rng) -> AlternatingFunctional {
    loop {
        let c: Vec<Scalar> = (0..binom(n, k)).map(|_| f.random(rng)).collect();
        if c.iter().any(|s| !s.is_zero()) {
            return AlternatingFunctional::new(f, n, k, c).unwrap();
        }
    }
}

/// Random form of rank at most `r`: a random form on GF(q)^r pulled back
/// along a random surjection.
pub fn random_low_rank(
    f: &Field,
    n: usize,
    k: usize,
    r: usize,
    rng: &mut ChaCha8Rng,
) -> Hyperplane {
    loop {
        let g = random_form(f, r, k, rng);
        let m = Matrix::from_fn(n, r, |_, _| f.random(rng));
        let h = g.pullback(&m);
        if !h.is_zero() {
            return Hyperplane::new(h).unwrap();
        }
    }
}

pub fn random_hyperplane(f: &Field, n: usize, k: usize, rng: &mut ChaCha8Rng) -> Hyperplane {
    if rng.gen_bool(0.5) {
        Hyperplane::new(random_form(f, n, k, rng)).unwrap()
    } else {
        let r = rng.gen_range(k..=n);
        random_low_rank(f, n, k, r, rng)
    }
}

fn nested_pair(f: &Field, n: usize, k: usize, rng: &mut ChaCha8Rng) -> (Subspace, Subspace) {
    let z = Subspace::random(f, n, k + 1, rng);
    loop {
        let m = Matrix::from_fn(k - 1, k + 1, |_, _| f.random(rng));
        let y = Subspace::span(f, n, &m.mul(f, z.basis()));
        if y.dim() == k - 1 {
            return (y, z);
        }
    }
}

fn line_hits(h: &Hyperplane, y: &Subspace, z: &Subspace) -> Check {
    let q = h.field().order() as usize;
    let line = grassmann_line(h.field(), y, z).map_err(|e| e.to_string())?;
    let hits = line.iter().filter(|x| h.contains(x).unwrap()).count();
    if hits == 1 || hits == q + 1 {
        Ok(())
    } else {
        Err(format!("line meets H in {hits} members"))
    }
}

/// Every Grassmann line meets H in 1 or q+1 members.
pub fn line_axiom_sampled(h: &Hyperplane, samples: usize, rng: &mut ChaCha8Rng) -> Check {
    for _ in 0..samples {
        let (y, z) = nested_pair(h.field(), h.n(), h.k(), rng);
        line_hits(h, &y, &z)?;
    }
    Ok(())
}

pub fn line_axiom_exhaustive(h: &Hyperplane) -> Check {
    let f = h.field();
    let (n, k) = (h.n(), h.k());
    for z in enumerate_subspaces(f, n, k + 1, u64::MAX).unwrap() {
        for yc in enumerate_subspaces(f, k + 1, k - 1, u64::MAX).unwrap() {
            let y = Subspace::span(f, n, &yc.basis().mul(f, z.basis()));
            line_hits(h, &y, &z)?;
        }
    }
    Ok(())
}

/// In each local polar space a point off an isotropic line is collinear
/// with one or all of its points.
pub fn polar_one_or_all(h: &Hyperplane, samples: usize, rng: &mut ChaCha8Rng) -> Check {
    let f = h.field();
    let q = f.order() as usize;
    for _ in 0..samples {
        let x = Subspace::random(f, h.n(), h.k() - 2, rng);
        let lp = h.local_polar(&x).map_err(|e| e.to_string())?;
        let g = &lp.gram;
        let m = g.rows();
        let form = |a: &[Scalar], b: &[Scalar]| hypergrass::matrix::dot(f, a, &g.mul_vec(f, b));
        let pts = all_points(f, m);
        for line in enumerate_subspaces(f, m, 2, u64::MAX).unwrap() {
            let b = line.basis_vectors();
            if !form(&b[0], &b[1]).is_zero() {
                continue;
            }
            let lpts = line.points(f);
            for p in &pts {
                if line.contains_vector(f, p) {
                    continue;
                }
                let c = lpts.iter().filter(|y| form(p, y).is_zero()).count();
                if c != 1 && c != q + 1 {
                    return Err(format!("point collinear with {c} points of a line"));
                }
            }
        }
    }
    Ok(())
}

pub fn degree_parity(h: &Hyperplane) -> Check {
    let n = h.n();
    match h
        .degrees()
        .unwrap()
        .iter()
        .find(|&&d| (d as usize) % 2 != (n - 1) % 2)
    {
        Some(d) => Err(format!("degree {d} at n = {n}")),
        None => Ok(()),
    }
}

pub fn scaling_invariance(h: &Hyperplane, rng: &mut ChaCha8Rng) -> Check {
    let f = h.field();
    let lam = f.random_nonzero(rng);
    let g = h.scaled(lam).unwrap();
    if g.lower_radical() != h.lower_radical() {
        return Err("lower radical changed".into());
    }
    if h.k() == 3 && signature(&g).unwrap() != signature(h).unwrap() {
        return Err("signature changed".into());
    }
    for _ in 0..20 {
        let x = Subspace::random(f, h.n(), h.k(), rng);
        if g.contains(&x).unwrap() != h.contains(&x).unwrap() {
            return Err("membership changed".into());
        }
    }
    Ok(())
}

/// R_1 is the point set of the lower radical and R_{k-1} is closed under
/// the pencils spanned by two of its members at distance one.
pub fn radicals_are_subspaces(h: &Hyperplane) -> Check {
    let f = h.field();
    let k = h.k();
    let r1 = h.i_radical(1, u64::MAX).unwrap();
    let rad = h.lower_radical();
    if r1.len() != rad.points(f).len() || r1.iter().any(|p| !rad.contains(f, p)) {
        return Err("R_1 differs from the lower radical".into());
    }
    let top = h.i_radical(k - 1, u64::MAX).unwrap();
    let set: std::collections::BTreeSet<&Subspace> = top.iter().collect();
    for (i, a) in top.iter().enumerate() {
        for b in &top[i + 1..] {
            let z = a.join(f, b);
            if z.dim() != k {
                continue;
            }
            let y = a.meet(f, b);
            for m in grassmann_line(f, &y, &z).unwrap() {
                if !set.contains(&m) {
                    return Err("R_{k-1} not closed under a pencil".into());
                }
            }
        }
    }
    Ok(())
}

pub fn radical_codimension(h: &Hyperplane) -> Check {
    let c = h.n() - h.lower_radical().dim();
    if c < h.k() {
        return Err(format!("codim of R_down is {c} < k"));
    }
    Ok(())
}

fn proportional(f: &Field, a: &AlternatingFunctional, b: &AlternatingFunctional) -> bool {
    let i = match a.coeffs().iter().position(|s| !s.is_zero()) {
        Some(i) => i,
        None => return b.is_zero(),
    };
    if b.coeffs()[i].is_zero() {
        return false;
    }
    let lam = f.div(b.coeffs()[i], a.coeffs()[i]).unwrap();
    a.scale(lam) == *b
}

/// H = H(S) extended trivially along R_down, S the canonical complement.
pub fn trivial_extension_round_trip(h: &Hyperplane) -> Check {
    let f = h.field();
    let rad = h.lower_radical();
    if rad.dim() == 0 {
        return Ok(());
    }
    let frame = rad.quotient_frame().unwrap();
    let s = Subspace::span(f, h.n(), &frame.complement);
    let rebuilt = if s.dim() == h.k() {
        trivial_hyperplane(f, rad, h.k()).unwrap()
    } else {
        match h.restrict(&s).unwrap() {
            Restriction::Full => return Err("restriction to S vanished".into()),
            Restriction::Hyperplane(hs) => trivial_extension(hs.functional(), &s, rad).unwrap(),
        }
    };
    if proportional(f, h.functional(), rebuilt.functional()) {
        Ok(())
    } else {
        Err("H(S) extended along R_down differs from H".into())
    }
}

/// R_down(E(H0)) is R_down(H0) placed inside V0.
pub fn expansion_radical(f: &Field, n: usize, k: usize, rng: &mut ChaCha8Rng) -> Check {
    let h0 = random_hyperplane(f, n - 1, k - 1, rng);
    let v0 = Subspace::random(f, n, n - 1, rng);
    let e = expansion(h0.functional(), &v0).map_err(|e| e.to_string())?;
    let r0 = h0.lower_radical();
    let want = Subspace::span(f, n, &r0.basis().mul(f, v0.basis()));
    if *e.lower_radical() != want {
        return Err("R_down(E(H0)) differs from R_down(H0)".into());
    }
    Ok(())
}

fn wedge2_embedding(f: &Field, w: &Subspace) -> Matrix {
    let b = w.basis_vectors();
    let d = b.len();
    let rows: Vec<Vec<Scalar>> = (0..d)
        .flat_map(|i| (i + 1..d).map(move |j| (i, j)))
        .map(|(i, j)| {
            wedge_of_vectors(f, &[b[i].clone(), b[j].clone()])
                .unwrap()
                .coeffs
        })
        .collect();
    Matrix::from_rows(rows)
}

fn rowspace_rank(f: &Field, m: &Matrix) -> usize {
    if m.rows() == 0 {
        0
    } else {
        m.rank(f)
    }
}

/// For t with depth(H) < n-1-2t and W of dimension n-t: the contraction
/// of H(W) is onto W*, and K(H(W)) gains at most t dimensions over
/// K(H) inside the bivectors of V (k = 3).
pub fn kernel_bounds(h: &Hyperplane, t: usize, rng: &mut ChaCha8Rng) -> Check {
    let f = h.field();
    let n = h.n();
    if h.depth().unwrap() + 2 * t >= n - 1 {
        return Ok(());
    }
    let w = Subspace::random(f, n, n - t, rng);
    let hw = match h.restrict(&w).unwrap() {
        Restriction::Full => return Err("H(W) is all of G_3(W)".into()),
        Restriction::Hyperplane(x) => x,
    };
    let ft = hw.functional().ftilde_matrix();
    if ft.rank(f) != n - t {
        return Err(format!("dim of bivectors mod K(H(W)) is {}", ft.rank(f)));
    }
    let kw = ft.null_space(f);
    let kw_in_v = if kw.rows() == 0 {
        kw
    } else {
        kw.mul(f, &wedge2_embedding(f, &w))
    };
    let kh = h.functional().ftilde_matrix().null_space(f);
    let dim_kw = rowspace_rank(f, &kw_in_v);
    let dim_kh = rowspace_rank(f, &kh);
    let sum = rowspace_rank(f, &kw_in_v.stack(&kh));
    let meet = dim_kw + dim_kh - sum;
    if dim_kw - meet > t {
        return Err(format!(
            "K(H(W)) / (K(H) meet K(H(W))) has dim {}",
            dim_kw - meet
        ));
    }
    Ok(())
}
