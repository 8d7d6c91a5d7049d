use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::matrix::has_eigenvalue;

fn gf(q: u64) -> Field {
    Field::parse_spec(&q.to_string()).unwrap()
}

fn canon(label: TypeLabel, n: usize, f: &Field) -> Hyperplane {
    Hyperplane::new(canonical_form(label, n, f, None).unwrap()).unwrap()
}

fn e(n: usize, i: usize) -> Vec<Scalar> {
    let mut v = vec![Scalar::ZERO; n];
    v[i - 1] = Scalar::ONE;
    v
}

fn random_invertible(f: &Field, n: usize, rng: &mut ChaCha8Rng) -> Matrix {
    loop {
        let m = Matrix::from_fn(n, n, |_, _| f.random(rng));
        if m.rank(f) == n {
            return m;
        }
    }
}

#[test]
fn trivial_hyperplane_membership() {
    let f = gf(2);
    let v1 = Subspace::coordinate(5, &[3, 4]);
    let h = trivial_hyperplane(&f, &v1, 3).unwrap();
    assert_eq!(h.functional().to_text(), "123");
    assert!(h.contains(&Subspace::coordinate(5, &[0, 1, 3])).unwrap());
    assert!(!h.contains(&Subspace::coordinate(5, &[0, 1, 2])).unwrap());
    assert!(matches!(
        h.contains(&Subspace::coordinate(5, &[0, 1])),
        Err(HyperplaneError::DimensionMismatch(_))
    ));
}

#[test]
fn lower_radicals_and_ranks() {
    let f = gf(2);
    let t1 = canon(TypeLabel::T1, 5, &f);
    assert_eq!(t1.lower_radical(), &Subspace::coordinate(5, &[3, 4]));
    assert_eq!(t1.rank(), 3);
    assert_eq!(canon(TypeLabel::T2, 5, &f).rank(), 5);
    assert_eq!(t1.pole_degree(&e(5, 4)).unwrap(), 4);
}

#[test]
fn rank_four_never_occurs_at_n5() {
    let f = gf(2);
    for bits in 1u64..1 << 10 {
        let coeffs = (0..10).map(|r| Scalar(bits >> r & 1)).collect();
        let h = Hyperplane::new(AlternatingFunctional::new(&f, 5, 3, coeffs).unwrap()).unwrap();
        assert!(matches!(h.rank(), 3 | 5), "bits {bits:b}");
    }
}

#[test]
fn local_polar_of_trivial_hyperplane_is_zero() {
    let f = gf(3);
    let v1 = Subspace::coordinate(5, &[3, 4]);
    let h = trivial_hyperplane(&f, &v1, 3).unwrap();
    let x = Subspace::span_vectors(&f, 5, &[e(5, 4)]);
    let lp = h.local_polar(&x).unwrap();
    assert!(lp.gram.is_zero());
    assert_eq!(lp.radical_dim(&f), 4);
    assert_eq!(lp.members(&f).len(), 40);
}

#[test]
fn local_polar_general_k_matches_k3() {
    let f = gf(3);
    let h = canon(TypeLabel::T9, 7, &f);
    let x = Subspace::span_vectors(
        &f,
        7,
        &[vec![1, 0, 2, 1, 0, 0, 1].into_iter().map(Scalar).collect()],
    );
    let lp = h.local_polar(&x).unwrap();
    assert!(lp.gram.is_alternating(&f));
    assert_eq!(lp.radical_dim(&f), h.pole_degree(x.basis().row(0)).unwrap());
}

#[test]
fn t9_poles_are_the_quadric() {
    let f = gf(2);
    let h = canon(TypeLabel::T9, 7, &f);
    let degs = h.degrees().unwrap();
    for (p, &d) in h.points().iter().zip(degs) {
        let x = |i: usize| p[i - 1].0;
        let on = (x(1) * x(4) + x(2) * x(5) + x(3) * x(6) + x(7) * x(7)) % 2 == 0;
        assert_eq!(d, if on { 2 } else { 0 });
    }
    assert_eq!(h.poles().unwrap().len(), 63);
    assert_eq!(h.depth().unwrap(), 2);
}

#[test]
fn t8_poles_have_degree_four() {
    let f = gf(3);
    let h = canon(TypeLabel::T8, 7, &f);
    let poles = h.poles().unwrap();
    assert!(!poles.is_empty());
    assert!(poles.iter().all(|(_, d)| *d == 4));
}

#[test]
fn upper_radical_t1_both_methods() {
    let f = gf(2);
    let h = canon(TypeLabel::T1, 5, &f);
    let a = h
        .upper_radical(UpperRadicalMethod::Kernel, 1 << 20)
        .unwrap();
    let b = h
        .upper_radical(UpperRadicalMethod::BruteForce, 1 << 20)
        .unwrap();
    assert_eq!(a.len(), 43);
    assert_eq!(a, b);
    assert_eq!(h.upper_radical_size().unwrap(), 43);
    assert_eq!(h.upper_radical_from_poles().unwrap(), a);
}

#[test]
fn t10_is_a_line_spread() {
    let f = gf(2);
    let h = canon(TypeLabel::T10, 6, &f);
    let lines = h
        .upper_radical(UpperRadicalMethod::Kernel, 1 << 20)
        .unwrap();
    assert_eq!(lines.len(), 21);
    let mut covered: Vec<Vec<Scalar>> = lines.iter().flat_map(|l| l.points(&f)).collect();
    covered.sort();
    covered.dedup();
    assert_eq!(covered.len(), 63);
    assert!(h.is_spread_like(1 << 20).unwrap());
    let g = Gf2Trivector::from_functional(h.functional()).unwrap();
    assert_eq!(g.spread_lines().unwrap().len(), 21);
}

#[test]
fn t10_spread_in_odd_characteristic() {
    let f = gf(3);
    let h = canon(TypeLabel::T10, 6, &f);
    assert!(h.is_spread_like(1 << 20).unwrap());
    assert_eq!(h.upper_radical_size().unwrap(), 91);
}

#[test]
fn t3_upper_radical_joins_the_two_planes() {
    let f = gf(2);
    let h = canon(TypeLabel::T3, 6, &f);
    let lines = h
        .upper_radical(UpperRadicalMethod::Kernel, 1 << 20)
        .unwrap();
    let v1 = Subspace::coordinate(6, &[0, 1, 2]);
    let v2 = Subspace::coordinate(6, &[3, 4, 5]);
    assert_eq!(lines.len(), 49);
    for l in &lines {
        assert_eq!(l.meet(&f, &v1).dim(), 1);
        assert_eq!(l.meet(&f, &v2).dim(), 1);
    }
    assert!(!h.is_spread_like(1 << 20).unwrap());
    assert!(!canon(TypeLabel::T1, 5, &f).is_spread_like(1 << 20).unwrap());
}

#[test]
fn i_radicals_agree_with_the_extremes() {
    let f = gf(2);
    let h = canon(TypeLabel::T1, 5, &f);
    let r1 = h.i_radical(1, 1 << 20).unwrap();
    let low: Vec<Subspace> = h
        .lower_radical()
        .points(&f)
        .into_iter()
        .map(|p| Subspace::span_vectors(&f, 5, &[p]))
        .collect();
    let mut low = low;
    low.sort();
    let mut r1s = r1.clone();
    r1s.sort();
    assert_eq!(r1s, low);
    assert_eq!(
        h.i_radical(2, 1 << 20).unwrap(),
        h.upper_radical(UpperRadicalMethod::BruteForce, 1 << 20)
            .unwrap()
    );
}

#[test]
fn restriction_of_eight_form_is_t9() {
    let f = gf(3);
    let c8 = random_eigfree(&f, 7);
    let h = build_canonical_eight(&c8, &f).unwrap();
    let w = Subspace::coordinate(8, &[0, 1, 2, 3, 4, 5, 6]);
    let r = h.restrict(&w).unwrap().hyperplane().unwrap();
    assert_eq!(r.functional().to_text(), "123+147+257+367+456");
    assert!(is_hexagonal(&r).unwrap());
}

#[test]
fn restriction_to_small_space_can_be_full() {
    let f = gf(2);
    let h = trivial_hyperplane(&f, &Subspace::coordinate(5, &[3, 4]), 3).unwrap();
    // W = <e1, e4, e5, e2>: V1 has codimension 2 < 3 in W
    let w = Subspace::coordinate(5, &[0, 1, 3, 4]);
    assert!(matches!(h.restrict(&w).unwrap(), Restriction::Full));
    assert!(matches!(
        h.restrict(&Subspace::coordinate(5, &[0, 1, 2])),
        Err(HyperplaneError::DimensionTooSmall { .. })
    ));
}

#[test]
fn expansion_of_symplectic_form() {
    let f = gf(2);
    let h0 = AlternatingFunctional::parse(&f, 4, Some(2), "12+34").unwrap();
    let v0 = Subspace::coordinate(5, &[0, 1, 2, 3]);
    let h = expansion(&h0, &v0).unwrap();
    assert_eq!(h.functional().to_text(), "125+345");
    // trivially extended by e6 it has the T2 signature at n = 6
    let v6 = Subspace::coordinate(6, &[0, 1, 2, 3, 4]);
    let ext = trivial_extension(h.functional(), &v6, &Subspace::coordinate(6, &[5])).unwrap();
    assert_eq!(identify_type(&ext).unwrap(), Some(TypeLabel::T2));
}

#[test]
fn expansion_of_trivial_is_trivial() {
    let f = gf(3);
    let h0 = AlternatingFunctional::parse(&f, 4, Some(2), "12").unwrap();
    let h = expansion(&h0, &Subspace::coordinate(5, &[0, 1, 2, 3])).unwrap();
    assert_eq!(h.rank(), 3);
}

#[test]
fn trivial_extension_rejects_overlap() {
    let f = gf(2);
    let h0 = AlternatingFunctional::parse(&f, 3, Some(3), "123").unwrap();
    let v0 = Subspace::coordinate(5, &[0, 1, 2]);
    let v1 = Subspace::coordinate(5, &[2, 3]);
    assert_eq!(
        trivial_extension(&h0, &v0, &v1).unwrap_err(),
        HyperplaneError::NotComplementary
    );
}

#[test]
fn pinned_signatures_q2_n7() {
    let f = gf(2);
    let want = [
        (TypeLabel::T5, 95, 13),
        (TypeLabel::T6, 63, 7),
        (TypeLabel::T7, 79, 3),
        (TypeLabel::T8, 63, 63),
        (TypeLabel::T9, 63, 0),
        (TypeLabel::T11, 31, 1),
    ];
    for (label, poles, deg4) in want {
        let s = signature(&canon(label, 7, &f)).unwrap();
        assert_eq!(s.rank, 7, "{label}");
        assert_eq!(s.poles, poles, "{label}");
        assert_eq!(s.degree_hist.get(&4).copied().unwrap_or(0), deg4, "{label}");
    }
}

#[test]
fn pinned_upper_radicals_q2_n6() {
    let f = gf(2);
    for (label, size) in [
        (TypeLabel::T3, 49),
        (TypeLabel::T4, 35),
        (TypeLabel::T10, 21),
    ] {
        assert_eq!(
            canon(label, 6, &f).upper_radical_size().unwrap(),
            size,
            "{label}"
        );
    }
}

#[test]
fn t4_upper_radical_includes_the_lines_of_v2() {
    // lines <x + y, w(x)> with x in V1 \ 0, y in V2, plus the lines of [V2]
    for q in [2u64, 3] {
        let f = gf(q);
        let h = canon(TypeLabel::T4, 6, &f);
        let lines = h
            .upper_radical(UpperRadicalMethod::Kernel, 1 << 20)
            .unwrap();
        assert_eq!(lines.len() as u64, (q * q + q + 1) * (q * q + 1));
        let v2 = Subspace::coordinate(6, &[3, 4, 5]);
        let inside = lines.iter().filter(|l| v2.contains(&f, l)).count() as u64;
        assert_eq!(inside, q * q + q + 1);
    }
}

#[test]
fn hexagonality() {
    let f = gf(2);
    assert!(is_hexagonal(&canon(TypeLabel::T9, 7, &f)).unwrap());
    assert!(!is_hexagonal(&canon(TypeLabel::T8, 7, &f)).unwrap());
    assert!(!is_hexagonal(&canon(TypeLabel::T1, 7, &f)).unwrap());
    assert_eq!(
        is_hexagonal(&canon(TypeLabel::T3, 6, &f)).unwrap_err(),
        HyperplaneError::WrongDimension { want: 7, got: 6 }
    );
    assert!(singular_plane_free(&canon(TypeLabel::T9, 7, &f)).unwrap());
    assert!(!singular_plane_free(&canon(TypeLabel::T5, 7, &f)).unwrap());
    let triv = trivial_hyperplane(&f, &Subspace::coordinate(7, &[3, 4, 5, 6]), 3).unwrap();
    assert!(!singular_plane_free(&triv).unwrap());
}

#[test]
fn gf2_fast_path_matches_generic() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in [5usize, 6, 7] {
        for _ in 0..25 {
            let bits: u64 = rng.gen::<u64>() & ((1u64 << binom(n, 3)) - 1);
            if bits == 0 {
                continue;
            }
            let g = Gf2Trivector::from_bits(n, bits);
            let h = Hyperplane::new(g.to_functional()).unwrap();
            assert_eq!(g.signature(), signature(&h).unwrap());
            let fast = g.degrees();
            for (p, &d) in h.points().iter().zip(h.degrees().unwrap()) {
                let mask = p.iter().enumerate().fold(0u64, |m, (i, s)| m | s.0 << i);
                assert_eq!(fast[mask as usize - 1], d);
            }
        }
    }
}

#[test]
fn identify_conjugates() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for q in [2u64, 3] {
        let f = gf(q);
        for label in TypeLabel::ALL {
            let h = canon(label, 7, &f);
            let g = random_invertible(&f, 7, &mut rng);
            let hc = h.transformed(&g).unwrap();
            assert_eq!(
                identify_type(&hc).unwrap(),
                Some(label),
                "{label} over GF({q})"
            );
        }
    }
}

#[test]
fn scaling_keeps_everything() {
    let f = gf(3);
    let h = canon(TypeLabel::T7, 7, &f);
    let h2 = h.scaled(Scalar(2)).unwrap();
    assert_eq!(signature(&h).unwrap(), signature(&h2).unwrap());
    assert_eq!(h.lower_radical(), h2.lower_radical());
}

#[test]
fn companion_block_is_eigenvalue_free() {
    let f = gf(2);
    let mut c8 = CanonicalEightForm::zero();
    // companion of t^3 + t + 1
    c8.set_block(&Matrix::from_ints(
        &f,
        &[&[0, 0, 1], &[1, 0, 1], &[0, 1, 0]],
    ));
    assert!(!has_eigenvalue(&c8.block(), &f).unwrap());
    let n = normalize_eight(&c8, &f).unwrap();
    assert!(n.is_normalized());
    let mut bad = CanonicalEightForm::zero();
    bad.set_block(&Matrix::identity(3));
    assert_eq!(
        normalize_eight(&bad, &f).unwrap_err(),
        HyperplaneError::EigenvaluePresent
    );
}

#[test]
fn normalization_is_an_equivalence() {
    for (q, seeds) in [(2u64, 0..6u64), (3, 0..4), (5, 0..3)] {
        let f = gf(q);
        for seed in seeds {
            let mut c8 = random_eigfree(&f, seed);
            if seed % 2 == 0 {
                // exercise the preliminary swap
                c8.set(1, 6, Scalar::ZERO);
                if has_eigenvalue(&c8.block(), &f).unwrap() {
                    continue;
                }
            }
            let (nf, m) = normalize_eight_with_map(&c8, &f).unwrap();
            assert!(nf.is_normalized());
            assert_eq!(
                c8.block().charpoly(&f).unwrap(),
                nf.block().charpoly(&f).unwrap()
            );
            assert_eq!(c8.functional(&f).pullback(&m), nf.functional(&f));
            assert_eq!(m.rank(&f), 8);
            if q <= 3 {
                let a = build_canonical_eight(&c8, &f).unwrap();
                let b = build_canonical_eight(&nf, &f).unwrap();
                assert_eq!(signature(&a).unwrap(), signature(&b).unwrap());
            }
        }
    }
}

#[test]
fn sigma_covers_poles_of_sections() {
    let f = gf(2);
    let h = canon(TypeLabel::T10, 6, &f);
    for c in crate::geometry::all_points(&f, 6) {
        let v = dual_hyperplane(&f, &c);
        let sigma = sigma_in_hyperplane(&h, &v).unwrap();
        assert_eq!(sigma.len(), 5);
        let r = h.restrict(&v).unwrap().hyperplane().unwrap();
        for (p, _) in r.poles().unwrap() {
            let pv = v.basis().transpose().mul_vec(&f, &p);
            let pt = Subspace::span_vectors(&f, 6, &[pv]);
            assert!(sigma.iter().any(|l| l.contains(&f, &pt)));
        }
    }
    let v = dual_hyperplane(&f, &e(6, 6));
    assert_eq!(
        sigma_in_hyperplane(&canon(TypeLabel::T3, 6, &f), &v).unwrap_err(),
        HyperplaneError::NotASpread
    );
}

#[test]
fn eight_form_sections_q2() {
    let f = gf(2);
    let c8 = normalize_eight(&random_eigfree(&f, 1), &f).unwrap();
    let h = build_canonical_eight(&c8, &f).unwrap();
    let rep = section_scan(&h).unwrap();
    assert_eq!(rep.hyperplanes, 255);
    assert!(rep.holds());
    assert!(!rep.spread);
    assert!(section_is_hexagonal(&h, &e(8, 8)).unwrap());
}
