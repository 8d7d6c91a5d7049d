mod common;

use num_bigint::BigInt;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::*;
use hypergrass::counting::{lines_count_m, residue_check, Verdict};
use hypergrass::delta::{parse_poly, var_names, IntPoly, Integers};
use hypergrass::Field;

fn field(q: u64) -> Field {
    match q {
        4 => Field::new(2, 2).unwrap(),
        _ => Field::prime(q).unwrap(),
    }
}

// (n, k, q) small enough for exhaustive pole data
fn small_case() -> impl Strategy<Value = (usize, usize, u64)> {
    prop_oneof![
        Just((5, 3, 2)),
        Just((5, 3, 3)),
        Just((6, 3, 2)),
        Just((6, 3, 3)),
        Just((7, 3, 2)),
        Just((5, 2, 3)),
        Just((6, 4, 2)),
        Just((5, 3, 4)),
    ]
}

fn setup(seed: u64, (n, k, q): (usize, usize, u64)) -> (ChaCha8Rng, hypergrass::Hyperplane) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = random_hyperplane(&field(q), n, k, &mut rng);
    (rng, h)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn lines_meet_h_in_one_or_all(seed in any::<u64>(), case in small_case()) {
        let (mut rng, h) = setup(seed, case);
        prop_assert_eq!(line_axiom_sampled(&h, 40, &mut rng), Ok(()));
    }

    #[test]
    fn local_polar_spaces_are_one_or_all(seed in any::<u64>(), case in small_case()) {
        let (mut rng, h) = setup(seed, case);
        prop_assume!(h.n() <= 6);
        prop_assert_eq!(polar_one_or_all(&h, 2, &mut rng), Ok(()));
    }

    #[test]
    fn degrees_have_the_parity_of_n_minus_one(seed in any::<u64>(), case in small_case()) {
        let (_, h) = setup(seed, case);
        prop_assume!(h.k() == 3);
        prop_assert_eq!(degree_parity(&h), Ok(()));
    }

    #[test]
    fn scaling_changes_nothing(seed in any::<u64>(), case in small_case()) {
        let (mut rng, h) = setup(seed, case);
        prop_assert_eq!(scaling_invariance(&h, &mut rng), Ok(()));
    }

    #[test]
    fn radicals_are_closed(seed in any::<u64>(), case in small_case()) {
        let (_, h) = setup(seed, case);
        prop_assume!(h.n() <= 6);
        prop_assert_eq!(radicals_are_subspaces(&h), Ok(()));
    }

    #[test]
    fn lower_radical_has_codimension_at_least_k(seed in any::<u64>(), case in small_case()) {
        let (_, h) = setup(seed, case);
        prop_assert_eq!(radical_codimension(&h), Ok(()));
    }

    #[test]
    fn trivial_extension_round_trips(seed in any::<u64>(), case in small_case()) {
        let (_, h) = setup(seed, case);
        prop_assert_eq!(trivial_extension_round_trip(&h), Ok(()));
    }

    #[test]
    fn expansion_keeps_the_radical(seed in any::<u64>(), case in small_case()) {
        let (n, k, q) = case;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        prop_assume!(k >= 3);
        prop_assert_eq!(expansion_radical(&field(q), n, k, &mut rng), Ok(()));
    }

    #[test]
    fn kernels_grow_by_at_most_t(seed in any::<u64>(), q in prop_oneof![Just(2u64), Just(3)], n in 7usize..=9, t in 1usize..=2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = random_hyperplane(&field(q), n, 3, &mut rng);
        prop_assert_eq!(kernel_bounds(&h, t, &mut rng), Ok(()));
    }
}

fn random_poly(rng: &mut ChaCha8Rng, nvars: usize) -> IntPoly {
    use rand::Rng;
    let vars = var_names(&["x", "y", "z", "w"][..nvars]);
    let mut p = IntPoly::zero(&Integers, &vars);
    for _ in 0..rng.gen_range(0..8) {
        let e: Vec<u32> = (0..nvars).map(|_| rng.gen_range(0..4)).collect();
        p.add_term(e, BigInt::from(rng.gen_range(-40i64..=40)));
    }
    p
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn polynomial_text_round_trips(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_poly(&mut rng, 4);
        let back = parse_poly(&p.to_text(), p.vars()).unwrap();
        prop_assert_eq!(back, p);
    }

    #[test]
    fn evaluation_is_a_ring_map(seed in any::<u64>(), q in prop_oneof![Just(7u64), Just(65521)]) {
        let f = field(q);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_poly(&mut rng, 3);
        let b = random_poly(&mut rng, 3);
        let v: Vec<_> = (0..3).map(|_| f.random(&mut rng)).collect();
        let (ea, eb) = (a.eval_in(&f, &v), b.eval_in(&f, &v));
        prop_assert_eq!(a.add(&b).eval_in(&f, &v), f.add(ea, eb));
        prop_assert_eq!(a.mul(&b).eval_in(&f, &v), f.mul(ea, eb));
        prop_assert_eq!(a.reduce(&f).eval(&v), ea);
    }

    #[test]
    fn verdict_follows_r_mod_3(qi in 0usize..9, half in 3usize..30) {
        let q = [2u64, 3, 4, 5, 7, 8, 9, 11, 13][qi];
        let n = 2 * half;
        let r = residue_check(q, n).unwrap();
        let bad = r.r % 3 == 1;
        prop_assert_eq!(r.verdict == Verdict::NotASpreadPossible, bad);
        prop_assert_eq!(r.planes.is_none(), bad);
        let m = lines_count_m(q, r.r).unwrap();
        prop_assert_eq!(r.m, m.to_string());
    }
}

#[test]
fn line_axiom_holds_everywhere_for_small_cases() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for &(n, k, q) in &[(5, 3, 2), (5, 2, 2), (6, 3, 2), (5, 3, 3)] {
        for _ in 0..3 {
            let h = random_hyperplane(&field(q), n, k, &mut rng);
            assert_eq!(line_axiom_exhaustive(&h), Ok(()), "{h:?}");
        }
    }
}
