mod common;

use common::{fermat_pencil, random_weil, random_weil_q2, rng};
use num_bigint::BigInt;
use num_traits::Zero;
use proptest::prelude::*;
use zetagcd::pencil::sample_smooth_fibre;
use zetagcd::pipeline::*;
use zetagcd::poly::{is_weil, power_map, resultant, weil_gcd, IntPoly, PolyError, WeilPoly};

#[test]
fn trial_records_satisfy_invariants() {
    let p = fermat_pencil(2, 0, 4);
    let q = p.over(10).unwrap().desc().clone();
    let e = estimate_success(&p, &q, 8, 11, Some(&IntPoly::one())).unwrap();
    for r in &e.records {
        for f in [&r.f1, &r.f2] {
            let lambda = BigInt::from(f.q);
            assert!(is_weil(&f.poly, &lambda, 1e-9).passed);
            assert!(f.poly.div_exact(&r.g).is_some());
        }
        assert_eq!(r.success, Some(coprime_by_resultant(r).unwrap()));
        assert!(r.g.coeff(0) == BigInt::from(1));
    }
    assert!(e.wilson_low <= e.fraction && e.fraction <= e.wilson_high);
}

#[test]
fn single_trial_fraction() {
    let p = fermat_pencil(2, 0, 4);
    let q = p.over(8).unwrap().desc().clone();
    let e = estimate_success(&p, &q, 1, 3, Some(&IntPoly::one())).unwrap();
    assert!(e.fraction == 0.0 || e.fraction == 1.0);
    assert!(matches!(estimate_success(&p, &q, 0, 3, Some(&IntPoly::one())), Err(PipelineError::NoTrials)));
}

#[test]
fn descend_on_fermat_surface_is_blocked_at_odd_degree() {
    // over F_(2^3) every smooth fibre is supersingular with numerator
    // 1 + 8T^2, so the gcd is never trivial there and no descent to 1 exists
    let p = fermat_pencil(2, 0, 4);
    let q = p.over(3).unwrap().desc().clone();
    let e = estimate_success(&p, &q, 20, 5, Some(&IntPoly::one())).unwrap();
    assert!(e.records.iter().all(|r| r.g == IntPoly::from_i64(&[1, 0, 8])));
    assert!(matches!(descend(&p, 3, 4, 5), Err(PipelineError::NoConsistentMatching(n)) if n == DESCEND_ATTEMPTS));
}

#[test]
fn synthetic_descents_invert_power_map() {
    let mut r = rng(2024);
    for _ in 0..100 {
        let f = random_weil_q2(&mut r);
        let g1 = power_map(&f, 2).unwrap();
        let g2 = power_map(&f, 3).unwrap();
        let back = descend_from_candidates(&g1.poly, 2, &g2.poly, 3, f.q, 1).unwrap();
        assert_eq!(back.poly, f.poly);
    }
}

#[test]
fn descent_is_never_wrong() {
    let mut r = rng(7);
    for _ in 0..100 {
        let f = random_weil(&mut r);
        let g1 = power_map(&f, 2).unwrap();
        let g2 = power_map(&f, 3).unwrap();
        match descend_from_candidates(&g1.poly, 2, &g2.poly, 3, f.q, 1) {
            Ok(back) => assert_eq!(back.poly, f.poly),
            Err(e) => assert!(matches!(e, PolyError::AmbiguousMatching(_)), "{e}"),
        }
    }
}

#[test]
fn twisted_pair_is_ambiguous() {
    // same images at r = 2 and r = 3: the cubes of the roots are purely
    // imaginary, so negating both roots permutes them
    let a = WeilPoly::new(IntPoly::from_i64(&[1, -3, 3]), 3, 1).unwrap();
    let b = WeilPoly::new(IntPoly::from_i64(&[1, 3, 3]), 3, 1).unwrap();
    for r in [2, 3] {
        assert_eq!(power_map(&a, r).unwrap(), power_map(&b, r).unwrap());
    }
    let g1 = power_map(&a, 2).unwrap();
    let g2 = power_map(&a, 3).unwrap();
    assert_eq!(descend_from_candidates(&g1.poly, 2, &g2.poly, 3, 3, 1), Err(PolyError::AmbiguousMatching(2)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn gcd_is_symmetric(seed in any::<u64>()) {
        let p = fermat_pencil(2, 1, 4);
        let pf = p.over(7).unwrap();
        let u1 = sample_smooth_fibre(&pf, seed).unwrap();
        let u2 = sample_smooth_fibre(&pf, seed ^ 0xabcd).unwrap();
        let a = gcd_trial_at(&pf, u1, u2, Some(&IntPoly::one()), seed).unwrap();
        let b = gcd_trial_at(&pf, u2, u1, Some(&IntPoly::one()), seed).unwrap();
        prop_assert_eq!(&a.g, &b.g);
        prop_assert_eq!(a.success, Some(!resultant(&a.f1.poly, &a.f2.poly).unwrap().is_zero()));
    }

    #[test]
    fn weil_gcd_symmetric_on_products(s in any::<u64>()) {
        let mut r = rng(s);
        let (a, b) = (random_weil(&mut r), random_weil(&mut r));
        prop_assert_eq!(weil_gcd(&a.poly, &b.poly).unwrap(), weil_gcd(&b.poly, &a.poly).unwrap());
    }
}
