mod common;

use common::strategies::{config, small_curve, squarefree};
use common::*;
use proptest::prelude::*;
use shavis_core::congruence::{congruence_verdict_with_bound, q_expansion};
use shavis_core::curve::WeierstrassModel;
use shavis_core::isogeny::rational_isogeny_gate;

proptest! {
    #![proptest_config(config(30))]

    #[test]
    fn expansions_are_multiplicative(e in small_curve(10)) {
        prop_assume!(shavis_core::tate::global_minimal_model(&e).conductor() < num_bigint::BigInt::from(1u64 << 40));
        let q = q_expansion(&e, 300).unwrap();
        prop_assert!(q.verify_structure());
        prop_assert_eq!(q.a(1), 1);
        for m in 1..=17usize {
            for n in 1..=17usize {
                if num_integer::gcd(m, n) == 1 {
                    prop_assert_eq!(q.a(m * n), q.a(m) * q.a(n));
                }
            }
        }
    }

    #[test]
    fn verdict_is_symmetric_and_mod_l(ell in prop::sample::select(vec![2u64, 3, 5, 7, 11]), bound in 20u64..400) {
        for (a, b) in [(e1(), f()), (e1(), e2()), (e2(), f())] {
            let (v, qa, qb) = congruence_verdict_with_bound(&a, &b, ell, Some(bound)).unwrap();
            let (w, _, _) = congruence_verdict_with_bound(&b, &a, ell, Some(bound)).unwrap();
            prop_assert_eq!(&v, &w);
            let l = ell as i64;
            let direct = (1..=bound as usize).find(|&n| (qa.a(n) - qb.a(n)).rem_euclid(l) != 0);
            prop_assert_eq!(v.first_failure, direct.map(|n| n as u64));
            prop_assert_eq!(v.congruent, direct.is_none());
        }
    }

    #[test]
    fn gate_is_twist_stable(d in squarefree(500), pick in 0usize..3) {
        let base = [e1(), e2(), f()][pick].clone();
        let v = rational_isogeny_gate(&base, 3).unwrap();
        let vd = rational_isogeny_gate(&twist(&base, d), 3).unwrap();
        prop_assert_eq!(v, vd);
    }

    #[test]
    fn gate_stable_on_random_curves(e in small_curve(15), d in squarefree(60)) {
        let v = rational_isogeny_gate(&e, 3).unwrap();
        let vd = rational_isogeny_gate(&e.quadratic_twist(&num_bigint::BigInt::from(d)).unwrap(), 3).unwrap();
        prop_assert_eq!(v.has_rational_isogeny, vd.has_rational_isogeny);
    }
}

proptest! {
    #![proptest_config(config(10))]

    /// `y^2 + a xy + b y = x^3` has the rational 3-torsion point (0, 0).
    #[test]
    fn three_torsion_forces_isogeny(a in -30i64..=30, b in 1i64..=30) {
        let e = WeierstrassModel::from_ints([a, 0, b, 0, 0]);
        prop_assume!(e.is_ok());
        let e = e.unwrap();
        prop_assert_eq!(e.small_order(&shavis_core::curve::CurvePoint::affine(q("0"), q("0"))), Some(3));
        prop_assert!(rational_isogeny_gate(&e, 3).unwrap().has_rational_isogeny);
    }
}
