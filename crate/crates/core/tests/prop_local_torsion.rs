mod common;

use common::strategies::{config, small_curve};
use common::*;
use proptest::prelude::*;
use shavis_core::arith::primes::is_squarefree;
use shavis_core::curve::WeierstrassModel;
use shavis_core::local_torsion::{
    formal_group_criterion, local_torsion, local_twist_classes, torsion_by_division_poly, with_precision_retry, Method,
    DEFAULT_PRECISION,
};
use shavis_core::tate::{tate_algorithm, ReductionClass};
use shavis_core::Error;

fn divpoly(e: &WeierstrassModel, ell: u64) -> Option<bool> {
    with_precision_retry(DEFAULT_PRECISION, |p| torsion_by_division_poly(e, ell, p))
        .unwrap()
        .torsion_trivial
}

#[test]
fn e1_twist_law() {
    for d in -200i64..=200 {
        if d == 0 || d % 3 == 0 || !is_squarefree(&int(d)) {
            continue;
        }
        let ed = twist(&e1(), d);
        let trivial = divpoly(&ed, 3);
        assert_eq!(trivial, Some(d.rem_euclid(3) == 2), "D = {d}");
        let crit = formal_group_criterion(&ed, 3).unwrap();
        if let Some(t) = crit.torsion_trivial {
            assert_eq!(Some(t), trivial, "D = {d}: {}", crit.details);
        }
    }
}

fn additive_at_3() -> impl Strategy<Value = WeierstrassModel> {
    prop::array::uniform3(-40i64..=40).prop_filter_map("not additive at 3", |[a, b, c]| {
        let e = WeierstrassModel::from_ints([0, 3 * a, 0, 3 * b, 3 * c]).ok()?;
        (tate_algorithm(&e, 3).reduction_class == ReductionClass::Additive).then_some(e)
    })
}

proptest! {
    #![proptest_config(config(20))]

    #[test]
    fn criterion_matches_division_polynomial(e in additive_at_3()) {
        let dp = divpoly(&e, 3);
        match formal_group_criterion(&e, 3) {
            Ok(crit) => {
                if let Some(t) = crit.torsion_trivial {
                    prop_assert_eq!(Some(t), dp, "{}", crit.details);
                }
                if crit.e0_torsion_trivial == Some(false) {
                    prop_assert_eq!(dp, Some(false));
                }
                prop_assert!(local_torsion(&e, 3, Method::Combined, DEFAULT_PRECISION).is_ok());
            }
            Err(Error::ShapeUnreachable(_)) => {}
            Err(err) => prop_assert!(false, "{}", err),
        }
    }

    #[test]
    fn nontrivial_torsion_survives_doubled_precision(e in small_curve(15), ell in prop::sample::select(vec![3u64, 5, 7])) {
        let r = with_precision_retry(DEFAULT_PRECISION, |p| torsion_by_division_poly(&e, ell, p)).unwrap();
        if r.torsion_trivial == Some(false) {
            let again = torsion_by_division_poly(&e, ell, 2 * r.precision).unwrap();
            prop_assert_eq!(again.torsion_trivial, Some(false));
        }
    }

    #[test]
    fn twist_classes_of_the_family(d in (-400i64..=400).prop_filter("square-free", |&d| d != 0 && is_squarefree(&int(d)))) {
        // The trivial classes are a property of the square class of E at 3.
        let ed = twist(&e1(), d);
        let classes = local_twist_classes(&ed, 3).unwrap();
        prop_assert!(classes.len() >= 2, "D = {}: {:?}", d, classes);
    }
}
