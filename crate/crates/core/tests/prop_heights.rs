mod common;

use common::strategies::{config, small_curve};
use common::*;
use num_traits::Signed;
use proptest::prelude::*;
use shavis_core::arith::rational::{rat, rational_to_f64};
use shavis_core::bsd::{bsd_record, compare_records, model_period, real_period};
use shavis_core::curve::{CurvePoint, IsoTransform, WeierstrassModel};
use shavis_core::mordell_weil::{canonical_height, torsion_bound, torsion_subgroup};

const TOL: f64 = 1e-9;

/// 389a1, rank 2.
fn e389() -> WeierstrassModel {
    curve("[0,1,1,-2,0]")
}

fn combo(a: i64, b: i64) -> CurvePoint {
    let e = e389();
    let p1 = CurvePoint::affine(q("-1"), q("1"));
    let p2 = CurvePoint::affine(q("0"), q("0"));
    e.point_add(&e.point_multiply(&p1, a), &e.point_multiply(&p2, b))
}

fn h(p: &CurvePoint) -> f64 {
    canonical_height(&e389(), p, TOL).unwrap()
}

fn pairing(p: &CurvePoint, r: &CurvePoint) -> f64 {
    (h(&e389().point_add(p, r)) - h(p) - h(r)) / 2.0
}

fn coeffs() -> impl Strategy<Value = (i64, i64)> {
    (-3i64..=3, -3i64..=3)
}

proptest! {
    #![proptest_config(config(24))]

    #[test]
    fn height_is_quadratic((a, b) in coeffs(), n in prop::sample::select(vec![2i64, 3, 5])) {
        let p = combo(a, b);
        let hp = h(&p);
        let hn = h(&e389().point_multiply(&p, n));
        prop_assert!((hn - (n * n) as f64 * hp).abs() <= TOL * (n * n) as f64 + 1e-12 * hn.abs());
    }

    #[test]
    fn pairing_is_bilinear(x in coeffs(), y in coeffs(), z in coeffs()) {
        let (p, qq, r) = (combo(x.0, x.1), combo(y.0, y.1), combo(z.0, z.1));
        let lhs = pairing(&e389().point_add(&p, &qq), &r);
        let rhs = pairing(&p, &r) + pairing(&qq, &r);
        prop_assert!((lhs - rhs).abs() <= 4.0 * TOL + 1e-12 * lhs.abs().max(1.0), "{} vs {}", lhs, rhs);
    }

    #[test]
    fn local_decomposition_matches_doubling((a, b) in coeffs()) {
        prop_assume!((a, b) != (0, 0));
        let p = combo(a, b);
        let oracle = doubling_height(&e389(), &p, 8);
        prop_assert!((h(&p) - oracle).abs() < 1e-5, "{} vs {}", h(&p), oracle);
    }

    #[test]
    fn torsion_order_divides_bound(e in small_curve(20)) {
        let t = torsion_subgroup(&e).unwrap();
        let (bound, _) = torsion_bound(&e).unwrap();
        prop_assert_eq!(bound % t.order() as u64, 0);
        for pt in &t.points {
            prop_assert!(e.small_order(pt).is_some());
            prop_assert_eq!(canonical_height(&e, pt, TOL).unwrap(), 0.0);
        }
    }

    #[test]
    fn period_covariance(e in small_curve(20), u in prop::sample::select(vec![(2i64, 1i64), (3, 1), (1, 2), (5, 3), (-2, 7)])) {
        let uu = rat(u.0, u.1);
        let scaled = e.transform(&IsoTransform::scaling(uu.clone()));
        let (w, ws) = (model_period(&e), model_period(&scaled));
        prop_assert!(w > 0.0 && ws > 0.0);
        let factor = rational_to_f64(&uu.abs());
        prop_assert!((ws / factor - w).abs() <= 1e-10 * w, "{} vs {}", ws / factor, w);
        let (m, ms) = (real_period(&e, 1e-12).unwrap(), real_period(&scaled, 1e-12).unwrap());
        prop_assert!((m - ms).abs() <= 1e-11 * m);
    }

    #[test]
    fn comparison_is_symmetric_and_reflexive(a in small_curve(8), b in small_curve(8)) {
        let (ra, rb) = (bsd_record(&a, None).unwrap(), bsd_record(&b, None).unwrap());
        prop_assert!(compare_records(&ra, &ra).all_equal);
        let (ab, ba) = (compare_records(&ra, &rb), compare_records(&rb, &ra));
        prop_assert_eq!(ab.all_equal, ba.all_equal);
        prop_assert_eq!(ab.j_equal, ba.j_equal);
        for (x, y) in ab.fields.iter().zip(&ba.fields) {
            prop_assert_eq!(x.field, y.field);
            prop_assert_eq!(x.equal, y.equal);
            prop_assert_eq!(&x.a, &y.b);
        }
    }
}
