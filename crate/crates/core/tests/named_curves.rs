mod common;

use common::*;
use shavis_core::congruence::{congruence_verdict, q_expansion};
use shavis_core::mordell_weil::{canonical_height, torsion_subgroup};
use shavis_core::tate::global_minimal_model;

fn local_row(e: &shavis_core::curve::WeierstrassModel) -> Vec<String> {
    global_minimal_model(e)
        .local
        .iter()
        .map(|l| format!("{}:{}:{}", l.p, l.kodaira, l.tamagawa))
        .collect()
}

#[test]
fn base_curves() {
    assert_eq!(local_row(&e1()), ["3:I0*:2", "5:III*:2", "13:III*:2"]);
    assert_eq!(local_row(&e2()), ["3:I0*:2", "5:III*:2", "13:III*:2"]);
    let rf = local_row(&f());
    assert!(rf[0].starts_with("3:I3*:") && rf[1].starts_with("5:III:") && rf[2].starts_with("13:III*:"));
    for c in [e1(), e2(), f()] {
        assert_eq!(global_minimal_model(&c).conductor(), int(38025));
    }
}

#[test]
fn twisted_local_data() {
    for d in [6977i64, 23297] {
        for c in [e1(), e2()] {
            let row = local_row(&twist(&c, d));
            assert_eq!(row, ["3:I0*:2", "5:III*:2", "13:III*:2", &format!("{d}:I0*:2")]);
        }
        let row = local_row(&twist(&f(), d));
        assert_eq!(row, ["3:I3*:2", "5:III:2", "13:III*:2", &format!("{d}:I0*:4")]);
        let (m1, m2) = (global_minimal_model(&twist(&e1(), d)), global_minimal_model(&twist(&e2(), d)));
        assert_eq!(m1.discriminant, m2.discriminant);
        assert_eq!(m1.conductor(), int(38025 * d * d));
    }
}

#[test]
fn printed_models_minimalize() {
    assert_eq!(
        global_minimal_model(&twist(&e1(), 6977)).model.to_string(),
        "[1,-1,0,-644186933220492,6292799362676137627291]"
    );
    assert_eq!(
        global_minimal_model(&twist(&e2(), 6977)).model.to_string(),
        "[1,-1,0,-42611587022367,86202739442340650416]"
    );
    assert_eq!(global_minimal_model(&twist(&f(), 6977)).model, f6977_printed());
}

#[test]
fn expansions_and_congruence() {
    let a: Vec<i64> = (1..=19).map(|n| q_expansion(&e1(), 19).unwrap().a(n)).collect();
    assert_eq!(a, [1, 1, 0, -1, 0, 0, 0, -3, 0, 0, -2, 0, 0, 0, 0, -1, 0, 0, -6]);
    let b: Vec<i64> = (1..=19).map(|n| q_expansion(&f(), 19).unwrap().a(n)).collect();
    assert_eq!(b, [1, -2, 0, 2, 0, 0, 3, 0, 0, 0, -5, 0, 0, -6, 0, -4, 3, 0, 6]);
    let v = congruence_verdict(&e1(), &f(), 3).unwrap();
    assert!(v.congruent && v.bound == 10920 && v.index == 65520);
    let v5 = congruence_verdict(&e1(), &f(), 5).unwrap();
    assert_eq!(v5.first_failure, Some(2));
}

#[test]
fn twist_torsion() {
    for c in [twist(&e1(), 6977), twist(&e2(), 6977)] {
        assert_eq!(torsion_subgroup(&c).unwrap().structure.to_string(), "Z/2Z");
    }
    assert_eq!(torsion_subgroup(&f6977_printed()).unwrap().order(), 1);
}

#[test]
fn height_matches_doubling_oracle() {
    let e = f6977_printed();
    let h = canonical_height(&e, &published_point(), 1e-9).unwrap();
    let oracle = doubling_height(&e, &published_point(), 8);
    assert!((h - oracle).abs() < 1e-5, "{h} vs {oracle}");
    // Same point on another model of the curve.
    let ours = twist(&f(), 6977);
    let h2 = canonical_height(&ours, &published_point_on_twist(), 1e-9).unwrap();
    assert!((h - h2).abs() < 1e-9);
}
