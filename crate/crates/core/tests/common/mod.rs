#![allow(dead_code)]

use num_bigint::BigInt;
use shavis_core::arith::rational::{parse_rational, Rational};
use shavis_core::curve::{CurvePoint, WeierstrassModel};

pub fn curve(s: &str) -> WeierstrassModel {
    s.parse().unwrap()
}

/// 38025.ck1
pub fn e1() -> WeierstrassModel {
    curve("[1,-1,0,-13233492,18531699291]")
}

/// 38025.ck2
pub fn e2() -> WeierstrassModel {
    curve("[0,0,0,-14005875,16244068750]")
}

/// 38025.i1
pub fn f() -> WeierstrassModel {
    curve("[0,0,1,-955695,-359690094]")
}

pub fn q(s: &str) -> Rational {
    parse_rational(s).unwrap()
}

pub fn int(n: i64) -> BigInt {
    BigInt::from(n)
}

pub fn twist(e: &WeierstrassModel, d: i64) -> WeierstrassModel {
    e.quadratic_twist(&BigInt::from(d)).unwrap()
}

/// The printed point on the 6977-twist of 38025.i1.
pub fn published_point() -> CurvePoint {
    CurvePoint::affine(
        q("7600015680280/609961"),
        q("16724543722010247982/476379541"),
    )
}

pub fn f6977_printed() -> WeierstrassModel {
    curve("[0,0,1,-46521826772655,-122161581370183348094]")
}

/// The printed point, moved to the model `F.quadratic_twist(6977)`.
pub fn published_point_on_twist() -> CurvePoint {
    let ours = twist(&f(), 6977);
    let w = shavis_core::tate::isomorphism(&f6977_printed(), &ours).unwrap();
    let CurvePoint::Affine(x, y) = published_point() else { unreachable!() };
    let (x, y) = w.map_point(&x, &y);
    let p = CurvePoint::affine(x, y);
    assert!(ours.point_on_curve(&p));
    p
}

fn ln_abs(n: &BigInt) -> f64 {
    use num_traits::Signed;
    let bits = n.bits();
    if bits < 1000 {
        return n.to_string().parse::<f64>().unwrap().abs().ln();
    }
    let shift = bits - 64;
    let top: BigInt = n.abs() >> shift;
    top.to_string().parse::<f64>().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
}

/// `h(x(2^n P)) / 4^n` by exact doubling on the minimal model, with common
/// factors removed only at bad primes and 2. Independent of the local
/// decomposition used by `canonical_height`; converges like `O(4^-n)`.
pub fn doubling_height(e: &WeierstrassModel, p: &CurvePoint, n: u32) -> f64 {
    use num_traits::Zero;
    let w = shavis_core::tate::isomorphism(e, &shavis_core::tate::global_minimal_model(e).model).unwrap();
    let m = shavis_core::tate::global_minimal_model(e);
    let CurvePoint::Affine(x, y) = p else { return 0.0 };
    let (x, _) = w.map_point(x, y);
    let i = m.model.invariants();
    let [b2, b4, b6, b8] = [i.b2, i.b4, i.b6, i.b8].map(|b| b.to_integer());
    let mut primes = m.bad_primes();
    primes.push(2);
    let (mut a, mut c) = (x.numer().clone(), x.denom().clone());
    let two = BigInt::from(2);
    for _ in 0..n {
        let (a2, c2) = (&a * &a, &c * &c);
        let ac = &a * &c;
        let c4 = &c2 * &c2;
        let mut phi = &a2 * &a2 - &b4 * &a2 * &c2 - &two * &b6 * &ac * &c2 - &b8 * &c4;
        let mut psi = BigInt::from(4) * &a2 * &ac + &b2 * &a2 * &c2 + &two * &b4 * &ac * &c2 + &b6 * &c4;
        for &q in &primes {
            let qb = BigInt::from(q);
            while !phi.is_zero() && (&phi % &qb).is_zero() && (&psi % &qb).is_zero() {
                phi /= &qb;
                psi /= &qb;
            }
        }
        a = phi;
        c = psi;
    }
    ln_abs(&a).max(ln_abs(&c)) / 4f64.powi(n as i32)
}

pub mod strategies {
    use proptest::prelude::*;
    use proptest::test_runner::{Config, RngSeed};
    use shavis_core::curve::WeierstrassModel;

    pub const SEED: u64 = 0x5EED_0038_025;

    pub fn config(cases: u32) -> Config {
        Config {
            cases,
            rng_seed: RngSeed::Fixed(SEED),
            failure_persistence: None,
            ..Config::default()
        }
    }

    /// Nonsingular integral models with small coefficients.
    pub fn small_curve(bound: i64) -> impl Strategy<Value = WeierstrassModel> {
        prop::array::uniform5(-bound..=bound).prop_filter_map("singular", |a| WeierstrassModel::from_ints(a).ok())
    }

    pub fn squarefree(max: i64) -> impl Strategy<Value = i64> {
        (-max..=max).prop_filter("not square-free", |&d| {
            d != 0 && shavis_core::arith::primes::is_squarefree(&num_bigint::BigInt::from(d))
        })
    }
}
