//! BSD invariants other than the L-function, and record comparison.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_bigint::BigInt;
use serde::Serialize;
use serde_json::{json, Value};

use crate::arith::rational::{format_rational, rational_to_f64, Rational};
use crate::curve::{CurvePoint, WeierstrassModel};
use crate::error::{Error, Result};
use crate::mordell_weil::{independence_certificate, torsion_subgroup, TorsionStructure};
use crate::tate::{global_minimal_model, Kodaira};

pub const DEFAULT_PERIOD_TOL: f64 = 1e-12;
/// Best relative accuracy of the double-precision period evaluation.
pub const PERIOD_FLOOR: f64 = 1e-14;
/// Relative tolerance used when comparing periods and regulators.
pub const COMPARE_TOL: f64 = 1e-9;

fn agm(mut a: f64, mut b: f64) -> f64 {
    for _ in 0..64 {
        let (an, bn) = ((a + b) / 2.0, (a * b).sqrt());
        if (an - bn).abs() <= f64::EPSILON * an {
            return an;
        }
        a = an;
        b = bn;
    }
    a
}

/// Newton polish of a root of `c3 x^3 + c2 x^2 + c1 x + c0`.
fn polish(c: [f64; 4], mut x: f64) -> f64 {
    for _ in 0..8 {
        let f = ((c[3] * x + c[2]) * x + c[1]) * x + c[0];
        let d = (3.0 * c[3] * x + 2.0 * c[2]) * x + c[1];
        if d == 0.0 {
            break;
        }
        let step = f / d;
        x -= step;
        if step.abs() <= f64::EPSILON * x.abs() {
            break;
        }
    }
    x
}

/// Real roots of `4x^3 + b2 x^2 + 2 b4 x + b6`, descending.
fn real_roots(b2: f64, b4: f64, b6: f64, three_real: bool) -> Vec<f64> {
    // x = t - b2/12 gives t^3 + p t + q.
    let s = b2 / 12.0;
    let p = b4 / 2.0 - b2 * b2 / 48.0;
    let q = b6 / 4.0 - b2 * b4 / 24.0 + b2 * b2 * b2 / 864.0;
    let c = [b6, 2.0 * b4, b2, 4.0];
    let mut roots: Vec<f64> = if three_real {
        let m = 2.0 * (-p / 3.0).sqrt();
        let arg = (3.0 * q / (p * m)).clamp(-1.0, 1.0);
        let theta = arg.acos() / 3.0;
        (0..3)
            .map(|k| m * (theta - 2.0 * PI * k as f64 / 3.0).cos() - s)
            .collect()
    } else {
        let disc = q * q / 4.0 + p * p * p / 27.0;
        let r = disc.max(0.0).sqrt();
        vec![(-q / 2.0 + r).cbrt() + (-q / 2.0 - r).cbrt() - s]
    };
    for r in roots.iter_mut() {
        *r = polish(c, *r);
    }
    roots.sort_by(|a, b| b.total_cmp(a));
    roots
}

/// Real period of the given model's invariant differential, times the number of
/// real components.
pub fn model_period(e: &WeierstrassModel) -> f64 {
    let i = e.invariants();
    let (b2, b4, b6) = (rational_to_f64(&i.b2), rational_to_f64(&i.b4), rational_to_f64(&i.b6));
    let positive = i.disc > Rational::from_integer(BigInt::from(0));
    if positive {
        let r = real_roots(b2, b4, b6, true);
        2.0 * PI / agm((r[0] - r[2]).sqrt(), (r[0] - r[1]).sqrt())
    } else {
        let e1 = real_roots(b2, b4, b6, false)[0];
        let a = 3.0 * e1 + b2 / 4.0;
        let b = (3.0 * e1 * e1 + b2 * e1 / 2.0 + b4 / 2.0).sqrt();
        2.0 * PI / agm(2.0 * b.sqrt(), (2.0 * b + a).sqrt())
    }
}

/// `Omega_E` of the global minimal model, with relative error at most `tol`.
pub fn real_period(e: &WeierstrassModel, tol: f64) -> Result<f64> {
    if tol < PERIOD_FLOOR {
        return Err(Error::ToleranceUnreachable {
            requested: tol,
            attainable: PERIOD_FLOOR,
        });
    }
    Ok(model_period(&global_minimal_model(e).model))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RankTag {
    VerifiedLowerBound,
    Assumed,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankEntry {
    pub value: usize,
    pub tag: RankTag,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RegulatorEntry {
    /// Empty regulator, `1` by convention.
    RankZero,
    Value { value: f64, error: f64 },
    NotComputed,
}

/// Rank information supplied to [`bsd_record`].
#[derive(Debug, Clone, PartialEq)]
pub enum RankInput {
    Assumed(usize),
    Points(Vec<CurvePoint>),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BsdRecord {
    pub curve: String,
    pub minimal_model: String,
    pub torsion: TorsionStructure,
    pub tamagawa: BTreeMap<u64, u32>,
    pub kodaira: BTreeMap<u64, Kodaira>,
    pub min_disc: String,
    pub conductor: String,
    pub real_period: f64,
    pub rank: Option<RankEntry>,
    pub regulator: RegulatorEntry,
    pub j_invariant: String,
    pub l_function: &'static str,
    pub sha_an: &'static str,
}

const NOT_COMPUTED: &str = "not computed";

pub fn bsd_record(e: &WeierstrassModel, rank: Option<RankInput>) -> Result<BsdRecord> {
    let m = global_minimal_model(e);
    let (torsion, period) = rayon::join(|| torsion_subgroup(e), || real_period(e, DEFAULT_PERIOD_TOL));
    let (torsion, period) = (torsion?, period?);
    let (rank, regulator) = match rank {
        None => (None, RegulatorEntry::NotComputed),
        Some(RankInput::Assumed(0)) => (
            Some(RankEntry {
                value: 0,
                tag: RankTag::Assumed,
            }),
            RegulatorEntry::RankZero,
        ),
        Some(RankInput::Assumed(n)) => (
            Some(RankEntry {
                value: n,
                tag: RankTag::Assumed,
            }),
            RegulatorEntry::NotComputed,
        ),
        Some(RankInput::Points(pts)) => {
            let (r, hd) = independence_certificate(e, &pts, 1e-9)?;
            let reg = if r == pts.len() && r > 0 {
                RegulatorEntry::Value {
                    value: hd.regulator,
                    error: hd.regulator_error,
                }
            } else {
                RegulatorEntry::NotComputed
            };
            (
                Some(RankEntry {
                    value: r,
                    tag: RankTag::VerifiedLowerBound,
                }),
                reg,
            )
        }
    };
    let rec = BsdRecord {
        curve: e.to_string(),
        minimal_model: m.model.to_string(),
        torsion: torsion.structure,
        tamagawa: m.tamagawa_map(),
        kodaira: m.kodaira_map(),
        min_disc: m.discriminant.to_string(),
        conductor: m.conductor().to_string(),
        real_period: period,
        rank,
        regulator,
        j_invariant: format_rational(&e.j_invariant()),
        l_function: NOT_COMPUTED,
        sha_an: NOT_COMPUTED,
    };
    debug_assert!(rec.tamagawa.keys().eq(rec.kodaira.keys()));
    debug_assert!(rec.real_period > 0.0);
    Ok(rec)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldComparison {
    pub field: &'static str,
    pub a: Value,
    pub b: Value,
    pub equal: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub fields: Vec<FieldComparison>,
    pub all_equal: bool,
    pub j_a: String,
    pub j_b: String,
    pub j_equal: bool,
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= COMPARE_TOL * a.abs().max(b.abs())
}

fn regulators_equal(a: &RegulatorEntry, b: &RegulatorEntry) -> bool {
    match (a, b) {
        (RegulatorEntry::Value { value: x, .. }, RegulatorEntry::Value { value: y, .. }) => close(*x, *y),
        _ => a == b,
    }
}

/// Field-by-field comparison; discrete fields exactly, periods and regulators to
/// relative [`COMPARE_TOL`].
pub fn compare_records(a: &BsdRecord, b: &BsdRecord) -> ComparisonReport {
    let mut fields = Vec::new();
    let mut push = |field: &'static str, x: Value, y: Value, equal: bool| {
        fields.push(FieldComparison { field, a: x, b: y, equal });
    };
    push("torsion", json!(a.torsion.to_string()), json!(b.torsion.to_string()), a.torsion == b.torsion);
    push("tamagawa", json!(a.tamagawa), json!(b.tamagawa), a.tamagawa == b.tamagawa);
    push("kodaira", json!(a.kodaira), json!(b.kodaira), a.kodaira == b.kodaira);
    push("min_disc", json!(a.min_disc), json!(b.min_disc), a.min_disc == b.min_disc);
    push("conductor", json!(a.conductor), json!(b.conductor), a.conductor == b.conductor);
    push(
        "real_period",
        json!(a.real_period),
        json!(b.real_period),
        close(a.real_period, b.real_period),
    );
    push(
        "rank",
        json!(a.rank.as_ref().map(|r| r.value)),
        json!(b.rank.as_ref().map(|r| r.value)),
        a.rank.as_ref().map(|r| r.value) == b.rank.as_ref().map(|r| r.value),
    );
    push(
        "regulator",
        serde_json::to_value(&a.regulator).unwrap(),
        serde_json::to_value(&b.regulator).unwrap(),
        regulators_equal(&a.regulator, &b.regulator),
    );
    let all_equal = fields.iter().all(|f| f.equal);
    ComparisonReport {
        fields,
        all_equal,
        j_equal: a.j_invariant == b.j_invariant,
        j_a: a.j_invariant.clone(),
        j_b: b.j_invariant.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Midpoint-rule quadrature of `int_{e1}^inf dx / sqrt(f(x))` after
    /// `x = e1 + (t / (1 - t))^2`.
    pub(crate) fn quadrature_half_period(e: &WeierstrassModel) -> f64 {
        let i = e.invariants();
        let (b2, b4, b6) = (rational_to_f64(&i.b2), rational_to_f64(&i.b4), rational_to_f64(&i.b6));
        let pos = i.disc > Rational::from_integer(BigInt::from(0));
        let e1 = real_roots(b2, b4, b6, pos)[0];
        let f = |x: f64| 4.0 * x * x * x + b2 * x * x + 2.0 * b4 * x + b6;
        let n = 400_000;
        let h = 1.0 / n as f64;
        let mut sum = 0.0;
        for k in 0..n {
            let t = (k as f64 + 0.5) * h;
            let u = t / (1.0 - t);
            let du = 1.0 / ((1.0 - t) * (1.0 - t));
            let x = e1 + u * u;
            // dx / sqrt(f) with f(x) ~ (x - e1) g(x); the 2u from dx cancels sqrt(u^2).
            let g = f(x) / (u * u);
            sum += 2.0 * du / g.sqrt() * h;
        }
        sum
    }

    #[test]
    fn lemniscate() {
        let e = WeierstrassModel::from_ints([0, 0, 0, -1, 0]).unwrap();
        let om = real_period(&e, 1e-12).unwrap();
        // 2 * Gamma(1/4)^2 / (2 sqrt(2 pi)) for the lemniscate constant.
        assert!((om - 5.244115108584239).abs() < 1e-12, "{om}");
        // Two components, each period 2 * int_{e1}^inf dx / sqrt(4x^3 - 4x).
        let q = quadrature_half_period(&e);
        assert!((om - 4.0 * q).abs() < 1e-6, "{om} vs {q}");
    }

    #[test]
    fn negative_discriminant() {
        // 11a1: Omega = 1.26920930427955.
        let e = WeierstrassModel::from_ints([0, -1, 1, -10, -20]).unwrap();
        let om = real_period(&e, 1e-12).unwrap();
        assert!((om - 1.26920930427955).abs() < 1e-11, "{om}");
        // 37a1 has positive discriminant, Omega = 5.98691729246392.
        let e = WeierstrassModel::from_ints([0, 0, 1, -1, 0]).unwrap();
        let om = real_period(&e, 1e-12).unwrap();
        assert!((om - 5.98691729246392).abs() < 1e-11, "{om}");
        let e = WeierstrassModel::from_ints([0, 0, 0, 0, 2]).unwrap();
        let om = real_period(&e, 1e-12).unwrap();
        assert!((om - 2.0 * quadrature_half_period(&e)).abs() < 1e-6);
        assert!(real_period(&e, 1e-16).is_err());
    }

    #[test]
    fn record_self_comparison() {
        let e = WeierstrassModel::from_ints([0, 0, 1, -1, 0]).unwrap();
        let r = bsd_record(&e, Some(RankInput::Points(vec![CurvePoint::parse("0,0").unwrap()]))).unwrap();
        assert_eq!(r.rank.as_ref().unwrap().tag, RankTag::VerifiedLowerBound);
        let c = compare_records(&r, &r);
        assert!(c.all_equal && c.j_equal);
        let s = serde_json::to_value(&r).unwrap();
        assert_eq!(s["l_function"], "not computed");
    }
}
