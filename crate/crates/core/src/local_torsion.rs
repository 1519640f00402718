//! l-torsion of E(Q_l) for l in {3, 5, 7}.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;

use crate::arith::hensel::hensel_roots;
use crate::arith::padic::PadicApprox;
use crate::arith::primes::least_nonresidue;
use crate::arith::rational::{common_denominator, rational_mod, Rational};
use crate::curve::divpoly::two_torsion_cubic;
use crate::curve::{division_polynomial, IsoTransform, WeierstrassModel};
use crate::error::{Error, Result};
use crate::tate::{tate_algorithm, ReductionClass};

pub const DEFAULT_PRECISION: u32 = 12;
pub const MAX_PRECISION: u32 = 96;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    DivisionPolynomial,
    FormalGroupCriterion,
    Combined,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::DivisionPolynomial => "division-polynomial",
            Method::FormalGroupCriterion => "formal-group-criterion",
            Method::Combined => "combined",
        })
    }
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "division-polynomial" | "divpoly" => Ok(Method::DivisionPolynomial),
            "formal-group-criterion" | "criterion" => Ok(Method::FormalGroupCriterion),
            "combined" | "both" => Ok(Method::Combined),
            _ => Err(Error::invalid(format!("unknown method {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LocalTorsionReport {
    pub ell: u64,
    pub method: Method,
    /// `E(Q_l)[l] = 0`; `None` when the method cannot decide.
    pub torsion_trivial: Option<bool>,
    /// `E_0(Q_l)[l] = 0`, reported by the formal-group criterion.
    pub e0_torsion_trivial: Option<bool>,
    pub precision: u32,
    pub details: String,
}

fn check_ell(ell: u64) -> Result<()> {
    if matches!(ell, 3 | 5 | 7) {
        Ok(())
    } else {
        Err(Error::invalid(format!("l must be 3, 5 or 7, got {ell}")))
    }
}

/// Decides `E(Q_l)[l]` from the l-adic roots of `psi_l` at a fixed precision.
pub fn torsion_by_division_poly(e: &WeierstrassModel, ell: u64, precision: u32) -> Result<LocalTorsionReport> {
    check_ell(ell)?;
    let psi = division_polynomial(e, ell)?;
    let roots = hensel_roots(&psi.poly, ell, precision)?;
    // F * den^2 has integer coefficients and the same square class as F.
    let ff = two_torsion_cubic(e);
    let den = common_denominator(ff.coeffs());
    let scale = Rational::from_integer(&den * &den);
    let fcoeffs: Vec<BigInt> = ff
        .coeffs()
        .iter()
        .map(|c| (c * &scale).to_integer())
        .collect();
    let mut witness = None;
    for x0 in &roots {
        let fx = PadicApprox::eval_poly(&fcoeffs, x0);
        match fx.is_square() {
            None => return Err(Error::Indeterminate(precision)),
            Some(true) => {
                witness = Some(x0.clone());
                break;
            }
            Some(false) => {}
        }
    }
    let details = match &witness {
        Some(x0) => format!(
            "psi_{ell} has {} root(s) in Q_{ell}; x = {x0} lifts to a point of order {ell}",
            roots.len()
        ),
        None => format!(
            "psi_{ell} has {} root(s) in Q_{ell}; none has F(x) a square",
            roots.len()
        ),
    };
    Ok(LocalTorsionReport {
        ell,
        method: Method::DivisionPolynomial,
        torsion_trivial: Some(witness.is_none()),
        e0_torsion_trivial: None,
        precision,
        details,
    })
}

/// Runs `f` at `start`, doubling the precision on `Indeterminate` up to
/// [`MAX_PRECISION`].
pub fn with_precision_retry<T>(start: u32, mut f: impl FnMut(u32) -> Result<T>) -> Result<T> {
    let mut prec = start.max(1);
    loop {
        match f(prec) {
            Err(Error::Indeterminate(_)) if prec < MAX_PRECISION => prec = (prec * 2).min(MAX_PRECISION),
            r => return r,
        }
    }
}

/// Model `y^2 = x^3 + a2 x^2 + a4 x + a6` with all `a_i` in `lZ_(l)`, reached from
/// an l-minimal model with additive reduction.
pub fn criterion_normal_form(e: &WeierstrassModel, ell: u64) -> Result<(WeierstrassModel, u32)> {
    check_ell(ell)?;
    let local = tate_algorithm(e, ell);
    if local.reduction_class != ReductionClass::Additive {
        return Err(Error::ShapeUnreachable(format!("reduction at {ell} is not additive")));
    }
    let m = &local.minimal_model;
    let half = Rational::new(BigInt::from(1), BigInt::from(2));
    let sq = IsoTransform::translation(Rational::zero(), -m.a1() * &half, -m.a3() * &half);
    let m = m.transform(&sq);
    // The reduction is a cusp, so the cubic has a triple root mod l.
    let r = if ell == 3 {
        let a6 = rational_mod(m.a6(), 3).expect("3-integral model");
        Rational::from_integer(BigInt::from((3 - a6) % 3))
    } else {
        -m.a2() / Rational::from_integer(BigInt::from(3))
    };
    let m = m.transform(&IsoTransform::translation(r, Rational::zero(), Rational::zero()));
    for a in [m.a2(), m.a4(), m.a6()] {
        if rational_mod(a, ell) != Some(0) {
            return Err(Error::ShapeUnreachable(format!("no triple root mod {ell}")));
        }
    }
    Ok((m, local.tamagawa))
}

/// `E_0(Q_l)[l] != 0` exactly when `a2 = 6 mod 9`, `a4 = 10 mod 25` or
/// `a6 = 14 mod 49` on the normal form; lifted to `E(Q_l)` when `l` does not
/// divide `c_l`.
pub fn formal_group_criterion(e: &WeierstrassModel, ell: u64) -> Result<LocalTorsionReport> {
    let (m, c) = criterion_normal_form(e, ell)?;
    let (coef, name, modulus, target) = match ell {
        3 => (m.a2(), "a2", 9, 6),
        5 => (m.a4(), "a4", 25, 10),
        _ => (m.a6(), "a6", 49, 14),
    };
    let res = rational_mod(coef, modulus).expect("l-integral coefficient");
    let e0_trivial = res != target;
    let torsion_trivial = (c as u64 % ell != 0).then_some(e0_trivial);
    let bridge = if torsion_trivial.is_some() {
        format!("{ell} does not divide c_{ell} = {c}")
    } else {
        format!("{ell} divides c_{ell} = {c}, E(Q_{ell})[{ell}] not decided")
    };
    Ok(LocalTorsionReport {
        ell,
        method: Method::FormalGroupCriterion,
        torsion_trivial,
        e0_torsion_trivial: Some(e0_trivial),
        precision: 0,
        details: format!("normal form {m}: {name} = {res} mod {modulus}; {bridge}"),
    })
}

/// Runs the requested method. `Combined` runs both and fails on disagreement; if the
/// criterion does not apply the division-polynomial result stands alone.
pub fn local_torsion(e: &WeierstrassModel, ell: u64, method: Method, precision: u32) -> Result<LocalTorsionReport> {
    match method {
        Method::DivisionPolynomial => with_precision_retry(precision, |p| torsion_by_division_poly(e, ell, p)),
        Method::FormalGroupCriterion => formal_group_criterion(e, ell),
        Method::Combined => {
            let dp = with_precision_retry(precision, |p| torsion_by_division_poly(e, ell, p))?;
            let crit = match formal_group_criterion(e, ell) {
                Ok(r) => r,
                Err(Error::ShapeUnreachable(why)) => {
                    return Ok(LocalTorsionReport {
                        details: format!("{}; criterion not applicable ({why})", dp.details),
                        ..dp
                    })
                }
                Err(err) => return Err(err),
            };
            if let Some(t) = crit.torsion_trivial {
                if Some(t) != dp.torsion_trivial {
                    return Err(Error::MethodDisagreement(format!(
                        "division polynomial says trivial = {:?}, criterion says {t}",
                        dp.torsion_trivial
                    )));
                }
            } else if crit.e0_torsion_trivial == Some(false) && dp.torsion_trivial == Some(true) {
                return Err(Error::MethodDisagreement(
                    "criterion finds E_0 torsion but division polynomial finds none".into(),
                ));
            }
            Ok(LocalTorsionReport {
                ell,
                method: Method::Combined,
                torsion_trivial: dp.torsion_trivial,
                e0_torsion_trivial: crit.e0_torsion_trivial,
                precision: dp.precision,
                details: format!("{}; {}", dp.details, crit.details),
            })
        }
    }
}

/// Representatives `{1, u, l, ul}` of `Q_l^* / Q_l^*2`, `u` the least non-residue.
pub fn square_classes(ell: u64) -> [u64; 4] {
    let u = least_nonresidue(ell);
    [1, u, ell, u * ell]
}

/// Classes `d` for which `E^d(Q_l)[l] = 0`.
pub fn local_twist_classes(e: &WeierstrassModel, ell: u64) -> Result<BTreeSet<u64>> {
    check_ell(ell)?;
    let mut out = BTreeSet::new();
    for d in square_classes(ell) {
        let ed = e.quadratic_twist(&BigInt::from(d))?;
        let r = local_torsion(&ed, ell, Method::DivisionPolynomial, DEFAULT_PRECISION)?;
        if r.torsion_trivial == Some(true) {
            out.insert(d);
        }
    }
    Ok(out)
}
