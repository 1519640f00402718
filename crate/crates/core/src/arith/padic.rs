//! Bounded-precision p-adic numbers with pessimistic precision tracking.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::primes::legendre_u64;
use super::rational::{inv_mod_big, remove_factor, Rational};

/// An element of Q_p known up to an absolute precision.
///
/// `Nonzero` stores `p^valuation * unit` with `unit` a p-adic unit known modulo
/// `p^precision`; `Zero` is an element of valuation at least `precision`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PadicApprox {
    Zero {
        p: u64,
        precision: i64,
    },
    Nonzero {
        p: u64,
        valuation: i64,
        unit: BigInt,
        precision: u32,
    },
}

fn ppow(p: u64, e: i64) -> BigInt {
    BigInt::from(p).pow(e.max(0) as u32)
}

impl PadicApprox {
    pub fn zero(p: u64, precision: i64) -> Self {
        PadicApprox::Zero { p, precision }
    }

    /// `n` known modulo `p^abs_precision`.
    pub fn from_int(n: &BigInt, p: u64, abs_precision: i64) -> Self {
        Self::from_rational(&Rational::from_integer(n.clone()), p, abs_precision)
    }

    /// Rational `q` truncated to absolute precision `abs_precision`.
    pub fn from_rational(q: &Rational, p: u64, abs_precision: i64) -> Self {
        if q.is_zero() {
            return Self::zero(p, abs_precision);
        }
        let (n, vn) = remove_factor(q.numer(), p);
        let (d, vd) = remove_factor(q.denom(), p);
        let v = vn as i64 - vd as i64;
        if v >= abs_precision {
            return Self::zero(p, abs_precision);
        }
        let rel = (abs_precision - v) as u32;
        Self::unit_part(p, v, &n, &d, rel)
    }

    /// Rational `q` with `rel` significant digits.
    pub fn from_rational_rel(q: &Rational, p: u64, rel: u32) -> Self {
        if q.is_zero() {
            return Self::zero(p, i64::MAX / 4);
        }
        let (n, vn) = remove_factor(q.numer(), p);
        let (d, vd) = remove_factor(q.denom(), p);
        Self::unit_part(p, vn as i64 - vd as i64, &n, &d, rel)
    }

    fn unit_part(p: u64, v: i64, n: &BigInt, d: &BigInt, rel: u32) -> Self {
        let m = BigInt::from(p).pow(rel);
        let unit = (n * inv_mod_big(d, &m).expect("p-free denominator")).mod_floor(&m);
        PadicApprox::Nonzero {
            p,
            valuation: v,
            unit,
            precision: rel,
        }
    }

    pub fn prime(&self) -> u64 {
        match self {
            PadicApprox::Zero { p, .. } | PadicApprox::Nonzero { p, .. } => *p,
        }
    }

    /// Valuation, `None` when the element is indistinguishable from zero.
    pub fn valuation(&self) -> Option<i64> {
        match self {
            PadicApprox::Zero { .. } => None,
            PadicApprox::Nonzero { valuation, .. } => Some(*valuation),
        }
    }

    pub fn absolute_precision(&self) -> i64 {
        match self {
            PadicApprox::Zero { precision, .. } => *precision,
            PadicApprox::Nonzero {
                valuation,
                precision,
                ..
            } => valuation + *precision as i64,
        }
    }

    pub fn is_zero_approx(&self) -> bool {
        matches!(self, PadicApprox::Zero { .. })
    }

    /// Integer representative modulo `p^absolute_precision`, for integral elements.
    pub fn to_residue(&self) -> Option<BigInt> {
        match self {
            PadicApprox::Zero { .. } => Some(BigInt::zero()),
            PadicApprox::Nonzero {
                p, valuation, unit, ..
            } => (*valuation >= 0).then(|| unit * ppow(*p, *valuation)),
        }
    }

    pub fn neg(&self) -> Self {
        match self {
            PadicApprox::Zero { .. } => self.clone(),
            PadicApprox::Nonzero {
                p,
                valuation,
                unit,
                precision,
            } => {
                let m = BigInt::from(*p).pow(*precision);
                PadicApprox::Nonzero {
                    p: *p,
                    valuation: *valuation,
                    unit: (-unit).mod_floor(&m),
                    precision: *precision,
                }
            }
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let p = self.prime();
        assert_eq!(p, o.prime(), "mixed primes");
        use PadicApprox::*;
        match (self, o) {
            (Zero { precision: a, .. }, Zero { precision: b, .. }) => Self::zero(p, a + b),
            (Zero { precision: a, .. }, Nonzero { valuation, .. })
            | (Nonzero { valuation, .. }, Zero { precision: a, .. }) => {
                Self::zero(p, a + valuation)
            }
            (
                Nonzero {
                    valuation: v1,
                    unit: u1,
                    precision: r1,
                    ..
                },
                Nonzero {
                    valuation: v2,
                    unit: u2,
                    precision: r2,
                    ..
                },
            ) => {
                let r = *r1.min(r2);
                let m = BigInt::from(p).pow(r);
                Nonzero {
                    p,
                    valuation: v1 + v2,
                    unit: (u1 * u2).mod_floor(&m),
                    precision: r,
                }
            }
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let p = self.prime();
        assert_eq!(p, o.prime(), "mixed primes");
        let abs = self.absolute_precision().min(o.absolute_precision());
        let lo = [self, o]
            .iter()
            .filter_map(|x| x.valuation())
            .min()
            .unwrap_or(abs)
            .min(abs);
        if lo >= abs {
            return Self::zero(p, abs);
        }
        let shifted = |x: &Self| match x {
            PadicApprox::Zero { .. } => BigInt::zero(),
            PadicApprox::Nonzero {
                valuation, unit, ..
            } => unit * ppow(p, valuation - lo),
        };
        let m = ppow(p, abs - lo);
        let s = (shifted(self) + shifted(o)).mod_floor(&m);
        if s.is_zero() {
            return Self::zero(p, abs);
        }
        let (u, k) = remove_factor(&s, p);
        let v = lo + k as i64;
        let rel = (abs - v) as u32;
        PadicApprox::Nonzero {
            p,
            valuation: v,
            unit: u.mod_floor(&BigInt::from(p).pow(rel)),
            precision: rel,
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn inverse(&self) -> Option<Self> {
        match self {
            PadicApprox::Zero { .. } => None,
            PadicApprox::Nonzero {
                p,
                valuation,
                unit,
                precision,
            } => {
                let m = BigInt::from(*p).pow(*precision);
                Some(PadicApprox::Nonzero {
                    p: *p,
                    valuation: -valuation,
                    unit: inv_mod_big(unit, &m)?,
                    precision: *precision,
                })
            }
        }
    }

    /// Whether the element is a square in Q_p; `None` when the known digits do not
    /// decide it.
    pub fn is_square(&self) -> Option<bool> {
        match self {
            PadicApprox::Zero { .. } => None,
            PadicApprox::Nonzero {
                p,
                valuation,
                unit,
                precision,
            } => {
                if valuation.rem_euclid(2) == 1 {
                    return Some(false);
                }
                if *p == 2 {
                    if *precision < 3 {
                        return None;
                    }
                    return Some((unit % 8u32).is_one());
                }
                let u = (unit % BigInt::from(*p)).to_u64().unwrap();
                Some(legendre_u64(u, *p) == 1)
            }
        }
    }

    /// Horner evaluation of an integer polynomial, coefficients taken exactly to
    /// the precision of `x` plus a margin covering any negative valuation.
    pub fn eval_poly(coeffs: &[BigInt], x: &Self) -> Self {
        let p = x.prime();
        let deg = coeffs.len().saturating_sub(1) as i64;
        let v = x.valuation().unwrap_or(0).min(0);
        let cap = x.absolute_precision().max(1) + deg * (-v) + 2;
        coeffs.iter().rev().fold(Self::zero(p, i64::MAX / 4), |acc, c| {
            acc.mul(x).add(&Self::from_int(c, p, cap))
        })
    }
}

impl fmt::Display for PadicApprox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PadicApprox::Zero { p, precision } => write!(f, "O({p}^{precision})"),
            PadicApprox::Nonzero {
                p,
                valuation,
                unit,
                precision,
            } => write!(
                f,
                "{p}^{valuation} * {unit} + O({p}^{})",
                valuation + *precision as i64
            ),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::{int, rat};

    #[test]
    fn construction() {
        let x = PadicApprox::from_rational(&rat(18, 5), 3, 4);
        match &x {
            PadicApprox::Nonzero {
                valuation,
                unit,
                precision,
                ..
            } => {
                assert_eq!(*valuation, 2);
                assert_eq!(*precision, 2);
                // 2/5 mod 9 = 2 * 2 = 4
                assert_eq!(unit, &int(4));
            }
            _ => panic!(),
        }
        assert!(PadicApprox::from_int(&int(81), 3, 4).is_zero_approx());
    }

    #[test]
    fn arithmetic_tracks_precision() {
        let a = PadicApprox::from_int(&int(1), 5, 4);
        let b = PadicApprox::from_int(&int(-1), 5, 4);
        let s = a.add(&b);
        assert!(s.is_zero_approx());
        assert_eq!(s.absolute_precision(), 4);
        let c = PadicApprox::from_int(&int(26), 5, 4);
        let d = c.sub(&a);
        assert_eq!(d.valuation(), Some(2));
        assert_eq!(d.absolute_precision(), 4);
        let e = d.mul(&PadicApprox::from_rational(&rat(1, 25), 5, 2));
        assert_eq!(e.valuation(), Some(0));
    }

    #[test]
    fn squares() {
        assert_eq!(PadicApprox::from_int(&int(3), 3, 5).is_square(), Some(false));
        assert_eq!(PadicApprox::from_int(&int(9 * 7), 3, 5).is_square(), Some(true));
        assert_eq!(PadicApprox::from_int(&int(9 * 2), 3, 5).is_square(), Some(false));
        assert_eq!(PadicApprox::from_int(&int(17), 2, 5).is_square(), Some(true));
        assert_eq!(PadicApprox::zero(3, 5).is_square(), None);
    }

    #[test]
    fn inverse_negates_valuation() {
        let x = PadicApprox::from_rational(&rat(7, 9), 3, 6);
        let y = x.inverse().unwrap();
        assert_eq!(y.valuation(), Some(2));
        let one = x.mul(&y);
        assert_eq!(one.valuation(), Some(0));
        assert_eq!(one.to_residue().unwrap() % 3, int(1));
    }
}
