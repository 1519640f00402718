//! Weierstrass models over Q, coordinate changes and twists.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::arith::primes::is_squarefree;
use crate::arith::rational::{format_rational, parse_rational, Rational};
use crate::error::{Error, Result};

/// `y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6` with nonzero discriminant.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WeierstrassModel {
    a: [Rational; 5],
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Invariants {
    pub b2: Rational,
    pub b4: Rational,
    pub b6: Rational,
    pub b8: Rational,
    pub c4: Rational,
    pub c6: Rational,
    pub disc: Rational,
    pub j: Rational,
}

fn b_invariants(a: &[Rational; 5]) -> (Rational, Rational, Rational, Rational) {
    let [a1, a2, a3, a4, a6] = a;
    let b2 = a1 * a1 + a2 * Rational::from_integer(4.into());
    let b4 = a1 * a3 + a4 * Rational::from_integer(2.into());
    let b6 = a3 * a3 + a6 * Rational::from_integer(4.into());
    let b8 = a1 * a1 * a6 + a2 * a6 * Rational::from_integer(4.into()) - a1 * a3 * a4
        + a2 * a3 * a3
        - a4 * a4;
    (b2, b4, b6, b8)
}

fn q(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

fn discriminant_of(a: &[Rational; 5]) -> Rational {
    let (b2, b4, b6, b8) = b_invariants(a);
    -&b2 * &b2 * &b8 - q(8) * &b4 * &b4 * &b4 - q(27) * &b6 * &b6 + q(9) * &b2 * &b4 * &b6
}

impl WeierstrassModel {
    pub fn new(a: [Rational; 5]) -> Result<Self> {
        if discriminant_of(&a).is_zero() {
            return Err(Error::SingularModel);
        }
        Ok(WeierstrassModel { a })
    }

    pub fn from_ints(a: [i64; 5]) -> Result<Self> {
        Self::new(a.map(q))
    }

    pub fn from_bigints(a: [BigInt; 5]) -> Result<Self> {
        Self::new(a.map(Rational::from_integer))
    }

    /// `y^2 = x^3 + a x^2 + b x`.
    pub fn b_form(a: Rational, b: Rational) -> Result<Self> {
        Self::new([Rational::zero(), a, Rational::zero(), b, Rational::zero()])
    }

    pub fn ainvs(&self) -> &[Rational; 5] {
        &self.a
    }

    pub fn a1(&self) -> &Rational {
        &self.a[0]
    }
    pub fn a2(&self) -> &Rational {
        &self.a[1]
    }
    pub fn a3(&self) -> &Rational {
        &self.a[2]
    }
    pub fn a4(&self) -> &Rational {
        &self.a[3]
    }
    pub fn a6(&self) -> &Rational {
        &self.a[4]
    }

    pub fn invariants(&self) -> Invariants {
        let (b2, b4, b6, b8) = b_invariants(&self.a);
        let c4 = &b2 * &b2 - q(24) * &b4;
        let c6 = -&b2 * &b2 * &b2 + q(36) * &b2 * &b4 - q(216) * &b6;
        let disc = discriminant_of(&self.a);
        let j = &c4 * &c4 * &c4 / &disc;
        Invariants {
            b2,
            b4,
            b6,
            b8,
            c4,
            c6,
            disc,
            j,
        }
    }

    pub fn discriminant(&self) -> Rational {
        discriminant_of(&self.a)
    }

    pub fn j_invariant(&self) -> Rational {
        self.invariants().j
    }

    pub fn is_integral(&self) -> bool {
        self.a.iter().all(|c| c.denom().is_one())
    }

    /// Integer coefficients; panics unless [`Self::is_integral`].
    pub fn int_ainvs(&self) -> [BigInt; 5] {
        assert!(self.is_integral(), "model is not integral");
        self.a.clone().map(|c| c.to_integer())
    }

    pub fn contains(&self, x: &Rational, y: &Rational) -> bool {
        let [a1, a2, a3, a4, a6] = &self.a;
        y * y + a1 * x * y + a3 * y == x * x * x + a2 * x * x + a4 * x + a6
    }

    /// The model in the coordinates `x = u^2 x' + r`, `y = u^3 y' + s u^2 x' + t`.
    pub fn transform(&self, w: &IsoTransform) -> WeierstrassModel {
        let [a1, a2, a3, a4, a6] = &self.a;
        let IsoTransform { u, r, s, t } = w;
        let two = q(2);
        let three = q(3);
        let u2 = u * u;
        let u3 = &u2 * u;
        let u4 = &u2 * &u2;
        let u6 = &u4 * &u2;
        let n1 = (a1 + &two * s) / u;
        let n2 = (a2 - s * a1 + &three * r - s * s) / &u2;
        let n3 = (a3 + r * a1 + &two * t) / &u3;
        let n4 = (a4 - s * a3 + &two * r * a2 - (t + r * s) * a1 + &three * r * r
            - &two * s * t)
            / &u4;
        let n6 = (a6 + r * a4 + r * r * a2 + r * r * r - t * a3 - t * t - r * t * a1) / &u6;
        WeierstrassModel {
            a: [n1, n2, n3, n4, n6],
        }
    }

    /// Quadratic twist by a square-free integer `d`.
    pub fn quadratic_twist(&self, d: &BigInt) -> Result<WeierstrassModel> {
        if d.is_zero() || !is_squarefree(d) {
            return Err(Error::NotSquareFree(d.to_string()));
        }
        let [a1, a2, a3, a4, a6] = &self.a;
        let d = Rational::from_integer(d.clone());
        let d2 = &d * &d;
        let d3 = &d2 * &d;
        let one = Rational::one();
        let n2 = a2 * &d + a1 * a1 * (&d - &one) / q(4);
        let n4 = a4 * &d2 + a1 * a3 * (&d2 - &one) / q(2);
        let n6 = a6 * &d3 + a3 * a3 * (&d3 - &one) / q(4);
        WeierstrassModel::new([a1.clone(), n2, a3.clone(), n4, n6])
    }

    /// For `y^2 = x^3 + a x^2 + b x`, the 2-isogenous `y^2 = x^3 - 2a x^2 + (a^2 - 4b) x`.
    pub fn two_isogeny_descendant(&self) -> Result<WeierstrassModel> {
        let [a1, a, a3, b, a6] = &self.a;
        if !(a1.is_zero() && a3.is_zero() && a6.is_zero()) || b.is_zero() {
            return Err(Error::ShapeUnreachable(
                "expected y^2 = x^3 + a x^2 + b x with b != 0".into(),
            ));
        }
        let bp = a * a - q(4) * b;
        if bp.is_zero() {
            return Err(Error::SingularModel);
        }
        WeierstrassModel::b_form(-q(2) * a, bp)
    }

    /// Short model `y^2 = x^3 - 27 c4 x - 54 c6`, reached with `u = 1/6`.
    pub fn short_model(&self) -> (WeierstrassModel, IsoTransform) {
        let inv = self.invariants();
        let w = IsoTransform::new(
            Rational::new(1.into(), 6.into()),
            -&inv.b2 / q(12),
            -self.a1() / q(2),
            -self.a3() / q(2) + self.a1() * &inv.b2 / q(24),
        );
        (self.transform(&w), w)
    }
}

impl fmt::Display for WeierstrassModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.a.iter().map(format_rational).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

impl FromStr for WeierstrassModel {
    type Err = Error;

    /// Parses `[a1,a2,a3,a4,a6]` with integer or `num/den` entries.
    fn from_str(s: &str) -> Result<Self> {
        let body = s
            .trim()
            .strip_prefix('[')
            .and_then(|b| b.strip_suffix(']'))
            .ok_or_else(|| Error::invalid(format!("curve literal must look like [a1,a2,a3,a4,a6]: {s:?}")))?;
        let parts: Vec<&str> = body.split(',').collect();
        if parts.len() != 5 {
            return Err(Error::invalid(format!(
                "curve literal needs 5 coefficients, found {}",
                parts.len()
            )));
        }
        let mut a: [Rational; 5] = Default::default();
        for (slot, part) in a.iter_mut().zip(parts) {
            *slot = parse_rational(part)?;
        }
        WeierstrassModel::new(a)
    }
}

/// Change of coordinates `x = u^2 x' + r`, `y = u^3 y' + s u^2 x' + t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IsoTransform {
    pub u: Rational,
    pub r: Rational,
    pub s: Rational,
    pub t: Rational,
}

impl IsoTransform {
    pub fn new(u: Rational, r: Rational, s: Rational, t: Rational) -> Self {
        assert!(!u.is_zero(), "u must be nonzero");
        IsoTransform { u, r, s, t }
    }

    pub fn identity() -> Self {
        Self::new(Rational::one(), Rational::zero(), Rational::zero(), Rational::zero())
    }

    pub fn scaling(u: Rational) -> Self {
        Self::new(u, Rational::zero(), Rational::zero(), Rational::zero())
    }

    pub fn translation(r: Rational, s: Rational, t: Rational) -> Self {
        Self::new(Rational::one(), r, s, t)
    }

    /// Apply `self` first, then `next`.
    pub fn compose(&self, next: &IsoTransform) -> IsoTransform {
        let (u1, r1, s1, t1) = (&self.u, &self.r, &self.s, &self.t);
        let (u2, r2, s2, t2) = (&next.u, &next.r, &next.s, &next.t);
        let u1sq = u1 * u1;
        IsoTransform::new(
            u1 * u2,
            r1 + &u1sq * r2,
            s1 + u1 * s2,
            t1 + &u1sq * s1 * r2 + &u1sq * u1 * t2,
        )
    }

    pub fn inverse(&self) -> IsoTransform {
        let (u, r, s, t) = (&self.u, &self.r, &self.s, &self.t);
        IsoTransform::new(
            u.recip(),
            -r / (u * u),
            -s / u,
            (r * s - t) / (u * u * u),
        )
    }

    /// Maps a point on the source model to the transformed model.
    pub fn map_point(&self, x: &Rational, y: &Rational) -> (Rational, Rational) {
        let u2 = &self.u * &self.u;
        let xp = (x - &self.r) / &u2;
        let yp = (y - &self.s * (x - &self.r) - &self.t) / (&u2 * &self.u);
        (xp, yp)
    }
}
