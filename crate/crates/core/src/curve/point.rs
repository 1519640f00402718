//! Group law on Weierstrass curves over Q and over prime fields.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::model::WeierstrassModel;
use crate::arith::rational::{format_rational, inv_mod, rational_mod, Rational};
use crate::error::{Error, Result};

/// Minimal field interface needed by the group law.
pub trait Field: Clone + PartialEq + fmt::Debug {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn is_zero_elem(&self) -> bool;
    fn add_(&self, o: &Self) -> Self;
    fn sub_(&self, o: &Self) -> Self;
    fn mul_(&self, o: &Self) -> Self;
    fn neg_(&self) -> Self;
    fn inv_(&self) -> Self;
    fn small(&self, n: i64) -> Self;
}

impl Field for Rational {
    fn zero_like(&self) -> Self {
        Rational::zero()
    }
    fn one_like(&self) -> Self {
        Rational::one()
    }
    fn is_zero_elem(&self) -> bool {
        self.is_zero()
    }
    fn add_(&self, o: &Self) -> Self {
        self + o
    }
    fn sub_(&self, o: &Self) -> Self {
        self - o
    }
    fn mul_(&self, o: &Self) -> Self {
        self * o
    }
    fn neg_(&self) -> Self {
        -self
    }
    fn inv_(&self) -> Self {
        self.recip()
    }
    fn small(&self, n: i64) -> Self {
        Rational::from_integer(BigInt::from(n))
    }
}

/// Element of `Z/pZ` for a prime `p < 2^32`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fp {
    pub v: u64,
    pub p: u64,
}

impl Fp {
    pub fn new(v: i64, p: u64) -> Self {
        Fp {
            v: v.rem_euclid(p as i64) as u64,
            p,
        }
    }
}

impl Field for Fp {
    fn zero_like(&self) -> Self {
        Fp { v: 0, p: self.p }
    }
    fn one_like(&self) -> Self {
        Fp { v: 1 % self.p, p: self.p }
    }
    fn is_zero_elem(&self) -> bool {
        self.v == 0
    }
    fn add_(&self, o: &Self) -> Self {
        Fp { v: (self.v + o.v) % self.p, p: self.p }
    }
    fn sub_(&self, o: &Self) -> Self {
        Fp { v: (self.v + self.p - o.v) % self.p, p: self.p }
    }
    fn mul_(&self, o: &Self) -> Self {
        Fp { v: self.v * o.v % self.p, p: self.p }
    }
    fn neg_(&self) -> Self {
        Fp { v: (self.p - self.v) % self.p, p: self.p }
    }
    fn inv_(&self) -> Self {
        Fp {
            v: inv_mod(self.v, self.p).expect("inverse of zero in F_p"),
            p: self.p,
        }
    }
    fn small(&self, n: i64) -> Self {
        Fp::new(n, self.p)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Point<F> {
    Infinity,
    Affine(F, F),
}

pub type CurvePoint = Point<Rational>;

impl<F> Point<F> {
    pub fn is_infinity(&self) -> bool {
        matches!(self, Point::Infinity)
    }
}

impl CurvePoint {
    pub fn affine(x: Rational, y: Rational) -> Self {
        Point::Affine(x, y)
    }

    pub fn x(&self) -> Option<&Rational> {
        match self {
            Point::Affine(x, _) => Some(x),
            Point::Infinity => None,
        }
    }

    /// Parses `x,y` or `x y` with rational coordinates.
    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .collect();
        if parts.len() != 2 {
            return Err(Error::invalid(format!("point must be `x,y`: {s:?}")));
        }
        Ok(Point::Affine(
            crate::arith::rational::parse_rational(parts[0])?,
            crate::arith::rational::parse_rational(parts[1])?,
        ))
    }
}

impl fmt::Display for CurvePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Infinity => f.write_str("O"),
            Point::Affine(x, y) => write!(f, "({}, {})", format_rational(x), format_rational(y)),
        }
    }
}

/// A curve over an arbitrary field, by its five coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve<F: Field> {
    pub a: [F; 5],
}

impl<F: Field> Curve<F> {
    pub fn contains(&self, pt: &Point<F>) -> bool {
        match pt {
            Point::Infinity => true,
            Point::Affine(x, y) => {
                let [a1, a2, a3, a4, a6] = &self.a;
                let lhs = y.mul_(y).add_(&a1.mul_(x).mul_(y)).add_(&a3.mul_(y));
                let rhs = x
                    .mul_(x)
                    .mul_(x)
                    .add_(&a2.mul_(x).mul_(x))
                    .add_(&a4.mul_(x))
                    .add_(a6);
                lhs == rhs
            }
        }
    }

    pub fn neg(&self, pt: &Point<F>) -> Point<F> {
        match pt {
            Point::Infinity => Point::Infinity,
            Point::Affine(x, y) => {
                let [a1, _, a3, _, _] = &self.a;
                Point::Affine(x.clone(), y.neg_().sub_(&a1.mul_(x)).sub_(a3))
            }
        }
    }

    pub fn add(&self, p: &Point<F>, q: &Point<F>) -> Point<F> {
        let (x1, y1, x2, y2) = match (p, q) {
            (Point::Infinity, _) => return q.clone(),
            (_, Point::Infinity) => return p.clone(),
            (Point::Affine(x1, y1), Point::Affine(x2, y2)) => (x1, y1, x2, y2),
        };
        let [a1, a2, a3, a4, a6] = &self.a;
        let (lambda, nu) = if x1 == x2 {
            let denom = y1.add_(y1).add_(&a1.mul_(x1)).add_(a3);
            if y1.add_(y2).add_(&a1.mul_(x2)).add_(a3).is_zero_elem() || denom.is_zero_elem() {
                return Point::Infinity;
            }
            let num = x1
                .mul_(x1)
                .mul_(&x1.small(3))
                .add_(&a2.mul_(x1).mul_(&x1.small(2)))
                .add_(a4)
                .sub_(&a1.mul_(y1));
            let lambda = num.mul_(&denom.inv_());
            let nu_num = x1
                .mul_(x1)
                .mul_(x1)
                .neg_()
                .add_(&a4.mul_(x1))
                .add_(&a6.small(2).mul_(a6))
                .sub_(&a3.mul_(y1));
            (lambda, nu_num.mul_(&denom.inv_()))
        } else {
            let inv = x2.sub_(x1).inv_();
            let lambda = y2.sub_(y1).mul_(&inv);
            let nu = y1.mul_(x2).sub_(&y2.mul_(x1)).mul_(&inv);
            (lambda, nu)
        };
        let x3 = lambda
            .mul_(&lambda)
            .add_(&a1.mul_(&lambda))
            .sub_(a2)
            .sub_(x1)
            .sub_(x2);
        let y3 = lambda.add_(a1).mul_(&x3).neg_().sub_(&nu).sub_(a3);
        Point::Affine(x3, y3)
    }

    pub fn double(&self, p: &Point<F>) -> Point<F> {
        self.add(p, p)
    }

    pub fn multiply(&self, p: &Point<F>, n: &BigInt) -> Point<F> {
        let base = if n.is_negative() { self.neg(p) } else { p.clone() };
        let n = n.abs();
        let mut acc = Point::Infinity;
        for i in (0..n.bits()).rev() {
            acc = self.double(&acc);
            if n.bit(i) {
                acc = self.add(&acc, &base);
            }
        }
        acc
    }
}

impl Curve<Rational> {
    pub fn over_q(e: &WeierstrassModel) -> Self {
        Curve { a: e.ainvs().clone() }
    }
}

impl Curve<Fp> {
    /// Reduction modulo `p`; `None` if a coefficient has `p` in its denominator.
    pub fn reduce(e: &WeierstrassModel, p: u64) -> Option<Self> {
        let mut a = [Fp { v: 0, p }; 5];
        for (slot, c) in a.iter_mut().zip(e.ainvs()) {
            *slot = Fp { v: rational_mod(c, p)?, p };
        }
        Some(Curve { a })
    }

    /// Every affine point, by exhaustive search.
    pub fn affine_points(&self) -> Vec<Point<Fp>> {
        let p = self.a[0].p;
        let mut out = Vec::new();
        for x in 0..p {
            for y in 0..p {
                let pt = Point::Affine(Fp { v: x, p }, Fp { v: y, p });
                if self.contains(&pt) {
                    out.push(pt);
                }
            }
        }
        out
    }
}

impl WeierstrassModel {
    pub fn point_on_curve(&self, pt: &CurvePoint) -> bool {
        match pt {
            Point::Infinity => true,
            Point::Affine(x, y) => self.contains(x, y),
        }
    }

    pub fn point_add(&self, p: &CurvePoint, q: &CurvePoint) -> CurvePoint {
        Curve::over_q(self).add(p, q)
    }

    pub fn point_double(&self, p: &CurvePoint) -> CurvePoint {
        Curve::over_q(self).double(p)
    }

    pub fn point_neg(&self, p: &CurvePoint) -> CurvePoint {
        Curve::over_q(self).neg(p)
    }

    pub fn point_multiply(&self, p: &CurvePoint, n: i64) -> CurvePoint {
        Curve::over_q(self).multiply(p, &BigInt::from(n))
    }

    /// Order of a point if it is at most 12, otherwise `None` (infinite order
    /// over Q, since rational torsion has order at most 12).
    pub fn small_order(&self, p: &CurvePoint) -> Option<u32> {
        let c = Curve::over_q(self);
        let mut acc = p.clone();
        for n in 1..=12 {
            if acc.is_infinity() {
                return Some(n);
            }
            acc = c.add(&acc, p);
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::rat;

    #[test]
    fn three_torsion_on_y2_plus_y_eq_x3() {
        let e = WeierstrassModel::from_ints([0, 0, 1, 0, 0]).unwrap();
        let p = CurvePoint::affine(rat(0, 1), rat(0, 1));
        assert!(e.point_on_curve(&p));
        assert!(e.point_multiply(&p, 3).is_infinity());
        assert!(!e.point_multiply(&p, 2).is_infinity());
        assert_eq!(e.small_order(&p), Some(3));
    }

    #[test]
    fn rational_group_law() {
        // y^2 = x^3 - 2 has (3, 5) of infinite order.
        let e = WeierstrassModel::from_ints([0, 0, 0, 0, -2]).unwrap();
        let p = CurvePoint::affine(rat(3, 1), rat(5, 1));
        let p2 = e.point_double(&p);
        assert_eq!(p2, CurvePoint::affine(rat(129, 100), rat(-383, 1000)));
        let p3 = e.point_add(&p2, &p);
        assert!(e.point_on_curve(&p3));
        assert_eq!(e.point_multiply(&p, 3), p3);
        assert_eq!(e.point_add(&p, &e.point_neg(&p)), Point::Infinity);
        assert_eq!(e.point_multiply(&p, -1), e.point_neg(&p));
        assert_eq!(e.small_order(&p), None);
    }

    #[test]
    fn fp_group_has_hasse_size() {
        let e = WeierstrassModel::from_ints([1, -1, 0, -4, 7]).unwrap();
        let c = Curve::reduce(&e, 11).unwrap();
        let pts = c.affine_points();
        let n = pts.len() as i64 + 1;
        assert!((12 - n).abs() <= 2 * 4);
        for p in &pts {
            assert!(c.multiply(p, &BigInt::from(n)).is_infinity());
        }
    }

    #[test]
    fn parse_points() {
        assert_eq!(
            CurvePoint::parse("1/2, -3").unwrap(),
            CurvePoint::affine(rat(1, 2), rat(-3, 1))
        );
        assert!(CurvePoint::parse("1").is_err());
    }
}
