//! Dense univariate polynomials over Z, Q and F_p.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::primes::primes_up_to;
use super::rational::{common_denominator, inv_mod, mod_u64, mul_mod, Rational};
use crate::error::{Error, Result};

/// Integer polynomial, `coeffs[i]` is the coefficient of `x^i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        IntPolynomial { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        IntPolynomial { coeffs: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn leading(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_some_and(One::is_one)
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.coeffs
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_rational(&self, x: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + Rational::from_integer(c.clone()))
    }

    pub fn eval_mod(&self, x: u64, p: u64) -> u64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0, |acc, c| (mul_mod(acc, x, p) + mod_u64(c, p)) % p)
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        )
    }

    pub fn content(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    /// Divides out the content and makes the leading coefficient positive.
    pub fn primitive(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut g = self.content();
        if self.leading().unwrap().is_negative() {
            g = -g;
        }
        Self::new(self.coeffs.iter().map(|c| c / &g).collect())
    }

    /// `x^deg f(1/x)`.
    pub fn reversed(&self) -> Self {
        Self::new(self.coeffs.iter().rev().cloned().collect())
    }

    /// Coefficients reduced into `[0, p)`.
    pub fn reduce_mod(&self, p: u64) -> FpPoly {
        FpPoly::new(self.coeffs.iter().map(|c| mod_u64(c, p)).collect(), p)
    }

    pub fn to_q(&self) -> QPolynomial {
        QPolynomial::new(self.coeffs.iter().cloned().map(Rational::from_integer).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    /// `f(a + b x)` with integer shift and scale.
    pub fn compose_linear(&self, a: &BigInt, b: &BigInt) -> Self {
        let lin = IntPolynomial::new(vec![a.clone(), b.clone()]);
        let mut acc = IntPolynomial::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(&lin).add(&IntPolynomial::new(vec![c.clone()]));
        }
        acc
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|i| self.coeff(i) + other.coeff(i)).collect())
    }

    /// Square-free part over Q, as a primitive integer polynomial.
    pub fn squarefree_part(&self) -> Self {
        let f = self.to_q();
        let g = f.gcd(&f.derivative());
        let (h, _) = f.div_rem(&g);
        h.clear_denominators().0.primitive()
    }

    /// All rational roots, exactly, in ascending order.
    pub fn rational_roots(&self) -> Result<Vec<Rational>> {
        if self.is_zero() {
            return Err(Error::invalid("the zero polynomial has every number as a root"));
        }
        let mut roots = Vec::new();
        let mut f = self.clone();
        if f.coeffs[0].is_zero() {
            roots.push(Rational::zero());
            let k = f.coeffs.iter().position(|c| !c.is_zero()).unwrap();
            f = Self::new(f.coeffs[k..].to_vec());
        }
        let g = f.squarefree_part();
        let n = g.degree().unwrap();
        if n == 0 {
            return Ok(roots);
        }
        // h(Z) = lc^(n-1) g(Z/lc) is monic with integer roots Z = lc * x.
        let lc = g.leading().unwrap().clone();
        let h = Self::new(
            (0..=n)
                .map(|i| {
                    if i == n {
                        BigInt::one()
                    } else {
                        &g.coeffs[i] * lc.pow((n - 1 - i) as u32)
                    }
                })
                .collect(),
        );
        for z in monic_integer_roots(&h) {
            roots.push(Rational::new(z, lc.clone()));
        }
        roots.sort();
        roots.dedup();
        Ok(roots)
    }
}

/// Integer roots of a monic square-free polynomial, by lifting the roots modulo a
/// prime where it stays square-free past twice the Cauchy root bound.
fn monic_integer_roots(h: &IntPolynomial) -> Vec<BigInt> {
    debug_assert!(h.is_monic());
    let bound: BigInt = h.coeffs.iter().map(|c| c.abs()).max().unwrap() + 1u32;
    let q = primes_up_to(100_000)
        .into_iter()
        .find(|&q| {
            let hq = h.reduce_mod(q);
            hq.degree() == h.degree() && hq.gcd(&hq.derivative()).degree() == Some(0)
        })
        .expect("square-free integer polynomial stays square-free modulo some small prime");
    let hp = h.derivative();
    let target = bound * 2u32;
    let mut out = Vec::new();
    for r in h.reduce_mod(q).roots() {
        let mut x = BigInt::from(r);
        let mut modulus = BigInt::from(q);
        while modulus <= target {
            modulus = &modulus * &modulus;
            let fx = h.eval(&x).mod_floor(&modulus);
            let dx = hp.eval(&x).mod_floor(&modulus);
            let inv = super::rational::inv_mod_big(&dx, &modulus)
                .expect("simple root keeps a unit derivative");
            x = (x - fx * inv).mod_floor(&modulus);
        }
        if &x * 2u32 > modulus {
            x -= &modulus;
        }
        if h.eval(&x).is_zero() {
            out.push(x);
        }
    }
    out
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_poly(f, self.coeffs.iter().map(|c| c.to_string()).collect(), "x")
    }
}

fn write_poly(f: &mut fmt::Formatter<'_>, coeffs: Vec<String>, var: &str) -> fmt::Result {
    let mut first = true;
    for (i, c) in coeffs.iter().enumerate().rev() {
        if c == "0" {
            continue;
        }
        let (neg, mag) = match c.strip_prefix('-') {
            Some(m) => (true, m),
            None => (false, c.as_str()),
        };
        if first {
            if neg {
                f.write_str("-")?;
            }
        } else {
            f.write_str(if neg { " - " } else { " + " })?;
        }
        let mono = match i {
            0 => String::new(),
            1 => var.to_string(),
            _ => format!("{var}^{i}"),
        };
        match (mag, i) {
            (_, 0) => f.write_str(mag)?,
            ("1", _) => f.write_str(&mono)?,
            _ => write!(f, "{mag}*{mono}")?,
        }
        first = false;
    }
    if first {
        f.write_str("0")?;
    }
    Ok(())
}

/// Polynomial with rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QPolynomial {
    coeffs: Vec<Rational>,
}

impl QPolynomial {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        QPolynomial { coeffs }
    }

    pub fn zero() -> Self {
        QPolynomial { coeffs: Vec::new() }
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    /// The monomial `x`.
    pub fn x() -> Self {
        Self::new(vec![Rational::zero(), Rational::one()])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        Self::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        Self::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn scale(&self, k: &Rational) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::constant(Rational::one()), |acc, _| acc.mul(self))
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * Rational::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    /// Euclidean division; panics on division by zero.
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        let dd = d.degree().expect("division by the zero polynomial");
        let lc = d.leading().unwrap();
        let mut r = self.coeffs.clone();
        let n = self.coeffs.len();
        if n <= dd {
            return (Self::zero(), self.clone());
        }
        let mut q = vec![Rational::zero(); n - dd];
        for i in (dd..n).rev() {
            let c = &r[i] / lc;
            if c.is_zero() {
                continue;
            }
            for (j, dc) in d.coeffs.iter().enumerate() {
                r[i - dd + j] -= &c * dc;
            }
            q[i - dd] = c;
        }
        r.truncate(dd);
        (Self::new(q), Self::new(r))
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, o: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        match a.leading() {
            None => a,
            Some(lc) => {
                let inv = lc.recip();
                a.scale(&inv)
            }
        }
    }

    /// Returns `(g, d)` with `g = d * self` integral and `d > 0` the least common
    /// denominator.
    pub fn clear_denominators(&self) -> (IntPolynomial, BigInt) {
        let d = common_denominator(self.coeffs.iter());
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| (c * Rational::from_integer(d.clone())).to_integer())
            .collect();
        (IntPolynomial::new(coeffs), d)
    }
}

impl fmt::Display for QPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_poly(
            f,
            self.coeffs.iter().map(super::rational::format_rational).collect(),
            "x",
        )
    }
}

/// Polynomial over F_p with coefficients in `[0, p)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FpPoly {
    coeffs: Vec<u64>,
    p: u64,
}

impl FpPoly {
    pub fn new(mut coeffs: Vec<u64>, p: u64) -> Self {
        for c in coeffs.iter_mut() {
            *c %= p;
        }
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        FpPoly { coeffs, p }
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, x: u64) -> u64 {
        let p = self.p;
        self.coeffs
            .iter()
            .rev()
            .fold(0, |acc, &c| (mul_mod(acc, x, p) + c) % p)
    }

    pub fn derivative(&self) -> Self {
        let p = self.p;
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| mul_mod(c, i as u64 % p, p))
                .collect(),
            p,
        )
    }

    fn rem(&self, d: &Self) -> Self {
        let p = self.p;
        let dd = d.degree().expect("division by zero polynomial");
        let inv = inv_mod(*d.coeffs.last().unwrap(), p).expect("field");
        let mut r = self.coeffs.clone();
        while r.len() > dd {
            let i = r.len() - 1;
            let c = mul_mod(r[i], inv, p);
            if c != 0 {
                for (j, &dc) in d.coeffs.iter().enumerate() {
                    let k = i - dd + j;
                    r[k] = (r[k] + p - mul_mod(c, dc, p)) % p;
                }
            }
            r.pop();
            while r.last() == Some(&0) {
                r.pop();
            }
        }
        Self::new(r, p)
    }

    pub fn gcd(&self, o: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), o.clone());
        while b.degree().is_some() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        match a.coeffs.last() {
            None => a,
            Some(&lc) => {
                let inv = inv_mod(lc, a.p).unwrap();
                let p = a.p;
                Self::new(a.coeffs.iter().map(|&c| mul_mod(c, inv, p)).collect(), p)
            }
        }
    }

    /// Distinct roots in `[0, p)`, ascending, by exhaustive evaluation.
    pub fn roots(&self) -> Vec<u64> {
        if self.degree().is_none() {
            return (0..self.p).collect();
        }
        (0..self.p).filter(|&x| self.eval(x) == 0).collect()
    }

    pub fn has_root(&self) -> bool {
        if self.degree().is_none() {
            return true;
        }
        (0..self.p).any(|x| self.eval(x) == 0)
    }
}

impl fmt::Display for FpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_poly(f, self.coeffs.iter().map(|c| c.to_string()).collect(), "Y")
    }
}

/// Cauchy bound `1 + max |a_i / a_n|` as an `f64` (for diagnostics).
pub fn cauchy_bound(f: &IntPolynomial) -> f64 {
    let lc = f.leading().and_then(|c| c.abs().to_f64()).unwrap_or(1.0);
    1.0 + f
        .coeffs()
        .iter()
        .map(|c| c.abs().to_f64().unwrap_or(f64::INFINITY) / lc)
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::{int, rat};

    #[test]
    fn rational_roots_exact() {
        // 6x^3 - 11x^2 + 6x - 1 = (x-1)(2x-1)(3x-1)
        let f = IntPolynomial::from_i64(&[-1, 6, -11, 6]);
        assert_eq!(f.rational_roots().unwrap(), vec![rat(1, 3), rat(1, 2), rat(1, 1)]);
        let g = IntPolynomial::from_i64(&[2, 0, 1]);
        assert!(g.rational_roots().unwrap().is_empty());
        // repeated and zero roots
        let h = IntPolynomial::from_i64(&[0, 0, 4, -4, 1]); // x^2 (x-2)^2
        assert_eq!(h.rational_roots().unwrap(), vec![rat(0, 1), rat(2, 1)]);
        // (5x + c)(x - 3) with c = 10^30 + 7
        let c: BigInt = int(10).pow(30) + 7;
        let big = IntPolynomial::new(vec![-(&c * int(3)), &c - int(15), int(5)]);
        assert_eq!(
            big.rational_roots().unwrap(),
            vec![Rational::new(-c, int(5)), rat(3, 1)]
        );
    }

    #[test]
    fn gcd_and_squarefree() {
        let f = IntPolynomial::from_i64(&[1, -2, 1]).to_q(); // (x-1)^2
        let g = f.gcd(&f.derivative());
        assert_eq!(g, IntPolynomial::from_i64(&[-1, 1]).to_q());
        let sq = IntPolynomial::from_i64(&[-2, 2, 2, -2]).squarefree_part(); // -2(x-1)^2(x+1)
        assert_eq!(sq, IntPolynomial::from_i64(&[-1, 0, 1]));
    }

    #[test]
    fn fp_roots() {
        let f = FpPoly::new(vec![1, 0, 0, 1, 1], 2);
        assert!(f.roots().is_empty());
        assert_eq!(f.to_string(), "Y^4 + Y^3 + 1");
        let g = FpPoly::new(vec![6, 0, 1], 7); // x^2 - 1
        assert_eq!(g.roots(), vec![1, 6]);
    }

    #[test]
    fn display() {
        assert_eq!(IntPolynomial::from_i64(&[-1, 0, 6, 0, 3]).to_string(), "3*x^4 + 6*x^2 - 1");
        assert_eq!(IntPolynomial::zero().to_string(), "0");
    }
}
