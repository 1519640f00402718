//! Exact rationals and small integer helpers shared across the crate.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Reduced fraction with positive denominator.
pub type Rational = BigRational;

pub fn int(n: i64) -> BigInt {
    BigInt::from(n)
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: impl Into<BigInt>) -> Rational {
    Rational::from_integer(n.into())
}

/// Serde adapters writing exact numbers as decimal strings.
pub mod as_string {
    use super::{format_rational, BigInt, Rational};
    use serde::Serializer;

    pub fn rational<S: Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(q))
    }

    pub fn bigint<S: Serializer>(n: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&n.to_string())
    }
}

/// Parses `n` or `n/d` (optional surrounding whitespace, optional sign).
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::invalid(format!("not a rational number: {s:?}"));
    match s.split_once('/') {
        None => s.parse::<BigInt>().map(Rational::from_integer).map_err(|_| bad()),
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(Error::invalid(format!("zero denominator in {s:?}")));
            }
            Ok(Rational::new(n, d))
        }
    }
}

/// `num/den` string, or plain `num` when the denominator is one.
pub fn format_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// p-adic valuation of a nonzero integer; `None` for zero.
pub fn val(n: &BigInt, p: u64) -> Option<u32> {
    if n.is_zero() {
        return None;
    }
    if p == 2 {
        return n.trailing_zeros().map(|t| t as u32);
    }
    let pb = BigInt::from(p);
    let mut m = n.clone();
    let mut v = 0;
    loop {
        let (q, r) = m.div_rem(&pb);
        if !r.is_zero() {
            return Some(v);
        }
        m = q;
        v += 1;
    }
}

/// Valuation with zero mapped to a large sentinel, convenient in comparisons.
pub fn val_or_inf(n: &BigInt, p: u64) -> i64 {
    val(n, p).map(i64::from).unwrap_or(i64::MAX / 4)
}

pub fn rational_val(q: &Rational, p: u64) -> Option<i64> {
    let vn = val(q.numer(), p)? as i64;
    let vd = val(q.denom(), p).unwrap_or(0) as i64;
    Some(vn - vd)
}

pub fn rational_val_or_inf(q: &Rational, p: u64) -> i64 {
    rational_val(q, p).unwrap_or(i64::MAX / 4)
}

/// Strips every factor of `p` from `n`, returning the cofactor and the count.
pub fn remove_factor(n: &BigInt, p: u64) -> (BigInt, u32) {
    if n.is_zero() {
        return (n.clone(), 0);
    }
    let v = val(n, p).unwrap_or(0);
    (n / BigInt::from(p).pow(v), v)
}

/// Least nonnegative residue of `n` modulo `m`.
pub fn modulo(n: &BigInt, m: &BigInt) -> BigInt {
    n.mod_floor(m)
}

pub fn mod_u64(n: &BigInt, p: u64) -> u64 {
    n.mod_floor(&BigInt::from(p)).to_u64().expect("residue fits in u64")
}

/// Reduces a rational with denominator prime to `p` into `Z/pZ`.
pub fn rational_mod(q: &Rational, p: u64) -> Option<u64> {
    let d = mod_u64(q.denom(), p);
    if d == 0 {
        return None;
    }
    let n = mod_u64(q.numer(), p);
    Some(mul_mod(n, inv_mod(d, p)?, p))
}

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    acc
}

pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (g, x, _) = ext_gcd(a as i128, m as i128);
    if g != 1 {
        return None;
    }
    Some(x.rem_euclid(m as i128) as u64)
}

fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = ext_gcd(b, a % b);
        (g, y, x - (a / b) * y)
    }
}

/// Inverse of `a` modulo `m` for big moduli.
pub fn inv_mod_big(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.mod_floor(m).extended_gcd(m);
    if !e.gcd.is_one() {
        return None;
    }
    Some(e.x.mod_floor(m))
}

/// Exact square root of a nonnegative integer, if it is a perfect square.
pub fn exact_sqrt(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}

/// Exact square root of a rational, if it is the square of a rational.
pub fn rational_sqrt(q: &Rational) -> Option<Rational> {
    let n = exact_sqrt(q.numer())?;
    let d = exact_sqrt(q.denom())?;
    Some(Rational::new(n, d))
}

/// Natural logarithm of a positive big integer, accurate to f64 precision.
pub fn ln_big(n: &BigInt) -> f64 {
    assert!(n.sign() == Sign::Plus, "ln of a non-positive integer");
    let bits = n.bits();
    if bits <= 1000 {
        return n.to_f64().expect("finite").ln();
    }
    let shift = bits - 64;
    let top = (n >> shift).to_f64().expect("finite");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

pub fn rational_to_f64(q: &Rational) -> f64 {
    match (q.numer().to_f64(), q.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            let sign = if q.is_negative() { -1.0 } else { 1.0 };
            sign * (ln_big(&q.numer().abs()) - ln_big(q.denom())).exp()
        }
    }
}

/// Least common multiple of the denominators of `qs`.
pub fn common_denominator<'a>(qs: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    qs.into_iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        let q = parse_rational(" -6/4 ").unwrap();
        assert_eq!(q, rat(-3, 2));
        assert_eq!(format_rational(&q), "-3/2");
        assert_eq!(format_rational(&parse_rational("12").unwrap()), "12");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn valuations() {
        assert_eq!(val(&int(38025), 3), Some(2));
        assert_eq!(val(&int(38025), 13), Some(2));
        assert_eq!(val(&int(0), 13), None);
        assert_eq!(val(&int(-48), 2), Some(4));
        assert_eq!(rational_val(&rat(9, 250), 5), Some(-3));
        assert_eq!(rational_mod(&rat(1, 2), 7), Some(4));
        assert_eq!(rational_mod(&rat(1, 7), 7), None);
    }

    #[test]
    fn logs_of_huge_integers() {
        let n = BigInt::from(10).pow(5000);
        assert!((ln_big(&n) - 5000.0 * 10f64.ln()).abs() < 1e-9);
        assert!((rational_to_f64(&Rational::new(n.clone() * 3, n)) - 3.0).abs() < 1e-12);
    }
}
