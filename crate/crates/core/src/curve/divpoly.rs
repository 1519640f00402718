//! Division polynomials.
//!
//! `f_n` denotes `psi_n` for odd `n` and `psi_n / psi_2` for even `n`, so every
//! `f_n` is a polynomial in `x` alone; `psi_2^2 = F = 4x^3 + b2 x^2 + 2 b4 x + b6`.

use num_bigint::BigInt;

use super::model::WeierstrassModel;
use crate::arith::poly::{IntPolynomial, QPolynomial};
use crate::arith::primes::is_prime_u64;
use crate::arith::rational::Rational;
use crate::error::{Error, Result};

fn q(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `psi_l` scaled to a primitive-free integer polynomial: `poly = scalar * psi_l`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivisionPolynomial {
    pub ell: u64,
    pub poly: IntPolynomial,
    pub scalar: BigInt,
}

/// `F = 4x^3 + b2 x^2 + 2 b4 x + b6`.
pub fn two_torsion_cubic(e: &WeierstrassModel) -> QPolynomial {
    let i = e.invariants();
    QPolynomial::new(vec![i.b6.clone(), q(2) * &i.b4, i.b2.clone(), q(4)])
}

/// `f_0, ..., f_n` over Q.
pub fn reduced_division_polynomials(e: &WeierstrassModel, n: usize) -> Vec<QPolynomial> {
    let i = e.invariants();
    let (b2, b4, b6, b8) = (&i.b2, &i.b4, &i.b6, &i.b8);
    let ff = two_torsion_cubic(e);
    let f2sq = ff.mul(&ff);
    let mut f: Vec<QPolynomial> = vec![
        QPolynomial::zero(),
        QPolynomial::constant(q(1)),
        QPolynomial::constant(q(1)),
        QPolynomial::new(vec![b8.clone(), q(3) * b6, q(3) * b4, b2.clone(), q(3)]),
        QPolynomial::new(vec![
            b4 * b8 - b6 * b6,
            b2 * b8 - b4 * b6,
            q(10) * b8,
            q(10) * b6,
            q(5) * b4,
            b2.clone(),
            q(2),
        ]),
    ];
    for k in 5..=n {
        let m = k / 2;
        let next = if k % 2 == 1 {
            let a = f[m + 2].mul(&f[m].pow(3));
            let b = f[m - 1].mul(&f[m + 1].pow(3));
            if m % 2 == 0 {
                a.mul(&f2sq).sub(&b)
            } else {
                a.sub(&b.mul(&f2sq))
            }
        } else {
            let a = f[m + 2].mul(&f[m - 1].pow(2));
            let b = f[m - 2].mul(&f[m + 1].pow(2));
            f[m].mul(&a.sub(&b))
        };
        f.push(next);
    }
    f.truncate(n + 1);
    f
}

/// `psi_l` for an odd prime `l`, with denominators cleared.
pub fn division_polynomial(e: &WeierstrassModel, ell: u64) -> Result<DivisionPolynomial> {
    if ell == 2 || !is_prime_u64(ell) {
        return Err(Error::invalid(format!("division polynomial needs an odd prime, got {ell}")));
    }
    let f = reduced_division_polynomials(e, ell as usize);
    let (poly, scalar) = f[ell as usize].clear_denominators();
    Ok(DivisionPolynomial { ell, poly, scalar })
}

/// `phi_3 - x0 psi_3^2`, whose roots are the x-coordinates of points `T` with
/// `x(3T) = x0`.
pub fn triple_preimage_polynomial(e: &WeierstrassModel, x0: &Rational) -> QPolynomial {
    let f = reduced_division_polynomials(e, 4);
    let ff = two_torsion_cubic(e);
    let phi3 = QPolynomial::x()
        .mul(&f[3].mul(&f[3]))
        .sub(&f[4].mul(&ff));
    phi3.sub(&f[3].mul(&f[3]).scale(x0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::point::{Curve, Point};

    #[test]
    fn psi3_examples() {
        let e = WeierstrassModel::from_ints([0, 0, 0, 1, 0]).unwrap();
        let d = division_polynomial(&e, 3).unwrap();
        assert_eq!(d.poly, IntPolynomial::from_i64(&[-1, 0, 6, 0, 3]));
        assert_eq!(d.scalar, BigInt::from(1));
        for (a, b) in [(2i64, 3i64), (-5, 7), (25350, 2471625)] {
            let e = WeierstrassModel::from_ints([0, a, 0, b, 0]).unwrap();
            let d = division_polynomial(&e, 3).unwrap();
            assert_eq!(d.poly, IntPolynomial::from_i64(&[-b * b, 0, 6 * b, 4 * a, 3]));
        }
        assert!(division_polynomial(&e, 2).is_err());
        assert!(division_polynomial(&e, 9).is_err());
    }

    #[test]
    fn degrees() {
        let e = WeierstrassModel::from_ints([1, -1, 1, -3, 5]).unwrap();
        for ell in [3u64, 5, 7] {
            let d = division_polynomial(&e, ell).unwrap();
            assert_eq!(d.poly.degree(), Some(((ell * ell - 1) / 2) as usize));
        }
    }

    #[test]
    fn psi5_vanishes_on_five_torsion() {
        // 11a3: y^2 + y = x^3 - x^2 has (0,0) of order 5.
        let e = WeierstrassModel::from_ints([0, -1, 1, 0, 0]).unwrap();
        let d = division_polynomial(&e, 5).unwrap();
        assert_eq!(d.poly.coeff(0), BigInt::from(0));
        let pt = Point::Affine(q(0), q(0));
        assert!(Curve::over_q(&e).multiply(&pt, &BigInt::from(5)).is_infinity());
    }

    #[test]
    fn even_index_matches_multiplication() {
        // x(4P) from f_4 and the x-only formula agree with the group law.
        let e = WeierstrassModel::from_ints([0, 0, 0, 0, -2]).unwrap();
        let p = Point::Affine(q(3), q(5));
        let c = Curve::over_q(&e);
        let p4 = c.multiply(&p, &BigInt::from(4));
        let f = reduced_division_polynomials(&e, 5);
        let x = q(3);
        let ff = two_torsion_cubic(&e).eval(&x);
        // phi_4 = x psi_4^2 - psi_5 psi_3 with psi_4^2 = f_4^2 F.
        let psi4sq = f[4].eval(&x) * f[4].eval(&x) * &ff;
        let phi4 = &x * &psi4sq - f[5].eval(&x) * f[3].eval(&x);
        match p4 {
            Point::Affine(x4, _) => assert_eq!(x4, phi4 / psi4sq),
            _ => panic!(),
        }
    }
}
