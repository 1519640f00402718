//! Traces of Frobenius by character sums.

use super::model::WeierstrassModel;
use super::point::Curve;
use crate::arith::rational::{mul_mod, rational_mod};
use crate::error::{Error, Result};

/// `a_p = p + 1 - #E(F_p)` for a prime `p` at which the given model has good
/// reduction. The Hasse bound is asserted.
pub fn count_points(e: &WeierstrassModel, p: u64) -> Result<i64> {
    let ap = trace_of_frobenius(e, p)?;
    assert!(
        (ap as i128).pow(2) <= 4 * p as i128,
        "Hasse bound violated: a_{p} = {ap}"
    );
    Ok(ap)
}

fn trace_of_frobenius(e: &WeierstrassModel, p: u64) -> Result<i64> {
    if rational_mod(&e.discriminant(), p).is_none_or(|d| d == 0) {
        return Err(Error::BadReduction(p));
    }
    if p == 2 {
        let c = Curve::reduce(e, 2).ok_or(Error::BadReduction(2))?;
        let n = c.affine_points().len() as i64 + 1;
        return Ok(3 - n);
    }
    let inv = e.invariants();
    let coeff = |q: &crate::arith::rational::Rational| rational_mod(q, p).ok_or(Error::BadReduction(p));
    let b2 = coeff(&inv.b2)?;
    let b4 = coeff(&inv.b4)?;
    let b6 = coeff(&inv.b6)?;
    // chi(z) for z in F_p via a table of squares.
    let mut chi = vec![-1i8; p as usize];
    chi[0] = 0;
    for y in 1..=(p / 2) {
        chi[mul_mod(y, y, p) as usize] = 1;
    }
    // F(x) = 4x^3 + b2 x^2 + 2 b4 x + b6
    let (c3, c2, c1, c0) = (4 % p, b2, 2 * b4 % p, b6);
    // Forward differences of F over x = 0, 1, 2, ...
    let add = |a: u64, b: u64| {
        let s = a + b;
        if s >= p {
            s - p
        } else {
            s
        }
    };
    let mut v = c0;
    let mut d1 = (c3 + c2 + c1) % p;
    let mut d2 = (6 * c3 + 2 * c2) % p;
    let d3 = 6 * c3 % p;
    let mut sum: i64 = 0;
    for _ in 0..p {
        sum += chi[v as usize] as i64;
        v = add(v, d1);
        d1 = add(d1, d2);
        d2 = add(d2, d3);
    }
    Ok(-sum)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_examples() {
        let e1 = WeierstrassModel::from_ints([1, -1, 0, -13233492, 18531699291]).unwrap();
        assert_eq!(count_points(&e1, 2).unwrap(), 1);
        assert_eq!(count_points(&e1, 19).unwrap(), -6);
        assert!(matches!(count_points(&e1, 5), Err(Error::BadReduction(5))));
        let f = WeierstrassModel::from_ints([0, 0, 1, -955695, -359690094]).unwrap();
        assert_eq!(count_points(&f, 2).unwrap(), -2);
        assert_eq!(count_points(&f, 7).unwrap(), 3);
    }

    #[test]
    fn agrees_with_enumeration() {
        let e = WeierstrassModel::from_ints([1, 0, 1, -7, 3]).unwrap();
        for p in [3u64, 5, 7, 13, 17, 19, 23] {
            if let Ok(ap) = count_points(&e, p) {
                let c = Curve::reduce(&e, p).unwrap();
                let n = c.affine_points().len() as i64 + 1;
                assert_eq!(ap, p as i64 + 1 - n, "p = {p}");
            }
        }
    }
}
