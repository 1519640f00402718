//! Sieve for square-free twist parameters under congruence and residue conditions.

use num_bigint::BigInt;
use num_integer::Integer;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::primes::{factor, is_prime_u64, jacobi_symbol, legendre_u64, primes_up_to};
use crate::error::{Error, Result};

const BLOCK: i64 = 1 << 14;

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct TwistQuery {
    pub min: i64,
    pub max: i64,
    /// `|D|` prime.
    pub require_prime: bool,
    /// `(m, residues)`: `D mod m` must be one of `residues`.
    pub congruences: Vec<(u64, Vec<u64>)>,
    /// `(q, s)`: the Legendre symbol `(D / q)` must equal `s`.
    pub legendre: Vec<(u64, i8)>,
    /// `gcd(D, coprime) = 1`; `0` or `1` imposes nothing.
    pub coprime: u64,
}

impl TwistQuery {
    pub fn new(min: i64, max: i64) -> Self {
        TwistQuery {
            min,
            max,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.min > self.max {
            return Err(Error::invalid(format!("empty range [{}, {}]", self.min, self.max)));
        }
        for (m, _) in &self.congruences {
            if *m < 2 {
                return Err(Error::invalid(format!("modulus {m} must be at least 2")));
            }
        }
        for (q, s) in &self.legendre {
            if *q == 2 || !is_prime_u64(*q) {
                return Err(Error::invalid(format!("Legendre condition needs an odd prime, got {q}")));
            }
            if !matches!(s, -1 | 0 | 1) {
                return Err(Error::invalid(format!("Legendre symbol value {s} is not in {{-1, 0, 1}}")));
            }
        }
        Ok(())
    }

    fn accepts(&self, d: i64, small_primes: &[u64]) -> bool {
        if d == 0 {
            return false;
        }
        let a = d.unsigned_abs();
        for &p in small_primes {
            let sq = p * p;
            if sq > a {
                break;
            }
            if a % sq == 0 {
                return false;
            }
        }
        if self.require_prime && !is_prime_u64(a) {
            return false;
        }
        if self.coprime > 1 && a.gcd(&self.coprime) != 1 {
            return false;
        }
        for (m, res) in &self.congruences {
            let r = d.rem_euclid(*m as i64) as u64;
            if !res.iter().any(|&x| x % m == r) {
                return false;
            }
        }
        for &(q, s) in &self.legendre {
            let r = d.rem_euclid(q as i64) as u64;
            if legendre_u64(r, q) != s {
                return false;
            }
        }
        true
    }

    /// Independent re-check through big-integer factorization and Jacobi symbols.
    pub fn reverify(&self, d: i64) -> Result<bool> {
        let n = BigInt::from(d);
        if d == 0 || d < self.min || d > self.max {
            return Ok(false);
        }
        let f = factor(&n)?;
        if f.factors.iter().any(|pp| pp.exponent > 1) {
            return Ok(false);
        }
        if self.require_prime && !(f.factors.len() == 1 && f.factors[0].exponent == 1) {
            return Ok(false);
        }
        if self.coprime > 1 && f.factors.iter().any(|pp| BigInt::from(self.coprime) % &pp.prime == BigInt::from(0)) {
            return Ok(false);
        }
        for (m, res) in &self.congruences {
            let r = n.mod_floor(&BigInt::from(*m));
            if !res.iter().any(|&x| BigInt::from(x % m) == r) {
                return Ok(false);
            }
        }
        for &(q, s) in &self.legendre {
            if jacobi_symbol(&n, &BigInt::from(q))? != s {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Every square-free `D` in range meeting all conditions, ascending.
pub fn scan(query: &TwistQuery) -> Result<Vec<i64>> {
    query.validate()?;
    let bound = query.min.unsigned_abs().max(query.max.unsigned_abs());
    let small = primes_up_to((bound as f64).sqrt() as u64 + 1);
    let starts: Vec<i64> = (query.min..=query.max).step_by(BLOCK as usize).collect();
    let blocks: Vec<Vec<i64>> = starts
        .par_iter()
        .map(|&s| {
            let e = s.saturating_add(BLOCK - 1).min(query.max);
            (s..=e).filter(|&d| query.accepts(d, &small)).collect()
        })
        .collect();
    Ok(blocks.into_iter().flatten().collect())
}

/// `D` prime, `D = 1 mod 8`, `(D/5) = -1`, `(D/13) = 1`, `gcd(D, 390) = 1` and
/// `D = 2 mod 3`.
pub fn table_query(min: i64, max: i64) -> TwistQuery {
    TwistQuery {
        min,
        max,
        require_prime: true,
        congruences: vec![(8, vec![1]), (3, vec![2])],
        legendre: vec![(5, -1), (13, 1)],
        coprime: 2 * 3 * 5 * 13,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plain_squarefree() {
        assert_eq!(scan(&TwistQuery::new(1, 10)).unwrap(), vec![1, 2, 3, 5, 6, 7, 10]);
        assert_eq!(scan(&TwistQuery::new(-10, -1)).unwrap(), vec![-10, -7, -6, -5, -3, -2, -1]);
    }

    #[test]
    fn table_conditions() {
        let out = scan(&table_query(2, 24000)).unwrap();
        assert!(out.contains(&6977) && out.contains(&23297));
        assert!(scan(&table_query(2, 300)).unwrap().contains(&233));
        let q = table_query(2, 24000);
        for d in out {
            assert!(q.reverify(d).unwrap());
        }
    }

    #[test]
    fn rejects_bad_queries() {
        let mut q = TwistQuery::new(1, 5);
        q.legendre.push((9, 1));
        assert!(scan(&q).is_err());
        let mut q = TwistQuery::new(1, 5);
        q.congruences.push((1, vec![0]));
        assert!(scan(&q).is_err());
        assert!(scan(&TwistQuery::new(5, 1)).is_err());
    }
}
