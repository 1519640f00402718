//! Sturm bounds, q-expansions of curve newforms and mod-l congruences.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::primes::{factor, primes_up_to, smallest_prime_factors};
use crate::curve::{count_points, WeierstrassModel};
use crate::error::{Error, Result};
use crate::tate::{global_minimal_model, MinimalModel, ReductionClass};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SturmBound {
    pub level: u64,
    pub weight: u32,
    pub index: u64,
    pub bound: u64,
}

/// `B = floor(k [SL2(Z) : Gamma0(N)] / 12)` with index `N prod_{p | N} (1 + 1/p)`.
pub fn sturm_bound(level: u64, weight: u32) -> Result<SturmBound> {
    if level == 0 {
        return Err(Error::invalid("level must be positive"));
    }
    let fac = factor(&BigInt::from(level))?;
    let index = fac
        .factors
        .iter()
        .map(|pp| {
            let p = pp.prime.to_u64().unwrap();
            p.pow(pp.exponent - 1) * (p + 1)
        })
        .product::<u64>();
    Ok(SturmBound {
        level,
        weight,
        index,
        bound: weight as u64 * index / 12,
    })
}

/// Newform coefficient at a bad prime: 0 additive, +1 split, -1 nonsplit.
pub fn bad_prime_ap(e: &WeierstrassModel, p: u64) -> Result<i64> {
    let m = global_minimal_model(e);
    bad_ap_from(&m, p)
}

fn bad_ap_from(m: &MinimalModel, p: u64) -> Result<i64> {
    let l = m.local_at(p).ok_or(Error::GoodReduction(p))?;
    Ok(match l.reduction_class {
        ReductionClass::Additive => 0,
        ReductionClass::SplitMultiplicative => 1,
        ReductionClass::NonsplitMultiplicative => -1,
        ReductionClass::Good => return Err(Error::GoodReduction(p)),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QExpansion {
    pub level: u64,
    pub weight: u32,
    /// `coeffs[n - 1] = a_n`.
    pub coeffs: Vec<i64>,
    #[serde(skip)]
    bad: Vec<u64>,
}

impl QExpansion {
    pub fn a(&self, n: usize) -> i64 {
        self.coeffs[n - 1]
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Checks `a_1 = 1`, multiplicativity, the Hecke recurrence at good primes,
    /// `a_{p^k} = a_p^k` at bad primes, and the Hasse bound.
    pub fn verify_structure(&self) -> bool {
        let b = self.coeffs.len();
        if b == 0 || self.a(1) != 1 {
            return false;
        }
        let spf = smallest_prime_factors(b);
        for n in 2..=b {
            let p = spf[n] as usize;
            let mut m = n;
            let mut pk = 1;
            while m % p == 0 {
                m /= p;
                pk *= p;
            }
            if m > 1 && self.a(n) != self.a(pk) * self.a(m) {
                return false;
            }
            if m == 1 {
                let bad = self.bad.contains(&(p as u64));
                if pk == p {
                    if !bad && (self.a(p) as i128).pow(2) > 4 * p as i128 {
                        return false;
                    }
                } else if bad {
                    if self.a(pk) != self.a(pk / p) * self.a(p) {
                        return false;
                    }
                } else {
                    let expect = self.a(p) * self.a(pk / p)
                        - if pk / p >= p { p as i64 * self.a(pk / p / p) } else { p as i64 };
                    if self.a(pk) != expect {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// Traces `a_p` for all primes `p <= bound` on a minimal model.
fn prime_traces(m: &MinimalModel, bound: u64) -> Result<Vec<(u64, i64)>> {
    primes_up_to(bound)
        .into_par_iter()
        .map(|p| {
            if m.local_at(p).is_some() {
                Ok((p, bad_ap_from(m, p)?))
            } else {
                Ok((p, count_points(&m.model, p)?))
            }
        })
        .collect()
}

fn assemble(level: u64, bad: Vec<u64>, traces: &[(u64, i64)], bound: usize) -> QExpansion {
    let mut a = vec![0i64; bound + 1];
    if bound >= 1 {
        a[1] = 1;
    }
    let mut ap = vec![0i64; bound + 1];
    for &(p, t) in traces {
        ap[p as usize] = t;
    }
    let spf = smallest_prime_factors(bound);
    for n in 2..=bound {
        let p = spf[n] as usize;
        let mut m = n;
        let mut pk = 1usize;
        while m % p == 0 {
            m /= p;
            pk *= p;
        }
        if m > 1 {
            a[n] = a[pk] * a[m];
        } else if pk == p {
            a[n] = ap[p];
        } else if bad.contains(&(p as u64)) {
            a[n] = a[pk / p] * ap[p];
        } else {
            a[n] = ap[p] * a[pk / p] - p as i64 * a[pk / p / p];
        }
    }
    a.remove(0);
    QExpansion {
        level,
        weight: 2,
        coeffs: a,
        bad,
    }
}

/// Coefficients `a_1..a_B` of the weight-2 newform attached to `e`.
pub fn q_expansion(e: &WeierstrassModel, bound: u64) -> Result<QExpansion> {
    if bound == 0 {
        return Err(Error::invalid("q-expansion bound must be at least 1"));
    }
    let m = global_minimal_model(e);
    expansion_of(&m, bound)
}

fn expansion_of(m: &MinimalModel, bound: u64) -> Result<QExpansion> {
    let level = m
        .conductor()
        .to_u64()
        .ok_or_else(|| Error::invalid("conductor too large"))?;
    let traces = prime_traces(m, bound)?;
    let q = assemble(level, m.bad_primes(), &traces, bound as usize);
    debug_assert!(q.verify_structure());
    Ok(q)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CongruenceVerdict {
    pub ell: u64,
    pub level: u64,
    pub index: u64,
    pub bound: u64,
    pub congruent: bool,
    pub first_failure: Option<u64>,
}

/// Compares `a_n` modulo `l` for `1 <= n <= B` (the constant terms of cusp
/// forms vanish, so `n = 0` adds nothing).
pub fn congruence_verdict(e: &WeierstrassModel, f: &WeierstrassModel, ell: u64) -> Result<CongruenceVerdict> {
    congruence_verdict_with_bound(e, f, ell, None).map(|(v, _, _)| v)
}

/// As [`congruence_verdict`], with an optional explicit bound; also returns both
/// expansions.
pub fn congruence_verdict_with_bound(
    e: &WeierstrassModel,
    f: &WeierstrassModel,
    ell: u64,
    bound: Option<u64>,
) -> Result<(CongruenceVerdict, QExpansion, QExpansion)> {
    if ell < 2 {
        return Err(Error::invalid("l must be a prime"));
    }
    let (me, mf) = rayon::join(|| global_minimal_model(e), || global_minimal_model(f));
    let (ne, nf) = (me.conductor(), mf.conductor());
    if ne != nf {
        return Err(Error::LevelMismatch(ne.to_string(), nf.to_string()));
    }
    let level = ne.to_u64().ok_or_else(|| Error::invalid("conductor too large"))?;
    let sb = sturm_bound(level, 2)?;
    let b = bound.unwrap_or(sb.bound);
    let (qe, qf) = rayon::join(|| expansion_of(&me, b), || expansion_of(&mf, b));
    let (qe, qf) = (qe?, qf?);
    let l = ell as i64;
    let first_failure = (1..=b as usize)
        .find(|&n| (qe.a(n) - qf.a(n)).rem_euclid(l) != 0)
        .map(|n| n as u64);
    Ok((
        CongruenceVerdict {
            ell,
            level,
            index: sb.index,
            bound: b,
            congruent: first_failure.is_none(),
            first_failure,
        },
        qe,
        qf,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sturm_examples() {
        let s = sturm_bound(38025, 2).unwrap();
        assert_eq!((s.index, s.bound), (65520, 10920));
        let s = sturm_bound(1, 12).unwrap();
        assert_eq!((s.index, s.bound), (1, 1));
        let s = sturm_bound(11, 2).unwrap();
        assert_eq!((s.index, s.bound), (12, 2));
        assert!(sturm_bound(0, 2).is_err());
    }

    #[test]
    fn eleven_a() {
        // 11a1: q - 2q^2 - q^3 + 2q^4 + q^5 + 2q^6 - 2q^7 - 2q^9 - 2q^10 + q^11 - 2q^12 + 4q^13
        let e = WeierstrassModel::from_ints([0, -1, 1, -10, -20]).unwrap();
        let q = q_expansion(&e, 13).unwrap();
        assert_eq!(q.coeffs, vec![1, -2, -1, 2, 1, 2, -2, 0, -2, -2, 1, -2, 4]);
        assert!(q.verify_structure());
        assert_eq!(bad_prime_ap(&e, 11).unwrap(), 1);
        assert!(matches!(bad_prime_ap(&e, 3), Err(Error::GoodReduction(3))));
    }

    #[test]
    fn nonsplit_sign() {
        // 14a1 is nonsplit at 2 and split at 7.
        let e = WeierstrassModel::from_ints([1, 0, 1, 4, -6]).unwrap();
        assert_eq!(bad_prime_ap(&e, 2).unwrap(), -1);
        assert_eq!(bad_prime_ap(&e, 7).unwrap(), 1);
    }

    #[test]
    fn structure_check_rejects_tampering() {
        let e = WeierstrassModel::from_ints([0, -1, 1, -10, -20]).unwrap();
        let mut q = q_expansion(&e, 30).unwrap();
        q.coeffs[5] += 1;
        assert!(!q.verify_structure());
    }

    #[test]
    fn level_mismatch() {
        let e = WeierstrassModel::from_ints([0, -1, 1, -10, -20]).unwrap();
        let f = WeierstrassModel::from_ints([1, 0, 1, 4, -6]).unwrap();
        assert!(matches!(congruence_verdict(&e, &f, 3), Err(Error::LevelMismatch(_, _))));
    }
}
