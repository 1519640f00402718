//! Primality, factorization and residue symbols.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::rational::{mul_mod, pow_mod};
use crate::error::{Error, Result};

/// Below this bound the strong-pseudoprime test on bases 2..17 is a proof.
/// Strong pseudoprimes to all of [`MR_BASES`] are at least this large.
pub const DETERMINISTIC_PRIME_BOUND: u128 = 3_317_044_064_679_887_385_961_981;

const TRIAL_DIVISION_LIMIT: u64 = 1_000_000;
const MR_BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Primes `<= n` by the sieve of Eratosthenes.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

/// Smallest-prime-factor table for `0..=n`.
pub fn smallest_prime_factors(n: usize) -> Vec<u32> {
    let mut spf = vec![0u32; n + 1];
    for i in 2..=n {
        if spf[i] == 0 {
            let mut j = i;
            while j <= n {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
    }
    spf
}

fn strong_probable_prime(n: u64, a: u64) -> bool {
    let a = a % n;
    if a == 0 {
        return true;
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    let mut x = pow_mod(a, d, n);
    if x == 1 || x == n - 1 {
        return true;
    }
    for _ in 1..s {
        x = mul_mod(x, x, n);
        if x == n - 1 {
            return true;
        }
    }
    false
}

/// Exact primality of a machine integer.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    MR_BASES.iter().all(|&a| strong_probable_prime(n, a))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Primality {
    Composite,
    Prime,
    ProbablePrime,
}

pub fn primality(n: &BigInt) -> Primality {
    if let Some(m) = n.to_u64() {
        return if is_prime_u64(m) { Primality::Prime } else { Primality::Composite };
    }
    if n.is_negative() || n.is_even() {
        return Primality::Composite;
    }
    let nm1: BigInt = n - 1u32;
    let s = nm1.trailing_zeros().unwrap_or(0);
    let d = &nm1 >> s;
    for &a in &MR_BASES {
        let mut x = BigInt::from(a).modpow(&d, n);
        if x.is_one() || x == nm1 {
            continue;
        }
        let mut witness = true;
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == nm1 {
                witness = false;
                break;
            }
        }
        if witness {
            return Primality::Composite;
        }
    }
    if n < &BigInt::from(DETERMINISTIC_PRIME_BOUND) {
        Primality::Prime
    } else {
        Primality::ProbablePrime
    }
}

/// One prime-power factor; `certified` is false for probable primes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimePower {
    pub prime: BigInt,
    pub exponent: u32,
    pub certified: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub factors: Vec<PrimePower>,
}

impl Factorization {
    pub fn primes(&self) -> impl Iterator<Item = &BigInt> {
        self.factors.iter().map(|f| &f.prime)
    }

    /// Prime support as machine integers; panics on primes beyond u64.
    pub fn primes_u64(&self) -> Vec<u64> {
        self.primes()
            .map(|p| p.to_u64().expect("prime factor exceeds u64"))
            .collect()
    }

    pub fn exponent_of(&self, p: u64) -> u32 {
        self.factors
            .iter()
            .find(|f| f.prime == BigInt::from(p))
            .map_or(0, |f| f.exponent)
    }

    pub fn product(&self) -> BigInt {
        self.factors
            .iter()
            .fold(BigInt::one(), |acc, f| acc * f.prime.pow(f.exponent))
    }

    pub fn as_pairs(&self) -> Vec<(BigInt, u32)> {
        self.factors
            .iter()
            .map(|f| (f.prime.clone(), f.exponent))
            .collect()
    }

    pub fn fully_certified(&self) -> bool {
        self.factors.iter().all(|f| f.certified)
    }
}

/// Factorization of `|n|`: trial division to 10^6, then Pollard rho.
pub fn factor(n: &BigInt) -> Result<Factorization> {
    if n.is_zero() {
        return Err(Error::invalid("cannot factor 0"));
    }
    let mut m = n.abs();
    let mut found: Vec<BigInt> = Vec::new();
    let mut p = 2u64;
    while p <= TRIAL_DIVISION_LIMIT {
        let pb = BigInt::from(p);
        if &pb * &pb > m {
            break;
        }
        while (&m % &pb).is_zero() {
            m /= &pb;
            found.push(pb.clone());
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if !m.is_one() {
        split_large(m, &mut found);
    }
    found.sort();
    let mut factors: Vec<PrimePower> = Vec::new();
    for q in found {
        match factors.last_mut() {
            Some(last) if last.prime == q => last.exponent += 1,
            _ => {
                let certified = primality(&q) == Primality::Prime;
                factors.push(PrimePower {
                    prime: q,
                    exponent: 1,
                    certified,
                })
            }
        }
    }
    Ok(Factorization { factors })
}

fn split_large(m: BigInt, out: &mut Vec<BigInt>) {
    if m.is_one() {
        return;
    }
    // No factor below 10^6 remains, so anything under 10^12 is prime.
    let small_bound = BigInt::from(TRIAL_DIVISION_LIMIT) * BigInt::from(TRIAL_DIVISION_LIMIT);
    if m < small_bound || primality(&m) != Primality::Composite {
        out.push(m);
        return;
    }
    let d = pollard_brent(&m);
    split_large(d.clone(), out);
    split_large(m / d, out);
}

fn pollard_brent(n: &BigInt) -> BigInt {
    let mut c = BigInt::one();
    loop {
        let f = |x: &BigInt| (x * x + &c) % n;
        let mut y = BigInt::from(2u32);
        let mut r: u64 = 1;
        let mut q = BigInt::one();
        let mut g = BigInt::one();
        let mut x = y.clone();
        let mut ys = y.clone();
        let block = 128u64;
        while g.is_one() {
            x = y.clone();
            for _ in 0..r {
                y = f(&y);
            }
            let mut k = 0;
            while k < r && g.is_one() {
                ys = y.clone();
                for _ in 0..block.min(r - k) {
                    y = f(&y);
                    q = (q * (&x - &y).abs()) % n;
                }
                g = q.gcd(n);
                k += block;
            }
            r *= 2;
        }
        if &g == n {
            loop {
                ys = f(&ys);
                g = (&x - &ys).abs().gcd(n);
                if !g.is_one() {
                    break;
                }
            }
        }
        if &g != n {
            return g;
        }
        c += 1u32;
    }
}

pub fn is_squarefree(n: &BigInt) -> bool {
    if n.is_zero() {
        return false;
    }
    factor(n)
        .map(|f| f.factors.iter().all(|pp| pp.exponent == 1))
        .unwrap_or(false)
}

/// Jacobi symbol `(a/n)` for odd positive `n`.
pub fn jacobi_symbol(a: &BigInt, n: &BigInt) -> Result<i8> {
    if !n.is_positive() || n.is_even() {
        return Err(Error::invalid(format!(
            "Jacobi symbol needs an odd positive modulus, got {n}"
        )));
    }
    let mut a = a.mod_floor(n);
    let mut n = n.clone();
    let mut sign = 1i8;
    while !a.is_zero() {
        let tz = a.trailing_zeros().unwrap_or(0);
        if tz % 2 == 1 {
            let r8 = (&n % 8u32).to_u32().unwrap();
            if r8 == 3 || r8 == 5 {
                sign = -sign;
            }
        }
        a >>= tz;
        if (&a % 4u32) == BigInt::from(3) && (&n % 4u32) == BigInt::from(3) {
            sign = -sign;
        }
        std::mem::swap(&mut a, &mut n);
        a = a.mod_floor(&n);
    }
    Ok(if n.is_one() { sign } else { 0 })
}

pub fn jacobi_i64(a: i64, n: i64) -> Result<i8> {
    jacobi_symbol(&BigInt::from(a), &BigInt::from(n))
}

/// Legendre symbol of a machine residue modulo an odd prime.
pub fn legendre_u64(a: u64, p: u64) -> i8 {
    let a = a % p;
    if a == 0 {
        return 0;
    }
    if pow_mod(a, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

/// Smallest quadratic non-residue modulo an odd prime.
pub fn least_nonresidue(p: u64) -> u64 {
    (2..p).find(|&u| legendre_u64(u, p) == -1).expect("odd prime has a non-residue")
}
