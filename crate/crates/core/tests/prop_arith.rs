mod common;

use common::strategies::config;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use proptest::prelude::*;
use rayon::prelude::*;
use shavis_core::arith::hensel::hensel_roots;
use shavis_core::arith::poly::IntPolynomial;
use shavis_core::arith::primes::{factor, jacobi_symbol};
use shavis_core::Error;

fn odd_modulus() -> impl Strategy<Value = i64> {
    (1i64..5000).prop_map(|k| 2 * k + 1)
}

proptest! {
    #![proptest_config(config(512))]

    #[test]
    fn jacobi_is_multiplicative(a in -100_000i64..100_000, b in -100_000i64..100_000, n in odd_modulus()) {
        let j = |x: i64| jacobi_symbol(&BigInt::from(x), &BigInt::from(n)).unwrap();
        prop_assert_eq!(j(a * b), j(a) * j(b));
    }

    #[test]
    fn jacobi_is_multiplicative_in_the_modulus(a in -10_000i64..10_000, m in odd_modulus(), n in odd_modulus()) {
        let j = |x: i64| jacobi_symbol(&BigInt::from(a), &BigInt::from(x)).unwrap();
        prop_assert_eq!(j(m * n), j(m) * j(n));
    }

    #[test]
    fn factor_round_trip_u64(n in 2u64..u64::MAX) {
        let f = factor(&BigInt::from(n)).unwrap();
        prop_assert_eq!(f.product(), BigInt::from(n));
        prop_assert!(f.fully_certified());
    }
}

#[test]
fn factor_round_trip_small() {
    (1i64..=1_000_000).into_par_iter().for_each(|n| {
        for m in [n, -n] {
            let f = factor(&BigInt::from(m)).unwrap();
            assert_eq!(f.product(), BigInt::from(n), "n = {m}");
        }
    });
}

fn residue_roots(f: &IntPolynomial, modulus: &BigInt) -> Vec<BigInt> {
    let mut out = Vec::new();
    let mut x = BigInt::zero();
    while &x < modulus {
        if f.eval(&x).mod_floor(modulus).is_zero() {
            out.push(x.clone());
        }
        x += 1;
    }
    out
}

fn val(n: &BigInt, p: u64, cap: u32) -> u32 {
    let (mut n, mut v) = (n.clone(), 0);
    let pb = BigInt::from(p);
    while v < cap && !n.is_zero() && n.is_multiple_of(&pb) {
        n /= &pb;
        v += 1;
    }
    if n.is_zero() { cap } else { v }
}

/// Integral Hensel roots reduced mod `p^k`, retrying at higher precision when the
/// roots do not separate.
fn integral_roots(f: &IntPolynomial, p: u64, k: u32) -> Vec<BigInt> {
    let modulus = BigInt::from(p).pow(k);
    let mut prec = 8;
    let roots = loop {
        match hensel_roots(f, p, prec) {
            Ok(r) => break r,
            Err(Error::Indeterminate(_)) if prec < 64 => prec *= 2,
            Err(e) => panic!("{e}"),
        }
    };
    roots
        .iter()
        .filter(|r| r.valuation().is_none_or(|v| v >= 0))
        .map(|r| r.to_residue().unwrap().mod_floor(&modulus))
        .collect()
}

proptest! {
    #![proptest_config(config(400))]

    /// Monic `f` of degree <= 4 with coefficients in [-20, 20], `p` in {3, 5},
    /// residues mod `p^4`.
    #[test]
    fn hensel_agrees_with_residue_search(
        coeffs in prop::collection::vec(-20i64..=20, 1..=4),
        p in prop::sample::select(vec![3u64, 5]),
    ) {
        let k = 4;
        let mut c = coeffs.clone();
        c.push(1);
        let f = IntPolynomial::from_i64(&c);
        let g = f.squarefree_part();
        let modulus = BigInt::from(p).pow(k);
        let found = integral_roots(&f, p, k);
        let residues = residue_roots(&f, &modulus);
        // Every Z_p root is a root mod p^k.
        for r in &found {
            prop_assert!(residues.contains(r), "root {} of {:?} not a residue root", r, c);
        }
        // Every residue root with v(g(r)) > 2 v(g'(r)) lies over a Z_p root,
        // congruent mod p^(v(g(r)) - v(g'(r))).
        let dg = g.derivative();
        for r in &residues {
            let vd = val(&dg.eval(r), p, k);
            let vg = val(&g.eval(r), p, 2 * k + 2);
            if vg > 2 * vd {
                let m = BigInt::from(p).pow((vg - vd).min(k));
                prop_assert!(
                    found.iter().any(|x| (x - r).mod_floor(&m).is_zero()),
                    "residue {} of {:?} has no Z_p root above it", r, c
                );
            }
        }
        // Distinct Z_p roots of a square-free polynomial.
        let mut sorted = found.clone();
        sorted.sort();
        sorted.dedup();
        prop_assert!(sorted.len() <= g.degree().unwrap_or(0));
    }
}
