//! Rational l-isogeny gate through the classical modular polynomial, and the
//! mod-l Galois-module congruence certificate.

use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;

use crate::arith::poly::IntPolynomial;
use crate::arith::primes::primes_up_to;
use crate::arith::rational::{as_string, format_rational, mod_u64, Rational};
use crate::congruence::{congruence_verdict, CongruenceVerdict};
use crate::curve::WeierstrassModel;
use crate::error::{Error, Result};

pub const DEFAULT_WITNESS_LIMIT: u64 = 100;

/// Upper-triangular coefficients `(i, j, c)` with `i >= j` of `Phi_3(X, Y)`; the
/// table is symmetric in `X` and `Y`.
const PHI3: &[(u32, u32, &str)] = &[
    (4, 0, "1"),
    (3, 3, "-1"),
    (3, 2, "2232"),
    (3, 1, "-1069956"),
    (3, 0, "36864000"),
    (2, 2, "2587918086"),
    (2, 1, "8900222976000"),
    (2, 0, "452984832000000"),
    (1, 1, "-770845966336000000"),
    (1, 0, "1855425871872000000000"),
];

/// `coeffs[i][j]` of `X^i Y^j`.
struct ModularPolynomial {
    ell: u64,
    coeffs: Vec<Vec<BigInt>>,
}

const REFERENCE_J: u64 = 257 * 257 * 257;
const REFERENCE_QUARTIC: [&str; 5] = [
    "425341531850824919624860339201",
    "-2681761290825031939915708292",
    "11662548773650842301768638",
    "-4890361932705138741197",
    "1",
];

fn phi3() -> &'static ModularPolynomial {
    static TABLE: OnceLock<ModularPolynomial> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut coeffs = vec![vec![BigInt::zero(); 5]; 5];
        for &(i, j, c) in PHI3 {
            let c: BigInt = c.parse().expect("table entry");
            coeffs[i as usize][j as usize] = c.clone();
            coeffs[j as usize][i as usize] = c;
        }
        let m = ModularPolynomial { ell: 3, coeffs };
        for i in 0..5 {
            for j in 0..5 {
                assert_eq!(m.coeffs[i][j], m.coeffs[j][i], "Phi_3 table is not symmetric");
            }
        }
        let check = m.specialize(&Rational::from_integer(BigInt::from(REFERENCE_J)));
        let expect = IntPolynomial::new(REFERENCE_QUARTIC.iter().map(|c| c.parse().unwrap()).collect());
        assert_eq!(check, expect, "Phi_3 table fails the j = 257^3 check");
        m
    })
}

impl ModularPolynomial {
    fn specialize(&self, j: &Rational) -> IntPolynomial {
        let n = self.coeffs.len();
        let (num, den) = (j.numer(), j.denom());
        // den^(l+1) * Phi(num/den, Y) = sum c_ij num^i den^(l+1-i) Y^j.
        let deg = n - 1;
        let out = (0..n)
            .map(|yj| {
                (0..n)
                    .map(|xi| &self.coeffs[xi][yj] * num.pow(xi as u32) * den.pow((deg - xi) as u32))
                    .sum::<BigInt>()
            })
            .collect();
        IntPolynomial::new(out)
    }
}

/// `den(j)^(l+1) * Phi_l(j, Y)`, an integer polynomial of degree `l + 1` that is
/// monic up to the factor `den(j)^(l+1)`.
pub fn modular_poly_specialize(ell: u64, j: &Rational) -> Result<IntPolynomial> {
    if ell != 3 {
        return Err(Error::TableUnavailable(ell));
    }
    let m = phi3();
    debug_assert_eq!(m.ell, ell);
    Ok(m.specialize(j))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GateWitness {
    /// No root of the specialization in `F_q`.
    NoRootModPrime { q: u64, reduction: String },
    /// No rational root, by the exact rational-root test.
    ExactExclusion,
    RationalRoot {
        #[serde(serialize_with = "as_string::rational")]
        root: Rational,
    },
}

impl fmt::Display for GateWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GateWitness::NoRootModPrime { q, reduction } => write!(f, "{reduction} has no root in F_{q}"),
            GateWitness::ExactExclusion => f.write_str("no rational root (exact test)"),
            GateWitness::RationalRoot { root } => write!(f, "rational root Y = {}", format_rational(root)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IsogenyGateVerdict {
    pub ell: u64,
    #[serde(serialize_with = "as_string::rational")]
    pub j: Rational,
    pub has_rational_isogeny: bool,
    pub witness: GateWitness,
}

/// Decides whether `E` has a rational `l`-isogeny.
pub fn rational_isogeny_gate(e: &WeierstrassModel, ell: u64) -> Result<IsogenyGateVerdict> {
    rational_isogeny_gate_with_limit(e, ell, DEFAULT_WITNESS_LIMIT)
}

/// As [`rational_isogeny_gate`], searching witness primes `q <= limit`.
pub fn rational_isogeny_gate_with_limit(e: &WeierstrassModel, ell: u64, limit: u64) -> Result<IsogenyGateVerdict> {
    let j = e.j_invariant();
    let poly = modular_poly_specialize(ell, &j)?;
    let lead = poly.leading().expect("nonzero specialization").clone();
    for q in primes_up_to(limit) {
        if mod_u64(&lead, q) == 0 {
            continue;
        }
        let red = poly.reduce_mod(q);
        if !red.has_root() {
            return Ok(IsogenyGateVerdict {
                ell,
                j,
                has_rational_isogeny: false,
                witness: GateWitness::NoRootModPrime {
                    q,
                    reduction: red.to_string(),
                },
            });
        }
    }
    let roots = poly.rational_roots()?;
    let witness = match roots.into_iter().next() {
        Some(root) => {
            debug_assert!(poly.eval_rational(&root).is_zero());
            GateWitness::RationalRoot { root }
        }
        None => GateWitness::ExactExclusion,
    };
    Ok(IsogenyGateVerdict {
        ell,
        j,
        has_rational_isogeny: matches!(witness, GateWitness::RationalRoot { .. }),
        witness,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CongruenceCertificate {
    pub ell: u64,
    pub e: String,
    pub f: String,
    pub congruence: CongruenceVerdict,
    pub gate: IsogenyGateVerdict,
    /// `E[l] = F[l]` as Galois modules.
    pub conclusion: bool,
}

pub fn certify_mod_l_congruence(e: &WeierstrassModel, f: &WeierstrassModel, ell: u64) -> Result<CongruenceCertificate> {
    let (congruence, gate) = rayon::join(|| congruence_verdict(e, f, ell), || rational_isogeny_gate(e, ell));
    let (congruence, gate) = (congruence?, gate?);
    let conclusion = congruence.congruent && !gate.has_rational_isogeny;
    Ok(CongruenceCertificate {
        ell,
        e: e.to_string(),
        f: f.to_string(),
        congruence,
        gate,
        conclusion,
    })
}

/// `Phi_l(j, Y)` evaluated at a rational `Y`, scaled as in [`modular_poly_specialize`].
pub fn is_root(ell: u64, j: &Rational, y: &Rational) -> Result<bool> {
    Ok(modular_poly_specialize(ell, j)?.eval_rational(y).is_zero())
}
