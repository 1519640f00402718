//! Roots of integer polynomials in Q_p by recursive residue-class refinement.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

use super::padic::PadicApprox;
use super::poly::IntPolynomial;
use super::rational::{inv_mod_big, remove_factor, val};
use crate::error::{Error, Result};

/// A residue class `a + p^k Z_p` holding exactly one simple root of `h(z) =
/// g(a + p^k z) / p^c`, with `r` the root of `h` modulo `p`.
struct SimpleRoot {
    a: BigInt,
    k: u32,
    h: IntPolynomial,
    r: u64,
}

impl SimpleRoot {
    /// The root modulo `p^m`.
    fn lift(&self, p: u64, m: u32) -> BigInt {
        let pk = BigInt::from(p).pow(self.k);
        if self.k >= m {
            return self.a.mod_floor(&BigInt::from(p).pow(m));
        }
        let need = m - self.k;
        let hp = self.h.derivative();
        let mut z = BigInt::from(self.r);
        let mut prec = 1u32;
        while prec < need {
            prec = (2 * prec).min(need);
            let modulus = BigInt::from(p).pow(prec);
            let fz = self.h.eval(&z).mod_floor(&modulus);
            let dz = hp.eval(&z).mod_floor(&modulus);
            let inv = inv_mod_big(&dz, &modulus).expect("simple root has unit derivative");
            z = (z - fz * inv).mod_floor(&modulus);
        }
        (&self.a + pk * z).mod_floor(&BigInt::from(p).pow(m))
    }

    /// Whether the root's class `a + p^k (r + p Z_p)` contains zero.
    fn contains_zero(&self, p: u64) -> bool {
        let pk = BigInt::from(p).pow(self.k);
        ((&self.a + &pk * self.r) % (pk * p)).is_zero()
    }
}

/// Divides out the largest power of `p` dividing every coefficient.
fn strip_p(h: &IntPolynomial, p: u64) -> IntPolynomial {
    let c = h
        .coeffs()
        .iter()
        .filter_map(|x| val(x, p))
        .min()
        .unwrap_or(0);
    if c == 0 {
        return h.clone();
    }
    let d = BigInt::from(p).pow(c);
    IntPolynomial::new(h.coeffs().iter().map(|x| x / &d).collect())
}

/// Isolates the roots of `g` in `a + p^k Z_p`, where `h` is the normalized local
/// polynomial of that class. Fails when a cluster survives past depth `limit`.
fn isolate(
    h: &IntPolynomial,
    a: BigInt,
    k: u32,
    p: u64,
    limit: u32,
    out: &mut Vec<SimpleRoot>,
) -> Result<()> {
    let hbar = h.reduce_mod(p);
    if hbar.degree().unwrap_or(0) == 0 {
        return Ok(());
    }
    let dbar = hbar.derivative();
    let pk = BigInt::from(p).pow(k);
    for r in hbar.roots() {
        if dbar.eval(r) != 0 {
            out.push(SimpleRoot {
                a: a.clone(),
                k,
                h: h.clone(),
                r,
            });
            continue;
        }
        if k >= limit {
            return Err(Error::Indeterminate(limit));
        }
        let child = strip_p(&h.compose_linear(&BigInt::from(r), &BigInt::from(p)), p);
        isolate(&child, &a + &pk * r, k + 1, p, limit, out)?;
    }
    Ok(())
}

/// All roots of `f` in Q_p, each with at least `precision` significant digits
/// (absolute precision `precision` for the root zero).
///
/// Repeated factors are removed first, so every root is simple and clusters
/// separate at finite depth; a cluster that does not separate within
/// `precision` digits yields [`Error::Indeterminate`].
pub fn hensel_roots(f: &IntPolynomial, p: u64, precision: u32) -> Result<Vec<PadicApprox>> {
    if f.is_zero() {
        return Err(Error::invalid("hensel_roots of the zero polynomial"));
    }
    if precision < 2 {
        return Err(Error::invalid("p-adic precision must be at least 2"));
    }
    let g = f.squarefree_part();
    if g.degree() == Some(0) {
        return Ok(Vec::new());
    }

    let mut integral = Vec::new();
    isolate(&strip_p(&g, p), BigInt::zero(), 0, p, precision, &mut integral)?;
    let mut out = Vec::new();
    let g_has_zero = g.coeff(0).is_zero();
    for root in &integral {
        if g_has_zero && root.contains_zero(p) {
            out.push(PadicApprox::zero(p, precision as i64));
            continue;
        }
        out.push(lift_to_relative(root, p, precision));
    }

    // Roots of negative valuation are inverses of roots of the reversal in pZ_p.
    let rev = g.reversed();
    let local = strip_p(&rev.compose_linear(&BigInt::zero(), &BigInt::from(p)), p);
    let mut polar = Vec::new();
    isolate(&local, BigInt::zero(), 1, p, precision + 1, &mut polar)?;
    for root in &polar {
        let y = lift_to_relative(root, p, precision);
        out.push(y.inverse().expect("reversed roots are nonzero"));
    }
    Ok(out)
}

fn lift_to_relative(root: &SimpleRoot, p: u64, precision: u32) -> PadicApprox {
    let mut m = precision;
    loop {
        let x = root.lift(p, m);
        if !x.is_zero() {
            let (_, v) = remove_factor(&x, p);
            if m - v >= precision {
                return PadicApprox::from_int(&x, p, m as i64);
            }
            m = v + precision;
        } else {
            m *= 2;
        }
    }
}
