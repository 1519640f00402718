//! Tate's algorithm, local data at a prime and global minimal models.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::primes::{factor, legendre_u64};
use crate::arith::rational::{common_denominator, inv_mod_big, val, Rational};
use crate::curve::{IsoTransform, WeierstrassModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Kodaira {
    I0,
    In(u32),
    II,
    III,
    IV,
    I0Star,
    InStar(u32),
    IIStar,
    IIIStar,
    IVStar,
}

impl fmt::Display for Kodaira {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kodaira::I0 => f.write_str("I0"),
            Kodaira::In(n) => write!(f, "I{n}"),
            Kodaira::II => f.write_str("II"),
            Kodaira::III => f.write_str("III"),
            Kodaira::IV => f.write_str("IV"),
            Kodaira::I0Star => f.write_str("I0*"),
            Kodaira::InStar(n) => write!(f, "I{n}*"),
            Kodaira::IIStar => f.write_str("II*"),
            Kodaira::IIIStar => f.write_str("III*"),
            Kodaira::IVStar => f.write_str("IV*"),
        }
    }
}

impl Serialize for Kodaira {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReductionClass {
    Good,
    SplitMultiplicative,
    NonsplitMultiplicative,
    Additive,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalData {
    pub p: u64,
    pub kodaira: Kodaira,
    pub tamagawa: u32,
    pub conductor_exponent: u32,
    /// Integral, p-minimal model.
    pub minimal_model: WeierstrassModel,
    /// Transform from the input model to `minimal_model`.
    pub transform: IsoTransform,
    pub v_min_disc: u32,
    pub reduction_class: ReductionClass,
}

type Ainvs = [BigInt; 5];

fn b_invs(a: &Ainvs) -> (BigInt, BigInt, BigInt, BigInt) {
    let [a1, a2, a3, a4, a6] = a;
    let b2 = a1 * a1 + a2 * 4;
    let b4 = a1 * a3 + a4 * 2;
    let b6 = a3 * a3 + a6 * 4;
    let b8 = a1 * a1 * a6 + a2 * a6 * 4 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4;
    (b2, b4, b6, b8)
}

fn disc(a: &Ainvs) -> BigInt {
    let (b2, b4, b6, b8) = b_invs(a);
    -&b2 * &b2 * &b8 - &b4 * &b4 * &b4 * 8 - &b6 * &b6 * 27 + &b2 * &b4 * &b6 * 9
}

fn c4c6(a: &Ainvs) -> (BigInt, BigInt) {
    let (b2, b4, b6, _) = b_invs(a);
    let c4 = &b2 * &b2 - &b4 * 24;
    let c6 = -&b2 * &b2 * &b2 + &b2 * &b4 * 36 - &b6 * 216;
    (c4, c6)
}

/// Integer change of coordinates with `u = 1`.
fn rst(a: &Ainvs, r: &BigInt, s: &BigInt, t: &BigInt) -> Ainvs {
    let [a1, a2, a3, a4, a6] = a;
    [
        a1 + s * 2,
        a2 - s * a1 + r * 3 - s * s,
        a3 + r * a1 + t * 2,
        a4 - s * a3 + r * a2 * 2 - (t + r * s) * a1 + r * r * 3 - s * t * 2,
        a6 + r * a4 + r * r * a2 + r * r * r - t * a3 - t * t - r * t * a1,
    ]
}

fn to_rat(a: &Ainvs) -> [Rational; 5] {
    a.clone().map(Rational::from_integer)
}

fn vinf(n: &BigInt, p: u64) -> u32 {
    val(n, p).unwrap_or(u32::MAX)
}

struct Prime {
    p: u64,
    pb: BigInt,
}

impl Prime {
    fn div(&self, x: &BigInt) -> bool {
        x.is_multiple_of(&self.pb)
    }

    fn md(&self, x: &BigInt) -> BigInt {
        x.mod_floor(&self.pb)
    }

    fn inv(&self, x: &BigInt) -> BigInt {
        inv_mod_big(x, &self.pb).expect("unit modulo p")
    }

    fn half(&self) -> BigInt {
        self.inv(&BigInt::from(2))
    }

    fn pow(&self, e: u32) -> BigInt {
        self.pb.pow(e)
    }

    /// Whether `a X^2 + b X + c` has a root modulo `p`.
    fn quadroots(&self, a: &BigInt, b: &BigInt, c: &BigInt) -> bool {
        let (a, b, c) = (self.md(a), self.md(b), self.md(c));
        if self.p == 2 {
            return c.is_zero() || (&a + &b + &c).is_even();
        }
        if a.is_zero() {
            return !b.is_zero() || c.is_zero();
        }
        let d = self.md(&(&b * &b - &a * &c * 4)).to_u64().unwrap();
        legendre_u64(d, self.p) >= 0
    }

    /// Number of distinct roots of `X^3 + bX^2 + cX + d` modulo `p`.
    fn cubic_roots(&self, b: &BigInt, c: &BigInt, d: &BigInt) -> u32 {
        let p = self.p;
        let (b, c, d) = (
            self.md(b).to_u64().unwrap(),
            self.md(c).to_u64().unwrap(),
            self.md(d).to_u64().unwrap(),
        );
        let (b, c, d) = (b as u128, c as u128, d as u128);
        let pp = p as u128;
        (0..pp)
            .filter(|&x| (((x + b) % pp * x + c) % pp * x + d) % pp == 0)
            .count() as u32
    }
}

/// Smallest `k > 0` with `k^i a_i` integral, and the scaled integral model.
fn integralize(e: &WeierstrassModel) -> (Ainvs, IsoTransform) {
    let k = common_denominator(e.ainvs().iter());
    let w = IsoTransform::scaling(Rational::new(BigInt::one(), k));
    let m = e.transform(&w);
    (m.int_ainvs(), w)
}

/// Local data of `e` at the prime `p`.
pub fn tate_algorithm(e: &WeierstrassModel, p: u64) -> LocalData {
    let (mut a, mut w) = integralize(e);
    let pr = Prime {
        p,
        pb: BigInt::from(p),
    };
    let zero = BigInt::zero();
    let apply = |a: &mut Ainvs, w: &mut IsoTransform, r: &BigInt, s: &BigInt, t: &BigInt| {
        *a = rst(a, r, s, t);
        *w = w.compose(&IsoTransform::translation(
            Rational::from_integer(r.clone()),
            Rational::from_integer(s.clone()),
            Rational::from_integer(t.clone()),
        ));
    };

    loop {
        let delta = disc(&a);
        let vd = vinf(&delta, p);
        let finish = |a: &Ainvs, w: IsoTransform, kod, cp, fp, class| LocalData {
            p,
            kodaira: kod,
            tamagawa: cp,
            conductor_exponent: fp,
            minimal_model: WeierstrassModel::new(to_rat(a)).expect("nonsingular"),
            transform: w,
            v_min_disc: vd,
            reduction_class: class,
        };
        if vd == 0 {
            return finish(&a, w, Kodaira::I0, 1, 0, ReductionClass::Good);
        }

        // Move the singular point to (0, 0).
        let (b2, b4, b6, _) = b_invs(&a);
        let [a1, a2, a3, a4, a6] = a.clone();
        let (r, t) = match p {
            2 => {
                if pr.div(&b2) {
                    let r = pr.md(&a4);
                    let t = pr.md(&(&r * (BigInt::one() + &a2 + &a4) + &a6));
                    (r, t)
                } else {
                    let r = pr.md(&a3);
                    let t = pr.md(&(&r + &a4));
                    (r, t)
                }
            }
            3 => {
                let r = if pr.div(&b2) {
                    pr.md(&-&b6)
                } else {
                    pr.md(&(-&b2 * &b4))
                };
                let t = pr.md(&(&a1 * &r + &a3));
                (r, t)
            }
            _ => {
                let (c4, c6) = c4c6(&a);
                let r = if pr.div(&c4) {
                    pr.md(&(-&b2 * pr.inv(&BigInt::from(12))))
                } else {
                    pr.md(&(-(&c6 + &b2 * &c4) * pr.inv(&(&c4 * 12))))
                };
                let t = pr.md(&(-(&a1 * &r + &a3) * pr.half()));
                (r, t)
            }
        };
        apply(&mut a, &mut w, &r, &zero, &t);
        let [a1, a2, a3, _, a6] = a.clone();
        let (b2, _, b6, b8) = b_invs(&a);

        if !pr.div(&b2) {
            let n = vd;
            if pr.quadroots(&BigInt::one(), &a1, &-&a2) {
                return finish(&a, w, Kodaira::In(n), n, 1, ReductionClass::SplitMultiplicative);
            }
            let cp = if n % 2 == 0 { 2 } else { 1 };
            return finish(&a, w, Kodaira::In(n), cp, 1, ReductionClass::NonsplitMultiplicative);
        }

        if vinf(&a6, p) < 2 {
            return finish(&a, w, Kodaira::II, 1, vd, ReductionClass::Additive);
        }
        if vinf(&b8, p) < 3 {
            return finish(&a, w, Kodaira::III, 2, vd - 1, ReductionClass::Additive);
        }
        if vinf(&b6, p) < 3 {
            let a3t = &a3 / pr.pow(1);
            let a6t = &a6 / pr.pow(2);
            let cp = if pr.quadroots(&BigInt::one(), &a3t, &-a6t) { 3 } else { 1 };
            return finish(&a, w, Kodaira::IV, cp, vd - 2, ReductionClass::Additive);
        }

        // Now p | a1, a2; p^2 | a3, a4; p^3 | a6 after this shift.
        let (s, t) = if p == 2 {
            (pr.md(&a2), &pr.pb * pr.md(&(&a6 / pr.pow(2))))
        } else {
            (-&a1 * pr.half(), -&a3 * pr.half())
        };
        apply(&mut a, &mut w, &zero, &s, &t);
        let [_, a2, _, a4, a6] = a.clone();

        let b = pr.md(&(&a2 / pr.pow(1)));
        let c = pr.md(&(&a4 / pr.pow(2)));
        let d = pr.md(&(&a6 / pr.pow(3)));
        let wq: BigInt = &d * &d * 27 - &b * &b * &c * &c + &b * &b * &b * &d * 4
            - &b * &c * &d * 18
            + &c * &c * &c * 4;
        let xq: BigInt = &c * 3 - &b * &b;

        if !pr.div(&wq) {
            let cp = 1 + pr.cubic_roots(&b, &c, &d);
            return finish(&a, w, Kodaira::I0Star, cp, vd - 4, ReductionClass::Additive);
        }

        if !pr.div(&xq) {
            // Double root: move it to 0, then peel off I_n* layers.
            let r0 = match p {
                2 => c.clone(),
                3 => &b * &c,
                _ => (&b * &c - &d * 9) * pr.inv(&(&xq * 2)),
            };
            let r = &pr.pb * pr.md(&r0);
            apply(&mut a, &mut w, &r, &zero, &zero);
            let mut ix = 3u32;
            let mut iy = 3u32;
            let mut mx = pr.pow(2);
            let mut my = pr.pow(2);
            let cp;
            loop {
                let [_, _, a3, _, a6] = a.clone();
                let a3t = &a3 / &my;
                let a6t = &a6 / (&mx * &my);
                if pr.div(&(&a3t * &a3t + &a6t * 4)) {
                    let t = if p == 2 {
                        &my * pr.md(&a6t)
                    } else {
                        &my * pr.md(&(-&a3t * pr.half()))
                    };
                    apply(&mut a, &mut w, &zero, &zero, &t);
                    my *= &pr.pb;
                    iy += 1;
                    let [_, a2, _, a4, a6] = a.clone();
                    let a2t = &a2 / &pr.pb;
                    let a4t = &a4 / (&pr.pb * &mx);
                    let a6t = &a6 / (&mx * &my);
                    if pr.div(&(&a4t * &a4t - &a6t * &a2t * 4)) {
                        let r = if p == 2 {
                            &mx * pr.md(&(&a6t * &a2t))
                        } else {
                            &mx * pr.md(&(-&a4t * pr.inv(&(&a2t * 2))))
                        };
                        apply(&mut a, &mut w, &r, &zero, &zero);
                        mx *= &pr.pb;
                        ix += 1;
                    } else {
                        cp = if pr.quadroots(&a2t, &a4t, &a6t) { 4 } else { 2 };
                        break;
                    }
                } else {
                    cp = if pr.quadroots(&BigInt::one(), &a3t, &-&a6t) { 4 } else { 2 };
                    break;
                }
            }
            let m = ix + iy - 5;
            return finish(&a, w, Kodaira::InStar(m), cp, vd - m - 4, ReductionClass::Additive);
        }

        // Triple root: move it to 0.
        let r0 = match p {
            2 => b.clone(),
            3 => -d.clone(),
            _ => -&b * pr.inv(&BigInt::from(3)),
        };
        let r = &pr.pb * pr.md(&r0);
        apply(&mut a, &mut w, &r, &zero, &zero);
        let [_, _, a3, _, a6] = a.clone();
        let a3t = &a3 / pr.pow(2);
        let a6t = &a6 / pr.pow(4);
        if !pr.div(&(&a3t * &a3t + &a6t * 4)) {
            let cp = if pr.quadroots(&BigInt::one(), &a3t, &-&a6t) { 3 } else { 1 };
            return finish(&a, w, Kodaira::IVStar, cp, vd - 6, ReductionClass::Additive);
        }
        let t = if p == 2 {
            -pr.pow(2) * pr.md(&a6t)
        } else {
            pr.pow(2) * pr.md(&(-&a3t * pr.half()))
        };
        apply(&mut a, &mut w, &zero, &zero, &t);
        let [_, _, _, a4, a6] = a.clone();
        if vinf(&a4, p) < 4 {
            return finish(&a, w, Kodaira::IIIStar, 2, vd - 7, ReductionClass::Additive);
        }
        if vinf(&a6, p) < 6 {
            return finish(&a, w, Kodaira::IIStar, 1, vd - 8, ReductionClass::Additive);
        }

        // Not minimal: scale by p and start over.
        for (i, e) in [1u32, 2, 3, 4, 6].iter().enumerate() {
            a[i] = &a[i] / pr.pow(*e);
        }
        w = w.compose(&IsoTransform::scaling(Rational::from_integer(pr.pb.clone())));
    }
}

/// Whether the Kodaira symbol rules out `3 | c_p` (not IV, IV*, or I_{3n}).
/// Panics if the computed Tamagawa number contradicts the classification.
pub fn tamagawa_3_free(l: &LocalData) -> bool {
    let free = !matches!(l.kodaira, Kodaira::IV | Kodaira::IVStar)
        && !matches!(l.kodaira, Kodaira::In(n) if n % 3 == 0);
    if free {
        assert!(
            l.tamagawa % 3 != 0,
            "Kodaira {} at p = {} with c_p = {}",
            l.kodaira,
            l.p,
            l.tamagawa
        );
    }
    free
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinimalModel {
    pub model: WeierstrassModel,
    pub transform: IsoTransform,
    pub discriminant: BigInt,
    /// Local data at every prime of bad reduction, ascending.
    pub local: Vec<LocalData>,
}

impl MinimalModel {
    pub fn conductor(&self) -> BigInt {
        self.local
            .iter()
            .fold(BigInt::one(), |n, l| n * BigInt::from(l.p).pow(l.conductor_exponent))
    }

    pub fn local_at(&self, p: u64) -> Option<&LocalData> {
        self.local.iter().find(|l| l.p == p)
    }

    pub fn bad_primes(&self) -> Vec<u64> {
        self.local.iter().map(|l| l.p).collect()
    }

    pub fn tamagawa_map(&self) -> BTreeMap<u64, u32> {
        self.local.iter().map(|l| (l.p, l.tamagawa)).collect()
    }

    pub fn kodaira_map(&self) -> BTreeMap<u64, Kodaira> {
        self.local.iter().map(|l| (l.p, l.kodaira)).collect()
    }
}

/// Primes dividing the numerator of the discriminant of an integral model of `e`.
fn candidate_primes(e: &WeierstrassModel) -> Vec<u64> {
    let (a, _) = integralize(e);
    factor(&disc(&a))
        .expect("nonzero discriminant")
        .primes_u64()
}

/// Globally minimal integral model with `a1, a3` in {0, 1} and `a2` in {-1, 0, 1}.
pub fn global_minimal_model(e: &WeierstrassModel) -> MinimalModel {
    let (mut a, mut w) = integralize(e);
    let primes = candidate_primes(e);
    for &p in &primes {
        let cur = WeierstrassModel::new(to_rat(&a)).expect("nonsingular");
        let l = tate_algorithm(&cur, p);
        a = l.minimal_model.int_ainvs();
        w = w.compose(&l.transform);
    }
    // Normalize with s, then r, then t.
    let two = BigInt::from(2);
    let three = BigInt::from(3);
    let s = (a[0].mod_floor(&two) - &a[0]) / &two;
    a = rst(&a, &BigInt::zero(), &s, &BigInt::zero());
    let mut a2c = a[1].mod_floor(&three);
    if a2c == two {
        a2c = BigInt::from(-1);
    }
    let r = (a2c - &a[1]) / &three;
    a = rst(&a, &r, &BigInt::zero(), &BigInt::zero());
    let t = (a[2].mod_floor(&two) - &a[2]) / &two;
    a = rst(&a, &BigInt::zero(), &BigInt::zero(), &t);
    w = w
        .compose(&IsoTransform::translation(Rational::zero(), Rational::from_integer(s), Rational::zero()))
        .compose(&IsoTransform::translation(Rational::from_integer(r), Rational::zero(), Rational::zero()))
        .compose(&IsoTransform::translation(Rational::zero(), Rational::zero(), Rational::from_integer(t)));
    let model = WeierstrassModel::new(to_rat(&a)).expect("nonsingular");
    debug_assert_eq!(e.transform(&w), model);
    let discriminant = disc(&a);
    let bad: Vec<u64> = primes
        .into_iter()
        .filter(|&p| val(&discriminant, p).unwrap_or(0) > 0)
        .collect();
    let local: Vec<LocalData> = bad.par_iter().map(|&p| tate_algorithm(&model, p)).collect();
    for l in &local {
        debug_assert_eq!(Some(l.v_min_disc), val(&discriminant, l.p));
    }
    MinimalModel {
        model,
        transform: w,
        discriminant,
        local,
    }
}

/// An isomorphism `a -> b` over `Q`, if the two models define isomorphic curves.
pub fn isomorphism(a: &WeierstrassModel, b: &WeierstrassModel) -> Option<IsoTransform> {
    let (ma, mb) = rayon::join(|| global_minimal_model(a), || global_minimal_model(b));
    (ma.model == mb.model).then(|| ma.transform.compose(&mb.transform.inverse()))
}

/// Local data at every bad prime of `e`, in ascending prime order.
pub fn local_data_all(e: &WeierstrassModel) -> Vec<LocalData> {
    global_minimal_model(e).local
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::int;

    fn e1() -> WeierstrassModel {
        WeierstrassModel::from_ints([1, -1, 0, -13233492, 18531699291]).unwrap()
    }

    fn f() -> WeierstrassModel {
        WeierstrassModel::from_ints([0, 0, 1, -955695, -359690094]).unwrap()
    }

    fn kod(e: &WeierstrassModel, ps: &[u64]) -> Vec<String> {
        ps.iter().map(|&p| tate_algorithm(e, p).kodaira.to_string()).collect()
    }

    #[test]
    fn named_curves() {
        assert_eq!(kod(&e1(), &[3, 5, 13]), ["I0*", "III*", "III*"]);
        assert_eq!(kod(&f(), &[3, 5, 13]), ["I3*", "III", "III*"]);
        let m = global_minimal_model(&e1());
        assert_eq!(m.model, e1());
        assert_eq!(m.conductor(), int(38025));
        assert_eq!(global_minimal_model(&f()).conductor(), int(38025));
    }

    #[test]
    fn rescaled_model_minimizes_back() {
        let w = IsoTransform::scaling(Rational::new(int(1), int(2)));
        let big = e1().transform(&w);
        assert_eq!(global_minimal_model(&big).model, e1());
        let w = IsoTransform::new(Rational::new(int(3), int(1)), Rational::new(int(1), int(4)), Rational::from_integer(int(2)), Rational::new(int(-5), int(8)));
        assert_eq!(global_minimal_model(&e1().transform(&w)).model, e1());
    }

    #[test]
    fn classic_small_curves() {
        // 11a1: split I5 at 11
        let e = WeierstrassModel::from_ints([0, -1, 1, -10, -20]).unwrap();
        let l = tate_algorithm(&e, 11);
        assert_eq!((l.kodaira, l.tamagawa, l.conductor_exponent), (Kodaira::In(5), 5, 1));
        assert_eq!(l.reduction_class, ReductionClass::SplitMultiplicative);
        // 14a1 = [1,0,1,4,-6]: I6 nonsplit at 2, I3 split at 7
        let e = WeierstrassModel::from_ints([1, 0, 1, 4, -6]).unwrap();
        let m = global_minimal_model(&e);
        assert_eq!(m.conductor(), int(14));
        assert_eq!(m.local_at(2).unwrap().kodaira, Kodaira::In(6));
        assert_eq!(m.local_at(2).unwrap().tamagawa, 2);
        assert_eq!(m.local_at(7).unwrap().tamagawa, 3);
        // 27a1 = [0,0,1,0,-7]: IV* at 3, c = 1
        let e = WeierstrassModel::from_ints([0, 0, 1, 0, -7]).unwrap();
        let l = tate_algorithm(&e, 3);
        assert_eq!((l.kodaira, l.conductor_exponent), (Kodaira::IVStar, 3));
        // y^2 = x^3 - x: III at 2, f = 5
        let e = WeierstrassModel::from_ints([0, 0, 0, -1, 0]).unwrap();
        let l = tate_algorithm(&e, 2);
        assert_eq!((l.kodaira, l.conductor_exponent, l.tamagawa), (Kodaira::III, 5, 2));
        // y^2 = x^3 + x has conductor 64, y^2 = x^3 + 1 conductor 36
        let e = WeierstrassModel::from_ints([0, 0, 0, 1, 0]).unwrap();
        assert_eq!(global_minimal_model(&e).conductor(), int(64));
        let e = WeierstrassModel::from_ints([0, 0, 0, 0, 1]).unwrap();
        assert_eq!(global_minimal_model(&e).conductor(), int(36));
    }

    #[test]
    fn tamagawa_3_divisibility() {
        let mk = |k| LocalData {
            kodaira: k,
            tamagawa: match k {
                Kodaira::In(n) => n,
                Kodaira::IVStar | Kodaira::IV => 3,
                _ => 2,
            },
            ..tate_algorithm(&e1(), 3)
        };
        assert!(tamagawa_3_free(&mk(Kodaira::I0Star)));
        assert!(!tamagawa_3_free(&mk(Kodaira::IVStar)));
        assert!(!tamagawa_3_free(&mk(Kodaira::In(6))));
        assert!(tamagawa_3_free(&mk(Kodaira::In(4))));
    }
}
