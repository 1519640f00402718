//! Certification pipeline for `Sha(E^D/Q)[l] != 0` through visibility.
//!
//! Conditions on the pair `(E, F)`:
//!
//! 1. `E[l] = F[l]` as Galois modules.
//! 2. `E` has no rational `l`-isogeny.
//! 3. for the twists `(E^D, F^D)`: `gcd(l, prod c_p(E^D) c_p(F^D)) = 1`,
//!    `E^D(Q_l)[l] = 0` and `rank F^D - rank E^D >= 2`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;
use serde_json::{json, Value};

use crate::arith::primes::{is_prime_u64, is_squarefree};
use crate::arith::rational::format_rational;
use crate::curve::{CurvePoint, Point, WeierstrassModel};
use crate::database::CurveRecord;
use crate::error::{Error, Result};
use crate::isogeny::{certify_mod_l_congruence, rational_isogeny_gate, DEFAULT_WITNESS_LIMIT};
use crate::local_torsion::{local_torsion, Method, DEFAULT_PRECISION};
use crate::mordell_weil::independence_certificate;
use crate::tate::{global_minimal_model, isomorphism};

pub const HEIGHT_TOLERANCE: f64 = 1e-9;
pub const UNCONDITIONAL: &str = "unconditional relative to supplied point data";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum HypothesisId {
    ModLCongruence,
    NoLIsogeny,
    TamagawaGcd,
    LocalTorsionAtL,
    RankDifference,
}

impl HypothesisId {
    pub const ALL: [HypothesisId; 5] = [
        HypothesisId::ModLCongruence,
        HypothesisId::NoLIsogeny,
        HypothesisId::TamagawaGcd,
        HypothesisId::LocalTorsionAtL,
        HypothesisId::RankDifference,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            HypothesisId::ModLCongruence => "mod-l-congruence",
            HypothesisId::NoLIsogeny => "no-l-isogeny",
            HypothesisId::TamagawaGcd => "tamagawa-gcd",
            HypothesisId::LocalTorsionAtL => "local-torsion-at-l",
            HypothesisId::RankDifference => "rank-difference",
        }
    }

    /// Condition number in the list above.
    pub fn condition(self) -> u8 {
        match self {
            HypothesisId::ModLCongruence => 1,
            HypothesisId::NoLIsogeny => 2,
            _ => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Status {
    Verified,
    Assumed,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Hypothesis {
    pub id: HypothesisId,
    pub condition: u8,
    pub status: Status,
    pub evidence: Value,
    pub note: String,
}

impl Hypothesis {
    fn new(id: HypothesisId, status: Status, evidence: Value, note: impl Into<String>) -> Self {
        let note = note.into();
        debug_assert!(status != Status::Verified || !evidence.is_null());
        debug_assert!(status != Status::Assumed || !note.is_empty());
        Hypothesis {
            id,
            condition: id.condition(),
            status,
            evidence,
            note,
        }
    }

    fn failed(id: HypothesisId, err: &Error) -> Self {
        Hypothesis::new(id, Status::Failed, Value::Null, err.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Conclusion {
    #[serde(rename = "Sha-nontrivial")]
    ShaNontrivial,
    #[serde(rename = "Not-established")]
    NotEstablished,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveInput {
    pub label: String,
    pub model: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Inputs {
    #[serde(rename = "E")]
    pub e: CurveInput,
    #[serde(rename = "F")]
    pub f: CurveInput,
    #[serde(rename = "D")]
    pub d: String,
    pub ell: u64,
    pub points_f: Vec<String>,
    pub points_model: Option<String>,
    pub assume_rank_e: Option<usize>,
    pub assume_rank_f: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Toolchain {
    pub name: &'static str,
    pub version: &'static str,
    pub local_torsion_method: String,
    pub local_torsion_precision: u32,
    pub height_tolerance: f64,
    pub isogeny_witness_limit: u64,
}

impl Default for Toolchain {
    fn default() -> Self {
        Toolchain {
            name: "shavis",
            version: env!("CARGO_PKG_VERSION"),
            local_torsion_method: Method::Combined.to_string(),
            local_torsion_precision: DEFAULT_PRECISION,
            height_tolerance: HEIGHT_TOLERANCE,
            isogeny_witness_limit: DEFAULT_WITNESS_LIMIT,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificate {
    pub inputs: Inputs,
    pub hypotheses: Vec<Hypothesis>,
    pub conclusion: Conclusion,
    pub statement: String,
    pub assumption_count: usize,
    pub assumptions: Vec<String>,
    pub scope: Option<&'static str>,
    pub toolchain: Toolchain,
}

impl Certificate {
    pub fn hypothesis(&self, id: HypothesisId) -> &Hypothesis {
        self.hypotheses.iter().find(|h| h.id == id).expect("every id is present")
    }

    pub fn established(&self) -> bool {
        self.conclusion == Conclusion::ShaNontrivial
    }

    /// Pretty JSON with a trailing newline; keys follow declaration order.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("certificate serializes");
        s.push('\n');
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertifyRequest {
    pub e: CurveRecord,
    pub f: CurveRecord,
    pub d: BigInt,
    pub ell: u64,
    /// Points on `F^D`, given on `points_model` or else on `F.quadratic_twist(D)`.
    pub points_f: Vec<CurvePoint>,
    pub points_model: Option<WeierstrassModel>,
    pub assume_rank_e: Option<usize>,
    pub assume_rank_f: Option<usize>,
}

impl CertifyRequest {
    pub fn new(e: CurveRecord, f: CurveRecord, d: impl Into<BigInt>, ell: u64) -> Self {
        CertifyRequest {
            e,
            f,
            d: d.into(),
            ell,
            points_f: Vec::new(),
            points_model: None,
            assume_rank_e: None,
            assume_rank_f: None,
        }
    }
}

fn hyp_congruence(e: &WeierstrassModel, f: &WeierstrassModel, ell: u64) -> Hypothesis {
    let id = HypothesisId::ModLCongruence;
    match certify_mod_l_congruence(e, f, ell) {
        Ok(c) => {
            let evidence = serde_json::to_value(&c).expect("serializable");
            if c.conclusion {
                let note = format!(
                    "a_n agree mod {ell} for n <= {} at level {}; E[{ell}] irreducible",
                    c.congruence.bound, c.congruence.level
                );
                Hypothesis::new(id, Status::Verified, evidence, note)
            } else if !c.congruence.congruent {
                let n = c.congruence.first_failure.unwrap_or(0);
                Hypothesis::new(id, Status::Failed, evidence, format!("a_{n} differ mod {ell}"))
            } else {
                let note = format!("E[{ell}] is reducible, Sturm comparison does not identify the modules");
                Hypothesis::new(id, Status::Failed, evidence, note)
            }
        }
        Err(err) => Hypothesis::failed(id, &err),
    }
}

fn hyp_isogeny(e: &WeierstrassModel, ell: u64) -> Hypothesis {
    let id = HypothesisId::NoLIsogeny;
    match rational_isogeny_gate(e, ell) {
        Ok(v) => {
            let status = if v.has_rational_isogeny { Status::Failed } else { Status::Verified };
            let note = v.witness.to_string();
            Hypothesis::new(id, status, serde_json::to_value(&v).expect("serializable"), note)
        }
        Err(err) => Hypothesis::failed(id, &err),
    }
}

fn hyp_tamagawa(ed: &WeierstrassModel, fd: &WeierstrassModel, ell: u64) -> Hypothesis {
    let (me, mf) = rayon::join(|| global_minimal_model(ed), || global_minimal_model(fd));
    let (te, tf) = (me.tamagawa_map(), mf.tamagawa_map());
    let hits: Vec<String> = te
        .iter()
        .map(|(p, c)| ("E^D", p, c))
        .chain(tf.iter().map(|(p, c)| ("F^D", p, c)))
        .filter(|(_, _, &c)| c as u64 % ell == 0)
        .map(|(name, p, c)| format!("c_{p}({name}) = {c}"))
        .collect();
    let kod = |m: &crate::tate::MinimalModel| -> BTreeMap<String, String> {
        m.kodaira_map().into_iter().map(|(p, k)| (p.to_string(), k.to_string())).collect()
    };
    let evidence = json!({
        "E^D": {"tamagawa": te, "kodaira": kod(&me)},
        "F^D": {"tamagawa": tf, "kodaira": kod(&mf)},
    });
    if hits.is_empty() {
        let prod: u64 = te.values().chain(tf.values()).map(|&c| c as u64).product();
        let note = format!("product of Tamagawa numbers is {prod}, prime to {ell}");
        Hypothesis::new(HypothesisId::TamagawaGcd, Status::Verified, evidence, note)
    } else {
        let note = format!("{ell} divides {}", hits.join(", "));
        Hypothesis::new(HypothesisId::TamagawaGcd, Status::Failed, evidence, note)
    }
}

fn hyp_local_torsion(ed: &WeierstrassModel, ell: u64) -> Hypothesis {
    let id = HypothesisId::LocalTorsionAtL;
    match local_torsion(ed, ell, Method::Combined, DEFAULT_PRECISION) {
        Ok(r) => {
            let evidence = serde_json::to_value(&r).expect("serializable");
            match r.torsion_trivial {
                Some(true) => Hypothesis::new(id, Status::Verified, evidence, format!("E^D(Q_{ell})[{ell}] = 0")),
                Some(false) => Hypothesis::new(
                    id,
                    Status::Failed,
                    evidence,
                    format!("E^D(Q_{ell}) has a point of order {ell}"),
                ),
                None => Hypothesis::new(id, Status::Failed, evidence, "undecided"),
            }
        }
        Err(err) => Hypothesis::failed(id, &err),
    }
}

struct RankOutcome {
    hypothesis: Hypothesis,
    assumptions: Vec<String>,
}

fn hyp_rank(
    ed: &WeierstrassModel,
    fd: &WeierstrassModel,
    points: &[CurvePoint],
    assume_e: Option<usize>,
    assume_f: Option<usize>,
) -> RankOutcome {
    let id = HypothesisId::RankDifference;
    let fail = |note: String, evidence: Value| RankOutcome {
        hypothesis: Hypothesis::new(id, Status::Failed, evidence, note),
        assumptions: Vec::new(),
    };
    if global_minimal_model(ed).model == global_minimal_model(fd).model {
        return fail("E^D and F^D are isomorphic, rank difference is 0".into(), Value::Null);
    }
    let (verified, heights) = if points.is_empty() {
        (0, Value::Null)
    } else {
        match independence_certificate(fd, points, HEIGHT_TOLERANCE) {
            Ok((r, hd)) => (r, serde_json::to_value(&hd).expect("serializable")),
            Err(err) => return fail(format!("point data rejected: {err}"), Value::Null),
        }
    };
    let evidence = json!({
        "rank_F_lower_verified": verified,
        "rank_F_lower_asserted": assume_f,
        "rank_E_upper_asserted": assume_e,
        "height_data": heights,
    });
    let Some(re) = assume_e else {
        return fail("no rank(E^D) upper bound supplied".into(), evidence);
    };
    let upper_e = format!("rank(E^D) <= {re} (asserted)");
    let needed = re + 2;
    if verified >= needed {
        return RankOutcome {
            hypothesis: Hypothesis::new(
                id,
                Status::Verified,
                evidence,
                format!("rank(F^D) >= {verified} from independent points; {upper_e}"),
            ),
            assumptions: vec![upper_e],
        };
    }
    match assume_f {
        Some(rf) if rf >= needed => {
            let lower_f = format!("rank(F^D) >= {rf} (asserted)");
            let note = format!("{lower_f}, {verified} verified from points; {upper_e}");
            RankOutcome {
                hypothesis: Hypothesis::new(id, Status::Assumed, evidence, note),
                assumptions: vec![upper_e, lower_f],
            }
        }
        _ => {
            let best = verified.max(assume_f.unwrap_or(0));
            fail(format!("rank(F^D) >= {best} known, {needed} needed"), evidence)
        }
    }
}

/// Runs the five checks concurrently and assembles a deterministic certificate.
pub fn certify(req: &CertifyRequest) -> Result<Certificate> {
    let ell = req.ell;
    if ell == 2 || !is_prime_u64(ell) {
        return Err(Error::invalid(format!("l must be an odd prime, got {ell}")));
    }
    if req.d.is_zero() || !is_squarefree(&req.d) {
        return Err(Error::NotSquareFree(req.d.to_string()));
    }
    let (e, f) = (&req.e.model, &req.f.model);
    let ed = e.quadratic_twist(&req.d)?;
    let fd = f.quadratic_twist(&req.d)?;
    let points = transport_points(req, &fd)?;
    let ((h1, h2), ((h3, h4), rank)) = rayon::join(
        || rayon::join(|| hyp_congruence(e, f, ell), || hyp_isogeny(e, ell)),
        || {
            rayon::join(
                || rayon::join(|| hyp_tamagawa(&ed, &fd, ell), || hyp_local_torsion(&ed, ell)),
                || hyp_rank(&ed, &fd, &points, req.assume_rank_e, req.assume_rank_f),
            )
        },
    );
    let hypotheses = vec![h1, h2, h3, h4, rank.hypothesis];
    debug_assert!(hypotheses.iter().map(|h| h.id).eq(HypothesisId::ALL));
    let failed: Vec<&str> = hypotheses
        .iter()
        .filter(|h| h.status == Status::Failed)
        .map(|h| h.id.as_str())
        .collect();
    let conclusion = if failed.is_empty() {
        Conclusion::ShaNontrivial
    } else {
        Conclusion::NotEstablished
    };
    let assumptions = rank.assumptions;
    let statement = match conclusion {
        Conclusion::ShaNontrivial if assumptions.is_empty() => format!("Sha(E^D/Q)[{ell}] != 0"),
        Conclusion::ShaNontrivial => format!("Sha(E^D/Q)[{ell}] != 0, assuming {}", assumptions.join(" and ")),
        Conclusion::NotEstablished => format!("not established: failed {}", failed.join(", ")),
    };
    let all_verified = hypotheses.iter().all(|h| h.status == Status::Verified);
    Ok(Certificate {
        inputs: Inputs {
            e: CurveInput {
                label: req.e.label.clone(),
                model: e.to_string(),
            },
            f: CurveInput {
                label: req.f.label.clone(),
                model: f.to_string(),
            },
            d: req.d.to_string(),
            ell,
            points_f: req.points_f.iter().map(point_string).collect(),
            points_model: req.points_model.as_ref().map(|m| m.to_string()),
            assume_rank_e: req.assume_rank_e,
            assume_rank_f: req.assume_rank_f,
        },
        hypotheses,
        conclusion,
        statement,
        assumption_count: assumptions.len(),
        assumptions,
        scope: all_verified.then_some(UNCONDITIONAL),
        toolchain: Toolchain::default(),
    })
}

fn transport_points(req: &CertifyRequest, fd: &WeierstrassModel) -> Result<Vec<CurvePoint>> {
    let Some(src) = &req.points_model else {
        return Ok(req.points_f.clone());
    };
    let w = isomorphism(src, fd)
        .ok_or_else(|| Error::invalid(format!("point model {src} is not isomorphic to F^D = {fd}")))?;
    req.points_f
        .iter()
        .map(|p| match p {
            Point::Affine(x, y) if src.contains(x, y) => {
                let (x, y) = w.map_point(x, y);
                Ok(CurvePoint::affine(x, y))
            }
            Point::Affine(..) => Err(Error::NotOnCurve),
            Point::Infinity => Ok(Point::Infinity),
        })
        .collect()
}

fn point_string(p: &CurvePoint) -> String {
    match p {
        Point::Affine(x, y) => format!("{},{}", format_rational(x), format_rational(y)),
        Point::Infinity => "O".into(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frozen_hypothesis_schema() {
        let ids: Vec<String> = HypothesisId::ALL
            .iter()
            .map(|id| serde_json::to_value(id).unwrap().as_str().unwrap().to_string())
            .collect();
        assert_eq!(
            ids,
            ["mod-l-congruence", "no-l-isogeny", "tamagawa-gcd", "local-torsion-at-l", "rank-difference"]
        );
        for id in HypothesisId::ALL {
            assert_eq!(serde_json::to_value(id).unwrap(), id.as_str());
        }
        let conds: Vec<u8> = HypothesisId::ALL.iter().map(|h| h.condition()).collect();
        assert_eq!(conds, [1, 2, 3, 3, 3]);
    }

    #[test]
    fn rejects_bad_parameters() {
        let e = CurveRecord::literal("[0,0,1,0,0]".parse().unwrap());
        for (d, ell) in [(12, 3), (0, 3), (5, 2), (5, 9)] {
            assert!(certify(&CertifyRequest::new(e.clone(), e.clone(), d, ell)).is_err());
        }
    }
}
