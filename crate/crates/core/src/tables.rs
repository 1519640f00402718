//! Regenerates the twist tables for the 38025 pair and diffs them against the
//! shipped expectations in `data/tables.json`.
//!
//! Discrete cells must match exactly. Real-period cells are only reported, since
//! the printed periods are truncated decimals.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bsd::{bsd_record, compare_records, BsdRecord, RankInput, RegulatorEntry};
use crate::database::CurveDatabase;
use crate::error::{Error, Result};
use crate::tate::global_minimal_model;
use crate::curve::WeierstrassModel;

const EXPECTED: &str = include_str!("../data/tables.json");

#[derive(Debug, Deserialize)]
struct Expected {
    table1: Table1,
    table2: Table2,
}

#[derive(Debug, Deserialize)]
struct Table1 {
    twists: Vec<i64>,
    models: BTreeMap<String, Vec<String>>,
    j_invariant: BTreeMap<String, String>,
    torsion: String,
    regulator: String,
    sqrt_d_period_prefix: String,
    tamagawa: BTreeMap<String, u32>,
    kodaira: BTreeMap<String, String>,
}

#[derive(Debug, Deserialize)]
struct Table2 {
    d: i64,
    models: BTreeMap<String, String>,
    j_invariant: BTreeMap<String, String>,
    torsion: String,
    regulator: String,
    period_prefix: String,
    tamagawa: BTreeMap<String, u32>,
    kodaira: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CellStatus {
    Match,
    Mismatch,
    /// Continuous cell: compared and reported, never fatal.
    Reported,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Cell {
    pub table: u8,
    #[serde(rename = "D")]
    pub d: i64,
    pub curve: String,
    pub row: String,
    pub expected: String,
    pub computed: String,
    pub status: CellStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Cell {
    pub fn matches(&self) -> bool {
        self.expected == self.computed
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeriodPrinting {
    #[serde(rename = "D")]
    pub d: i64,
    pub curve: String,
    pub omega: f64,
    pub sqrt_d_omega: f64,
    pub matches_table1: bool,
    pub matches_table2: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableReport {
    pub cells: Vec<Cell>,
    pub periods: Vec<PeriodPrinting>,
    pub mismatches: usize,
}

impl TableReport {
    pub fn ok(&self) -> bool {
        self.mismatches == 0
    }

    pub fn mismatched(&self) -> impl Iterator<Item = &Cell> {
        self.cells.iter().filter(|c| c.status == CellStatus::Mismatch)
    }
}

/// First `digits` decimals of `x`, truncated.
pub fn truncate(x: f64, digits: usize) -> String {
    let s = format!("{x:.*}", digits + 4);
    s[..s.len() - 4].to_string()
}

/// Evaluates a coefficient template `c`, `c*D` or `c*D^k`.
fn eval_template(t: &str, d: i64) -> Result<BigInt> {
    let bad = || Error::invalid(format!("bad coefficient template {t:?}"));
    let (c, power) = match t.split_once('*') {
        None => (t, 0),
        Some((c, rest)) => match rest {
            "D" => (c, 1),
            _ => (c, rest.strip_prefix("D^").and_then(|k| k.parse().ok()).ok_or_else(bad)?),
        },
    };
    let c: BigInt = c.trim().parse().map_err(|_| bad())?;
    Ok(c * BigInt::from(d).pow(power))
}

fn minimal_string(e: &WeierstrassModel) -> String {
    global_minimal_model(e).model.to_string()
}

fn prime_key(key: &str, d: i64) -> u64 {
    if key == "D" {
        d as u64
    } else {
        key.parse().expect("prime key")
    }
}

fn regulator_string(r: &RegulatorEntry) -> String {
    match r {
        RegulatorEntry::RankZero => "1".into(),
        RegulatorEntry::Value { value, .. } => value.to_string(),
        RegulatorEntry::NotComputed => "not computed".into(),
    }
}

struct Ctx<'a> {
    cells: &'a mut Vec<Cell>,
    table: u8,
    d: i64,
    curve: &'a str,
}

impl Ctx<'_> {
    fn push(&mut self, row: impl Into<String>, expected: impl Into<String>, computed: impl Into<String>) {
        let (expected, computed) = (expected.into(), computed.into());
        let status = if expected == computed { CellStatus::Match } else { CellStatus::Mismatch };
        self.cells.push(Cell {
            table: self.table,
            d: self.d,
            curve: self.curve.to_string(),
            row: row.into(),
            expected,
            computed,
            status,
            note: None,
        });
    }

    fn report(&mut self, row: &str, expected: String, computed: String, note: String) {
        self.cells.push(Cell {
            table: self.table,
            d: self.d,
            curve: self.curve.to_string(),
            row: row.into(),
            status: CellStatus::Reported,
            expected,
            computed,
            note: Some(note),
        });
    }

    fn local_rows(&mut self, rec: &BsdRecord, tam: &BTreeMap<String, u32>, kod: &BTreeMap<String, String>) {
        for (key, c) in tam {
            let p = prime_key(key, self.d);
            let got = rec.tamagawa.get(&p).map_or("good".into(), u32::to_string);
            self.push(format!("tamagawa c_{p}"), c.to_string(), got);
        }
        for (key, k) in kod {
            let p = prime_key(key, self.d);
            let got = rec.kodaira.get(&p).map_or("I0".into(), |k| k.to_string());
            self.push(format!("kodaira at {p}"), k.clone(), got);
        }
        let mut listed: Vec<u64> = tam.keys().map(|k| prime_key(k, self.d)).collect();
        listed.sort_unstable();
        let bad: Vec<u64> = rec.tamagawa.keys().copied().collect();
        self.push("bad primes", format!("{listed:?}"), format!("{bad:?}"));
    }
}

struct Twisted {
    d: i64,
    name: String,
    model: WeierstrassModel,
    record: BsdRecord,
}

fn twisted(db: &CurveDatabase, jobs: &[(i64, &str, &str)]) -> Result<Vec<Twisted>> {
    jobs.par_iter()
        .map(|&(d, name, label)| {
            let base = db.resolve(label)?;
            let model = base.model.quadratic_twist(&BigInt::from(d))?;
            let record = bsd_record(&model, Some(RankInput::Assumed(0)))?;
            Ok(Twisted {
                d,
                name: name.to_string(),
                model,
                record,
            })
        })
        .collect()
}

fn label_of(name: &str) -> &'static str {
    match name {
        "E1" => "38025.ck1",
        "E2" => "38025.ck2",
        _ => "38025.i1",
    }
}

/// Recomputes every cell; fails only if the fixtures are unreadable.
pub fn reproduce_tables() -> Result<TableReport> {
    let exp: Expected =
        serde_json::from_str(EXPECTED).map_err(|e| Error::invalid(format!("tables fixture: {e}")))?;
    let db = CurveDatabase::bundled();
    let mut jobs: Vec<(i64, &str, &str)> = Vec::new();
    for &d in &exp.table1.twists {
        for name in ["E1", "E2"] {
            jobs.push((d, name, label_of(name)));
        }
    }
    let twists = twisted(&db, &jobs)?;
    let mut cells = Vec::new();
    let mut periods = Vec::new();

    for t in &twists {
        let t1 = &exp.table1;
        let mut cx = Ctx {
            cells: &mut cells,
            table: 1,
            d: t.d,
            curve: &t.name,
        };
        let tmpl = &t1.models[&t.name];
        let a: Vec<BigInt> = tmpl.iter().map(|c| eval_template(c, t.d)).collect::<Result<_>>()?;
        let printed = WeierstrassModel::from_bigints(a.try_into().expect("five coefficients"))?;
        cx.push("model (minimal form)", minimal_string(&printed), minimal_string(&t.model));
        cx.push("j-invariant", t1.j_invariant[&t.name].clone(), t.record.j_invariant.clone());
        cx.push("torsion", t1.torsion.clone(), t.record.torsion.to_string());
        cx.push("regulator (rank 0)", t1.regulator.clone(), regulator_string(&t.record.regulator));
        cx.local_rows(&t.record, &t1.tamagawa, &t1.kodaira);
        let scaled = (t.d as f64).sqrt() * t.record.real_period;
        let digits = t1.sqrt_d_period_prefix.len() - 2;
        let got = truncate(scaled, digits);
        let ok = got == t1.sqrt_d_period_prefix;
        cx.report(
            "sqrt(D) * real period",
            t1.sqrt_d_period_prefix.clone(),
            got,
            format!("sqrt(D) * Omega = {scaled:.13}; {}", if ok { "agrees" } else { "differs" }),
        );
    }
    for &d in &exp.table1.twists {
        let pair: Vec<&Twisted> = twists.iter().filter(|t| t.d == d).collect();
        let cmp = compare_records(&pair[0].record, &pair[1].record);
        let mut cx = Ctx {
            cells: &mut cells,
            table: 1,
            d,
            curve: "E1 vs E2",
        };
        cx.push("minimal discriminants equal", "true", (pair[0].record.min_disc == pair[1].record.min_disc).to_string());
        cx.push("BSD invariants equal", "true", cmp.all_equal.to_string());
        cx.push("j-invariants differ", "true", (!cmp.j_equal).to_string());
    }

    let t2 = &exp.table2;
    for t in twists.iter().filter(|t| t.d == t2.d) {
        let mut cx = Ctx {
            cells: &mut cells,
            table: 2,
            d: t.d,
            curve: &t.name,
        };
        let printed: WeierstrassModel = t2.models[&t.name].parse()?;
        cx.push("model (minimal form)", minimal_string(&printed), minimal_string(&t.model));
        cx.push("j-invariant", t2.j_invariant[&t.name].clone(), t.record.j_invariant.clone());
        cx.push("torsion", t2.torsion.clone(), t.record.torsion.to_string());
        cx.push("regulator (rank 0)", t2.regulator.clone(), regulator_string(&t.record.regulator));
        cx.local_rows(&t.record, &t2.tamagawa, &t2.kodaira);
        let omega = t.record.real_period;
        let digits = t2.period_prefix.len() - 2;
        let got = truncate(omega, digits);
        let scaled = (t.d as f64).sqrt() * omega;
        let m1 = truncate(scaled, exp.table1.sqrt_d_period_prefix.len() - 2) == exp.table1.sqrt_d_period_prefix;
        let m2 = got == t2.period_prefix;
        cx.report(
            "real period",
            t2.period_prefix.clone(),
            got,
            format!(
                "Omega = {omega:.16}; matches the 0.209.../sqrt(D) printing: {m1}; matches the {}... printing: {m2}",
                t2.period_prefix
            ),
        );
        periods.push(PeriodPrinting {
            d: t.d,
            curve: t.name.clone(),
            omega,
            sqrt_d_omega: scaled,
            matches_table1: m1,
            matches_table2: m2,
        });
    }
    let mismatches = cells.iter().filter(|c| c.status == CellStatus::Mismatch).count();
    Ok(TableReport {
        cells,
        periods,
        mismatches,
    })
}
