//! Line-oriented JSON curve database.
//!
//! One record per line:
//!
//! ```text
//! {"label": "38025.ck1", "ainvs": "[1,-1,0,-13233492,18531699291]", "rank": 0, "points": ["x,y"]}
//! ```
//!
//! `ainvs` is either a bracketed string or an array of five integers or
//! rational strings. `rank` and `points` are optional. Blank lines and lines
//! starting with `#` are skipped.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;
use serde_json::Value;

use crate::arith::rational::{parse_rational, Rational};
use crate::curve::{CurvePoint, WeierstrassModel};
use crate::error::{Error, Result};

const BUNDLED: &str = include_str!("../data/curves.jsonl");

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveRecord {
    pub label: String,
    pub model: WeierstrassModel,
    pub rank: Option<usize>,
    pub points: Vec<CurvePoint>,
}

impl CurveRecord {
    pub fn literal(model: WeierstrassModel) -> Self {
        CurveRecord {
            label: model.to_string(),
            model,
            rank: None,
            points: Vec::new(),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRecord {
    label: String,
    ainvs: Value,
    #[serde(default)]
    rank: Option<usize>,
    #[serde(default)]
    points: Vec<String>,
}

fn coefficient(v: &Value) -> std::result::Result<Rational, String> {
    match v {
        Value::Number(n) => parse_rational(&n.to_string()).map_err(|e| e.to_string()),
        Value::String(s) => parse_rational(s).map_err(|e| e.to_string()),
        other => Err(format!("bad coefficient {other}")),
    }
}

fn parse_model(v: &Value) -> std::result::Result<WeierstrassModel, String> {
    let model = match v {
        Value::String(s) => s.parse::<WeierstrassModel>(),
        Value::Array(items) => {
            if items.len() != 5 {
                return Err(format!("expected 5 a-invariants, got {}", items.len()));
            }
            let a: Vec<Rational> = items.iter().map(coefficient).collect::<std::result::Result<_, _>>()?;
            WeierstrassModel::new(a.try_into().expect("length checked"))
        }
        other => return Err(format!("ainvs must be a string or an array, got {other}")),
    };
    model.map_err(|e| e.to_string())
}

fn parse_line(line: &str) -> std::result::Result<CurveRecord, String> {
    let raw: RawRecord = serde_json::from_str(line).map_err(|e| e.to_string())?;
    if raw.label.trim().is_empty() {
        return Err("empty label".into());
    }
    let model = parse_model(&raw.ainvs)?;
    let mut points = Vec::with_capacity(raw.points.len());
    for s in &raw.points {
        let p = CurvePoint::parse(s).map_err(|e| e.to_string())?;
        if !model.point_on_curve(&p) {
            return Err(format!("point {p} is not on the curve"));
        }
        points.push(p);
    }
    Ok(CurveRecord {
        label: raw.label,
        model,
        rank: raw.rank,
        points,
    })
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CurveDatabase {
    records: Vec<CurveRecord>,
    index: BTreeMap<String, usize>,
}

impl CurveDatabase {
    pub fn parse(text: &str) -> Result<Self> {
        let mut db = CurveDatabase::default();
        for (i, line) in text.lines().enumerate() {
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            let rec = parse_line(t).map_err(|message| Error::Parse { line: i + 1, message })?;
            db.insert(rec)?;
        }
        Ok(db)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::invalid(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// The shipped fixture database.
    pub fn bundled() -> Self {
        Self::parse(BUNDLED).expect("bundled database is valid")
    }

    pub fn insert(&mut self, rec: CurveRecord) -> Result<()> {
        if self.index.contains_key(&rec.label) {
            return Err(Error::DuplicateLabel(rec.label));
        }
        self.index.insert(rec.label.clone(), self.records.len());
        self.records.push(rec);
        Ok(())
    }

    /// Adds every record of `other`, rejecting duplicate labels.
    pub fn merge(&mut self, other: CurveDatabase) -> Result<()> {
        other.records.into_iter().try_for_each(|r| self.insert(r))
    }

    pub fn get(&self, label: &str) -> Option<&CurveRecord> {
        self.index.get(label).map(|&i| &self.records[i])
    }

    /// A label from the database or a bracketed literal `[a1,a2,a3,a4,a6]`.
    pub fn resolve(&self, name: &str) -> Result<CurveRecord> {
        let s = name.trim();
        if s.starts_with('[') {
            return Ok(CurveRecord::literal(s.parse()?));
        }
        self.get(s).cloned().ok_or_else(|| Error::UnknownLabel(s.to_string()))
    }

    pub fn records(&self) -> &[CurveRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}
