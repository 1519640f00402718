use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use shavis_core::bsd::{bsd_record, compare_records, RankInput};
use shavis_core::certify::{certify, CertifyRequest};
use shavis_core::congruence::congruence_verdict_with_bound;
use shavis_core::curve::{CurvePoint, WeierstrassModel};
use shavis_core::database::CurveDatabase;
use shavis_core::isogeny::{modular_poly_specialize, rational_isogeny_gate};
use shavis_core::local_torsion::{local_torsion, Method, DEFAULT_PRECISION};
use shavis_core::mordell_weil::{canonical_height, independence_certificate};
use shavis_core::tables::{reproduce_tables, CellStatus};
use shavis_core::tate::{global_minimal_model, tate_algorithm, LocalData};
use shavis_core::twist_search::{scan, TwistQuery};

const HEIGHT_TOL: f64 = 1e-9;

/// Exact elliptic-curve arithmetic and Sha[l] visibility certificates.
#[derive(Parser)]
#[command(name = "shavis", version)]
struct Cli {
    /// Extra curve records (JSONL) merged into the bundled database.
    #[arg(long, global = true, value_name = "FILE")]
    db: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Kodaira symbol, Tamagawa number, conductor exponent and v_p(minimal discriminant).
    Localdata {
        curve: String,
        #[arg(long, conflicts_with = "all_bad")]
        prime: Option<u64>,
        #[arg(long)]
        all_bad: bool,
    },
    /// Decides whether E(Q_l)[l] = 0.
    LocalTorsion {
        curve: String,
        #[arg(long, default_value_t = 3)]
        ell: u64,
        #[arg(long, default_value = "both")]
        method: String,
        #[arg(long, default_value_t = DEFAULT_PRECISION)]
        precision: u32,
    },
    /// Compares a_n mod l up to the Sturm bound.
    Congruence {
        curve_e: String,
        curve_f: String,
        #[arg(long, default_value_t = 3)]
        ell: u64,
        #[arg(long, default_value = "auto")]
        bound: String,
    },
    /// Decides whether the curve has a rational l-isogeny.
    IsogenyGate {
        curve: String,
        #[arg(long, default_value_t = 3)]
        ell: u64,
        #[arg(long)]
        emit_poly: bool,
    },
    Points {
        #[command(subcommand)]
        cmd: PointsCmd,
    },
    /// Certified lower bound on the rank from independent points.
    RankBound {
        curve: String,
        #[arg(long, value_name = "FILE")]
        points: PathBuf,
    },
    /// Field-by-field comparison of two BSD records.
    BsdCompare(BsdCompareArgs),
    /// Lists square-free D in a range satisfying congruence and residue conditions.
    ScanD(ScanArgs),
    /// Checks the visibility hypotheses for (E^D, F^D) and emits a certificate.
    Certify(CertifyArgs),
    /// Recomputes the twist tables of the 38025 pair and diffs them.
    ReproduceTables {
        #[arg(long)]
        json: bool,
    },
    /// Validates a JSONL curve file and lists its records.
    Ingest { file: PathBuf },
}

#[derive(Subcommand)]
enum PointsCmd {
    /// Checks that a point lies on the curve; reports its order and height.
    Verify {
        curve: String,
        #[arg(long, allow_hyphen_values = true)]
        point: String,
    },
}

#[derive(Args)]
struct BsdCompareArgs {
    curve_a: String,
    curve_b: String,
    #[arg(long, conflicts_with = "points_a")]
    rank_a: Option<usize>,
    #[arg(long, conflicts_with = "points_b")]
    rank_b: Option<usize>,
    #[arg(long, value_name = "FILE")]
    points_a: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    points_b: Option<PathBuf>,
}

#[derive(Args)]
struct ScanArgs {
    #[arg(long, allow_hyphen_values = true)]
    min: i64,
    #[arg(long, allow_hyphen_values = true)]
    max: i64,
    /// Require |D| prime.
    #[arg(long)]
    prime: bool,
    /// `m:r[,r...]`: D mod m is one of the residues. Repeatable.
    #[arg(long = "cong", value_name = "M:R")]
    cong: Vec<String>,
    /// `q:s`: the Legendre symbol (D/q) equals s. Repeatable.
    #[arg(long, value_name = "Q:S", allow_hyphen_values = true)]
    legendre: Vec<String>,
    #[arg(long, default_value_t = 0)]
    coprime: u64,
}

#[derive(Args)]
struct CertifyArgs {
    #[arg(long = "E", value_name = "LABEL|LITERAL")]
    e: String,
    #[arg(long = "F", value_name = "LABEL|LITERAL")]
    f: String,
    #[arg(long = "D", allow_hyphen_values = true)]
    d: i64,
    #[arg(long, default_value_t = 3)]
    ell: u64,
    /// Points on F^D, one `x y` pair per line.
    #[arg(long = "points-F", value_name = "FILE")]
    points_f: Option<PathBuf>,
    /// Model the points are given on, if not F.quadratic_twist(D).
    #[arg(long, value_name = "LABEL|LITERAL")]
    points_model: Option<String>,
    #[arg(long = "assume-rank-E")]
    assume_rank_e: Option<usize>,
    #[arg(long = "assume-rank-F")]
    assume_rank_f: Option<usize>,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

struct Ctx {
    db: CurveDatabase,
}

impl Ctx {
    fn curve(&self, name: &str) -> Result<WeierstrassModel> {
        Ok(self.db.resolve(name).with_context(|| format!("curve {name:?}"))?.model)
    }
}

fn read_points(path: &Path) -> Result<Vec<CurvePoint>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let p = CurvePoint::parse(t).with_context(|| format!("{}:{}", path.display(), i + 1))?;
        out.push(p);
    }
    Ok(out)
}

fn check_points(e: &WeierstrassModel, pts: &[CurvePoint], path: &Path) -> Result<()> {
    if let Some(p) = pts.iter().find(|p| !e.point_on_curve(p)) {
        bail!("{}: point {p} is not on {e}", path.display());
    }
    Ok(())
}

fn local_line(l: &LocalData) -> String {
    format!("{} {} {} {} {}", l.p, l.kodaira, l.tamagawa, l.conductor_exponent, l.v_min_disc)
}

fn parse_pair<T: std::str::FromStr>(s: &str, what: &str) -> Result<(u64, Vec<T>)> {
    let (a, b) = s.split_once(':').with_context(|| format!("{what} must look like a:b, got {s:?}"))?;
    let m = a.trim().parse().with_context(|| format!("bad {what} {s:?}"))?;
    let rs = b
        .split(',')
        .map(|r| r.trim().parse::<T>().ok())
        .collect::<Option<Vec<T>>>()
        .with_context(|| format!("bad {what} {s:?}"))?;
    Ok((m, rs))
}

fn run(cli: Cli) -> Result<ExitCode> {
    let mut db = CurveDatabase::bundled();
    if let Some(path) = &cli.db {
        db.merge(CurveDatabase::load(path)?)?;
    }
    let cx = Ctx { db };
    match cli.cmd {
        Cmd::Localdata { curve, prime, .. } => {
            let m = global_minimal_model(&cx.curve(&curve)?);
            match prime {
                Some(p) => {
                    if p < 2 || !shavis_core::arith::primes::is_prime_u64(p) {
                        bail!("{p} is not prime");
                    }
                    let l = m.local_at(p).cloned().unwrap_or_else(|| tate_algorithm(&m.model, p));
                    println!("{}", local_line(&l));
                }
                None => m.local.iter().for_each(|l| println!("{}", local_line(l))),
            }
        }
        Cmd::LocalTorsion { curve, ell, method, precision } => {
            let method: Method = method.parse()?;
            let r = local_torsion(&cx.curve(&curve)?, ell, method, precision)?;
            let verdict = match r.torsion_trivial {
                Some(true) => format!("E(Q_{ell})[{ell}] = 0"),
                Some(false) => format!("E(Q_{ell})[{ell}] != 0"),
                None => "undecided".to_string(),
            };
            println!("{verdict}");
            println!("method: {}", r.method);
            println!("precision: {}", r.precision);
            if let Some(t) = r.e0_torsion_trivial {
                println!("E0 torsion trivial: {t}");
            }
            println!("{}", r.details);
        }
        Cmd::Congruence { curve_e, curve_f, ell, bound } => {
            let bound = match bound.as_str() {
                "auto" => None,
                n => Some(n.parse::<u64>().with_context(|| format!("bad bound {n:?}"))?),
            };
            let (v, qe, qf) = congruence_verdict_with_bound(&cx.curve(&curve_e)?, &cx.curve(&curve_f)?, ell, bound)?;
            match v.first_failure {
                None => println!("congruent mod {ell} for all n <= {}", v.bound),
                Some(n) => println!("not congruent mod {ell}: a_{n} differs"),
            }
            println!("level: {}", v.level);
            println!("index: {}", v.index);
            println!("bound: {}", v.bound);
            let head = |q: &shavis_core::congruence::QExpansion| {
                (1..=q.len().min(20)).map(|n| q.a(n).to_string()).collect::<Vec<_>>().join(" ")
            };
            println!("E: {}", head(&qe));
            println!("F: {}", head(&qf));
        }
        Cmd::IsogenyGate { curve, ell, emit_poly } => {
            let e = cx.curve(&curve)?;
            let v = rational_isogeny_gate(&e, ell)?;
            if v.has_rational_isogeny {
                println!("rational {ell}-isogeny: yes");
            } else {
                println!("rational {ell}-isogeny: no");
            }
            println!("witness: {}", v.witness);
            if emit_poly {
                println!("{}", modular_poly_specialize(ell, &e.j_invariant())?);
            }
        }
        Cmd::Points { cmd: PointsCmd::Verify { curve, point } } => {
            let e = cx.curve(&curve)?;
            let p = CurvePoint::parse(&point)?;
            if !e.point_on_curve(&p) {
                println!("{p} is not on {e}");
                return Ok(ExitCode::from(2));
            }
            println!("on curve: {p}");
            match e.small_order(&p) {
                Some(n) => println!("order: {n}"),
                None => {
                    println!("order: infinite (n P != O for n <= 12)");
                    println!("canonical height: {:.12}", canonical_height(&e, &p, HEIGHT_TOL)?);
                }
            }
        }
        Cmd::RankBound { curve, points } => {
            let e = cx.curve(&curve)?;
            let pts = read_points(&points)?;
            check_points(&e, &pts, &points)?;
            let (k, h) = independence_certificate(&e, &pts, HEIGHT_TOL)?;
            println!("rank >= {k}");
            println!("{}", serde_json::to_string_pretty(&h)?);
        }
        Cmd::BsdCompare(a) => {
            let side = |curve: &str, rank: Option<usize>, pts: &Option<PathBuf>| -> Result<_> {
                let e = cx.curve(curve)?;
                let input = match (rank, pts) {
                    (_, Some(path)) => {
                        let p = read_points(path)?;
                        check_points(&e, &p, path)?;
                        Some(RankInput::Points(p))
                    }
                    (Some(r), None) => Some(RankInput::Assumed(r)),
                    (None, None) => None,
                };
                Ok(bsd_record(&e, input)?)
            };
            let ra = side(&a.curve_a, a.rank_a, &a.points_a)?;
            let rb = side(&a.curve_b, a.rank_b, &a.points_b)?;
            let cmp = compare_records(&ra, &rb);
            for f in &cmp.fields {
                println!("{:<12} | {} | {} | {}", f.field, f.a, f.b, if f.equal { "equal" } else { "differs" });
            }
            println!("{:<12} | {} | {} | {}", "j", cmp.j_a, cmp.j_b, if cmp.j_equal { "equal" } else { "differs" });
            println!("{}", serde_json::to_string_pretty(&json!({ "a": ra, "b": rb, "comparison": cmp }))?);
        }
        Cmd::ScanD(s) => {
            let mut q = TwistQuery::new(s.min, s.max);
            q.require_prime = s.prime;
            q.coprime = s.coprime;
            for c in &s.cong {
                q.congruences.push(parse_pair::<u64>(c, "congruence")?);
            }
            for l in &s.legendre {
                let (p, v) = parse_pair::<i8>(l, "Legendre condition")?;
                match v.as_slice() {
                    [v] => q.legendre.push((p, *v)),
                    _ => bail!("Legendre condition takes one value: {l:?}"),
                }
            }
            for d in scan(&q)? {
                println!("{d}");
            }
        }
        Cmd::Certify(a) => {
            let mut req = CertifyRequest::new(cx.db.resolve(&a.e)?, cx.db.resolve(&a.f)?, a.d, a.ell);
            if let Some(path) = &a.points_f {
                req.points_f = read_points(path)?;
            }
            req.points_model = a.points_model.as_deref().map(|m| cx.curve(m)).transpose()?;
            req.assume_rank_e = a.assume_rank_e;
            req.assume_rank_f = a.assume_rank_f;
            let cert = certify(&req)?;
            let text = cert.to_json();
            match &a.out {
                Some(path) => {
                    std::fs::write(path, &text).with_context(|| format!("cannot write {}", path.display()))?;
                    println!("{}", cert.statement);
                }
                None => print!("{text}"),
            }
            if !cert.established() {
                return Ok(ExitCode::from(2));
            }
        }
        Cmd::ReproduceTables { json } => {
            let r = reproduce_tables()?;
            if json {
                println!("{}", serde_json::to_string_pretty(&r)?);
            } else {
                for c in &r.cells {
                    let tag = match c.status {
                        CellStatus::Match => "ok",
                        CellStatus::Mismatch => "MISMATCH",
                        CellStatus::Reported => "report",
                    };
                    print!("table {} D={} {} {}: {} vs {} [{tag}]", c.table, c.d, c.curve, c.row, c.expected, c.computed);
                    match &c.note {
                        Some(n) => println!(" {n}"),
                        None => println!(),
                    }
                }
                println!("{} cells, {} mismatches", r.cells.len(), r.mismatches);
            }
            if !r.ok() {
                return Ok(ExitCode::from(2));
            }
        }
        Cmd::Ingest { file } => {
            let new = CurveDatabase::load(&file)?;
            for r in new.records() {
                let m = global_minimal_model(&r.model);
                let rank = r.rank.map_or("-".to_string(), |k| k.to_string());
                println!("{} {} N={} rank={} points={}", r.label, m.model, m.conductor(), rank, r.points.len());
            }
            let known = new.records().iter().filter(|r| cx.db.get(&r.label).is_some()).count();
            println!("{} records valid; {known} labels already known", new.len());
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
