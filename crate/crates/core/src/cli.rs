//! Command-line front end. `run` does all the work so tests can drive it
//! without spawning a process.

use std::io::Write;

use clap::{Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde_json::json;

use crate::branch::{
    classify, enumerate_candidates, filter_labelled, parse_candidate_list, verify_candidate, BranchError,
    ClassificationTable, ConstraintSet, FibrationData,
};
use crate::branch::classify::default_variant;
use crate::certificate::Certificate;
use crate::engine::rules::rejection;
use crate::engine::{replay_collect, Admissible, EngineError};
use crate::lattice::{det_poly, gram_matrix, rational_roots};
use crate::scenario::{builtin, load_fixtures, resolve_scenario, Scenario};
use crate::surface::mj_invariants;

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "invlat", version, about = "Lattice checks and branch-curve classification for surface involutions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Replay a scenario's checks and print the certificates.
    Verify {
        /// Path to a scenario file or a built-in name.
        scenario: String,
        #[arg(long)]
        out: Option<String>,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// Factor a Gram determinant and list its admissible roots.
    SolveGram {
        scenario: String,
        /// Comma-separated classes, ranges like N0..N8 allowed.
        #[arg(long)]
        classes: String,
        /// Comma-separated filters: integer, even, nonneg, min:N, exclude:p/q.
        #[arg(long, default_value = "integer")]
        admissible: String,
    },
    /// List every candidate branch curve allowed by the invariant sums.
    Enumerate {
        #[arg(long)]
        k: i64,
        /// Scenario supplying the invariants; defaults by k.
        #[arg(long)]
        scenario: Option<String>,
        #[arg(long, default_value_t = 0)]
        min_d: i64,
        #[arg(long)]
        max_components: Option<usize>,
        /// Also impose the fibration degree relation of the scenario.
        #[arg(long)]
        fibration: bool,
    },
    /// Run a classification.
    Classify {
        #[arg(long)]
        k: i64,
        #[arg(long)]
        variant: Option<String>,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// Apply the scenario rules to a list of candidates read from a file.
    Filter {
        #[arg(long)]
        k: i64,
        #[arg(long)]
        input: String,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// Print (K.M_j, D.M_j, M_j^2) for M_j = jK + D.
    MjTable {
        #[arg(long)]
        k: i64,
        /// A single j or a range a..b.
        #[arg(long)]
        j: String,
    },
    /// Full report: computed classifications and the recorded tables.
    Report,
    /// Print the validated fixture rows.
    Fixtures,
}

#[derive(Debug)]
struct Failure {
    code: i32,
    kind: &'static str,
    detail: String,
}

fn usage(kind: &'static str, detail: impl ToString) -> Failure {
    Failure { code: EXIT_USAGE, kind, detail: detail.to_string() }
}

impl From<BranchError> for Failure {
    fn from(e: BranchError) -> Self {
        let kind = match &e {
            BranchError::Scenario(_) => "SchemaError",
            BranchError::Parse(_) => "ParseError",
            BranchError::UnknownVariant { .. } => "UsageError",
            _ => "ClassificationError",
        };
        usage(kind, e)
    }
}

fn io(e: std::io::Error) -> Failure {
    usage("IoError", e)
}

fn scenario_for_k(k: i64) -> Result<&'static str, Failure> {
    match k {
        5 => Ok("k5"),
        7 => Ok("k7-general-type"),
        9 => Ok("k9-rational"),
        11 => Ok("k11"),
        _ => Err(usage("UsageError", format!("k must be one of 5, 7, 9, 11, got {k}"))),
    }
}

fn load(arg: &str) -> Result<Scenario, Failure> {
    resolve_scenario(arg).map_err(|e| usage("SchemaError", e))
}

fn parse_j(src: &str) -> Result<Vec<i64>, Failure> {
    let bad = || usage("UsageError", format!("bad range {src:?}"));
    match src.split_once("..") {
        Some((a, b)) => {
            let (a, b): (i64, i64) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
            if a > b {
                return Err(bad());
            }
            Ok((a..=b).collect())
        }
        None => Ok(vec![src.trim().parse().map_err(|_| bad())?]),
    }
}

fn render_table(t: &ClassificationTable, f: Format) -> String {
    match f {
        Format::Table => t.render_table(),
        Format::Json => format!("{}\n", t.to_json()),
    }
}

fn verify(scenario: &str, out_path: Option<&str>, format: Format, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    let s = load(scenario)?;
    let (log, mismatches) = replay_collect(&s).map_err(|e| usage("RuleError", e))?;
    let certs: Vec<&Certificate> = log.certificates();
    let text = match format {
        Format::Table => certs.iter().map(|c| c.render_text()).collect::<String>(),
        Format::Json => format!("{}\n", serde_json::to_string_pretty(&certs).expect("certificates serialize")),
    };
    match out_path {
        Some(p) => std::fs::write(p, &text).map_err(io)?,
        None => out.write_all(text.as_bytes()).map_err(io)?,
    }
    for m in &mismatches {
        if let EngineError::UnexpectedVerdict { step, expected, got } = m {
            let rec = json!({"error": "VerdictMismatch", "scenario": s.name, "step": step, "rule": s.checks[*step].rule, "expected": expected, "got": got});
            writeln!(err, "{rec}").map_err(io)?;
        }
    }
    Ok(if mismatches.is_empty() { EXIT_OK } else { EXIT_MISMATCH })
}

/// One-line summary: factored determinant, all rational roots, survivors.
pub fn solve_gram_line(s: &Scenario, classes: &str, admissible: &[Admissible]) -> Result<String, String> {
    let var = s.space.unknown().ok_or("scenario has no unknown entry")?.to_string();
    let cs = s.class_list(classes).map_err(|e| e.to_string())?;
    let det = det_poly(&gram_matrix(&s.space, &cs).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let roots = rational_roots(&det).map_err(|e| e.to_string())?;
    let show = |v: &[&BigRational]| {
        if v.is_empty() {
            "none".to_string()
        } else {
            v.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(", ")
        }
    };
    let all: Vec<&BigRational> = roots.iter().collect();
    let kept: Vec<&BigRational> = roots.iter().filter(|r| rejection(admissible, r).is_none()).collect();
    Ok(format!("{}; roots: {}; accepted: {}", det.render_factored(&var), show(&all), show(&kept)))
}

fn solve_gram(scenario: &str, classes: &str, admissible: &str, out: &mut dyn Write) -> Result<i32, Failure> {
    let s = load(scenario)?;
    let adm = admissible
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<Admissible>().map_err(|e| usage("UsageError", e)))
        .collect::<Result<Vec<_>, _>>()?;
    let line = solve_gram_line(&s, classes, &adm).map_err(|e| usage("SchemaError", e))?;
    writeln!(out, "{line}").map_err(io)?;
    Ok(EXIT_OK)
}

fn enumerate(
    k: i64,
    scenario: Option<&str>,
    min_d: i64,
    max_components: Option<usize>,
    fibration: bool,
    out: &mut dyn Write,
) -> Result<i32, Failure> {
    let s = match scenario {
        Some(a) => load(a)?,
        None => builtin(scenario_for_k(k)?).map_err(|e| usage("SchemaError", e))?,
    };
    let fib = if fibration {
        let log = crate::engine::replay_log(&s).map_err(|e| usage("RuleError", e))?;
        Some(FibrationData::from_log(&log)?)
    } else {
        None
    };
    let cs = ConstraintSet { min_d, max_components, fibration: fib };
    let all = enumerate_candidates(&s.invariants, &cs)?;
    writeln!(out, "scenario: {}", s.name).map_err(io)?;
    writeln!(out, "candidates: {}", all.len()).map_err(io)?;
    let mut failed = false;
    for c in &all {
        match verify_candidate(&s.invariants, &cs, c) {
            Ok(()) => writeln!(out, "{c}").map_err(io)?,
            Err(why) => {
                failed = true;
                writeln!(out, "{c}  recheck failed: {why}").map_err(io)?
            }
        }
    }
    Ok(if failed { EXIT_MISMATCH } else { EXIT_OK })
}

fn filter(k: i64, input: &str, format: Format, out: &mut dyn Write) -> Result<i32, Failure> {
    let name = match k {
        9 | 11 => scenario_for_k(k)?,
        _ => return Err(usage("UsageError", "filter supports k = 9 and k = 11")),
    };
    let text = std::fs::read_to_string(input).map_err(|e| usage("SchemaError", format!("{input}: {e}")))?;
    let list = parse_candidate_list(&text)?;
    let s = builtin(name).map_err(|e| usage("SchemaError", e))?;
    let t = filter_labelled(&list, &s)?;
    out.write_all(render_table(&t, format).as_bytes()).map_err(io)?;
    Ok(EXIT_OK)
}

/// `(j, (K.M_j, D.M_j, M_j^2))`.
pub type MjRow = (i64, (i64, i64, i64));

/// Rows of the M_j table computed from the scenario's pairings.
pub fn mj_rows(s: &Scenario, js: &[i64]) -> Result<Vec<MjRow>, String> {
    let k = s.canonical();
    let d = s.class("D").map_err(|e| e.to_string())?;
    let int = |q: BigRational| -> Result<i64, String> {
        if !q.is_integer() {
            return Err(format!("{q} is not an integer"));
        }
        i64::try_from(q.to_integer()).map_err(|e| e.to_string())
    };
    let mut rows = Vec::new();
    for &j in js {
        let m = k.scale_int(j).plus(&d);
        let pc = |a: &_, b: &_| s.space.pair_const(a, b).map_err(|e| e.to_string());
        let got = (int(pc(&k, &m)?)?, int(pc(&d, &m)?)?, int(pc(&m, &m)?)?);
        let formula = mj_invariants(j, &s.invariants);
        if got != formula {
            return Err(format!("M{j}: pairings give {got:?} but the invariants give {formula:?}"));
        }
        rows.push((j, got));
    }
    Ok(rows)
}

fn mj_table(k: i64, j: &str, out: &mut dyn Write) -> Result<i32, Failure> {
    if k != 9 && k != 11 {
        return Err(usage("UsageError", "mj-table supports k = 9 and k = 11"));
    }
    let s = builtin(scenario_for_k(k)?).map_err(|e| usage("SchemaError", e))?;
    let rows = mj_rows(&s, &parse_j(j)?).map_err(|e| Failure { code: EXIT_MISMATCH, kind: "VerdictMismatch", detail: e })?;
    writeln!(out, "j  (K.M, D.M, M^2)").map_err(io)?;
    for (j, (a, b, c)) in rows {
        writeln!(out, "{j}  ({a},{b},{c})").map_err(io)?;
    }
    Ok(EXIT_OK)
}

/// Text of the fixture listing.
pub fn fixtures_text() -> Result<String, String> {
    let fx = load_fixtures().map_err(|e| e.to_string())?;
    let mut s = String::from("recorded classification rows:\n");
    let w = fx.rows.iter().map(|r| r.context.len()).max().unwrap_or(0);
    for r in &fx.rows {
        let c = crate::branch::BranchCandidate::from_pairs(&r.components);
        s.push_str(&format!(
            "  {:<w$}  {:<6} K^2={:<3} {:<24} {}\n",
            r.context,
            r.case,
            r.kk,
            c.to_string(),
            r.existence,
        ));
    }
    for t in &fx.example_tables {
        s.push_str(&format!("examples: {} ({})\n", t.name, t.source));
        for r in &t.rows {
            let c = crate::branch::BranchCandidate::from_pairs(&r.components);
            s.push_str(&format!("  {:<8} k={:<3} K^2={:<3} {:<24} {} {}\n", r.label, r.k, r.kk, c.to_string(), r.quotient, r.case));
        }
    }
    s.push_str("preliminary list, nine nodes:\n");
    for e in &fx.preliminary_k9.entries {
        s.push_str(&format!("  ({}) {}\n", e.label, crate::branch::BranchCandidate::from_pairs(&e.components)));
    }
    Ok(s)
}

/// The full report: every computed classification, then the recorded rows.
pub fn report_text() -> Result<String, String> {
    let mut s = String::new();
    for (k, v) in [(11, "rational"), (9, "rational"), (9, "enriques-fixture"), (7, "fixture"), (5, "fixture")] {
        let t = classify(k, v).map_err(|e| e.to_string())?;
        s.push_str(&format!("== k = {k}, {v}\n"));
        s.push_str(&t.render_table());
        s.push('\n');
    }
    s.push_str("== fixtures\n");
    s.push_str(&fixtures_text()?);
    Ok(s)
}

fn dispatch(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    match cli.command {
        Command::Verify { scenario, out: path, format } => verify(&scenario, path.as_deref(), format, out, err),
        Command::SolveGram { scenario, classes, admissible } => solve_gram(&scenario, &classes, &admissible, out),
        Command::Enumerate { k, scenario, min_d, max_components, fibration } => {
            enumerate(k, scenario.as_deref(), min_d, max_components, fibration, out)
        }
        Command::Classify { k, variant, format } => {
            let v = variant.unwrap_or_else(|| default_variant(k).to_string());
            let t = classify(k, &v)?;
            out.write_all(render_table(&t, format).as_bytes()).map_err(io)?;
            Ok(EXIT_OK)
        }
        Command::Filter { k, input, format } => filter(k, &input, format, out),
        Command::MjTable { k, j } => mj_table(k, &j, out),
        Command::Report => {
            let text = report_text().map_err(|e| usage("ClassificationError", e))?;
            out.write_all(text.as_bytes()).map_err(io)?;
            Ok(EXIT_OK)
        }
        Command::Fixtures => {
            let text = fixtures_text().map_err(|e| usage("SchemaError", e))?;
            out.write_all(text.as_bytes()).map_err(io)?;
            Ok(EXIT_OK)
        }
    }
}

/// Parses `argv` (program name first) and runs the verb. Returns the exit
/// status; errors go to `err` as one JSON object per line.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return EXIT_OK;
            }
            let rec = json!({"error": "UsageError", "detail": e.to_string().trim()});
            let _ = writeln!(err, "{rec}");
            return EXIT_USAGE;
        }
    };
    match dispatch(cli, out, err) {
        Ok(code) => code,
        Err(f) => {
            let rec = json!({"error": f.kind, "detail": f.detail});
            let _ = writeln!(err, "{rec}");
            f.code
        }
    }
}
