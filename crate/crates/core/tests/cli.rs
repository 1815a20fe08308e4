use std::path::PathBuf;
use std::process::Command;

use involution_lattice::cli::{report_text, run};

fn invoke(args: &[&str]) -> (i32, String, String) {
    let mut argv = vec!["invlat"];
    argv.extend_from_slice(args);
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn golden_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden/report.txt")
}

#[test]
fn report_matches_golden() {
    let text = report_text().unwrap();
    let path = golden_path();
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, &text).unwrap();
    }
    let golden = std::fs::read_to_string(&path).expect("golden report missing; run with UPDATE_GOLDEN=1");
    assert_eq!(text, golden);
    let (code, out, _) = invoke(&["report"]);
    assert_eq!(code, 0);
    assert_eq!(out, golden);
}

#[test]
fn report_contains_every_kept_row() {
    let text = report_text().unwrap();
    for (k, v) in [(9, "rational"), (11, "rational")] {
        let t = involution_lattice::branch::classify(k, v).unwrap();
        for r in &t.kept {
            let needle = r.candidate.to_string();
            assert!(text.lines().any(|l| l.contains(&needle) && l.trim_end().ends_with("kept")), "{needle}");
        }
    }
}

#[test]
fn solve_gram_line() {
    let (code, out, _) = invoke(&["solve-gram", "k9-rational", "--classes", "K,D,F,G,N0..N8"]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "2^12*(x-8); roots: 8; accepted: 8");
    let (_, out, _) = invoke(&["solve-gram", "k11", "--classes", "K,D,F,G,N0..N10", "--admissible", "nonneg"]);
    assert_eq!(out.trim(), "2^11*(x-4)*(x+8); roots: -8, 4; accepted: 4");
    let (code, _, err) = invoke(&["solve-gram", "k11", "--classes", "K", "--admissible", "prime"]);
    assert_eq!(code, 2);
    assert!(err.contains("UsageError"));
}

#[test]
fn mj_table_rows() {
    let (code, out, _) = invoke(&["mj-table", "--k", "9", "--j", "1..4"]);
    assert_eq!(code, 0);
    let rows: Vec<&str> = out.lines().skip(1).collect();
    assert_eq!(rows, ["1  (0,16,16)", "2  (-2,18,14)", "3  (-4,20,8)", "4  (-6,22,-2)"]);
    let (_, out, _) = invoke(&["mj-table", "--k", "11", "--j", "1..2"]);
    assert_eq!(out.lines().skip(1).collect::<Vec<_>>(), ["1  (-4,14,10)", "2  (-8,14,-2)"]);
}

#[test]
fn verify_exit_codes() {
    let (code, out, err) = invoke(&["verify", "k9-rational"]);
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("verdict RELATION_FORCED"));
    let (code, _, err) = invoke(&["verify", "no-such-file"]);
    assert_eq!(code, 2);
    let rec: serde_json::Value = serde_json::from_str(err.trim()).unwrap();
    assert_eq!(rec["error"], "SchemaError");
    let (code, _, err) = invoke(&["verify", "k9-rational", "--frobnicate"]);
    assert_eq!(code, 2);
    assert!(err.contains("UsageError"));
}

#[test]
fn verify_reports_mismatch() {
    let dir = std::env::temp_dir().join(format!("invlat-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let src = involution_lattice::scenario::builtin::builtin_source("k11").unwrap();
    let mut doc: serde_json::Value = serde_json::from_str(src).unwrap();
    let checks = doc["checks"].as_array_mut().unwrap();
    let i = checks.iter().position(|c| c["rule"] == "rh_exclusion").unwrap();
    checks[i]["expect"] = "SATISFIED".into();
    let path = dir.join("k11-flipped.json");
    std::fs::write(&path, serde_json::to_string_pretty(&doc).unwrap()).unwrap();
    let (code, _, err) = invoke(&["verify", path.to_str().unwrap()]);
    assert_eq!(code, 1);
    let rec: serde_json::Value = serde_json::from_str(err.lines().next().unwrap()).unwrap();
    assert_eq!(rec["error"], "VerdictMismatch");
    assert_eq!(rec["got"], "VIOLATION");
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn classify_json_is_stable() {
    let (code, a, _) = invoke(&["classify", "--k", "11", "--format", "json"]);
    assert_eq!(code, 0);
    let (_, b, _) = invoke(&["classify", "--k", "11", "--format", "json"]);
    assert_eq!(a, b);
    let v: serde_json::Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v["kept"].as_array().unwrap().len(), 3);
    let (code, t, _) = invoke(&["classify", "--k", "9", "--variant", "enriques-fixture"]);
    assert_eq!(code, 0);
    assert!(t.contains("(3,-2)") && t.contains("(3,0)+(1,-2)"));
    let (code, _, _) = invoke(&["classify", "--k", "9", "--variant", "nope"]);
    assert_eq!(code, 2);
}

#[test]
fn filter_from_file() {
    let dir = std::env::temp_dir().join(format!("invlat-filter-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("cands.txt");
    std::fs::write(&path, "# two entries\nf: (3,2)+(1,-4)\ne: (1,-2)+(3,0)\n").unwrap();
    let (code, out, err) = invoke(&["filter", "--k", "9", "--input", path.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("F.Gamma0 = 5"));
    assert!(out.contains("-4K+2F"));
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn enumerate_lists_rechecked_candidates() {
    let (code, out, _) = invoke(&["enumerate", "--k", "11", "--min-d", "1", "--fibration"]);
    assert_eq!(code, 0);
    assert!(out.contains("candidates: 4"));
    let (code, out, _) = invoke(&["enumerate", "--k", "9"]);
    assert_eq!(code, 0);
    assert!(out.contains("(4,2)+(0,-4)") && out.contains("(2,0)+(2,0)+(1,-2)"));
}

#[test]
fn binary_exit_status() {
    let exe = env!("CARGO_BIN_EXE_invlat");
    let ok = Command::new(exe).args(["mj-table", "--k", "9", "--j", "1"]).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    let bad = Command::new(exe).args(["verify", "no-such-file"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("SchemaError"));
}
