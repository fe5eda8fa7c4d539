//! End-to-end checks of the command-line surface:
//!
//! - exit codes: 0 clean, 1 a check failed, 2 the input was malformed;
//! - malformed input always leaves a machine-readable JSON line on stderr;
//! - `count` agrees with `qcount --at 1`;
//! - the scan CSV keeps its header and both modes walk the same rows;
//! - rendering is deterministic, byte for byte.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

const P_REGION: &str = r#"{"family":"P","x":1,"y":1,"z":1,"t":1,"a":[1],"b":[1]}"#;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fernhex"))
        .args(args)
        .output()
        .expect("binary launches")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout is text")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("stderr is text")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("fernhex-cli-{}", std::process::id()));
    fs::create_dir_all(&dir).expect("scratch dir");
    dir.join(name)
}

// ---------------------------------------------------------------------------
// Counting
// ---------------------------------------------------------------------------

#[test]
fn count_equals_qcount_at_one() {
    let count = run(&["count", "--region", P_REGION]);
    assert_eq!(count.status.code(), Some(0), "stderr: {}", stderr(&count));
    let at_one = run(&["qcount", "--region", P_REGION, "--weight", "wt1", "--at", "1"]);
    assert_eq!(at_one.status.code(), Some(0));
    assert_eq!(stdout(&count).trim(), stdout(&at_one).trim());
    assert_eq!(stdout(&count).trim(), "90");
}

#[test]
fn count_accepts_region_files() {
    let path = scratch("region.json");
    fs::write(&path, P_REGION).expect("write region file");
    let from_file = run(&["count", "--region", path.to_str().expect("utf-8 path")]);
    assert_eq!(from_file.status.code(), Some(0));
    assert_eq!(stdout(&from_file).trim(), "90");
}

#[test]
fn qcount_reports_the_whole_polynomial() {
    let out = run(&["qcount", "--region", P_REGION, "--weight", "wt2"]);
    assert_eq!(out.status.code(), Some(0));
    let poly: Value = serde_json::from_str(&stdout(&out)).expect("polynomial JSON");
    assert_eq!(poly["weight"], "wt2");
    assert!(poly["terms"].as_array().expect("terms array").len() > 1);
    assert_eq!(poly["at1"], "90");
    let degree = poly["degree"].as_i64().expect("degree");
    let top = poly["terms"].as_array().unwrap().last().unwrap();
    assert_eq!(top[0].as_i64().expect("exponent"), degree);
}

// ---------------------------------------------------------------------------
// Malformed input
// ---------------------------------------------------------------------------

#[test]
fn malformed_json_exits_two_with_machine_readable_error() {
    let out = run(&["count", "--region", "{\"family\":\"P\""]);
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_str(stderr(&out).trim()).expect("stderr is JSON");
    assert!(err["error"].as_str().expect("error string").len() > 0);
}

#[test]
fn invalid_region_parameters_exit_two() {
    let bad = r#"{"family":"P","x":1,"y":1,"z":-3,"t":1,"a":[],"b":[]}"#;
    let out = run(&["count", "--region", bad]);
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_str(stderr(&out).trim()).expect("stderr is JSON");
    assert!(err["error"].as_str().unwrap().contains("z"));
}

#[test]
fn missing_region_file_exits_two() {
    let out = run(&["count", "--region", "/nonexistent/region.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(serde_json::from_str::<Value>(stderr(&out).trim()).is_ok());
}

#[test]
fn unknown_suite_exits_two_and_lists_the_menu() {
    let out = run(&["verify", "--suite", "thm9.9"]);
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_str(stderr(&out).trim()).expect("stderr is JSON");
    assert!(err["error"].as_str().unwrap().contains("thm2.1"));
}

// ---------------------------------------------------------------------------
// Verification suites
// ---------------------------------------------------------------------------

#[test]
fn verify_streams_text_reports_and_exits_zero() {
    let out = run(&["verify", "--suite", "thm3.1", "--max-param", "0"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let body = stdout(&out);
    assert!(body.lines().count() > 0);
    assert!(body.lines().all(|l| l.starts_with("[PASS]")));
    assert!(stderr(&out).contains("checks passed"));
}

#[test]
fn verify_json_reports_parse_line_by_line() {
    let out = run(&[
        "verify", "--suite", "lemmas", "--max-param", "0", "--format", "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    for line in stdout(&out).lines() {
        let report: Value = serde_json::from_str(line).expect("report line is JSON");
        assert_eq!(report["pass"], true);
        assert_eq!(report["suite"], "lemmas");
    }
}

#[test]
fn verify_writes_reports_to_a_file() {
    let path = scratch("reports.txt");
    let out = run(&[
        "verify", "--suite", "schur", "--max-param", "0",
        "-o", path.to_str().expect("utf-8 path"),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).is_empty());
    let body = fs::read_to_string(&path).expect("report file");
    assert!(body.lines().all(|l| l.starts_with("[PASS]")));
}

// ---------------------------------------------------------------------------
// The intrusion scan
// ---------------------------------------------------------------------------

#[test]
fn scan_keeps_its_csv_contract() {
    let out = run(&["scan", "--p", "1", "--sizes", "2,3"]);
    assert_eq!(out.status.code(), Some(0));
    let body = stdout(&out);
    let mut lines = body.lines();
    assert_eq!(lines.next(), Some("p,N,M,m,n,x,logcount"));
    for line in lines {
        assert_eq!(line.split(',').count(), 7, "ragged row: {line}");
    }
    let again = run(&["scan", "--p", "1", "--sizes", "2,3"]);
    assert_eq!(stdout(&again), body, "scan output is deterministic");
}

#[test]
fn scan_modes_walk_the_same_grid() {
    let float = run(&["scan", "--p", "2/3", "--sizes", "2,3,4", "--mode", "float"]);
    let exact = run(&["scan", "--p", "2/3", "--sizes", "2,3,4", "--mode", "exact"]);
    assert_eq!(float.status.code(), Some(0));
    assert_eq!(exact.status.code(), Some(0));
    let parse = |out: &Output| -> Vec<(String, f64)> {
        stdout(out)
            .lines()
            .skip(1)
            .map(|l| {
                let (head, log) = l.rsplit_once(',').expect("csv row");
                (head.to_string(), log.parse::<f64>().expect("logcount"))
            })
            .collect()
    };
    let f = parse(&float);
    let e = parse(&exact);
    assert_eq!(f.len(), e.len());
    for ((fk, fl), (ek, el)) in f.iter().zip(&e) {
        assert_eq!(fk, ek, "modes must visit identical rows");
        assert!((fl - el).abs() <= 1e-6, "log counts diverge on {fk}: {fl} vs {el}");
    }
}

#[test]
fn scan_rejects_out_of_range_ratios() {
    let out = run(&["scan", "--p", "7/2", "--sizes", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(serde_json::from_str::<Value>(stderr(&out).trim()).is_ok());
}

// ---------------------------------------------------------------------------
// Schur identities
// ---------------------------------------------------------------------------

#[test]
fn schur_identity_file_reports_holds() {
    let path = scratch("identity.json");
    fs::write(&path, r#"{"up":[1],"down":[4],"y":1,"z":1}"#).expect("write identity");
    let out = run(&["schur", "--identity", path.to_str().expect("utf-8 path")]);
    assert_eq!(out.status.code(), Some(0));
    let body: Value = serde_json::from_str(&stdout(&out)).expect("identity JSON");
    assert_eq!(body["holds"], true);
    assert_eq!(body["lhs"], "4");
    assert_eq!(body["region_count"], "4");
}

#[test]
fn schur_ratio_mode_evaluates() {
    let path = scratch("ratio.json");
    fs::write(
        &path,
        r#"{"t":[1,2,3,4],"up":[1],"down":[4],"width":0,"n":1,"xs":["1","1","1","1"]}"#,
    )
    .expect("write ratio spec");
    let out = run(&["schur", "--identity", path.to_str().expect("utf-8 path")]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let body: Value = serde_json::from_str(&stdout(&out)).expect("ratio JSON");
    assert_eq!(body["ratio"], "1");
}

// ---------------------------------------------------------------------------
// Rendering
// ---------------------------------------------------------------------------

#[test]
fn render_is_deterministic() {
    let hex = r#"{"family":"Hex","a":2,"b":2,"c":2}"#;
    let first = run(&["render", "--region", hex, "--tiling", "first"]);
    let second = run(&["render", "--region", hex, "--tiling", "first"]);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout, "SVG bytes must not wobble");
    let svg = stdout(&first);
    assert!(svg.starts_with("<svg"));
    assert!(svg.matches("<polygon").count() > 12, "tiling quads are drawn");
}

#[test]
fn render_refuses_an_untileable_overlay() {
    let lonely = r#"{"family":"Raw","triangles":[{"row":0,"col":0,"up":true}],"baseline_row":0}"#;
    let out = run(&["render", "--region", lonely, "--tiling", "first"]);
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_str(stderr(&out).trim()).expect("stderr is JSON");
    assert!(err["error"].as_str().unwrap().contains("no tiling"));
}

#[test]
fn render_writes_svg_files() {
    let path = scratch("hex.svg");
    let out = run(&[
        "render", "--region", r#"{"family":"Hex","a":1,"b":1,"c":1}"#,
        "-o", path.to_str().expect("utf-8 path"),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let svg = fs::read_to_string(&path).expect("svg file");
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
}
