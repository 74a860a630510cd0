use std::path::Path;

use farey2d::cli::{run, EXIT_CONFIG, EXIT_IO, EXIT_OK, EXIT_VERIFY};
use num_bigint::BigInt;

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(
        std::iter::once("farey2d").chain(args.iter().copied()),
        &mut out,
        &mut err,
    );
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn expand(dir: &Path, stages: usize) -> std::path::PathBuf {
    let out = dir.join(format!("t{stages}.jsonl"));
    let (code, table, _) = call(&["expand", "--stages", &stages.to_string(), "--out", p(&out)]);
    assert_eq!(code, EXIT_OK);
    assert!(table.starts_with("k "));
    out
}

#[test]
fn expand_verify_render_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let trace = expand(dir.path(), 2);
    assert_eq!(std::fs::read_to_string(&trace).unwrap().lines().count(), 2);

    let csv = dir.path().join("r.csv");
    let json = dir.path().join("r.json");
    let (code, _, err) = call(&[
        "verify",
        "--trace",
        p(&trace),
        "--enclosure-depth",
        "3",
        "--report",
        p(&csv),
        "--json",
        p(&json),
    ]);
    assert_eq!(code, EXIT_OK, "{err}");
    let report = std::fs::read_to_string(&csv).unwrap();
    assert!(report.starts_with("k,d1,d2,d3,"));
    assert_eq!(report.lines().count(), 3);
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(v["stages"].as_array().unwrap().len(), 2);

    let svg = dir.path().join("t.svg");
    assert_eq!(
        call(&["render", "--trace", p(&trace), "--out", p(&svg)]).0,
        EXIT_OK
    );
    assert_eq!(
        std::fs::read_to_string(&svg)
            .unwrap()
            .matches("<polygon")
            .count(),
        3
    );
}

#[test]
fn enclosure_depth_must_exceed_trace_length() {
    let dir = tempfile::tempdir().unwrap();
    let trace = expand(dir.path(), 1);
    let csv = dir.path().join("r.csv");
    let (code, _, _) = call(&[
        "verify",
        "--trace",
        p(&trace),
        "--enclosure-depth",
        "1",
        "--report",
        p(&csv),
    ]);
    assert_eq!(code, EXIT_CONFIG);
}

#[test]
fn corrupted_determinant_fails_regularity() {
    let dir = tempfile::tempdir().unwrap();
    let trace = expand(dir.path(), 1);
    let mut rec: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&trace).unwrap()).unwrap();
    // replace the first generator by the sum of the other two: still primitive, det 0
    let v = rec["cone"]["v"].clone();
    let sum: Vec<String> = (0..3)
        .map(|i| {
            let x: BigInt = v[1][i].as_str().unwrap().parse().unwrap();
            let y: BigInt = v[2][i].as_str().unwrap().parse().unwrap();
            (x + y).to_string()
        })
        .collect();
    rec["cone"]["v"][0] = serde_json::json!(sum);
    let bad = dir.path().join("bad.jsonl");
    std::fs::write(&bad, format!("{rec}\n")).unwrap();
    let csv = dir.path().join("r.csv");
    let (code, _, err) = call(&[
        "verify",
        "--trace",
        p(&bad),
        "--enclosure-depth",
        "2",
        "--report",
        p(&csv),
    ]);
    assert_eq!(code, EXIT_VERIFY);
    assert!(err.contains("regularity"), "{err}");
}

#[test]
fn truncated_trace_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let trace = expand(dir.path(), 1);
    let text = std::fs::read_to_string(&trace).unwrap();
    let cut = dir.path().join("cut.jsonl");
    std::fs::write(&cut, &text[..text.len() / 3]).unwrap();
    let csv = dir.path().join("r.csv");
    let (code, _, err) = call(&[
        "verify",
        "--trace",
        p(&cut),
        "--enclosure-depth",
        "2",
        "--report",
        p(&csv),
    ]);
    assert_eq!(code, EXIT_VERIFY);
    assert!(err.contains("line 1"), "{err}");
}

#[test]
fn configuration_errors() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.jsonl");
    assert_eq!(
        call(&[
            "expand",
            "--theta-cos2",
            "1/2",
            "--stages",
            "1",
            "--out",
            p(&out)
        ])
        .0,
        EXIT_CONFIG
    );
    assert_eq!(
        call(&[
            "expand",
            "--theta-cos2",
            "1/4",
            "--stages",
            "1",
            "--out",
            p(&out)
        ])
        .0,
        EXIT_CONFIG
    );
    assert_eq!(
        call(&[
            "expand",
            "--triangle",
            "0,0 1,1 2,2",
            "--stages",
            "1",
            "--out",
            p(&out)
        ])
        .0,
        EXIT_CONFIG
    );
    assert_eq!(call(&["expand", "--stages", "1"]).0, EXIT_CONFIG);
    let csv = dir.path().join("b.csv");
    assert_eq!(
        call(&["baseline", "--target", "1/3", "--csv", p(&csv)]).0,
        EXIT_CONFIG
    );
}

#[test]
fn zero_stages_write_an_empty_trace() {
    let dir = tempfile::tempdir().unwrap();
    let trace = expand(dir.path(), 0);
    assert_eq!(std::fs::read_to_string(trace).unwrap(), "");
}

#[test]
fn missing_trace_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("r.csv");
    let missing = dir.path().join("nope.jsonl");
    let (code, _, _) = call(&[
        "verify",
        "--trace",
        p(&missing),
        "--enclosure-depth",
        "2",
        "--report",
        p(&csv),
    ]);
    assert_eq!(code, EXIT_IO);
}

#[test]
fn baseline_writes_series_and_trace() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("b.csv");
    let out = dir.path().join("b.jsonl");
    let (code, _, err) = call(&[
        "baseline",
        "--target",
        "-1/4+1/4√5",
        "2/7-1/50√5",
        "--steps",
        "20",
        "--csv",
        p(&csv),
        "--out",
        p(&out),
    ]);
    assert_eq!(code, EXIT_OK, "{err}");
    let series = std::fs::read_to_string(&csv).unwrap();
    assert!(series.starts_with("step,min_angle_cos2,"));
    assert_eq!(series.lines().count(), 21);
    assert_eq!(std::fs::read_to_string(&out).unwrap().lines().count(), 20);
}
