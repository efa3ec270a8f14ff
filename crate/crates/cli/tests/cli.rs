use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn fixture(name: &str) -> String {
    root().join("fixtures").join(name).display().to_string()
}

fn gridaudit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gridaudit"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> (Value, i32) {
    let mut all = vec!["--format", "json"];
    all.extend_from_slice(args);
    let o = gridaudit(&all);
    (serde_json::from_slice(&o.stdout).expect("json output"), o.status.code().unwrap())
}

fn validator() -> jsonschema::Validator {
    let text = std::fs::read_to_string(root().join("schemas/report-v1.schema.json")).unwrap();
    jsonschema::validator_for(&serde_json::from_str(&text).unwrap()).unwrap()
}

#[test]
fn check_exit_codes() {
    let (report, code) = json(&["check", &fixture("quarters.sheet")]);
    assert_eq!(code, 1);
    let found: Vec<(String, String)> = report["diagnostics"]
        .as_array()
        .unwrap()
        .iter()
        .map(|d| (d["code"].as_str().unwrap().into(), d["subjects"][0].as_str().unwrap().into()))
        .collect();
    assert_eq!(
        found,
        [
            ("D1_BLANK_REF".to_string(), "B3".to_string()),
            ("D2_WRONG_TYPE_IN_RANGE".into(), "B2".into()),
            ("D2_WRONG_TYPE_IN_RANGE".into(), "B7".into()),
        ]
    );

    let (report, code) = json(&["check", &fixture("clean.sheet")]);
    assert_eq!(code, 0);
    assert_eq!(report["diagnostics"], serde_json::json!([]));

    let o = gridaudit(&["check", &fixture("missing.sheet")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("missing.sheet"));
}

#[test]
fn parse_errors_name_file_and_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.sheet");
    std::fs::write(&path, "A1 = #1\nA2 = =SUM(A1:A1\n").unwrap();
    let o = gridaudit(&["check", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("bad.sheet:2:"));

    let spec = dir.path().join("bad.intervals");
    std::fs::write(&spec, "input C2 in [0, 1]\nexpect C6 [1, 2]\n").unwrap();
    let o = gridaudit(&["test", &fixture("sales_two_each.sheet"), spec.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("bad.intervals:2:"));
}

#[test]
fn test_exit_codes() {
    let (report, code) = json(&["test", &fixture("sales_appended.sheet"), &fixture("sales_appended.intervals")]);
    assert_eq!(code, 1);
    let rec = &report["test"]["records"][0];
    assert_eq!(rec["cell"], "C8");
    assert_eq!(rec["verdict"], "SymptomValueOutside");
    assert_eq!(rec["d"]["value"], 3300.0);
    assert_eq!(rec["suspects"][0], "C2");

    let (_, code) = json(&["test", &fixture("sales_two_each.sheet"), &fixture("sales_two_each.intervals")]);
    assert_eq!(code, 0);

    let o = gridaudit(&["test", &fixture("sales_two_each.sheet"), &fixture("label_expect.intervals")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not a formula cell"));

    let o = gridaudit(&["test", &fixture("cycle.sheet"), &fixture("sales_two_each.intervals")]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn areas_listing() {
    let (report, code) = json(&["areas", &fixture("subtotals_columns.sheet")]);
    assert_eq!(code, 0);
    let rects: Vec<_> = report["areas"]["physical"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| p["rect"].as_str().unwrap().to_string())
        .collect();
    assert_eq!(rects, ["C3:C5", "C7:C9"]);

    let (report, _) = json(&["areas", &fixture("empty.sheet")]);
    assert_eq!(report["areas"]["physical"], serde_json::json!([]));
    assert_eq!(report["areas"]["logical"], serde_json::json!([]));

    let (report, _) = json(&["areas", &fixture("clean.sheet")]);
    assert_eq!(report["areas"]["logical"][0]["members"], serde_json::json!(["C2", "C3", "C4"]));
}

#[test]
fn reports_match_schema() {
    let v = validator();
    let runs: Vec<Vec<String>> = vec![
        vec!["check".into(), fixture("quarters.sheet")],
        vec!["check".into(), fixture("cycle.sheet")],
        vec!["check".into(), fixture("clean.sheet")],
        vec!["areas".into(), fixture("subtotals_single3.sheet")],
        vec!["test".into(), fixture("sales_appended.sheet"), fixture("sales_appended.intervals")],
        vec!["test".into(), fixture("quarters_inputs.sheet"), fixture("quarters_bands.intervals")],
    ];
    for args in runs {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let (report, _) = json(&args);
        let errors: Vec<String> = v.iter_errors(&report).map(|e| e.to_string()).collect();
        assert!(errors.is_empty(), "{args:?}: {errors:?}");
    }
}

#[test]
fn graph_marks_every_finding() {
    for name in ["quarters.sheet", "sales_appended.sheet", "subtotals_single3.sheet", "cycle.sheet"] {
        let (report, _) = json(&["check", &fixture(name)]);
        let dot = stdout(&gridaudit(&["graph", &fixture(name)]));
        for d in report["diagnostics"].as_array().unwrap() {
            let cell = d["subjects"][0].as_str().unwrap();
            let code = d["code"].as_str().unwrap();
            let line = dot
                .lines()
                .find(|l| l.trim_start().starts_with(&format!("\"{cell}\" [")))
                .unwrap_or_else(|| panic!("{name}: no node for {cell}"));
            assert!(line.contains(code) && line.contains("penwidth=2"), "{name}: {line}");
        }
    }
}

#[test]
fn graph_shapes() {
    let dot = stdout(&gridaudit(&["graph", &fixture("quarters.sheet")]));
    assert!(dot.contains("subgraph cluster_0"));
    assert!(dot.contains("label=\"SUM B2:B10 -> B12\""));
    assert_eq!(dot.lines().filter(|l| l.ends_with("-> \"B12\";")).count(), 9);

    let empty = stdout(&gridaudit(&["graph", &fixture("empty.sheet")]));
    assert!(empty.starts_with("digraph sheet {") && empty.trim_end().ends_with('}'));
    assert!(!empty.contains("->"));

    let area = stdout(&gridaudit(&["graph", "--resolution", "area", &fixture("subtotals_single3.sheet")]));
    assert!(area.contains("\"P1\" [label=\"SUM H3:H5 -> H6\""));
    assert!(area.contains("\"P1\" -> \"L1\";"));
    assert!(area.contains("D4_AREA_MIXUP"));
}

#[test]
fn output_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let o = gridaudit(&["--format", "json", "--output", out.to_str().unwrap(), "check", &fixture("quarters.sheet")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(o.stdout.is_empty());
    let written: Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(written["command"], "check");
}

#[test]
fn text_rendering() {
    let text = stdout(&gridaudit(&["check", &fixture("sales_appended.sheet")]));
    assert!(text.contains("warning[D3_INCORRECT_RANGE] C7:"));
    let text = stdout(&gridaudit(&["test", &fixture("sales_appended.sheet"), &fixture("sales_appended.intervals")]));
    assert!(text.contains("SymptomValueOutside  suspects: C2, C3, C4, C5, C6"));
}
