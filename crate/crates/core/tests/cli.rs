use std::path::Path;
use std::process::{Command, Output};

fn charflow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_charflow")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn cauchy_point_value() {
    let o = charflow(&["cauchy", "--tau", "x", "--nu", "1 - exp(x)", "--support", "-1,1", "--at", "0.5,0"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "u = 0.5");
}

#[test]
fn inverse_line_recovers_example1() {
    let o = charflow(&["inverse-line", "--example", "example1", "--samples", "11"]);
    assert_eq!(o.status.code(), Some(0));
    let mut rows = csv::Reader::from_reader(o.stdout.as_slice());
    assert_eq!(rows.headers().unwrap(), vec!["x", "tau_prime", "nu", "tau"]);
    let mut n = 0;
    for r in rows.records() {
        let r = r.unwrap();
        let v: Vec<f64> = r.iter().map(|s| s.parse().unwrap()).collect();
        assert!((v[1] - 1.0).abs() < 1e-9);
        assert!((v[2] - (1.0 - v[0].exp())).abs() < 1e-9);
        assert!((v[3] - v[0]).abs() < 1e-9);
        n += 1;
    }
    assert_eq!(n, 11);
}

#[test]
fn degeneration_finds_example2_line() {
    let o = charflow(&["degeneration", "--example", "example2"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["config"]["mode"], "degeneration");
    let ys: Vec<f64> = v["points"].as_array().unwrap().iter().map(|p| p["point"]["y"].as_f64().unwrap()).collect();
    assert!(ys.iter().any(|y| (y - 1.0).abs() < 1e-6));
}

#[test]
fn domain_reports_one_gap_for_example3() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("grid.csv");
    let svg_path = dir.path().join("domain.svg");
    let o = charflow(&[
        "domain",
        "--example",
        "example3",
        "--grid",
        "60,60",
        "-o",
        csv_path.to_str().unwrap(),
        "--svg",
        svg_path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert_eq!(v["gaps"].as_array().unwrap().len(), 1);
    assert!(v["config"].is_object());
    let mut grid = csv::Reader::from_path(&csv_path).unwrap();
    assert_eq!(grid.headers().unwrap().len(), 5);
    assert_eq!(grid.records().count(), 3600);
    assert!(is_svg(&svg_path));
}

fn is_svg(p: &Path) -> bool {
    let text = std::fs::read_to_string(p).unwrap();
    text.starts_with("<svg") || text.starts_with("<?xml") && text.trim_end().ends_with("</svg>")
}

#[test]
fn trace_writes_csv_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let svg_path = dir.path().join("trace.svg");
    let o = charflow(&["trace", "--example", "example1", "--c-values", "-1,0,0.5", "--svg", svg_path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let mut rows = csv::Reader::from_reader(o.stdout.as_slice());
    assert_eq!(rows.headers().unwrap(), vec!["family", "c", "x", "y", "u"]);
    let cs: std::collections::BTreeSet<String> = rows.records().map(|r| r.unwrap()[1].to_string()).collect();
    assert_eq!(cs.into_iter().collect::<Vec<_>>(), vec!["-1", "0", "0.5"]);
    assert!(is_svg(&svg_path));
}

#[test]
fn output_is_deterministic() {
    let args = ["envelope", "--example", "example1"];
    let (a, b) = (charflow(&args), charflow(&args));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn run_reads_a_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cfg.json");
    std::fs::write(
        &path,
        r#"{"mode": "cauchy", "tau": "x", "nu": "1 - exp(x)", "support": [-1, 1], "at": [0.25, 0]}"#,
    )
    .unwrap();
    let o = charflow(&["run", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o).trim(), "u = 0.25");

    std::fs::write(&path, r#"{"mode": "cauchy", "colour": "red"}"#).unwrap();
    let o = charflow(&["--json-errors", "run", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(serde_json::from_slice::<serde_json::Value>(&o.stderr).unwrap()["error"]["code"], 1);
}

#[test]
fn exit_codes_separate_usage_from_domain_errors() {
    let o = charflow(&["--json-errors", "cauchy", "--bogus"]);
    assert_eq!(o.status.code(), Some(1));
    let e: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(e["error"]["kind"], "usage");

    let o = charflow(&["--json-errors", "cauchy", "--tau", "x", "--nu", "1 - exp(x)", "--support", "-1,1", "--at", "0,-0.9"]);
    assert_eq!(o.status.code(), Some(2));
    let e: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(e["error"]["code"], 2);

    let o = charflow(&["cauchy", "--tau", "x^2", "--nu", "0", "--support", "-1,1", "--at", "0,0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!o.stderr.is_empty());

    let o = charflow(&["cauchy", "--tau", "x +* 2", "--nu", "0", "--support", "-1,1"]);
    assert_eq!(o.status.code(), Some(1));

    let o = charflow(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
}
