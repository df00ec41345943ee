use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn qkc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qkc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

/// Value printed after `key` on its own line.
fn field(out: &str, key: &str) -> f64 {
    out.lines()
        .find_map(|l| l.strip_prefix(key))
        .unwrap_or_else(|| panic!("no '{key}' in:\n{out}"))
        .split_whitespace()
        .next()
        .unwrap()
        .parse()
        .unwrap()
}

fn iris() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/data/iris.csv")
}

#[test]
fn classify_eq16() {
    let o = qkc(&["classify", "--data", "builtin:eq16", "--classifier", "shc"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!((field(&out, "Pr(1)") - 0.5952).abs() <= 1e-3);
    assert_eq!(field(&out, "label"), 1.0);

    let o = qkc(&["classify", "--data", "builtin:eq16", "--classifier", "ssc"]);
    assert!((field(&stdout(&o), "Pr(1)") - 0.6541).abs() <= 1e-3);
}

#[test]
fn classify_reports_probability_of_one() {
    // the reference a for this set is Pr(0) = 0.3924
    let o = qkc(&["classify", "--data", "builtin:ssc-4", "--classifier", "ssc"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!((field(&out, "Pr(1)") - (1.0 - 0.3924)).abs() <= 1e-3);
    assert_eq!(field(&out, "label"), 1.0);
}

#[test]
fn classify_writes_json_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let o = qkc(&[
        "classify",
        "--data",
        "builtin:eq16",
        "--classifier",
        "ssc",
        "--out",
        d,
    ]);
    assert!(o.status.success());
    let body: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join("classify-eq16-ssc.json")).unwrap())
            .unwrap();
    assert_eq!(body["manifest"], "classify-eq16-ssc.manifest.json");
    assert!((body["outcome"]["pr_one"].as_f64().unwrap() - 0.654068).abs() < 1e-6);
    let manifest: serde_json::Value = serde_json::from_slice(
        &fs::read(dir.path().join("classify-eq16-ssc.manifest.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(manifest["command"], "classify");
    assert_eq!(manifest["outputs"].as_array().unwrap().len(), 1);
    assert!(manifest["duration_secs"].as_f64().unwrap() >= 0.0);
}

#[test]
fn data_errors_exit_2_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = qkc(&[
        "classify",
        "--data",
        "missing.csv",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
    assert!(!out.exists());

    let o = qkc(&["classify", "--data", "builtin:nope"]);
    assert_eq!(o.status.code(), Some(2));
    let o = qkc(&["compare", "--classifier", "hc", "--data", "builtin:eq16"]);
    assert_eq!(o.status.code(), Some(2));
    let o = qkc(&["compare", "--t", "0..3"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn zero_reps_is_a_usage_error() {
    let o = qkc(&["compare", "--classifier", "ssc", "--reps", "0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn capacity_errors_exit_3() {
    let o = qkc(&["compare", "--t", "21..22", "--reps", "100"]);
    assert_eq!(o.status.code(), Some(3));
    let o = qkc(&["distribution", "--data", "builtin:eq16", "--t", "30"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn compare_qae_slope_ratio() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let args = [
        "compare",
        "--classifier",
        "ssc",
        "--estimator",
        "qae",
        "--t",
        "1..7",
        "--reps",
        "2000",
        "--seed",
        "42",
    ];
    let o = qkc(&[&args[..], &["--out", d, "--svg"]].concat());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let ratio = field(&stdout(&o), "slope ratio");
    assert!((1.8..=2.6).contains(&ratio), "ratio {ratio}");

    let stem = dir.path().join("compare-ssc-1-ssc-qae-seed42");
    let csv = fs::read_to_string(stem.with_extension("csv")).unwrap();
    assert!(csv.starts_with("samples,err_p81_qae,err_min_qae,err_p81_baseline,bound\n"));
    assert_eq!(csv.lines().count(), 8);
    let fit: serde_json::Value = serde_json::from_slice(
        &fs::read(dir.path().join("compare-ssc-1-ssc-qae-seed42.fit.json")).unwrap(),
    )
    .unwrap();
    assert!((fit["slope_ratio"].as_f64().unwrap() - ratio).abs() < 1e-4);
    let svg = fs::read_to_string(stem.with_extension("svg")).unwrap();
    assert_well_formed(&svg);

    // same seed, no SVG: identical CSV bytes
    let dir2 = tempfile::tempdir().unwrap();
    let o = qkc(&[&args[..], &["--out", dir2.path().to_str().unwrap()]].concat());
    assert!(o.status.success());
    let csv2 = fs::read_to_string(dir2.path().join("compare-ssc-1-ssc-qae-seed42.csv")).unwrap();
    assert_eq!(csv, csv2);
    assert!(!dir2
        .path()
        .join("compare-ssc-1-ssc-qae-seed42.svg")
        .exists());
}

#[test]
fn compare_mlqae_slope_ratio() {
    let o = qkc(&[
        "compare",
        "--classifier",
        "ssc",
        "--estimator",
        "mlqae",
        "--reps",
        "1000",
    ]);
    assert!(o.status.success());
    let ratio = field(&stdout(&o), "slope ratio");
    assert!((1.5..=2.2).contains(&ratio), "ratio {ratio}");
}

#[test]
fn distribution_expectations() {
    let o = qkc(&[
        "distribution",
        "--data",
        "builtin:eq16",
        "--classifier",
        "ssc",
        "--t",
        "2..3",
    ]);
    assert!(o.status.success());
    let out = stdout(&o);
    let exps: Vec<f64> = out
        .lines()
        .filter_map(|l| l.split_once("expectation ").map(|(_, r)| r))
        .map(|r| r.split_whitespace().next().unwrap().parse().unwrap())
        .collect();
    assert!((exps[0] - 0.5140).abs() <= 1e-3, "{}", exps[0]);
    // Fejér-kernel sum for a = 0.654068 at t = 3
    let theta = 0.654068f64.sqrt().asin();
    let n = 8.0;
    let fejer = |d: f64| {
        let d = d - d.round();
        if d.abs() < 1e-13 {
            1.0
        } else {
            ((std::f64::consts::PI * n * d).sin() / (n * (std::f64::consts::PI * d).sin())).powi(2)
        }
    };
    let expected: f64 = (0..8)
        .map(|y| {
            let p = 0.5 * fejer(theta / std::f64::consts::PI - y as f64 / n)
                + 0.5 * fejer(-theta / std::f64::consts::PI - y as f64 / n);
            p * (std::f64::consts::PI * y as f64 / n).sin().powi(2)
        })
        .sum();
    assert!(
        (exps[1] - expected).abs() <= 1e-5,
        "{} vs {expected}",
        exps[1]
    );
}

#[test]
fn distribution_of_zero_amplitude() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let o = qkc(&[
        "distribution",
        "--data",
        "synthetic:0",
        "--t",
        "3",
        "--out",
        d,
        "--svg",
    ]);
    assert!(o.status.success());
    let csv = fs::read_to_string(dir.path().join("distribution-synthetic-0-t3-3.t3.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows.len(), 2);
    let cols: Vec<&str> = rows[1].split(',').collect();
    assert_eq!(cols[0], "0");
    assert!((cols[2].parse::<f64>().unwrap() - 1.0).abs() <= 1e-12);
    assert_well_formed(
        &fs::read_to_string(dir.path().join("distribution-synthetic-0-t3-3.t3.svg")).unwrap(),
    );
}

#[test]
fn inherent_small_run() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "inherent",
        "--data",
        iris().to_str().unwrap(),
        "--features",
        "sepal_length,1",
        "--classes",
        "setosa,versicolor",
        "--train",
        "2,4",
        "--reps",
        "300",
        "--warmup",
        "100",
        "--out",
        dir.path().to_str().unwrap(),
        "--svg",
    ]
    .map(String::from);
    let args: Vec<&str> = args.iter().map(String::as_str).collect();
    let o = qkc(&args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    assert_eq!(out.lines().filter(|l| l.starts_with("M = ")).count(), 2);
    let csv =
        fs::read_to_string(dir.path().join("inherent-ssc-setosa-versicolor-seed42.csv")).unwrap();
    assert!(csv.starts_with("train_count,iteration,error_rate"));
    assert_well_formed(
        &fs::read_to_string(dir.path().join("inherent-ssc-setosa-versicolor-seed42.svg")).unwrap(),
    );

    let o = qkc(&[
        "inherent",
        "--data",
        iris().to_str().unwrap(),
        "--classes",
        "setosa",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn svg_requires_out() {
    let o = qkc(&["classify", "--data", "builtin:eq16", "--svg"]);
    assert_eq!(o.status.code(), Some(2));
}

/// Tag balance check standing in for an XML parser.
fn assert_well_formed(svg: &str) {
    assert!(svg.starts_with("<?xml"));
    let mut stack: Vec<String> = Vec::new();
    let mut rest = svg;
    while let Some(start) = rest.find('<') {
        let end = rest[start..].find('>').expect("unterminated tag") + start;
        let tag = &rest[start + 1..end];
        rest = &rest[end + 1..];
        if tag.starts_with('?') || tag.ends_with('/') {
            continue;
        }
        let name = tag
            .trim_start_matches('/')
            .split_whitespace()
            .next()
            .unwrap()
            .to_string();
        if tag.starts_with('/') {
            assert_eq!(
                stack.pop().as_deref(),
                Some(name.as_str()),
                "mismatched </{name}>"
            );
        } else {
            stack.push(name);
        }
    }
    assert!(stack.is_empty(), "unclosed {stack:?}");
    assert!(!svg.contains("NaN"));
}
