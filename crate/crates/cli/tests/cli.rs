use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gmmcodec"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn generate(dir: &Path, extra: &[&str]) -> String {
    let input = path(dir, "in.json");
    let mut args = vec![
        "generate",
        "--symbols",
        "3000",
        "--alphabet",
        "64",
        "--out",
        &input,
    ];
    args.extend_from_slice(extra);
    let o = run(&args);
    assert!(o.status.success(), "{}", stderr(&o));
    input
}

fn json_symbols(file: &str) -> Vec<i64> {
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(file).unwrap()).unwrap();
    v["symbols"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s.as_i64().unwrap())
        .collect()
}

fn decoded_symbols(file: &str) -> Vec<i64> {
    fs::read_to_string(file)
        .unwrap()
        .lines()
        .map(|l| l.parse().unwrap())
        .collect()
}

#[test]
fn encode_decode_verify() {
    let dir = tempfile::tempdir().unwrap();
    for approx in ["exact", "polya", "as", "logistic"] {
        let input = generate(dir.path(), &["--approx", approx, "--k", "2"]);
        let stream = path(dir.path(), "s.fgmm");
        let out = path(dir.path(), "out.txt");
        for codec in ["flash", "table"] {
            let o = run(&["encode", "--in", &input, "--out", &stream, "--codec", codec]);
            assert!(o.status.success(), "{}", stderr(&o));
            let o = run(&["decode", "--in", &stream, "--out", &out, "--codec", codec]);
            assert!(o.status.success(), "{}", stderr(&o));
            assert_eq!(decoded_symbols(&out), json_symbols(&input));
            let o = run(&["verify", "--in", &stream, "--codec", codec]);
            assert!(o.status.success(), "{}", stderr(&o));
            assert!(String::from_utf8_lossy(&o.stdout).starts_with("ok: 3000 symbols"));
        }
    }
}

#[test]
fn flash_and_table_files_are_identical() {
    let dir = tempfile::tempdir().unwrap();
    let input = generate(dir.path(), &[]);
    let a = path(dir.path(), "a.fgmm");
    let b = path(dir.path(), "b.fgmm");
    assert!(run(&["encode", "--in", &input, "--out", &a])
        .status
        .success());
    assert!(
        run(&["encode", "--in", &input, "--out", &b, "--codec", "table"])
            .status
            .success()
    );
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn truncated_stream_fails_verify() {
    let dir = tempfile::tempdir().unwrap();
    let input = generate(dir.path(), &[]);
    let stream = path(dir.path(), "s.fgmm");
    assert!(run(&["encode", "--in", &input, "--out", &stream])
        .status
        .success());
    let bytes = fs::read(&stream).unwrap();
    fs::write(&stream, &bytes[..bytes.len() - 10]).unwrap();
    let o = run(&["verify", "--in", &stream]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("truncated"), "{}", stderr(&o));
}

#[test]
fn gsm_files_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let input = path(dir.path(), "in.json");
    // Narrow means and wide alphabet keep every residual inside the rows.
    let text = r#"{"alphabet":{"y_min":-100,"y_max":100,"precision_bits":16},
        "approximator":"exact","symbols":[0,3,-2,7],
        "params":[{"weights":[1],"means":[0.2],"stddevs":[1.0]},
                  {"weights":[1],"means":[2.6],"stddevs":[0.5]},
                  {"weights":[1],"means":[-1.0],"stddevs":[3.0]},
                  {"weights":[1],"means":[5.0],"stddevs":[10.0]}]}"#;
    fs::write(&input, text).unwrap();
    let stream = path(dir.path(), "s.fgmm");
    let out = path(dir.path(), "out.txt");
    let o = run(&["encode", "--in", &input, "--out", &stream, "--codec", "gsm"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(
        run(&["decode", "--in", &stream, "--out", &out, "--codec", "gsm"])
            .status
            .success()
    );
    assert_eq!(decoded_symbols(&out), [0, 3, -2, 7]);
    assert!(run(&["verify", "--in", &stream, "--codec", "gsm"])
        .status
        .success());
}

#[test]
fn accuracy_csv() {
    let o = run(&["accuracy"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("kind,x_min,x_max,step,max_abs_err,mean_abs_err")
    );
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 4);
    let a_s = rows.iter().find(|r| r[0] == "as").unwrap();
    assert!(a_s[4].parse::<f64>().unwrap() <= 7.5e-8);
}

#[test]
fn bench_report() {
    let o = run(&[
        "bench",
        "--symbols",
        "2000",
        "--repeats",
        "1",
        "--alphabet",
        "64",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["codecs"].as_array().unwrap().len(), 3);
    assert_eq!(v["equivalence"]["flash_table_payload_equal"], true);
    assert_eq!(v["equivalence"]["roundtrip_ok"], true);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["bench", "--k", "5"]).status.code(), Some(2));
    assert_eq!(run(&["bench", "--alphabet", "1"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["accuracy", "--step", "0"]).status.code(), Some(2));
}
