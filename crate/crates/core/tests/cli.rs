use std::io::Write;
use std::process::Command;

use asyncsi::cli::{run, EXIT_CERTIFICATION, EXIT_GUARD, EXIT_OK, EXIT_SPEC};

const XOR_SPEC: &str = "nx = 2\nns = 2\nny = 2\nstate_prior = [0.5, 0.5]\nw = [[1.0, 0.0], [0.0, 1.0], [0.0, 1.0], [1.0, 0.0]]\nd_min = 0\nd_max = 1\n";

fn spec_file(text: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::Builder::new().suffix(".toml").tempfile().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

fn call(args: &[&str]) -> (i32, Vec<csv::StringRecord>, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(std::iter::once("asyncsi").chain(args.iter().copied()), &mut out, &mut err);
    let rows = csv::Reader::from_reader(out.as_slice()).records().map(Result::unwrap).collect();
    (code, rows, String::from_utf8(err).unwrap())
}

fn header(args: &[&str]) -> Vec<String> {
    let mut out = Vec::new();
    run(std::iter::once("asyncsi").chain(args.iter().copied()), &mut out, &mut Vec::new());
    let mut r = csv::Reader::from_reader(out.as_slice());
    r.headers().unwrap().iter().map(str::to_string).collect()
}

#[test]
fn acsitr_simulation_from_spec_file() {
    let spec = spec_file(XOR_SPEC);
    let path = spec.path().to_str().unwrap();
    let args = ["simulate", "acsitr", "--channel", path, "--n", "48", "--rate", "0.8", "--trials", "2000", "--seed", "7"];
    let (code, rows, err) = call(&args);
    assert_eq!(code, EXIT_OK, "{err}");
    let all = rows.iter().find(|r| &r[4] == "all").unwrap();
    let err_rate: f64 = all[7].parse().unwrap();
    assert!(err_rate < 0.05, "{err_rate}");
    assert!(all[13].contains("strategy=solver"));
    // the echoed command reproduces the run
    let again: Vec<&str> = all[14].split(' ').collect();
    assert_eq!(call(&again).1, rows);
}

#[test]
fn certify_acsitr_on_spec_file() {
    let spec = spec_file(XOR_SPEC);
    let (code, rows, err) = call(&["certify", "--quantity", "acsitr", "--channel", spec.path().to_str().unwrap()]);
    assert_eq!(code, EXIT_OK, "{err}");
    assert_eq!(&rows[0][6], "certified");
}

#[test]
fn oversized_certification_is_a_guard_failure() {
    let spec = spec_file(XOR_SPEC);
    let (code, rows, _) = call(&[
        "certify", "--quantity", "acsitr", "--channel", spec.path().to_str().unwrap(), "--delays", "-4..4", "--resolution", "64",
    ]);
    assert_eq!(code, EXIT_GUARD);
    assert_eq!(&rows[0][6], "uncertified");
    assert_ne!(code, EXIT_CERTIFICATION);
}

#[test]
fn malformed_spec_exits_with_spec_code() {
    let spec = spec_file("nx = 2\nns = 2\n");
    let (code, rows, err) = call(&["rates", "--channel", spec.path().to_str().unwrap(), "--quantity", "no_si"]);
    assert_eq!(code, EXIT_SPEC);
    assert!(rows.is_empty());
    assert!(err.contains("channel spec"));
}

#[test]
fn rates_rows_for_the_builtin_channel() {
    let (code, rows, _) = call(&["rates", "--channel", "bsagp:p=0.5", "--quantity", "no_si,closed_form,acsitr"]);
    assert_eq!(code, EXIT_OK);
    let value = |i: usize| rows[i][3].parse::<f64>().unwrap();
    assert!(value(0).abs() < 1e-6);
    assert_eq!(value(1), 0.5);
    assert!((value(2) - 1.0).abs() < 1e-3);
    assert_eq!(
        header(&["rates", "--channel", "bsagp:p=0.5", "--quantity", "closed_form"]),
        asyncsi::cli::RATES_HEADER.to_vec()
    );
}

#[test]
fn fig4_default_grid() {
    let (code, rows, _) = call(&["fig4"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(rows.len(), 9);
    for r in &rows {
        let v: Vec<f64> = (0..4).map(|i| r[i].parse().unwrap()).collect();
        assert!(v[1] < v[2] && v[2] < v[3]);
    }
    let (_, half, _) = call(&["fig4", "--p", "0.5"]);
    let v: Vec<f64> = (1..4).map(|i| half[0][i].parse().unwrap()).collect();
    assert!(v[0].abs() < 1e-9 && v[1] == 0.5 && v[2] == 1.0);
}

#[test]
fn output_file_and_binary_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("rows.csv");
    let bin = env!("CARGO_BIN_EXE_asyncsi");
    let status = Command::new(bin)
        .args(["--out", out.to_str().unwrap(), "rates", "--channel", "bsagp:p=0.25", "--quantity", "closed_form"])
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("quantity,"));
    assert!(text.contains("closed_form,bsagp:p=0.25,0..1,0.52278"));

    let status = Command::new(bin)
        .args(["rates", "--channel", "bsagp:p=2", "--quantity", "gp"])
        .output()
        .unwrap()
        .status;
    assert_eq!(status.code(), Some(EXIT_SPEC));
    let status = Command::new(bin)
        .env("ASYNCSI_THREADS", "1")
        .args(["simulate", "bsagp", "--p", "0.5", "--n", "96", "--rate", "0.3", "--trials", "5", "--seed", "1", "--mode", "explicit"])
        .output()
        .unwrap()
        .status;
    assert_eq!(status.code(), Some(EXIT_GUARD));
}

#[test]
fn simulation_requires_a_seed() {
    let (code, _, err) = call(&["simulate", "bsagp", "--p", "0.5", "--n", "16", "--rate", "0.2", "--trials", "10"]);
    assert_eq!(code, EXIT_SPEC);
    assert!(err.contains("--seed"));
}
