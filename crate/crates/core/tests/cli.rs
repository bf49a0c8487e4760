//! The command-line binary: output formats and exit codes.

use std::process::{Command, Output};

use spiked_osc::matrix::HamiltonianMatrix;
use spiked_osc::solver::SpectrumResult;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spiked-osc"))
        .args(args)
        .env("SPIKED_OSC_THREADS", "1")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn solve_text_and_json() {
    let o = run(&[
        "solve", "--alpha", "2", "--lambda", "1", "--A", "opt", "--dim", "1",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("E0 = 4.2360680"), "{}", stdout(&o));
    let o = run(&[
        "solve", "--alpha", "4", "--lambda", "1000", "--opt-A", "--dim", "5", "--format", "json",
    ]);
    let r: SpectrumResult = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r.d_used, 5);
    assert!(r.optimal_a.is_some());
}

#[test]
fn solve_csv_has_header() {
    let o = run(&[
        "solve", "--alpha", "4", "--lambda", "1000", "--A", "opt", "--dim", "4", "--levels", "2",
        "--format", "csv",
    ]);
    let text = stdout(&o);
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(
        rdr.headers().unwrap().iter().collect::<Vec<_>>(),
        ["level", "energy", "A", "D", "converged_digits"]
    );
    assert_eq!(rdr.records().count(), 2);
}

#[test]
fn matrix_dumps_round_trip() {
    let args = [
        "matrix", "--alpha", "1.5", "--lambda", "2", "--A", "0.7", "--dim", "4",
    ];
    let text = stdout(&run(&args));
    let rows: Vec<Vec<f64>> = text
        .lines()
        .map(|l| l.split_whitespace().map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 4);
    let json = stdout(&run(&[&args[..], &["--format", "json"]].concat()));
    let h: HamiltonianMatrix = serde_json::from_str(&json).unwrap();
    for (i, row) in rows.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            assert_eq!(v, h.get(i, j));
        }
    }
    let value: serde_json::Value = serde_json::from_str(&json).unwrap();
    for key in ["dim", "entries", "ctx", "model"] {
        assert!(value.get(key).is_some(), "{key}");
    }
}

#[test]
fn oracle_and_converge() {
    let o = run(&[
        "oracle", "--alpha", "4", "--lambda", "1000", "--format", "json",
    ]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["energy"].as_f64().unwrap() - 21.369462).abs() < 5e-6);
    let o = run(&[
        "converge", "--alpha", "4", "--lambda", "10", "--dim", "40", "--format", "json",
    ]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["regime"], "fast");
    assert!(v["sum_closed"].is_number());
}

#[test]
fn table_lists_published_values() {
    let o = run(&["table", "--table", "I", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 20);
    assert!(rdr.headers().unwrap().iter().any(|h| h == "published"));
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["solve", "--alpha", "4"]).status.code(), Some(1));
    assert_eq!(run(&["bogus"]).status.code(), Some(1));
    assert_eq!(run(&["table", "--table", "IX"]).status.code(), Some(1));
    assert_eq!(
        run(&["solve", "--alpha", "4", "--lambda", "1", "--A", "abc"])
            .status
            .code(),
        Some(1)
    );
    let o = run(&[
        "solve", "--alpha", "4", "--lambda", "1", "--A", "0.2", "--dim", "3",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("domain"));
    let o = run(&[
        "solve", "--alpha", "4", "--lambda", "0.01", "--A", "opt", "--digits", "6", "--dim", "20",
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}
