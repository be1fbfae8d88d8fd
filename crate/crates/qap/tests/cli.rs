//! Black-box tests for the `qap` binary: exit codes, the JSON report schema
//! and the bench CSV schema.

use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn qap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qap"))
        .args(args)
        .output()
        .expect("spawn qap binary")
}

fn stdout_json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is one JSON object")
}

#[test]
fn solve_report_schema_and_determinism() {
    let args = ["solve", "--gen", "n=20,seed=7", "--iters", "20000", "--seed", "3"];
    let report = stdout_json(&qap(&args));
    for key in ["n", "iters", "mode", "workers", "best_cost", "best_perm", "acceptance_rate", "wall_time"] {
        assert!(report.get(key).is_some(), "report missing {key}");
    }
    assert_eq!(report["n"], 20);
    assert_eq!(report["iters"], 20000);
    assert_eq!(report["mode"], "delta");
    assert_eq!(report["best_perm"].as_array().unwrap().len(), 20);
    let rate = report["acceptance_rate"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&rate));

    // Same invocation, same report, except the wall clock.
    let again = stdout_json(&qap(&args));
    for key in ["best_cost", "best_perm", "acceptance_rate"] {
        assert_eq!(report[key], again[key], "{key} not deterministic");
    }
}

#[test]
fn parallel_mode_matches_sequential_results() {
    let base = ["solve", "--gen", "n=30,seed=2", "--iters", "50000"];
    let seq = stdout_json(&qap(&[&base[..], &["--mode", "delta-seq"]].concat()));
    let par = stdout_json(&qap(&[&base[..], &["--mode", "delta-par", "--workers", "4"]].concat()));
    assert_eq!(par["workers"], 4);
    assert_eq!(seq["best_cost"], par["best_cost"]);
    assert_eq!(seq["best_perm"], par["best_perm"]);
    assert_eq!(seq["acceptance_rate"], par["acceptance_rate"]);
}

#[test]
fn generate_then_solve_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t15.dat");
    let out = qap(&["generate", "--n", "15", "--seed", "9", "--output", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(path.exists());

    let from_file = stdout_json(&qap(&[
        "solve", "--instance", path.to_str().unwrap(), "--iters", "10000",
    ]));
    let from_gen = stdout_json(&qap(&["solve", "--gen", "n=15,seed=9", "--iters", "10000"]));
    assert_eq!(from_file["best_cost"], from_gen["best_cost"]);
}

#[test]
fn exit_codes() {
    // Usage errors.
    assert_eq!(qap(&[]).status.code(), Some(1));
    assert_eq!(qap(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(qap(&["solve", "--iters", "10"]).status.code(), Some(1));
    assert_eq!(
        qap(&["solve", "--gen", "n=5", "--iters", "10", "--mode", "psychic"]).status.code(),
        Some(1)
    );
    // Help is not an error.
    assert_eq!(qap(&["--help"]).status.code(), Some(0));

    // I/O and parse errors.
    assert_eq!(
        qap(&["solve", "--instance", "/no/such/file.dat", "--iters", "10"]).status.code(),
        Some(2)
    );
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.dat");
    fs::write(&bad, "3 0 1 2 1 0").unwrap();
    assert_eq!(
        qap(&["solve", "--instance", bad.to_str().unwrap(), "--iters", "10"]).status.code(),
        Some(2)
    );

    // Well-formed but unsupported: asymmetric flow matrix.
    let asym = dir.path().join("asym.dat");
    fs::write(&asym, "2\n0 1\n2 0\n0 3\n3 0\n").unwrap();
    assert_eq!(
        qap(&["solve", "--instance", asym.to_str().unwrap(), "--iters", "10"]).status.code(),
        Some(3)
    );
}

#[test]
fn bench_csv_schema_and_cross_mode_equality() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("bench.csv");
    let out = qap(&[
        "bench",
        "--sizes", "12",
        "--iters", "5000",
        "--seeds", "1,2",
        "--modes", "delta-seq,delta-par",
        "--workers", "2",
        "--output", csv_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));

    let csv = fs::read_to_string(&csv_path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next(),
        Some("n,iters,mode,workers,wall_time_s,best_cost,acceptance_rate,seed")
    );
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    // 1 size x 1 iters x 2 seeds x 2 modes, plus one aggregated speedup row
    // for the non-reference mode.
    assert_eq!(rows.len(), 5);
    for row in &rows {
        assert_eq!(row.len(), 8);
        row[4].parse::<f64>().expect("wall_time_s numeric");
    }
    let cost_of = |mode: &str, seed: &str| {
        rows.iter()
            .find(|r| r[2] == mode && r[7] == seed)
            .map(|r| r[5].to_string())
            .expect("row present")
    };
    for seed in ["1", "2"] {
        assert_eq!(cost_of("delta-seq", seed), cost_of("delta-par", seed));
    }
    assert_eq!(rows.iter().filter(|r| r[2] == "speedup").count(), 1);
}

#[test]
fn bench_multiprocess_agrees_with_in_process() {
    let dir = tempfile::tempdir().unwrap();
    let (one, two) = (dir.path().join("j1.csv"), dir.path().join("j2.csv"));
    let base = [
        "bench", "--sizes", "10", "--iters", "3000", "--seeds", "1",
        "--modes", "scratch,delta-seq", "--reference", "scratch",
    ];
    assert!(qap(&[&base[..], &["--output", one.to_str().unwrap()]].concat()).status.success());
    assert!(qap(&[&base[..], &["--jobs", "2", "--output", two.to_str().unwrap()]].concat())
        .status
        .success());

    // Identical rows up to wall time (column 4).
    let strip = |path: &std::path::Path| -> Vec<String> {
        fs::read_to_string(path)
            .unwrap()
            .lines()
            .map(|l| {
                let mut f: Vec<&str> = l.split(',').collect();
                if f.len() == 8 {
                    f[4] = "-";
                }
                f.join(",")
            })
            .collect()
    };
    assert_eq!(strip(&one), strip(&two));
}
