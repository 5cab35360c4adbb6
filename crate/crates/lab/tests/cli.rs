use std::path::Path;
use std::process::{Command, Output};

use semirandom_core::graph::SimpleGraph;
use semirandom_core::lower_bound::{eps_final, xi};
use semirandom_core::strategy::verify_hamilton_cycle;
use semirandom_lab::experiments::UpperRow;
use semirandom_lab::output::{csv_config, read_csv};
use semirandom_lab::trace::{read_trace, replay};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_semirandom"));
    c.env_remove("SEMIRANDOM_OUT_DIR");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn trailer(text: &str, key: &str) -> f64 {
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("# {key}=")))
        .unwrap()
        .parse()
        .unwrap()
}

#[test]
fn problematic_ode_reaches_xi_at_ln2() {
    let o = run(&["ode", "--system", "problematic", "--at", "0.5,ln2"]);
    assert!(o.status.success());
    let text = stdout(&o);
    #[derive(serde::Deserialize)]
    struct Row {
        x: f64,
        x111: f64,
        x111_closed_form: f64,
    }
    let rows: Vec<Row> = read_csv(&text).unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[1].x, std::f64::consts::LN_2);
    let x111 = rows[1].x111;
    assert!((x111 - rows[1].x111_closed_form).abs() < 1e-10);
    assert!((x111 - xi()).abs() < 1e-10);
    assert_eq!(csv_config(&text).unwrap()["system"], "problematic");
}

#[test]
fn lowerbound_trailer_holds_eps_final() {
    let o = run(&["lowerbound", "--points", "5"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(trailer(&text, "eps_final"), eps_final());
    #[derive(serde::Deserialize)]
    struct Row {
        total: f64,
    }
    let rows: Vec<Row> = read_csv(&text).unwrap();
    assert_eq!(rows.len(), 5);
    assert_eq!(rows[4].total, eps_final());
}

#[test]
fn usage_errors_exit_with_1() {
    for args in [
        &["nope"][..],
        &["simulate-upper"],
        &["simulate-upper", "--n", "100", "--seeds", "5..2"],
        &["simulate-upper", "--n", "100", "--seeds", "1,1"],
        &["simulate-lower", "--n", "100", "--delta", "1.5"],
        &["oracle", "--random", "3", "--graph", "g.txt"],
        &["ode", "--system", "problematic", "--at", "-1"],
        &["lowerbound", "--lo", "0.5", "--hi", "0.1"],
    ] {
        let o = run(args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
}

#[test]
fn help_lists_csv_columns() {
    let text = stdout(&run(&["simulate-upper", "--help"]));
    for col in [
        "tau4_over_n",
        "v0_over_n",
        "completion_rounds",
        "min_end_set",
        "hamilton_verified",
    ] {
        assert!(text.contains(col), "{col}");
    }
    let text = stdout(&run(&["simulate-lower", "--help"]));
    assert!(text.contains("x111_over_n"));
}

#[test]
fn property_p_gate_sets_the_exit_code() {
    let o = run(&["verify-p", "--budget", "0.07", "--starts", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(doc["report"]["best_value"].as_f64().unwrap() < 0.0);
    assert_eq!(doc["config"]["optimizer"]["budget"], 0.07);

    let dir = tempfile::tempdir().unwrap();
    let best = dir.path().join("best.json");
    let o = run(&[
        "verify-p",
        "--budget",
        "0.06",
        "--starts",
        "4",
        "--save-best",
        best.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["report"]["nonnegative_found"], true);

    // The saved point warm-starts another run at the same budget.
    let o = run(&[
        "verify-p",
        "--budget",
        "0.06",
        "--starts",
        "1",
        "--warm-start",
        best.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn upper_simulation_csv_and_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin()
        .args([
            "simulate-upper",
            "--n",
            "3000",
            "--seeds",
            "1..3",
            "--trace",
            "--cycles",
            "-o",
            "up.csv",
        ])
        .env("SEMIRANDOM_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(dir.path().join("up.csv")).unwrap();
    let cfg = csv_config(&text).unwrap();
    assert_eq!(cfg["n"], 3000);
    assert_eq!(cfg["command"], "simulate-upper");
    let rows: Vec<UpperRow> = read_csv(&text).unwrap();
    assert_eq!(rows.iter().map(|r| r.seed).collect::<Vec<_>>(), [1, 2, 3]);
    for r in &rows {
        assert!(r.success && r.hamilton_verified);
        assert_eq!(r.tau4_over_n, Some(r.tau4.unwrap() as f64 / 3000.0));
        check_artifacts(dir.path(), r.seed, r.edges_total);
    }
}

fn check_artifacts(dir: &Path, seed: u64, edges: u64) {
    let trace = std::fs::read(dir.join(format!("trace_seed{seed}.jsonl"))).unwrap();
    let recs = read_trace(trace.as_slice()).unwrap();
    assert_eq!(recs.len() as u64, edges);
    let st = replay(3000, &recs).unwrap();
    let cycle: Vec<u32> = std::fs::read_to_string(dir.join(format!("cycle_seed{seed}.txt")))
        .unwrap()
        .split_whitespace()
        .map(|s| s.parse::<u32>().unwrap() - 1)
        .collect();
    assert!(verify_hamilton_cycle(&cycle, &st));
}

#[test]
fn identical_configs_give_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let go = |workers: &str, name: &str| {
        let o = run(&[
            "simulate-lower",
            "--n",
            "20000",
            "--seeds",
            "3,7",
            "--delta",
            "0.1",
            "--workers",
            workers,
            "--out-dir",
            dir.path().to_str().unwrap(),
            "-o",
            name,
        ]);
        assert!(o.status.success());
        std::fs::read(dir.path().join(name)).unwrap()
    };
    let a = go("1", "a.csv");
    let b = go("4", "b.csv");
    assert_eq!(a, b);
    let up = |name: &str| {
        let o = run(&[
            "simulate-upper",
            "--n",
            "2000",
            "--seeds",
            "4",
            "--format",
            "json",
            "--out-dir",
            dir.path().to_str().unwrap(),
            "-o",
            name,
        ]);
        assert!(o.status.success());
        std::fs::read(dir.path().join(name)).unwrap()
    };
    assert_eq!(up("u1.json"), up("u2.json"));
}

#[test]
fn oracle_on_an_edge_list() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("petersen.txt");
    let outer: Vec<(u32, u32)> = (0..5).map(|i| (i, (i + 1) % 5)).collect();
    let spokes: Vec<(u32, u32)> = (0..5).map(|i| (i, i + 5)).collect();
    let inner: Vec<(u32, u32)> = (0..5).map(|i| (5 + i, 5 + (i + 2) % 5)).collect();
    let edges: Vec<_> = outer.into_iter().chain(spokes).chain(inner).collect();
    let g = SimpleGraph::from_edges(10, &edges).unwrap();
    let mut buf = Vec::new();
    semirandom_lab::edgelist::write_edge_list(&mut buf, &g).unwrap();
    std::fs::write(&path, buf).unwrap();
    let o = run(&["oracle", "--graph", path.to_str().unwrap()]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let rep = &doc["report"];
    assert_eq!(rep["edges"], 15);
    assert_eq!(rep["kappa"], 10);
    assert_eq!(rep["kappa_equals_tutte_berge"], true);

    let o = run(&["oracle", "--random", "40", "--seed", "5", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(trailer(&stdout(&o), "checked"), 40.0);
}
