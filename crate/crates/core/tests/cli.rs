use std::path::Path;
use std::process::{Command, Output};

use cascade_pricer::graph::load_edge_list;

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
        .display()
        .to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cascade-pricer"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn data_lines(text: &str) -> Vec<&str> {
    text.lines().filter(|l| !l.starts_with('#')).collect()
}

#[test]
fn oracle_reports_the_adaptivity_gap() {
    let text = stdout(&run(&[
        "oracle",
        "--graph",
        &fixture("gap6.edges"),
        "--grid",
        "0,1",
    ]));
    assert_eq!(
        data_lines(&text),
        vec!["nonadaptive,adaptive,ratio", "2,2.125,1.0625"]
    );
    assert!(text.starts_with("# cascade-pricer: "));
}

#[test]
fn oracle_budget_exit_code() {
    let out = run(&["oracle", "--pa", "n=40", "m=2"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn missing_model_file_is_named() {
    let out = run(&[
        "run",
        "--pa",
        "n=50",
        "m=2",
        "--model",
        "/nonexistent/buyers.model",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/nonexistent/buyers.model"));
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(run(&["bogus"]).status.code(), Some(2));
    assert_eq!(run(&["run"]).status.code(), Some(2));
    assert_eq!(run(&["generate", "--pa", "n=10"]).status.code(), Some(2));
    assert_eq!(
        run(&["run", "--pa", "n=10", "m=2", "--threads", "0"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn generated_graph_loads_back() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pa.edges");
    let out = run(&[
        "generate",
        "--pa",
        "n=60",
        "m=2",
        "--seed",
        "9",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let loaded = load_edge_list(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(loaded.graph.node_count(), 60);
    assert!(loaded.graph.is_connected());
}

#[test]
fn run_emits_one_row_per_strategy() {
    let text = stdout(&run(&[
        "run",
        "--pa",
        "n=120",
        "m=2",
        "--repeats",
        "2",
        "--trials",
        "20",
    ]));
    let lines = data_lines(&text);
    assert_eq!(lines[0], "strategy,iteration,mean_revenue,stderr");
    assert!(lines[1].starts_with("maxleaf,0,") && lines[2].starts_with("random,0,"));
    assert_eq!(lines.len(), 3);
}

#[test]
fn localsearch_emits_a_curve() {
    let text = stdout(&run(&[
        "localsearch",
        "--pa",
        "n=80",
        "m=2",
        "--repeats",
        "1",
        "--iterations",
        "10",
        "--strategy",
        "random",
    ]));
    let lines = data_lines(&text);
    assert_eq!(lines.len(), 12);
    assert!(lines[11].starts_with("random,10,"));
    assert!(text.contains("# epsilon: paired:2"));
}

#[test]
fn strategy_file_estimate_and_trace() {
    let dir = tempfile::tempdir().unwrap();
    let strategy = dir.path().join("s.txt");
    std::fs::write(&strategy, "1 0\n2 0.5\n3 0.5\n4 1\n5 1\n").unwrap();
    let trace = dir.path().join("trace.txt");
    let text = stdout(&run(&[
        "run",
        "--graph",
        &fixture("gap6.edges"),
        "--strategy-file",
        strategy.to_str().unwrap(),
        "--trials",
        "500",
        "--trace",
        trace.to_str().unwrap(),
        "--trace-trials",
        "2",
    ]));
    let lines = data_lines(&text);
    assert_eq!(lines[0], "trials,mean,stderr");
    assert!(lines[1].starts_with("500,"));
    let dump = std::fs::read_to_string(&trace).unwrap();
    assert!(dump.starts_with("# trial 0\nt=1 offer v=1 price=0\n"));
    assert!(dump.contains("# trial 1\n"));
}

#[test]
fn hardness_report_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let layers = dir.path().join("layers.txt");
    let edges = dir.path().join("instance.edges");
    let text = stdout(&run(&[
        "hardness",
        "--source",
        &fixture("triangle.edges"),
        "--cover",
        "0,1",
        "--layers",
        layers.to_str().unwrap(),
        "--edges",
        edges.to_str().unwrap(),
    ]));
    let row: Vec<&str> = data_lines(&text)[1].split(',').collect();
    assert_eq!(
        &row[..8],
        &["2", "40", "0.125", "127", "true", "true", "2", "0 1"]
    );
    assert_eq!(row[9], "true");
    assert!((row[11].parse::<f64>().unwrap() - (169.0 / 512.0 + 15.0)).abs() < 1e-12);
    let sidecar = std::fs::read_to_string(&layers).unwrap();
    assert_eq!(sidecar.lines().count(), 127);
    assert_eq!(
        load_edge_list(&std::fs::read_to_string(&edges).unwrap())
            .unwrap()
            .graph
            .node_count(),
        127
    );
}

#[test]
fn uncovering_free_set_is_rejected() {
    let out = run(&[
        "hardness",
        "--source",
        &fixture("triangle.edges"),
        "--cover",
        "0",
    ]);
    assert_eq!(out.status.code(), Some(2));
}
