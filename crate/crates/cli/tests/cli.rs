use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn nonback(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nonback"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn certify_k4_passes() {
    let out = nonback(&["certify", "--generate", "complete:4"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(doc["command"], "certify");
    assert_eq!(doc["verdict"], "pass");
    assert_eq!(doc["results"]["theorem1_holds"], true);
    assert_eq!(
        doc["results"]["corollary_norms"].as_array().unwrap().len(),
        12
    );
    assert_eq!(doc["graph_summary"]["vertices"], 4);
}

#[test]
fn certify_triangle_is_an_input_error() {
    let out = nonback(&["certify", "--generate", "cycle:3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("min degree"));
}

#[test]
fn det_check_triangle_at_2i() {
    let out = nonback(&["det-check", "--generate", "cycle:3", "--z", "2i"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    let reports = doc["results"]["reports"].as_array().unwrap();
    let names: Vec<&str> = reports
        .iter()
        .map(|r| r["identity"].as_str().unwrap())
        .collect();
    assert_eq!(names, ["thm13", "detK", "intertwining"]);
    for r in reports {
        assert_eq!(r["passed"], true);
    }
    assert!(reports[0]["max_rel_error"].as_f64().unwrap() < 1e-8);
}

#[test]
fn det_check_with_weights_file() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("k4.txt");
    fs::write(&graph, "0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n").unwrap();
    let weights = dir.path().join("w.json");
    fs::write(
        &weights,
        r#"{"p": [[0,1,0.5],[0,2,1.5],[0,3,2.0],[1,2,0.7],[1,3,1.1],[2,3,0.9]], "W": [0.3,-0.2,0.0,1.0]}"#,
    )
    .unwrap();
    let out = nonback(&[
        "det-check",
        "--graph",
        graph.to_str().unwrap(),
        "--weights",
        weights.to_str().unwrap(),
        "--z",
        "1+i,-1.3+0.7i",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let doc = json(&out);
    let weighted = doc["results"]["reports"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|r| r["identity"] == "thm13_weighted")
        .count();
    assert_eq!(weighted, 2);
}

#[test]
fn impossible_tolerance_is_a_verification_failure() {
    let out = nonback(&[
        "det-check",
        "--generate",
        "complete:4",
        "--z",
        "1+i",
        "--tol",
        "1e-300",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["verdict"], "fail");
    assert!(String::from_utf8_lossy(&out.stderr).contains("worst sample"));
}

#[test]
fn lower_half_plane_and_bad_input_exit_2() {
    let out = nonback(&["zeta", "--generate", "cycle:3", "--z", "1-1i"]);
    assert_eq!(out.status.code(), Some(2));
    let out = nonback(&["zeta", "--generate", "cycle:3", "--z", "one+i"]);
    assert_eq!(out.status.code(), Some(2));
    let out = nonback(&["analyze", "--graph", "/nonexistent/graph.txt"]);
    assert_eq!(out.status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("loop.txt");
    fs::write(&graph, "0 1\n1 1\n").unwrap();
    let out = nonback(&["analyze", "--graph", graph.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn non_convergence_exits_3() {
    let out = nonback(&["zeta", "--generate", "cycle:3", "--z", "0.5+1e-9i"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn generate_round_trips_through_analyze() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.txt");
    let out = nonback(&[
        "generate",
        "--generate",
        "random_regular:10:3",
        "--seed",
        "7",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["results"]["edge_list"], path.to_str().unwrap());

    let out = nonback(&["analyze", "--graph", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(doc["graph_summary"]["edges"], 15);
    assert_eq!(doc["results"]["spectra"]["B"].as_array().unwrap().len(), 30);
    let top = &doc["results"]["spectra"]["A"][0];
    assert!((top[0].as_f64().unwrap() - 3.0).abs() < 1e-9);

    // Same seed, same graph.
    let again = nonback(&[
        "generate",
        "--generate",
        "random_regular:10:3",
        "--seed",
        "7",
    ]);
    assert_eq!(
        String::from_utf8(again.stdout).unwrap(),
        fs::read_to_string(&path).unwrap()
    );
}

#[test]
fn ihara_csv_has_one_row_per_sample() {
    let out = nonback(&[
        "ihara-check",
        "--generate",
        "petersen",
        "--samples",
        "7",
        "--format",
        "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    // header + 7 general + 7 regular
    assert_eq!(lines.len(), 15);
    assert!(lines[0].starts_with("command,identity,point_re"));
    assert!(lines[1..].iter().all(|l| l.ends_with(",pass")));
}

#[test]
fn zeta_and_decompose_reports() {
    let out = nonback(&["zeta", "--generate", "complete:4", "--z", "2i"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    let field = &doc["results"]["fields"][0];
    assert_eq!(field["herglotz_ok"], true);
    assert_eq!(field["directed_edges"].as_array().unwrap().len(), 12);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.csv");
    let out = nonback(&[
        "decompose",
        "--generate",
        "petersen",
        "--format",
        "csv",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = fs::read_to_string(path).unwrap();
    // Petersen: |E| = 15, |V| = 10.
    assert!(text.contains("decompose,dim_h,11"));
    assert!(text.trim_end().ends_with("decompose,verdict,pass"));
}
