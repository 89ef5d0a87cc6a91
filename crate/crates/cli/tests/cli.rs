//! End-to-end tests of the `crn` binary: exit codes, report schema and
//! determinism, simulation goldens, and plot output.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_crn"))
}

fn networks() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../networks")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn analyze_figure2_reports_expected_structure() {
    let path = networks().join("figure2.crn");
    let out = run(&["analyze", path.to_str().unwrap()]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("delta = 1"));
    assert!(text.contains("weakly reversible: false"));
    assert!(text.contains("consistent: no"));
    assert!(text.contains("conservative: yes"));
    assert!(text.contains("weak extinction guaranteed: true"));
}

#[test]
fn analyze_triangle_is_consistent_without_certificate_of_infeasibility() {
    let path = networks().join("triangle.crn");
    let out = run(&["analyze", path.to_str().unwrap()]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("consistent: yes"));
    assert!(text.contains("lambda") || text.contains("[\"1\", \"1\", \"1\"]"));
    assert!(text.contains("no linear Lyapunov function"));
}

#[test]
fn analyze_json_is_canonical_and_deterministic() {
    let path = networks().join("figure2.crn");
    let a = run(&["analyze", path.to_str().unwrap(), "--json"]);
    let b = run(&["analyze", path.to_str().unwrap(), "--json"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout, "reports must be byte-identical");

    // Key order is part of the contract; check it on the raw bytes since
    // parsing into a Value re-sorts keys.
    let raw = stdout(&a);
    let keys = [
        "\"network\"",
        "\"graph\"",
        "\"deficiency\"",
        "\"consistency\"",
        "\"conservative\"",
        "\"lyapunov\"",
        "\"extinction\"",
    ];
    let positions: Vec<usize> = keys
        .iter()
        .map(|k| raw.find(k).unwrap_or_else(|| panic!("missing key {k}")))
        .collect();
    assert!(positions.windows(2).all(|p| p[0] < p[1]), "{positions:?}");

    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["deficiency"]["deficiency"], 1);
    assert_eq!(v["conservative"]["c"][0], "1");
    assert_eq!(v["graph"]["weakly_reversible"], false);
}

#[test]
fn malformed_file_exits_2_with_position() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.crn");
    std::fs::write(&path, "X + -> Y\n").unwrap();
    let out = run(&["analyze", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr).into_owned();
    assert!(err.contains("1:5"), "diagnostic position missing: {err}");
}

#[test]
fn missing_file_exits_2() {
    let out = run(&["analyze", "/nonexistent/net.crn"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn simulate_figure2_converges_and_reports_drift() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("out.csv");
    let path = networks().join("figure2.crn");
    let out = run(&[
        "simulate",
        path.to_str().unwrap(),
        "--x0",
        "0.4,0.3,0.3",
        "--t-end",
        "200",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("final state"));
    assert!(text.contains("conservation drift"));

    let data = std::fs::read_to_string(&csv).unwrap();
    let last = data.lines().last().unwrap();
    let fields: Vec<f64> = last.split(',').map(|f| f.parse().unwrap()).collect();
    assert!((fields[1] - 1.0).abs() < 1e-4);
    assert!(fields[2].abs() < 1e-4);
    assert!(fields[3].abs() < 1e-4);
}

#[test]
fn simulate_rejects_wrong_x0_dimension() {
    let path = networks().join("figure2.crn");
    let out = run(&[
        "simulate",
        path.to_str().unwrap(),
        "--x0",
        "0.4,0.3",
        "--t-end",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn simulate_accepts_uniform_and_per_edge_rates() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("plain.crn");
    std::fs::write(&path, "A -> B\n").unwrap();

    // No rates anywhere: user error.
    let out = run(&["simulate", path.to_str().unwrap(), "--x0", "1,0", "--t-end", "1"]);
    assert_eq!(out.status.code(), Some(2));

    let out = run(&[
        "simulate",
        path.to_str().unwrap(),
        "--x0",
        "1,0",
        "--t-end",
        "1",
        "--k",
        "2.0",
    ]);
    assert!(out.status.success());

    let out = run(&[
        "simulate",
        path.to_str().unwrap(),
        "--x0",
        "1,0",
        "--t-end",
        "1",
        "--k",
        "e0=0.5",
    ]);
    assert!(out.status.success());

    let out = run(&[
        "simulate",
        path.to_str().unwrap(),
        "--x0",
        "1,0",
        "--t-end",
        "1",
        "--k",
        "e7=0.5",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn lyapunov_funnel_prints_construction() {
    let path = networks().join("funnel.crn");
    let out = run(&["lyapunov", path.to_str().unwrap()]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("geometric construction"));
    assert!(text.contains("[2, -1, -1]"));
    assert!(text.contains("terminal scc [1, 2]"));
}

#[test]
fn lyapunov_figure2_uses_separator_path() {
    let path = networks().join("figure2.crn");
    let out = run(&["lyapunov", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("from separator"));
}

#[test]
fn lyapunov_triangle_reports_consistent() {
    let path = networks().join("triangle.crn");
    let out = run(&["lyapunov", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("consistent"));
}

#[test]
fn extinction_chain_flags_strong_candidates() {
    let path = networks().join("chain.crn");
    let out = run(&[
        "extinction",
        path.to_str().unwrap(),
        "--simulate",
        "--t-end",
        "60",
        "--x0",
        "1,0.2,0.1",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("strong extinction set (first-order): [\"A\", \"B\"]"));
    assert!(text.contains("layers [[\"B\"], [\"A\"]]"));
    let a_line = text.lines().find(|l| l.trim_start().starts_with("A:")).unwrap();
    let b_line = text.lines().find(|l| l.trim_start().starts_with("B:")).unwrap();
    let c_line = text.lines().find(|l| l.trim_start().starts_with("C:")).unwrap();
    assert!(a_line.contains("STRONG-CANDIDATE"));
    assert!(b_line.contains("STRONG-CANDIDATE"));
    assert!(!c_line.contains("STRONG-CANDIDATE"));
}

#[test]
fn extinction_ivanova_matches_structural_verdicts() {
    let path = networks().join("ivanova-modified.crn");
    let out = run(&["extinction", path.to_str().unwrap()]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("weak extinction guaranteed: false"));
    assert!(text.contains("consistency verdict: consistent"));
}

#[test]
fn plot_produces_svg_and_validates_species_count() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("traj.csv");
    let svg = dir.path().join("traj.svg");
    let path = networks().join("ivanova-modified.crn");
    let out = run(&[
        "simulate",
        path.to_str().unwrap(),
        "--x0",
        "0.4,0.3,0.3",
        "--t-end",
        "200",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert!(out.status.success());

    for projection in ["simplex", "time-series"] {
        let out = run(&[
            "plot",
            csv.to_str().unwrap(),
            "--svg",
            svg.to_str().unwrap(),
            "--projection",
            projection,
        ]);
        assert!(out.status.success(), "{projection} failed");
        let content = std::fs::read_to_string(&svg).unwrap();
        assert!(content.starts_with("<svg"));
        assert!(content.contains("polyline"));
    }

    // Simplex projection is only defined for three species.
    let four = dir.path().join("four.csv");
    std::fs::write(&four, "t,A,B,C,D\n0,1,1,1,1\n1,1,1,1,1\n").unwrap();
    let out = run(&[
        "plot",
        four.to_str().unwrap(),
        "--svg",
        svg.to_str().unwrap(),
        "--projection",
        "simplex",
    ]);
    assert_eq!(out.status.code(), Some(2));

    // Malformed CSV.
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "t,A\n0,notanumber\n").unwrap();
    let out = run(&[
        "plot",
        bad.to_str().unwrap(),
        "--svg",
        svg.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}
