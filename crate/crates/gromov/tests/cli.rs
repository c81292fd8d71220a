//! End-to-end checks of the `gromov` binary: golden outputs, JSON shapes,
//! and the exit-code contract (0 success, 1 domain error, 2 usage error).

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_gromov"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 output")
}

fn ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "expected success for {args:?}, got {:?}\nstderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    stdout(&out).trim_end().to_string()
}

/// A scratch directory unique to the calling test.
fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("gromov-cli-{}-{name}", std::process::id()));
    fs::create_dir_all(&dir).expect("scratch dir");
    dir
}

fn write(dir: &Path, name: &str, content: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, content).expect("write fixture");
    p.to_str().unwrap().to_string()
}

fn inline_graph(colors: &[(&str, &str)], edges: &[(&str, &str)], basepoint: &str) -> String {
    let vertices: Vec<String> = colors
        .iter()
        .map(|(id, c)| format!("{{\"id\":\"{id}\",\"color\":\"{c}\"}}"))
        .collect();
    let edges: Vec<String> =
        edges.iter().map(|(a, b)| format!("[\"{a}\",\"{b}\"]")).collect();
    format!(
        "{{\"vertices\":[{}],\"edges\":[{}],\"basepoint\":\"{basepoint}\"}}",
        vertices.join(","),
        edges.join(",")
    )
}

#[test]
fn color_champernowne_golden_prefixes() {
    let paper: String =
        (1..=14).map(|n| ok(&["color", "champernowne", "-n", &n.to_string()])).collect();
    assert_eq!(paper, "01000111000001");
    let standard: String = (1..=13)
        .map(|n| ok(&["color", "champernowne", "-n", &n.to_string(), "--order", "standard"]))
        .collect();
    assert_eq!(standard, "0100011011000");
    // left of the origin the coloring is identically zero
    assert_eq!(ok(&["color", "champernowne", "-n=-3"]), "0");
}

#[test]
fn build_window_json_and_dot() {
    let dir = scratch("build");
    let comb = write(&dir, "comb.json", "{\"comb\":null}");
    let json = ok(&["build", &comb, "--window", "1"]);
    let v: serde_json::Value = serde_json::from_str(&json).expect("valid JSON");
    assert_eq!(v["basepoint"], "c:0:0");
    assert_eq!(v["vertices"].as_array().unwrap().len(), 2);
    let dot = ok(&["build", &comb, "--window", "1", "--dot"]);
    assert!(dot.starts_with("graph {"));
    assert!(dot.contains("peripheries=2"));
    assert!(dot.contains("--"));
    // an infinite graph without --window is a domain error
    assert_eq!(run(&["build", &comb]).status.code(), Some(1));
}

#[test]
fn ball_matches_build_window() {
    let dir = scratch("ball");
    let comb = write(&dir, "comb.json", "{\"comb\":null}");
    let from_ball = ok(&["ball", &comb, "--radius", "2"]);
    let from_build = ok(&["build", &comb, "--window", "2"]);
    assert_eq!(from_ball, from_build);
}

#[test]
fn dist_self_reports_truncation_bound() {
    let dir = scratch("dist-self");
    let comb = write(&dir, "comb.json", "{\"comb\":null}");
    let g = dir.join("g.json");
    ok(&["build", &comb, "--window", "2", "-o", g.to_str().unwrap()]);
    let g = g.to_str().unwrap();
    assert_eq!(ok(&["dist", g, g]), "{\"at_most\":{\"pow2_exp\":8}}");
    assert_eq!(ok(&["dist", g, g, "--max-depth", "3"]), "{\"at_most\":{\"pow2_exp\":3}}");
}

#[test]
fn dist_separates_distant_colors() {
    let dir = scratch("dist-far");
    let a = write(&dir, "a.json", &inline_graph(&[("x", "")], &[], "x"));
    let b = write(&dir, "b.json", &inline_graph(&[("y", "1")], &[], "y"));
    // colors at distance 1 fail even the (1,1)-equivalence
    assert_eq!(ok(&["dist", &a, &b]), "\"one\"");
}

#[test]
fn equiv_emits_witness_or_none() {
    let dir = scratch("equiv");
    let a = write(
        &dir,
        "a.json",
        &inline_graph(&[("a0", ""), ("a1", "01")], &[("a0", "a1")], "a0"),
    );
    let b = write(
        &dir,
        "b.json",
        &inline_graph(&[("b0", ""), ("b1", "011")], &[("b0", "b1")], "b0"),
    );
    // colors "01" and "011" differ at index 2: distance 1/4 < 1/2
    let found = ok(&["equiv", &a, &b, "-R", "1", "--eps", "1/2"]);
    let h: serde_json::Value = serde_json::from_str(&found).expect("witness JSON");
    assert_eq!(h["radius"], 1);
    assert_eq!(h["mapping"]["a0"], "b0");
    assert_eq!(h["mapping"]["a1"], "b1");
    // the strict bound excludes distance exactly 1/4
    assert_eq!(ok(&["equiv", &a, &b, "-R", "1", "--eps", "1/4"]), "none");
}

#[test]
fn aut_counts_reflect_basepoint() {
    let dir = scratch("aut");
    let path = inline_graph(
        &[("v0", ""), ("v1", ""), ("v2", "")],
        &[("v0", "v1"), ("v1", "v2")],
        "v1",
    );
    let centered = write(&dir, "centered.json", &path);
    let free: serde_json::Value =
        serde_json::from_str(&ok(&["aut", &centered])).unwrap();
    assert_eq!(free["order"], 2);
    // the reflection fixes the middle basepoint, so it survives pointing
    let pointed: serde_json::Value =
        serde_json::from_str(&ok(&["aut", &centered, "--pointed"])).unwrap();
    assert_eq!(pointed["order"], 2);

    let end = write(
        &dir,
        "end.json",
        &inline_graph(&[("v0", ""), ("v1", ""), ("v2", "")], &[("v0", "v1"), ("v1", "v2")], "v0"),
    );
    let pinned: serde_json::Value =
        serde_json::from_str(&ok(&["aut", &end, "--pointed"])).unwrap();
    assert_eq!(pinned["order"], 1);
}

#[test]
fn classes_partition_by_tolerance() {
    let dir = scratch("classes");
    let path = write(
        &dir,
        "path.json",
        &inline_graph(&[("v0", ""), ("v1", "1"), ("v2", "")], &[("v0", "v1"), ("v1", "v2")], "v1"),
    );
    // radius-0 disks compare colors only: "" and "1" sit at distance 1
    let split: serde_json::Value =
        serde_json::from_str(&ok(&["classes", &path, "--window", "2", "-R", "0", "--eps", "1"]))
            .unwrap();
    assert_eq!(split["count"], 2);
    let merged: serde_json::Value =
        serde_json::from_str(&ok(&["classes", &path, "--window", "2", "-R", "0", "--eps", "3/2"]))
            .unwrap();
    assert_eq!(merged["count"], 1);
}

#[test]
fn check_w_answers_per_center() {
    let dir = scratch("check-w");
    let zline = write(&dir, "zline.json", "{\"const-line\":{}}");
    assert_eq!(ok(&["check-w", &zline, "-n", "1"]), "false");
    let injective = write(
        &dir,
        "inj.json",
        &inline_graph(&[("v0", ""), ("v1", "1")], &[("v0", "v1")], "v0"),
    );
    assert_eq!(ok(&["check-w", &injective, "-n", "1"]), "true");
}

#[test]
fn check_v_finds_and_bounds_the_search() {
    let dir = scratch("check-v");
    let zline = write(&dir, "zline.json", "{\"const-line\":{}}");
    let hit: serde_json::Value =
        serde_json::from_str(&ok(&["check-v", &zline, "-n", "1", "-r", "1", "-m", "1"])).unwrap();
    assert_eq!(hit["witness"]["vertex"], "-1");
    let miss: serde_json::Value = serde_json::from_str(&ok(&[
        "check-v", &zline, "-n", "1", "-r", "1", "-m", "2", "--search-radius", "6",
    ]))
    .unwrap();
    assert_eq!(miss["not_found_within"], 6);
}

#[test]
fn certify_verify_round_trip_and_exit_codes() {
    let dir = scratch("certify");
    let comb = write(&dir, "comb.json", "{\"comb\":null}");
    let zline = write(&dir, "zline.json", "{\"const-line\":{}}");
    let cert = dir.join("cert.json");
    let cert_path = cert.to_str().unwrap();
    ok(&["certify", &comb, "--mode", "almost-chaotic", "-N", "1", "-M", "1", "-o", cert_path]);

    let report: serde_json::Value =
        serde_json::from_str(&ok(&["verify", cert_path, &comb])).unwrap();
    assert_eq!(report["valid"], true);

    // the same certificate does not verify against a different graph
    let cross = run(&["verify", cert_path, &zline]);
    assert_eq!(cross.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_str(stdout(&cross).trim_end()).unwrap();
    assert_eq!(report["valid"], false);

    // generation on the constant line stops at (1,2); the recorded failure
    // is not a certificate and verify refuses it
    let failed = dir.join("failed.json");
    let failed_path = failed.to_str().unwrap();
    let outcome = ok(&[
        "certify", &zline, "--mode", "almost-chaotic", "-N", "1", "-M", "2", "-o", failed_path,
    ]);
    assert!(outcome.is_empty(), "certify -o writes to the file only");
    let doc: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&failed).unwrap()).unwrap();
    assert_eq!(doc["failed_at"]["n"], 1);
    assert_eq!(doc["failed_at"]["m"], 2);
    assert_eq!(run(&["verify", failed_path, &zline]).status.code(), Some(1));
}

#[test]
fn certify_chaotic_verdict_shape() {
    let dir = scratch("verdict");
    let comb = write(&dir, "comb.json", "{\"comb\":null}");
    let v: serde_json::Value =
        serde_json::from_str(&ok(&["certify", &comb, "--mode", "chaotic", "-N", "1", "-M", "1"]))
            .unwrap();
    // the comb is its own witness but its constant coloring never lies in W
    assert!(v["almost_chaotic"]["certificate"].is_object());
    assert_eq!(v["aperiodicity"]["aperiodic_up_to_depth"], false);
    assert_eq!(v["chaotic_at_depth"], false);

    // the dense universal graph passes all three components at depth 1
    let dense = write(&dir, "dense.json", "{\"dense\":{\"budget\":4}}");
    let v: serde_json::Value = serde_json::from_str(&ok(&[
        "certify", &dense, "--mode", "chaotic", "-N", "1", "-M", "1", "--search-radius", "4",
        "--degree-bound", "4",
    ]))
    .unwrap();
    assert_eq!(v["aperiodicity"]["aperiodic_up_to_depth"], true);
    assert_eq!(v["class_counts_growing"], true);
    assert_eq!(v["chaotic_at_depth"], true);
    let a: serde_json::Value =
        serde_json::from_str(&ok(&["certify", &comb, "--mode", "aperiodic", "-N", "2"])).unwrap();
    // the table covers n = 0..=N; only the trivial radius-0 disk is in W
    assert_eq!(a["w_table"], serde_json::json!([true, false, false]));
    assert_eq!(a["aperiodic_up_to_depth"], false);
}

#[test]
fn enumerate_count_and_determinism() {
    assert_eq!(ok(&["enumerate", "--weight", "3", "--count"]), "6");
    let first = ok(&["enumerate", "--weight", "4"]);
    let second = ok(&["enumerate", "--weight", "4"]);
    assert_eq!(first, second);
    let graphs: serde_json::Value = serde_json::from_str(&first).unwrap();
    for g in graphs.as_array().unwrap() {
        assert!(g["basepoint"].is_string());
    }
}

#[test]
fn exit_code_contract() {
    // usage errors: unknown subcommand, missing required argument
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["ball"]).status.code(), Some(2));
    // domain errors: unreadable input, malformed tolerance
    assert_eq!(run(&["dist", "/nonexistent/a.json", "/nonexistent/b.json"]).status.code(), Some(1));
    let dir = scratch("exit");
    let comb = write(&dir, "comb.json", "{\"comb\":null}");
    let g = dir.join("g.json");
    ok(&["build", &comb, "--window", "1", "-o", g.to_str().unwrap()]);
    let g = g.to_str().unwrap();
    assert_eq!(run(&["equiv", g, g, "-R", "1", "--eps", "0"]).status.code(), Some(1));
    assert_eq!(run(&["equiv", g, g, "-R", "1", "--eps", "x/y"]).status.code(), Some(1));
}
