use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use bosent_cli::fig1::Fig1Table;
use bosent_cli::render::csv_manifest;
use bosent_cli::scan::ScanReport;
use bosent_cli::witness::WitnessOutput;
use bosent_cli::Document;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bosent")).args(args).output().unwrap()
}

fn spec_file(dir: &Path, body: &str) -> PathBuf {
    let path = dir.join("state.toml");
    std::fs::write(&path, body).unwrap();
    path
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn fig1_csv_carries_manifest() {
    let o = run(&["fig1", "--n", "100", "--orders", "2,8", "--timestamp", "2026-01-01T00:00:00Z"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let manifest = csv_manifest(&text).expect("manifest line");
    assert_eq!(manifest.command, "fig1");
    assert_eq!(manifest.timestamp, "2026-01-01T00:00:00Z");
    assert_eq!(manifest.prng, bosent::PRNG_NAME);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[1], bosent_cli::fig1::CSV_HEADER);
    assert_eq!(lines.len(), 4);
    assert!(lines[2].starts_with("100,2,1.02040816326531,"), "{}", lines[2]);
}

#[test]
fn fig1_json_round_trips() {
    let o = run(&["fig1", "--format", "json", "--no-approx"]);
    let text = stdout(&o);
    let doc: Document<Fig1Table> = serde_json::from_str(&text).unwrap();
    assert_eq!(doc.report.rows.len(), 16);
    assert!(doc.report.rows.iter().all(|r| r.approx.is_none() && r.rel_dev.is_none()));
    let again = serde_json::to_string_pretty(&doc).unwrap() + "\n";
    assert_eq!(again, text);
}

#[test]
fn fig1_rejects_infeasible_order() {
    let o = run(&["fig1", "--n", "10", "--orders", "8"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("(10, 8)"), "{}", stderr(&o));
}

#[test]
fn coherent_state_is_not_flagged() {
    let dir = tempfile::tempdir().unwrap();
    let path = spec_file(dir.path(), "kind = \"coherent_spin\"\nn = 50\nz = 0.5\n");
    let o = run(&["witness", path.to_str().unwrap(), "-w", "all"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let doc: Document<WitnessOutput> = serde_json::from_str(&stdout(&o)).unwrap();
    let r = &doc.report.report;
    assert!((r.csi_by_order[&2] - 1.0).abs() < 1e-10);
    assert!((r.xi2.unwrap() - 1.0).abs() < 1e-10);
    assert!((r.eta2.unwrap() - 1.0).abs() < 1e-10);
    let fz = r.qfi_by_generator.iter().find(|q| q.direction == [0.0, 0.0, 1.0]).unwrap();
    assert!((fz.value - 50.0).abs() < 1e-9);
    assert!(!r.verdicts.any());
    assert!(doc.report.errors.is_empty());
}

#[test]
fn partial_failure_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let path = spec_file(dir.path(), "kind = \"twin_fock\"\nn = 20\n");
    let o = run(&["witness", path.to_str().unwrap(), "-w", "csi", "-w", "xi", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(3));
    let text = stdout(&o);
    assert!(text.lines().any(|l| l.starts_with("csi,2,")), "{text}");
    assert!(text.lines().any(|l| l.starts_with("xi,") && l.contains("spin squeezing undefined")), "{text}");
}

#[test]
fn spec_errors_exit_2_with_position() {
    let dir = tempfile::tempdir().unwrap();
    let path = spec_file(dir.path(), "kind = \"twin_fock\"\nn = 21\n");
    let o = run(&["witness", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 2, column 5"), "{}", stderr(&o));

    let path = spec_file(dir.path(), "kind = \"coherent_spin\"\nn = 4\nz = 0.5\nzz = 1\n");
    let o = run(&["witness", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 4"), "{}", stderr(&o));

    let o = run(&["witness", dir.path().join("missing.toml").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unwritable_output_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("no/such/dir/out.csv");
    let o = run(&["fig1", "--out", target.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("cannot write"), "{}", stderr(&o));
}

#[test]
fn unknown_witness_and_flags_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = spec_file(dir.path(), "kind = \"twin_fock\"\nn = 4\n");
    assert_eq!(run(&["witness", path.to_str().unwrap(), "-w", "zeta"]).status.code(), Some(2));
    assert_eq!(run(&["scan-separable", "--bogus"]).status.code(), Some(2));
    assert_eq!(run(&["scan-separable", "--fluctuating", "gauss:3"]).status.code(), Some(2));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn scan_is_reproducible_and_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let out_a = dir.path().join("a.json");
    let out_b = dir.path().join("b.json");
    for out in [&out_a, &out_b] {
        let o = run(&[
            "scan-separable",
            "--samples",
            "50",
            "--n",
            "12",
            "--seed",
            "17",
            "--timestamp",
            "2026-01-01T00:00:00Z",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        assert!(o.stdout.is_empty());
    }
    let a = std::fs::read(&out_a).unwrap();
    let b = std::fs::read(&out_b).unwrap();
    // the --out argument differs; everything after the manifest must match
    let doc_a: Document<ScanReport> = serde_json::from_slice(&a).unwrap();
    let doc_b: Document<ScanReport> = serde_json::from_slice(&b).unwrap();
    assert_eq!(doc_a.report, doc_b.report);
    assert_eq!(doc_a.manifest.seed, 17);
    assert_eq!(doc_a.report.violations, 0);
    assert_eq!(doc_a.report.bounds.len(), 4);

    let other = run(&["scan-separable", "--samples", "50", "--n", "12", "--seed", "18", "--format", "json"]);
    let doc_c: Document<ScanReport> = serde_json::from_str(&stdout(&other)).unwrap();
    assert_ne!(doc_a.report.bounds, doc_c.report.bounds);
}

#[test]
fn identical_invocations_are_byte_identical() {
    let args = ["scan-separable", "--samples", "30", "--fluctuating", "poisson:5", "--seed", "3", "--timestamp", "T"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn library_entry_point_matches_binary() {
    let args = ["bosent", "fig1", "--n", "40", "--orders", "2", "--timestamp", "T"];
    let mut buf = Vec::new();
    assert_eq!(bosent_cli::execute(args, &mut buf), 0);
    assert_eq!(buf, run(&args[1..]).stdout);
}
