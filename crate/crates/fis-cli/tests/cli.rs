//! Black-box tests of the `fis` binary: exit codes, deterministic reports,
//! and export shapes.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn fis(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fis"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path.display().to_string()
}

const MASSOPUST: &str = r#"{
  "surface": {"construction": "massopust", "n": 3,
              "data": [{"r": 1, "c": 1, "value": 1.0}], "s": 0.75},
  "seed": 11,
  "esc": {"slope": 10.0, "budget": 1000000}
}"#;

const GH: &str = r#"{"surface": {"construction": "geronimo-hardin", "s": 0.82, "a": 1.0}}"#;

#[test]
fn certify_report_is_deterministic_and_correct() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "m.json", MASSOPUST);
    let first = fis(&["certify", "--config", &cfg], dir.path());
    assert!(first.status.success(), "{:?}", first);
    let second = fis(&["certify", "--config", &cfg], dir.path());
    assert_eq!(first.stdout, second.stdout, "report not byte-identical");
    let report: serde_json::Value = serde_json::from_slice(&first.stdout).unwrap();
    assert_eq!(report["results"]["verdict"], "certified");
    assert!((report["results"]["t0"].as_f64().unwrap() - 2.7381404928570854).abs() < 1e-12);
}

#[test]
fn certify_gh_certified_and_below_threshold_not() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "gh.json", GH);
    let out = fis(&["certify", "--config", &cfg], dir.path());
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["results"]["verdict"], "certified");

    // A verdict is a result, not an error: below threshold still exits 0.
    let low = write_config(
        dir.path(),
        "low.json",
        r#"{"surface": {"construction": "geronimo-hardin", "s": 0.6, "a": 1.0}}"#,
    );
    let out = fis(&["certify", "--config", &low], dir.path());
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["results"]["verdict"], "hypotheses-unmet");
}

#[test]
fn exit_codes_for_bad_inputs() {
    let dir = tempfile::tempdir().unwrap();
    // Unknown field → config error (2).
    let bad = write_config(dir.path(), "bad.json", r#"{"zzz": 1}"#);
    let out = fis(&["certify", "--config", &bad], dir.path());
    assert_eq!(out.status.code(), Some(2), "{:?}", out);
    // Missing file → I/O error (3).
    let out = fis(&["certify", "--config", "nope.json"], dir.path());
    assert_eq!(out.status.code(), Some(3));
    // Missing surface section → config error (2).
    let empty = write_config(dir.path(), "empty.json", r#"{}"#);
    let out = fis(&["dimension", "--config", &empty], dir.path());
    assert_eq!(out.status.code(), Some(2));
    // 4-map construction has no axis-aligned projection → config error (2).
    let gh = write_config(
        dir.path(),
        "gh.json",
        r#"{"surface": {"construction": "geronimo-hardin", "s": 0.82, "a": 1.0},
            "esc": {"slope": 10.0, "budget": 1000}}"#,
    );
    let out = fis(&["esc", "--config", &gh], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn surface_exports_and_face_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "m.json", MASSOPUST);
    let out = fis(
        &["surface", "--config", &cfg, "--depth", "0", "--out", "o0"],
        dir.path(),
    );
    assert!(out.status.success(), "{:?}", out);
    let obj = fs::read_to_string(dir.path().join("o0/surface.obj")).unwrap();
    assert_eq!(obj.lines().filter(|l| l.starts_with("f ")).count(), 1);

    let out = fis(
        &["surface", "--config", &cfg, "--depth", "2", "--out", "o2"],
        dir.path(),
    );
    assert!(out.status.success());
    let obj = fs::read_to_string(dir.path().join("o2/surface.obj")).unwrap();
    assert_eq!(obj.lines().filter(|l| l.starts_with("f ")).count(), 81);
    let pgm = fs::read_to_string(dir.path().join("o2/surface.pgm")).unwrap();
    assert!(pgm.starts_with("P2"));
    // Sidecar carries the timing; the report itself is timing-free.
    let report = fs::read_to_string(dir.path().join("o2/surface.json")).unwrap();
    assert!(!report.contains("wall_clock"));
    assert!(dir.path().join("o2/surface.json.meta.json").exists());
}

#[test]
fn dimension_report_fields() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "m.json", MASSOPUST);
    let out = fis(
        &["dimension", "--config", &cfg, "--samples", "20000", "--workers", "2"],
        dir.path(),
    );
    assert!(out.status.success(), "{:?}", out);
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let results = &report["results"];
    assert!((results["t0"].as_f64().unwrap() - results["closed_form"].as_f64().unwrap()).abs() < 1e-10);
    let fit = &results["box_fit"];
    assert!(fit["abs_slope_minus_t0"].as_f64().is_some());
    assert_eq!(fit["scales"].as_array().unwrap().len(), 5);
}

#[test]
fn markov_report_and_csvs() {
    let dir = tempfile::tempdir().unwrap();
    let out = fis(&["markov", "--n-max", "5", "--out", "mk"], dir.path());
    assert!(out.status.success(), "{:?}", out);
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let results = &report["results"];
    assert_eq!(results["group_order"], 12);
    assert_eq!(results["period"], 2);
    assert_eq!(results["return_counts"][0], "4");
    assert_eq!(results["count_bound_n0"], 1);
    for name in [
        "group_table.csv",
        "transition.csv",
        "two_step_block.csv",
        "return_counts.csv",
    ] {
        assert!(dir.path().join("mk").join(name).exists(), "{name} missing");
    }
    let r_block = fs::read_to_string(dir.path().join("mk/two_step_block.csv")).unwrap();
    assert!(r_block.lines().next().unwrap().starts_with("1/4,1/8,1/8,3/16,3/16,1/8"));
}

#[test]
fn esc_search_runs_clean_on_planted_free_config() {
    let dir = tempfile::tempdir().unwrap();
    // Distinct scales → no equal-contraction coincidences at this depth.
    let cfg = write_config(
        dir.path(),
        "d.json",
        r#"{
          "surface": {"construction": "massopust", "n": 3,
                      "data": [{"r": 1, "c": 1, "value": 1.0}],
                      "s": [0.70, 0.72, 0.74, 0.76, 0.78, 0.80, 0.82, 0.84, 0.86]},
          "esc": {"slope": 10.0, "budget": 1000000}
        }"#,
    );
    let out = fis(&["esc", "--config", &cfg, "--depth", "3"], dir.path());
    assert!(out.status.success(), "{:?}", out);
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["results"]["violations"].as_array().unwrap().len(), 0);
    assert_eq!(report["results"]["exhaustive"], true);
}
