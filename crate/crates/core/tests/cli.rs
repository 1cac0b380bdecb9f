//! The `gluedwalk` binary: exit codes, error JSON, manifests, overwrite
//! protection and byte-identical reruns.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use glued_localization::experiment::{RunManifest, MANIFEST_NAME};
use serde_json::Value;
use tempfile::tempdir;

fn gluedwalk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gluedwalk"))
        .args(args)
        .output()
        .unwrap()
}

fn error_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stderr).expect("stderr is JSON")
}

fn data_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.file_name().unwrap() != MANIFEST_NAME)
        .map(|p| {
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                fs::read(&p).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

#[test]
fn crosscheck_passes_and_manifest_checksums_match() {
    let dir = tempdir().unwrap();
    let out = dir.path().join("cc");
    let run = gluedwalk(&["crosscheck", "--n", "6", "--out", out.to_str().unwrap()]);
    assert!(
        run.status.success(),
        "{}",
        String::from_utf8_lossy(&run.stderr)
    );
    let printed: RunManifest = serde_json::from_slice(&run.stdout).unwrap();
    let manifest = RunManifest::load(&out).unwrap();
    assert_eq!(printed.files, manifest.files);
    assert!(manifest.verify(&out).unwrap().is_empty());
    let listed: Vec<_> = manifest.files.iter().map(|f| f.path.clone()).collect();
    let present: Vec<_> = data_files(&out).into_iter().map(|(n, _)| n).collect();
    assert_eq!(listed.len(), present.len());
    let report: Value =
        serde_json::from_str(&fs::read_to_string(out.join("crosscheck.json")).unwrap()).unwrap();
    assert_eq!(report["pass"], true);
    assert!(report["quantum_deviation"].as_f64().unwrap() <= 1e-8);
}

#[test]
fn crosscheck_n1_is_exact() {
    let dir = tempdir().unwrap();
    let out = dir.path().join("cc1");
    assert!(
        gluedwalk(&["crosscheck", "--n", "1", "--out", out.to_str().unwrap()])
            .status
            .success()
    );
    let report: Value =
        serde_json::from_str(&fs::read_to_string(out.join("crosscheck.json")).unwrap()).unwrap();
    for key in [
        "closure_residual",
        "quantum_deviation",
        "classical_deviation",
    ] {
        assert!(report[key].as_f64().unwrap() < 1e-14, "{key}");
    }
}

#[test]
fn existing_output_is_refused_without_overwrite() {
    let dir = tempdir().unwrap();
    let out = dir.path().join("th");
    let out = out.to_str().unwrap();
    assert!(gluedwalk(&["thouless", "--out", out]).status.success());
    let again = gluedwalk(&["thouless", "--out", out]);
    assert_eq!(again.status.code(), Some(1));
    assert_eq!(error_json(&again)["error"]["kind"], "output_exists");
    assert!(gluedwalk(&["thouless", "--out", out, "--overwrite"])
        .status
        .success());
}

#[test]
fn bad_input_yields_error_json() {
    let bad = gluedwalk(&["fig4", "--quantile", "1.5"]);
    assert_eq!(bad.status.code(), Some(1));
    assert_eq!(error_json(&bad)["error"]["kind"], "config");

    let bad = gluedwalk(&["hitting", "--family", "poisson"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(error_json(&bad)["error"]["message"]
        .as_str()
        .unwrap()
        .contains("poisson"));

    let usage = gluedwalk(&["fig5"]);
    assert_eq!(usage.status.code(), Some(2));
    assert_eq!(error_json(&usage)["error"]["kind"], "usage");
}

#[test]
fn fig4_reruns_are_byte_identical_and_config_echo_replays() {
    let dir = tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let args = [
        "fig4", "--n", "60", "--delta", "0,0.1", "--seeds", "2", "--seed", "7", "--times",
        "5,10,20",
    ];
    let run_a = gluedwalk(&[&args[..], &["--out", a.to_str().unwrap()]].concat());
    assert!(
        run_a.status.success(),
        "{}",
        String::from_utf8_lossy(&run_a.stderr)
    );
    // Replay from the echoed config; only the output directory differs.
    let cfg = a.join("config.txt");
    let run_b = gluedwalk(&[
        "fig4",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        b.to_str().unwrap(),
    ]);
    assert!(
        run_b.status.success(),
        "{}",
        String::from_utf8_lossy(&run_b.stderr)
    );

    let fa: Vec<_> = data_files(&a)
        .into_iter()
        .filter(|(n, _)| n != "config.txt")
        .collect();
    let fb: Vec<_> = data_files(&b)
        .into_iter()
        .filter(|(n, _)| n != "config.txt")
        .collect();
    assert_eq!(fa, fb);
    assert_eq!(
        fa.iter().filter(|(n, _)| n.starts_with("profile_")).count(),
        3
    );

    // Left half only, probabilities in [0, 1], rows per time sum to <= 1.
    let text = String::from_utf8(fs::read(a.join("profile_delta0.1_rep1.csv")).unwrap()).unwrap();
    let mut sums = std::collections::BTreeMap::new();
    for line in text.lines().skip(2) {
        let f: Vec<&str> = line.split(',').collect();
        let col: usize = f[1].parse().unwrap();
        let p: f64 = f[2].parse().unwrap();
        assert!(col < 60 && (0.0..=1.0).contains(&p));
        *sums.entry(f[0].to_string()).or_insert(0.0) += p;
    }
    assert_eq!(sums.len(), 3);
    assert!(sums.values().all(|s| *s <= 1.0 + 1e-9));
}

#[test]
fn short_hitting_horizon_is_flagged() {
    let dir = tempdir().unwrap();
    let out = dir.path().join("h");
    let run = gluedwalk(&[
        "hitting",
        "--n",
        "10,20",
        "--seeds",
        "2",
        "--horizon-factor",
        "0.5",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(run.status.success());
    let manifest = RunManifest::load(&out).unwrap();
    assert_eq!(manifest.warnings.len(), 2);
    let csv = fs::read_to_string(out.join("hitting.csv")).unwrap();
    assert_eq!(
        csv.lines().nth(1),
        Some("n,seed,max_probability,argmax_time")
    );
    assert_eq!(csv.lines().count(), 2 + 4);
}

#[test]
fn scaling_writes_csv_and_summary_per_family() {
    let dir = tempdir().unwrap();
    let out = dir.path().join("s");
    let run = gluedwalk(&[
        "scaling",
        "--family",
        "cauchy,uniform",
        "--delta",
        "0.1,0.3,1.0",
        "--steps",
        "1000000",
        "--seeds",
        "1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(
        run.status.success(),
        "{}",
        String::from_utf8_lossy(&run.stderr)
    );
    for fam in ["cauchy", "uniform"] {
        let csv = fs::read_to_string(out.join(format!("scaling_{fam}.csv"))).unwrap();
        assert_eq!(csv.lines().count(), 2 + 3);
        let json: Value = serde_json::from_str(
            &fs::read_to_string(out.join(format!("scaling_{fam}.json"))).unwrap(),
        )
        .unwrap();
        assert!(json["slope"].as_f64().unwrap() < 0.0);
        assert_eq!(json["max_thouless_deviation"].is_null(), fam != "cauchy");
    }
}

#[test]
fn help_and_version_exit_zero() {
    assert!(gluedwalk(&["--help"]).status.success());
    assert!(gluedwalk(&["--version"]).status.success());
}
