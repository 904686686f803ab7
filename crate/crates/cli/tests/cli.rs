use std::path::Path;
use std::process::Command as Process;

use anisospec_cli::{run, ExitStatus, ExperimentConfig};
use serde_json::Value;

const RADIAL4: &str = r#"{"kind": "radial_power", "gamma": 4, "params": {"sigma": 2}}"#;

fn config(command: &str, theta: &str, numeric: &str, dir: &Path) -> ExperimentConfig {
    let text = format!(
        r#"{{"command": "{command}", "theta": {theta}, "numeric": {numeric}, "output": {{"dir": {dir:?}}}}}"#,
        dir = dir.display().to_string()
    );
    ExperimentConfig::from_json(&text).unwrap()
}

fn manifest(dir: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

#[test]
fn sweep_csv_is_monotone_and_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    let numeric = r#"{"betas": [0.1, 0.05, 0.025, 0.0125, 0.00625]}"#;
    let a = config("sweep", RADIAL4, numeric, &tmp.path().join("a"));
    let b = config("sweep", RADIAL4, numeric, &tmp.path().join("b"));
    assert_eq!(run(&a).unwrap(), ExitStatus::Passed);
    assert_eq!(run(&b).unwrap(), ExitStatus::Passed);
    let csv_a = std::fs::read(tmp.path().join("a/sweep.csv")).unwrap();
    assert_eq!(
        csv_a,
        std::fs::read(tmp.path().join("b/sweep.csv")).unwrap()
    );

    let mut rdr = csv::Reader::from_reader(csv_a.as_slice());
    let header: Vec<String> = rdr.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(
        header,
        [
            "beta",
            "alpha",
            "n",
            "L",
            "mu",
            "deficit",
            "rescaled_deficit"
        ]
    );
    let deficits: Vec<f64> = rdr
        .records()
        .map(|r| r.unwrap()[5].parse().unwrap())
        .collect();
    assert_eq!(deficits.len(), 5);
    assert!(deficits.windows(2).all(|w| w[1] < w[0]), "{deficits:?}");

    let plot = std::fs::read_to_string(tmp.path().join("a/sweep_loglog.dat")).unwrap();
    assert_eq!(plot.lines().count(), 5);
    let m = manifest(&tmp.path().join("a"));
    assert_eq!(m["status"], "passed");
    assert_eq!(m["grids"].as_array().unwrap().len(), 5);
    assert_eq!(
        m["config_hash"],
        manifest(&tmp.path().join("b"))["config_hash"]
    );
}

#[test]
fn fit_reads_a_previous_sweep() {
    let tmp = tempfile::tempdir().unwrap();
    let csv = tmp.path().join("in.csv");
    let mut text = String::from("beta,alpha,n,L,mu,deficit,rescaled_deficit\n");
    for beta in [0.1f64, 0.05, 0.025, 0.0125, 0.00625, 0.003125] {
        let alpha = beta.powf(0.4);
        let deficit = 2.0 * alpha;
        text.push_str(&format!(
            "{beta},{alpha},0,0,{},{deficit},2\n",
            1.0 - deficit
        ));
    }
    std::fs::write(&csv, text).unwrap();
    let numeric = format!(
        r#"{{"input": {:?}, "exponent_tol": 1e-10}}"#,
        csv.display().to_string()
    );
    let c = config("fit", RADIAL4, &numeric, &tmp.path().join("out"));
    assert_eq!(run(&c).unwrap(), ExitStatus::Passed);
    let fit: Value =
        serde_json::from_str(&std::fs::read_to_string(tmp.path().join("out/fit.json")).unwrap())
            .unwrap();
    assert!((fit["fit"]["exponent"].as_f64().unwrap() - 0.4).abs() < 1e-12);
    assert!((fit["fit"]["constant"].as_f64().unwrap() - 2.0).abs() < 1e-12);
}

#[test]
fn asymmetric_table_fails_validation() {
    let tmp = tempfile::tempdir().unwrap();
    let values: Vec<String> = (0..16)
        .map(|k| {
            format!(
                "{}",
                1.0 + 0.5 * (k as f64 * std::f64::consts::FRAC_PI_8).cos()
            )
        })
        .collect();
    let theta = format!(
        r#"{{"kind": "custom", "gamma": 2, "params": {{"values": [{}]}}}}"#,
        values.join(",")
    );
    let c = config("validate-theta", &theta, "{}", tmp.path());
    assert_eq!(run(&c).unwrap(), ExitStatus::AssertionFailed);
    let report: Value =
        serde_json::from_str(&std::fs::read_to_string(tmp.path().join("validation.json")).unwrap())
            .unwrap();
    assert!(report["symmetry_defect"].as_f64().unwrap() > 1e-3);
    assert_eq!(manifest(tmp.path())["exit_code"], 1);
}

#[test]
fn free_model_matches_multiplier_spectrum() {
    let tmp = tempfile::tempdir().unwrap();
    let numeric = r#"{"potential": {"type": "zero"}, "scheme": "fourier_collocation", "cutoff_l": 5, "n": 64, "k": 6}"#;
    let c = config("model-eigs", RADIAL4, numeric, tmp.path());
    assert_eq!(run(&c).unwrap(), ExitStatus::Passed);
    let mut rdr = csv::Reader::from_path(tmp.path().join("eigenvalues.csv")).unwrap();
    let got: Vec<f64> = rdr
        .records()
        .map(|r| r.unwrap()[2].parse().unwrap())
        .collect();
    let want = anisospec_core::discretize::free_multiplier_spectrum(64, 5.0);
    for (g, w) in got.iter().zip(&want) {
        assert!((g - w).abs() < 1e-9, "{g} vs {w}");
    }
}

#[test]
fn localization_writes_one_file_per_radius() {
    let tmp = tempfile::tempdir().unwrap();
    let numeric = r#"{"betas": [0.1, 0.05, 0.025], "fourier_radii": [8, 16], "spatial_radii": [2, 4, 8],
                      "grid": {"refine": false}}"#;
    let c = config("localization", RADIAL4, numeric, tmp.path());
    run(&c).unwrap();
    let dats: Vec<String> = std::fs::read_dir(tmp.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .filter(|n| n.starts_with("fourier_R") || n.starts_with("spatial_R"))
        .collect();
    assert_eq!(dats.len(), 5, "{dats:?}");
}

#[test]
fn binary_exit_codes() {
    let exe = env!("CARGO_BIN_EXE_anisospec");
    let tmp = tempfile::tempdir().unwrap();
    let bad = tmp.path().join("bad.json");
    std::fs::write(
        &bad,
        r#"{"command": "sweep", "theta": {"kind": "nope", "gamma": 1, "params": {}}}"#,
    )
    .unwrap();
    let st = Process::new(exe)
        .args(["sweep", "--config"])
        .arg(&bad)
        .status()
        .unwrap();
    assert_eq!(st.code(), Some(2));

    let good = tmp.path().join("good.json");
    std::fs::write(
        &good,
        format!(r#"{{"command": "sweep", "theta": {RADIAL4}}}"#),
    )
    .unwrap();
    let out = tmp.path().join("neg");
    let st = Process::new(exe)
        .args(["negative-scan", "--config"])
        .arg(&good)
        .args(["--beta", "0,0.5", "--n", "96", "--L", "6", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(st.code(), Some(0));
    let m = manifest(&out);
    assert_eq!(m["command"], "negative-scan");
    assert_eq!(
        m["config"]["numeric"]["betas"],
        serde_json::json!([0.0, 0.5])
    );
    assert!(out.join("negative_scan.csv").exists());

    // no β list at all
    let st = Process::new(exe)
        .args(["sweep", "--config"])
        .arg(&good)
        .arg("--out")
        .arg(tmp.path().join("x"))
        .status()
        .unwrap();
    assert_eq!(st.code(), Some(2));
}
