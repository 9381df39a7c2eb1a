use std::process::Command;

use excite_id::epimodels::ModelParams;
use excite_id::experiment::{execute, preset, presets, ExperimentConfig, Truth, PRESET_NAMES};
use excite_id::Error;

fn small(name: &str) -> ExperimentConfig {
    let mut c = preset(name).unwrap();
    c.sim.samples = c.sim.samples.min(200);
    c.metrics.rmse = None;
    if let Some(r) = c.metrics.roc.as_mut() {
        r.trials = 3;
        r.taus.truncate(3);
    }
    c
}

#[test]
fn config_round_trip_is_byte_identical() {
    for c in presets() {
        let a = c.to_json().unwrap();
        let parsed = ExperimentConfig::from_json(&a).unwrap();
        assert_eq!(parsed, c, "{}", c.name);
        assert_eq!(parsed.to_json().unwrap(), a, "{}", c.name);
    }
}

#[test]
fn every_preset_validates() {
    assert_eq!(presets().len(), PRESET_NAMES.len());
    for c in presets() {
        c.validate().unwrap_or_else(|e| panic!("{}: {e}", c.name));
    }
    assert!(preset("no-such-preset").is_none());
}

#[test]
fn changepoint_preset_has_three_switches() {
    let c = preset("sir-changepoint").unwrap();
    let Truth::Schedule { schedule } = &c.truth else {
        panic!("expected an explicit schedule");
    };
    assert_eq!(schedule.switch_times(), vec![15.0, 30.0, 49.0]);
    // The late change stays within ten percent of the preceding segment.
    let b = |i: usize| match &schedule.segments()[i].params {
        ModelParams::Sir(p) => p.b.clone(),
        _ => unreachable!(),
    };
    let rel = (b(3) - b(2)).norm() / b(2).norm();
    assert!(rel <= 0.1 + 1e-12, "{rel}");
}

#[test]
fn roc_preset_sweeps_expected_etas() {
    let roc = preset("roc-sweep").unwrap().metrics.roc.unwrap();
    assert_eq!(roc.etas, vec![0.1, 0.3, 0.5, 1.0]);
    assert_eq!(roc.trials, 100);
    assert!(roc.taus.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn validation_reports_every_violation() {
    let mut c = preset("sis-basic").unwrap();
    c.name = " ".into();
    c.sim.h = -1.0;
    c.estimators[0].alpha = 1.5;
    c.estimators[1].theta0 = Some(vec![1.0, 2.0, 3.0]);
    match c.validate() {
        Err(Error::Validation(msgs)) => assert!(msgs.len() >= 4, "{msgs:?}"),
        other => panic!("expected a validation error, got {other:?}"),
    }
    assert!(matches!(execute(&c), Err(Error::Validation(_))));
}

#[test]
fn unknown_fields_are_rejected() {
    let mut v: serde_json::Value = serde_json::from_str(&preset("sis-basic").unwrap().to_json().unwrap()).unwrap();
    v["sim"]["bogus"] = serde_json::json!(1);
    assert!(ExperimentConfig::from_json(&v.to_string()).is_err());
}

#[test]
fn reruns_are_byte_identical() {
    for name in ["sis-contour", "sir-network-er", "sir-changepoint", "roc-sweep"] {
        let c = small(name);
        let (_, a) = execute(&c).unwrap();
        let (_, b) = execute(&c).unwrap();
        assert_eq!(a, b, "{name}");
        let mut other = c.clone();
        other.seed += 1;
        let (_, d) = execute(&other).unwrap();
        if name != "sis-contour" {
            assert_ne!(a.get("trajectory.csv"), d.get("trajectory.csv"), "{name}");
        }
    }
}

#[test]
fn manifest_lists_every_artifact() {
    let (_, art) = execute(&small("sir-changepoint")).unwrap();
    let manifest: serde_json::Value = serde_json::from_slice(art.get("manifest.json").unwrap()).unwrap();
    let files: Vec<&str> = manifest["files"]
        .as_array()
        .unwrap()
        .iter()
        .map(|f| f["file"].as_str().unwrap())
        .collect();
    for f in ["trajectory.csv", "estimates_cp-gwrls.csv", "detections_cp-gwrls.csv", "summary.json", "config.json"] {
        assert!(files.contains(&f), "{f} missing from {files:?}");
    }
    assert_eq!(manifest["seed"], 7);
    assert_eq!(manifest["config_sha256"].as_str().unwrap().len(), 64);
}

fn cli() -> Command {
    Command::new(env!("CARGO_BIN_EXE_excite-id"))
}

#[test]
fn cli_lists_presets() {
    let out = cli().arg("list-presets").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().collect::<Vec<_>>(), PRESET_NAMES.to_vec());
}

#[test]
fn cli_run_writes_artifacts_and_honours_env_override() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = small("sis-basic");
    c.output_dir = dir.path().join("ignored").display().to_string();
    let cfg_path = dir.path().join("config.json");
    std::fs::write(&cfg_path, c.to_json().unwrap()).unwrap();
    let target = dir.path().join("from-env");
    let out = cli().arg("run").arg(&cfg_path).env("EXCITE_ID_OUT", &target).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(target.join("trajectory.csv").exists());
    assert!(target.join("manifest.json").exists());
    let copied = std::fs::read_to_string(target.join("config.json")).unwrap();
    let mut expected = c.clone();
    expected.output_dir = target.display().to_string();
    assert_eq!(ExperimentConfig::from_json(&copied).unwrap(), expected);
    assert!(!dir.path().join("ignored").exists());
}

#[test]
fn cli_preset_seed_and_out_flags() {
    let dir = tempfile::tempdir().unwrap();
    let out = cli()
        .args(["preset", "sis-changepoint", "--seed", "11", "--out"])
        .arg(dir.path())
        .env_remove("EXCITE_ID_OUT")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let manifest: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 11);
}

#[test]
fn cli_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = cli().args(["preset", "nope"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));

    let bad = dir.path().join("bad.json");
    let mut c = preset("sis-basic").unwrap();
    c.sim.samples = 0;
    std::fs::write(&bad, c.to_json().unwrap()).unwrap();
    assert_eq!(cli().arg("run").arg(&bad).output().unwrap().status.code(), Some(2));

    std::fs::write(&bad, "{ not json").unwrap();
    assert_eq!(cli().arg("run").arg(&bad).output().unwrap().status.code(), Some(2));

    let missing = dir.path().join("missing.json");
    assert_eq!(cli().arg("run").arg(&missing).output().unwrap().status.code(), Some(1));

    // A regular file where the output directory should go is a runtime failure.
    let blocker = dir.path().join("blocker");
    std::fs::write(&blocker, "x").unwrap();
    let out = cli()
        .args(["preset", "sis-basic", "--out"])
        .arg(blocker.join("sub"))
        .env_remove("EXCITE_ID_OUT")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}
