use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use floquet::scenario::{run, run_scenario, Outcome, Scenario, Status, TaskKind, TaskReport};
use serde_json::{json, Value};

fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_floquet-run"))
        .args(args)
        .output()
        .unwrap()
}

fn write_config(dir: &Path, name: &str, value: Value) -> PathBuf {
    let path = dir.join(format!("{name}.json"));
    fs::write(&path, serde_json::to_string_pretty(&value).unwrap()).unwrap();
    path
}

#[test]
fn every_shipped_config_validates() {
    let mut kinds = Vec::new();
    for entry in fs::read_dir(configs_dir()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "json") {
            let s = Scenario::load(&path, None).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            kinds.push(s.kind());
            let echo = serde_json::to_value(&s.config).unwrap();
            let again = Scenario::from_value(echo, path.parent().unwrap(), None).unwrap();
            assert_eq!(s.config, again.config, "{}", path.display());
        }
    }
    for kind in [
        TaskKind::Monodromy,
        TaskKind::FloquetSpectrum,
        TaskKind::Correspondence,
        TaskKind::ResolventCheck,
        TaskKind::WaveOperators,
        TaskKind::BoundStates,
    ] {
        assert!(kinds.contains(&kind), "no example config for {}", kind.as_str());
    }
}

#[test]
fn unknown_keys_name_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        (
            json!({"name": "a", "task": "monodromy", "model": {"kind": "rabi", "delta": 0, "v": 1}, "extra": 1}),
            "extra",
        ),
        (
            json!({"name": "a", "task": "monodromy", "model": {"kind": "rabi", "delta": 0, "v": 1, "w": 2}}),
            "model",
        ),
        (
            json!({"name": "a", "task": "monodromy", "model": {"kind": "rabi", "delta": 0, "v": 1}, "parameters": {"steps": 8}}),
            "parameters",
        ),
        (
            json!({"name": "a", "task": "resolvent-check", "model": {"kind": "rabi", "delta": 0, "v": 1}, "parameters": {"lambda": [1, 1], "n_t": 10}}),
            "parameters.n_t",
        ),
        (
            json!({"name": "a", "task": "resolvent-check", "model": {"kind": "rabi", "delta": 0, "v": 1}, "parameters": {"lambda": [1, 0]}}),
            "parameters.lambda",
        ),
        (
            json!({"name": "a", "task": "wave-operators", "model": {"kind": "rabi", "delta": 0, "v": 1}}),
            "model.kind",
        ),
        (
            json!({"name": "a", "task": "fourier", "model": {"kind": "rabi", "delta": 0, "v": 1}}),
            "task",
        ),
        (
            json!({"name": "a", "task": "floquet-spectrum", "model": {"kind": "fleet", "name": "two_harmonic_d3"}, "parameters": {"n_modes": 1}}),
            "parameters.n_modes",
        ),
    ];
    for (k, (value, field)) in cases.into_iter().enumerate() {
        let path = write_config(dir.path(), &format!("bad{k}"), value);
        let out = cli(&[
            "--config",
            path.to_str().unwrap(),
            "--out",
            dir.path().join("out").to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(2), "case {k}");
        let stderr = String::from_utf8_lossy(&out.stderr);
        assert!(
            stderr.contains(field),
            "case {k}: `{stderr}` does not mention `{field}`"
        );
    }
}

#[test]
fn numerical_failure_exits_with_three() {
    let dir = tempfile::tempdir().unwrap();
    // One iterate cannot show three stable gaps, so the S-matrix cannot be formed.
    let path = write_config(
        dir.path(),
        "short",
        json!({
            "name": "short",
            "task": "wave-operators",
            "model": {"kind": "lattice", "sites": 64, "well_depth": -2.0, "drive_amp": 0.5, "window": 5},
            "parameters": {"steps_per_period": 16, "n_max": 1}
        }),
    );
    let out_dir = dir.path().join("out");
    let out = cli(&["--config", path.to_str().unwrap(), "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    let report: Value = serde_json::from_str(&fs::read_to_string(out_dir.join("short.json")).unwrap()).unwrap();
    assert_eq!(report["status"], "failed");
    assert_eq!(report["error"]["kind"], "no_convergence");
    assert_eq!(report["error"]["exit_code"], 3);
}

#[test]
fn cli_oracles() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let names = ["correspondence_constant", "resolvent_scalar", "wave_operators_free"];
    let mut args = vec![
        "--jobs".to_string(),
        "3".into(),
        "--out".into(),
        out_dir.to_str().unwrap().into(),
    ];
    for n in names {
        args.push("--config".into());
        args.push(configs_dir().join(format!("{n}.json")).to_str().unwrap().into());
    }
    let out = Command::new(env!("CARGO_BIN_EXE_floquet-run"))
        .args(&args)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let read = |n: &str| -> Value {
        serde_json::from_str(&fs::read_to_string(out_dir.join(format!("{n}.json"))).unwrap()).unwrap()
    };

    let c = read("correspondence_constant");
    assert!(c["result"]["correspondence"]["max_distance"].as_f64().unwrap() < 1e-12);

    // d = 1, H0 = 0, lambda = i: (0 - i)^{-1} = i.
    let r = read("resolvent_scalar");
    let z = &r["result"]["r0_on_constant"][0];
    assert!(z[0].as_f64().unwrap().abs() < 1e-12);
    assert!((z[1].as_f64().unwrap() - 1.0).abs() < 1e-12);

    let w = &read("wave_operators_free")["result"];
    for key in [
        "isometry_defect",
        "unitarity_defect",
        "intertwining_defect",
        "averaging_difference",
        "covariance_defect",
    ] {
        assert!(w[key].as_f64().unwrap() <= 1e-12, "{key} = {}", w[key]);
    }
    assert!(w["s_matrix"]["identity_defect"].as_f64().unwrap() <= 1e-12);
    assert_eq!(w["converged_fraction"], 1.0);
}

#[test]
fn sweeps_mark_failed_rows_and_continue() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(
        dir.path(),
        "eta",
        json!({
            "name": "eta",
            "task": "resolvent-check",
            "model": {"kind": "rabi", "delta": 0.0, "v": 1.0},
            "parameters": {"lambda": [0.0, 4.0], "n_t": 32, "n_modes": 4},
            "sweep": {"parameter": "parameters.lambda.1", "values": [4.0, 0.0, 16.0, 64.0]}
        }),
    );
    let out_dir = dir.path().join("out");
    let out = cli(&[
        "--config",
        path.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
        "--jobs",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let mut rdr = csv::Reader::from_path(out_dir.join("eta.csv")).unwrap();
    let headers = rdr.headers().unwrap().clone();
    assert_eq!(&headers[0], "parameters.lambda.1");
    assert_eq!(&headers[1], "status");
    let norm_col = headers.iter().position(|h| h == "block_q_norm").unwrap();
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 4);
    assert_eq!(&rows[1][1], "failed");
    assert!(rows[1][headers.len() - 1].contains("parameters.lambda"));
    let norms: Vec<f64> = [0, 2, 3].iter().map(|&k| rows[k][norm_col].parse().unwrap()).collect();
    assert!(norms.windows(2).all(|w| w[1] < w[0]), "{norms:?}");
    // A JSON sweep report accompanies the table by default.
    let report: Value = serde_json::from_str(&fs::read_to_string(out_dir.join("eta.json")).unwrap()).unwrap();
    assert_eq!(report["rows"].as_array().unwrap().len(), 4);
}

#[test]
fn bad_sweep_paths_are_validation_errors() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(
        dir.path(),
        "p",
        json!({
            "name": "p",
            "task": "monodromy",
            "model": {"kind": "rabi", "delta": 0.0, "v": 1.0},
            "sweep": {"parameter": "model.delta.0", "values": [1]}
        }),
    );
    let out = cli(&[
        "--config",
        path.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("sweep.parameter"));
}

#[test]
fn reruns_reproduce_payloads() {
    let dir = tempfile::tempdir().unwrap();
    let path = configs_dir().join("bound_states.json");
    let a = match run_scenario(&path, &dir.path().join("a"), Some(3)) {
        Outcome::Single(r) => r,
        other => panic!("{other:?}"),
    };
    let b = match run_scenario(&path, &dir.path().join("b"), Some(3)) {
        Outcome::Single(r) => r,
        other => panic!("{other:?}"),
    };
    assert_eq!(a.status, Status::Ok);
    assert_eq!(a.payload(), b.payload());
    assert_eq!(a.provenance.config_hash, b.provenance.config_hash);
}

#[test]
fn echoed_config_reproduces_the_run() {
    let s = Scenario::load(configs_dir().join("monodromy_rabi.json"), None).unwrap();
    let first = run(&s, None);
    let again = Scenario::from_value(first.provenance.config.clone(), &configs_dir(), None).unwrap();
    let second = run(&again, None);
    assert_eq!(first.payload(), second.payload());
    match first.result.unwrap() {
        TaskReport::Monodromy(m) => {
            let study = m.convergence.unwrap();
            assert!(study.order_verified(0.2, 1e-12));
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn seed_only_moves_probes() {
    let path = configs_dir().join("wave_operators_free.json");
    let a = Scenario::load(&path, Some(1)).unwrap();
    let b = Scenario::load(&path, Some(2)).unwrap();
    assert_ne!(a.config, b.config);
    let strip = |s: &Scenario| {
        let mut v = serde_json::to_value(&s.config).unwrap();
        v["parameters"]["probes"]["seed"] = Value::Null;
        v
    };
    assert_eq!(strip(&a), strip(&b));
}

#[test]
fn csv_output_for_single_runs() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(
        dir.path(),
        "spec",
        json!({
            "name": "spec",
            "task": "floquet-spectrum",
            "model": {"kind": "fleet", "name": "rabi"},
            "output": {"format": "csv", "file": "spectrum"}
        }),
    );
    let out_dir = dir.path().join("out");
    assert_eq!(
        cli(&["--config", path.to_str().unwrap(), "--out", out_dir.to_str().unwrap()])
            .status
            .code(),
        Some(0)
    );
    let text = fs::read_to_string(out_dir.join("spectrum.csv")).unwrap();
    assert!(text.starts_with("scenario,status,shift_commutator_defect"));
    assert!(!out_dir.join("spec.json").exists());
}

#[test]
fn duplicate_output_stems_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let value = json!({"name": "same", "task": "floquet-spectrum", "model": {"kind": "fleet", "name": "rabi"}});
    let a = write_config(dir.path(), "a", value.clone());
    let b = write_config(dir.path(), "b", value);
    let out = cli(&[
        "--config",
        a.to_str().unwrap(),
        "--config",
        b.to_str().unwrap(),
        "--out",
        dir.path().join("out").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}
