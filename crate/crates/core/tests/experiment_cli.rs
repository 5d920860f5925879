use std::path::Path;
use std::process::Command;

use discojam::experiment::{
    parse_spec, run_experiment, validate_and_load, write_csv, ExperimentId, ExperimentSpec, Overrides, ResultRow,
    CSV_COLUMNS, SCHEMA_VERSION,
};
use discojam::jam::PhaseResolution;
use discojam::rate::Scenario;
use discojam::scene::SceneConfig;

const GOLDEN: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/golden");

fn small_scene(trials: usize) -> SceneConfig {
    SceneConfig {
        n_antennas: 8,
        n_dirs_elements: 16,
        n_users: 2,
        trials,
        ..SceneConfig::default()
    }
}

fn spec(experiment: ExperimentId, grid: Vec<f64>, scenarios: Vec<Scenario>, scene: SceneConfig) -> ExperimentSpec {
    ExperimentSpec {
        grid,
        scenarios,
        scene,
        ..ExperimentSpec::defaults(experiment)
    }
}

fn csv_text(rows: &[ResultRow]) -> String {
    let mut buf = Vec::new();
    write_csv(&mut buf, rows).unwrap();
    String::from_utf8(buf).unwrap()
}

fn rows_for<'a>(rows: &'a [ResultRow], scenario: &str) -> Vec<&'a ResultRow> {
    rows.iter().filter(|r| r.scenario == scenario).collect()
}

#[test]
fn power_sweep_emits_one_row_per_point_scenario_and_user_aggregate() {
    let s = spec(
        ExperimentId::PowerSweep,
        ExperimentId::PowerSweep.default_grid(),
        vec!["NoJam-ZF".parse().unwrap()],
        SceneConfig {
            n_dirs_elements: 16,
            trials: 3,
            ..SceneConfig::default()
        },
    );
    let out = run_experiment(&s).unwrap();
    let k = s.scene.n_users;
    assert!(out.ok());
    assert_eq!(out.rows.len(), 31 * (k + 1));
    let users: Vec<&str> = out.rows[..k + 1].iter().map(|r| r.user.as_str()).collect();
    assert_eq!(users.last(), Some(&"avg"));
    assert_eq!(users[0], "1");
    // canonical order: sweep value ascending
    assert!(out.rows.windows(2).all(|w| w[0].sweep_value <= w[1].sweep_value));
    assert!(out.rows.iter().all(|r| r.bound_bps_hz.is_some() && r.trials == 3 && r.seed == s.scene.seed));
}

#[test]
fn empty_surface_makes_dirs_rows_equal_no_jam_rows() {
    let s = ExperimentSpec {
        powers_dbm: vec![-14.0, 6.0],
        ..spec(
            ExperimentId::NdSweep,
            vec![0.0],
            vec!["NoJam-ZF".parse().unwrap(), "DIRS-ZF".parse().unwrap()],
            small_scene(20),
        )
    };
    let out = run_experiment(&s).unwrap();
    for p in ["-14", "6"] {
        let nojam = rows_for(&out.rows, &format!("NoJam-ZF@{p}dBm"));
        let dirs = rows_for(&out.rows, &format!("DIRS-ZF@{p}dBm"));
        assert_eq!(nojam.len(), 3);
        for (a, b) in nojam.iter().zip(&dirs) {
            assert!((a.mean_rate_bps_hz - b.mean_rate_bps_hz).abs() <= a.ci_half + b.ci_half);
            assert_eq!(a.mean_rate_bps_hz, b.mean_rate_bps_hz);
            // with no elements the jammed bound is the unjammed one
            assert_eq!(a.bound_bps_hz, b.bound_bps_hz);
        }
    }
}

#[test]
fn bits_sweep_means_overlap() {
    let s = ExperimentSpec {
        powers_dbm: vec![6.0],
        ..spec(
            ExperimentId::BitsSweep,
            vec![1.0, 2.0, 3.0],
            vec!["DIRS-ZF".parse().unwrap()],
            SceneConfig {
                n_antennas: 64,
                n_dirs_elements: 1024,
                trials: 100,
                ..SceneConfig::default()
            },
        )
    };
    let out = run_experiment(&s).unwrap();
    let avg: Vec<&ResultRow> = out.rows.iter().filter(|r| r.user == "avg").collect();
    assert_eq!(avg.len(), 3);
    assert_eq!(avg.iter().map(|r| r.sweep_value).collect::<Vec<_>>(), vec![1.0, 2.0, 3.0]);
    for a in &avg {
        for b in &avg {
            let gap = (a.mean_rate_bps_hz - b.mean_rate_bps_hz).abs();
            assert!(gap <= a.ci_half + b.ci_half, "b={} vs b={}", a.sweep_value, b.sweep_value);
        }
    }
}

#[test]
fn nt_nd_locked_sweep_scales_the_surface_with_the_array() {
    let s = ExperimentSpec {
        powers_dbm: vec![6.0],
        ..spec(
            ExperimentId::NtNdLockedSweep,
            vec![8.0, 16.0],
            vec!["DIRS-ZF".parse().unwrap()],
            small_scene(4),
        )
    };
    let out = run_experiment(&s).unwrap();
    let avg: Vec<&ResultRow> = out.rows.iter().filter(|r| r.user == "avg").collect();
    assert_eq!(avg.len(), 2);
    assert_eq!(avg[0].sweep_var, "n_antennas");
    assert_eq!(ExperimentId::NtNdLockedSweep.apply(&s.scene, 16.0).n_dirs_elements, 256);
}

#[test]
fn identical_specs_give_byte_identical_csv() {
    let s = spec(
        ExperimentId::PowerSweep,
        vec![-5.0, 5.0],
        vec!["DIRS-ZF".parse().unwrap(), "DIRS-MRC".parse().unwrap(), "PJ-RCG".parse().unwrap()],
        small_scene(6),
    );
    let a = csv_text(&run_experiment(&s).unwrap().rows);
    let b = csv_text(&run_experiment(&s).unwrap().rows);
    assert_eq!(a, b);
    let reseeded = ExperimentSpec {
        scene: SceneConfig {
            seed: 2,
            ..s.scene.clone()
        },
        ..s.clone()
    };
    assert_ne!(a, csv_text(&run_experiment(&reseeded).unwrap().rows));
}

#[test]
fn tiny_spec_matches_golden_csv() {
    let spec = validate_and_load(&Path::new(GOLDEN).join("tiny_spec.json"), &Overrides::default()).unwrap();
    let out = run_experiment(&spec).unwrap();
    let golden = std::fs::read_to_string(Path::new(GOLDEN).join("tiny_power_sweep.csv")).unwrap();
    let text = csv_text(&out.rows);
    assert_eq!(text.lines().next().unwrap(), CSV_COLUMNS.join(","));
    assert_eq!(text, golden);
}

#[test]
fn minimal_file_resolves_to_defaults_and_bad_files_name_the_field() {
    let spec = parse_spec(r#"{"experiment": "nd_sweep"}"#, &Overrides::default()).unwrap();
    assert_eq!(spec, ExperimentSpec::defaults(ExperimentId::NdSweep));
    assert_eq!(spec.scene.phase_bits, PhaseResolution::Bits(1));

    let err = parse_spec(r#"{"experiment": "nd_sweep", "grid": []}"#, &Overrides::default()).unwrap_err();
    assert!(err.to_string().contains("grid"), "{err}");
    let text = r#"{"experiment": "power_sweep", "scenarios": ["AJ(-4dBm)"], "scene": {"aj_position": null}}"#;
    let err = parse_spec(text, &Overrides::default()).unwrap_err();
    assert!(err.to_string().contains("aj_position"), "{err}");
    let err = parse_spec("{}", &Overrides::default()).unwrap_err();
    assert!(err.to_string().contains("experiment"), "{err}");
}

fn cli() -> Command {
    Command::new(env!("CARGO_BIN_EXE_discojam"))
}

#[test]
fn cli_run_writes_csv_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let status = cli()
        .args(["run", "--config", &format!("{GOLDEN}/tiny_spec.json"), "--out"])
        .arg(dir.path())
        .env("RUST_LOG", "error")
        .status()
        .unwrap();
    assert!(status.success());
    let csv = std::fs::read_to_string(dir.path().join("power_sweep.csv")).unwrap();
    assert_eq!(csv, std::fs::read_to_string(format!("{GOLDEN}/tiny_power_sweep.csv")).unwrap());
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["schema_version"], SCHEMA_VERSION);
    assert_eq!(manifest["rows"], 24);
    assert_eq!(manifest["spec"]["scene"]["n_antennas"], 8);
    assert_eq!(manifest["csv_columns"].as_array().unwrap().len(), CSV_COLUMNS.len());
}

#[test]
fn cli_overrides_and_errors() {
    let dir = tempfile::tempdir().unwrap();
    let status = cli()
        .args(["run", "--config", &format!("{GOLDEN}/tiny_spec.json"), "--trials", "2", "--seed", "9", "--out"])
        .arg(dir.path())
        .env("RUST_LOG", "error")
        .status()
        .unwrap();
    assert!(status.success());
    let csv = std::fs::read_to_string(dir.path().join("power_sweep.csv")).unwrap();
    assert!(csv.lines().skip(1).all(|l| l.ends_with(",2,9")));

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"experiment": "k_sweep", "grid": []}"#).unwrap();
    let out = cli().args(["run", "--config"]).arg(&bad).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("grid"));

    let out = cli().args(["run", "--experiment", "no_such_sweep"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("experiment"));

    let out = cli().args(["show", "--experiment", "k_sweep"]).output().unwrap();
    assert!(out.status.success());
    let shown: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(shown["grid"], serde_json::json!([2.0, 4.0, 8.0, 12.0, 16.0]));
}
