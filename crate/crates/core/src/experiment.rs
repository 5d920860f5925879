//! Experiment runner: sweep definitions, config loading and result emission.
//!
//! A config file is a JSON object; every key is optional and unknown keys are
//! rejected:
//!
//! ```json
//! {
//!   "experiment": "power_sweep",
//!   "grid": [-20, -10, 0, 10],
//!   "scenarios": ["NoJam-ZF", "DIRS-ZF", "AJ(4dBm)"],
//!   "bounds": ["Prop3", "NoJam-ZF-bound"],
//!   "powers_dbm": [-14, 6],
//!   "scene": { "n_antennas": 256, "n_dirs_elements": 4096, "trials": 500 },
//!   "rcg": { "max_iterations": 500 },
//!   "phase_law": "uniform"
//! }
//! ```
//!
//! `powers_dbm` only applies to sweeps over something other than transmit
//! power; their scenario labels carry the power, e.g. `DIRS-ZF@6dBm`.

use serde::{Deserialize, Serialize};
use std::fs;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use crate::bounds::{lower_bound_mrc, lower_bound_zf, BoundInput};
use crate::detect::DetectorKind;
use crate::jam::{PhaseLaw, PhaseResolution};
use crate::rate::{ergodic_grid, ErgodicEstimate, ErgodicOptions, Scenario};
use crate::rcg::RcgConfig;
use crate::scene::{dbm_to_watts, LargeScaleGains, SceneConfig};
use crate::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

pub const CSV_COLUMNS: [&str; 10] = [
    "experiment",
    "sweep_var",
    "sweep_value",
    "scenario",
    "user",
    "mean_rate_bps_hz",
    "ci_half",
    "bound_bps_hz",
    "trials",
    "seed",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentId {
    PowerSweep,
    NdSweep,
    BitsSweep,
    DbdSweep,
    NtSweep,
    NtNdLockedSweep,
    KSweep,
}

impl ExperimentId {
    pub const ALL: [ExperimentId; 7] = [
        ExperimentId::PowerSweep,
        ExperimentId::NdSweep,
        ExperimentId::BitsSweep,
        ExperimentId::DbdSweep,
        ExperimentId::NtSweep,
        ExperimentId::NtNdLockedSweep,
        ExperimentId::KSweep,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentId::PowerSweep => "power_sweep",
            ExperimentId::NdSweep => "nd_sweep",
            ExperimentId::BitsSweep => "bits_sweep",
            ExperimentId::DbdSweep => "dbd_sweep",
            ExperimentId::NtSweep => "nt_sweep",
            ExperimentId::NtNdLockedSweep => "nt_nd_locked_sweep",
            ExperimentId::KSweep => "k_sweep",
        }
    }

    /// Name of the swept variable as written to the CSV.
    pub fn sweep_var(&self) -> &'static str {
        match self {
            ExperimentId::PowerSweep => "p_d_dbm",
            ExperimentId::NdSweep => "n_dirs_elements",
            ExperimentId::BitsSweep => "phase_bits",
            ExperimentId::DbdSweep => "d_bd_m",
            ExperimentId::NtSweep | ExperimentId::NtNdLockedSweep => "n_antennas",
            ExperimentId::KSweep => "n_users",
        }
    }

    pub fn default_grid(&self) -> Vec<f64> {
        match self {
            ExperimentId::PowerSweep => (-20..=10).map(f64::from).collect(),
            ExperimentId::NdSweep => vec![256.0, 512.0, 1024.0, 2048.0, 4096.0],
            ExperimentId::BitsSweep => vec![1.0, 2.0, 3.0, 4.0],
            ExperimentId::DbdSweep => vec![2.0, 4.0, 6.0, 8.0, 10.0],
            ExperimentId::NtSweep => vec![32.0, 64.0, 128.0, 256.0, 512.0],
            ExperimentId::NtNdLockedSweep => vec![64.0, 128.0, 256.0],
            ExperimentId::KSweep => vec![2.0, 4.0, 8.0, 12.0, 16.0],
        }
    }

    fn integer_grid(&self) -> bool {
        !matches!(self, ExperimentId::PowerSweep | ExperimentId::DbdSweep)
    }

    /// Scene for one grid point. Transmit power is handled by the estimator.
    pub fn apply(&self, base: &SceneConfig, value: f64) -> SceneConfig {
        let mut s = base.clone();
        let n = value as usize;
        match self {
            ExperimentId::PowerSweep => s.p_d_dbm = value,
            ExperimentId::NdSweep => s.n_dirs_elements = n,
            ExperimentId::BitsSweep => s.phase_bits = PhaseResolution::Bits(n as u32),
            ExperimentId::DbdSweep => s.set_bs_dirs_distance(value),
            ExperimentId::NtSweep => s.n_antennas = n,
            ExperimentId::NtNdLockedSweep => {
                s.n_antennas = n;
                s.n_dirs_elements = 16 * n;
            }
            ExperimentId::KSweep => s.n_users = n,
        }
        s
    }
}

impl std::fmt::Display for ExperimentId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExperimentId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        ExperimentId::ALL
            .into_iter()
            .find(|e| e.as_str() == s)
            .ok_or_else(|| Error::config("experiment", format!("unknown experiment {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BoundKind {
    /// MRC bound under DIRS jamming.
    Prop2,
    /// ZF bound under DIRS jamming.
    Prop3,
    #[serde(rename = "NoJam-ZF-bound")]
    NoJamZf,
    #[serde(rename = "NoJam-MRC-bound")]
    NoJamMrc,
}

impl BoundKind {
    pub const ALL: [BoundKind; 4] = [
        BoundKind::Prop2,
        BoundKind::Prop3,
        BoundKind::NoJamZf,
        BoundKind::NoJamMrc,
    ];

    /// The bound that belongs to a scenario's rows, if any.
    pub fn for_scenario(s: &Scenario) -> Option<BoundKind> {
        match s {
            Scenario::Dirs(DetectorKind::Mrc) => Some(BoundKind::Prop2),
            Scenario::Dirs(DetectorKind::Zf) => Some(BoundKind::Prop3),
            Scenario::NoJam(DetectorKind::Zf) => Some(BoundKind::NoJamZf),
            Scenario::NoJam(DetectorKind::Mrc) => Some(BoundKind::NoJamMrc),
            _ => None,
        }
    }

    /// Bound value for user `k` (zero-based).
    pub fn evaluate(&self, scene: &SceneConfig, gains: &LargeScaleGains, p_d_dbm: f64, k: usize) -> Result<f64> {
        let n_dirs = match self {
            BoundKind::Prop2 | BoundKind::Prop3 => scene.n_dirs_elements,
            BoundKind::NoJamZf | BoundKind::NoJamMrc => 0,
        };
        let input = BoundInput {
            n_antennas: scene.n_antennas,
            n_users: scene.n_users,
            n_dirs_elements: n_dirs,
            p_d_watts: dbm_to_watts(p_d_dbm),
            noise_watts: scene.noise_watts()?,
            gains: gains.clone(),
            target_user: k,
        };
        match self {
            BoundKind::Prop2 | BoundKind::NoJamMrc => lower_bound_mrc(&input),
            BoundKind::Prop3 | BoundKind::NoJamZf => lower_bound_zf(&input),
        }
    }
}

fn default_scenarios() -> Vec<Scenario> {
    vec![
        Scenario::NoJam(DetectorKind::Zf),
        Scenario::NoJam(DetectorKind::Mrc),
        Scenario::Dirs(DetectorKind::Zf),
        Scenario::Dirs(DetectorKind::Mrc),
        Scenario::Aj {
            detector: DetectorKind::Zf,
            p_j_dbm: -4.0,
        },
        Scenario::Aj {
            detector: DetectorKind::Zf,
            p_j_dbm: 4.0,
        },
    ]
}

/// On-disk form: everything optional.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentFile {
    pub experiment: Option<ExperimentId>,
    pub grid: Option<Vec<f64>>,
    pub scenarios: Option<Vec<Scenario>>,
    pub bounds: Option<Vec<BoundKind>>,
    pub powers_dbm: Option<Vec<f64>>,
    #[serde(default)]
    pub scene: SceneConfig,
    #[serde(default)]
    pub rcg: RcgConfig,
    #[serde(default)]
    pub phase_law: PhaseLaw,
}

/// Fully resolved and validated experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentSpec {
    pub experiment: ExperimentId,
    pub grid: Vec<f64>,
    pub scene: SceneConfig,
    pub scenarios: Vec<Scenario>,
    pub bounds: Vec<BoundKind>,
    /// Transmit powers for sweeps over anything but power.
    pub powers_dbm: Vec<f64>,
    pub rcg: RcgConfig,
    pub phase_law: PhaseLaw,
}

/// Command-line overrides applied on top of the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub experiment: Option<ExperimentId>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
}

impl ExperimentSpec {
    pub fn defaults(experiment: ExperimentId) -> Self {
        ExperimentSpec {
            experiment,
            grid: experiment.default_grid(),
            scene: SceneConfig::default(),
            scenarios: default_scenarios(),
            bounds: BoundKind::ALL.to_vec(),
            powers_dbm: vec![-14.0, 6.0],
            rcg: RcgConfig::default(),
            phase_law: PhaseLaw::Uniform,
        }
    }

    pub fn resolve(file: ExperimentFile, overrides: &Overrides) -> Result<Self> {
        let experiment = overrides
            .experiment
            .or(file.experiment)
            .ok_or_else(|| Error::config("experiment", "no experiment given in file or on the command line"))?;
        let mut spec = ExperimentSpec::defaults(experiment);
        if let Some(g) = file.grid {
            spec.grid = g;
        }
        if let Some(s) = file.scenarios {
            spec.scenarios = s;
        }
        if let Some(b) = file.bounds {
            spec.bounds = b;
        }
        if let Some(p) = file.powers_dbm {
            spec.powers_dbm = p;
        }
        spec.scene = file.scene;
        spec.rcg = file.rcg;
        spec.phase_law = file.phase_law;
        if let Some(t) = overrides.trials {
            spec.scene.trials = t;
        }
        if let Some(s) = overrides.seed {
            spec.scene.seed = s;
        }
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid.is_empty() {
            return Err(Error::config("grid", "must not be empty"));
        }
        if self.grid.iter().any(|v| !v.is_finite()) {
            return Err(Error::config("grid", "values must be finite"));
        }
        if self.grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::config("grid", "must be strictly increasing"));
        }
        if self.experiment.integer_grid() && self.grid.iter().any(|v| *v < 0.0 || v.fract() != 0.0) {
            return Err(Error::config("grid", "values must be non-negative integers"));
        }
        if self.scenarios.is_empty() {
            return Err(Error::config("scenarios", "must not be empty"));
        }
        if self.scenarios.iter().any(|s| matches!(s, Scenario::Aj { .. })) && self.scene.aj_position.is_none() {
            return Err(Error::config("aj_position", "required by the AJ scenarios"));
        }
        if self.experiment != ExperimentId::PowerSweep && self.powers_dbm.is_empty() {
            return Err(Error::config("powers_dbm", "must not be empty"));
        }
        if self.scene.trials < 2 {
            return Err(Error::config("trials", "must be at least 2"));
        }
        self.scene.validate()?;
        for &v in &self.grid {
            self.experiment.apply(&self.scene, v).validate().map_err(|e| match e {
                Error::Config { field, message } => Error::config(
                    "grid",
                    format!("{} = {v} gives an invalid scene ({field}: {message})", self.experiment.sweep_var()),
                ),
                e => e,
            })?;
            if self.experiment == ExperimentId::BitsSweep && v < 1.0 {
                return Err(Error::config("grid", "phase bits must be at least 1"));
            }
        }
        Ok(())
    }
}

pub fn parse_spec(text: &str, overrides: &Overrides) -> Result<ExperimentSpec> {
    let file: ExperimentFile = serde_json::from_str(text)
        .map_err(|e| Error::Parse(format!("line {} column {}: {e}", e.line(), e.column())))?;
    ExperimentSpec::resolve(file, overrides)
}

pub fn validate_and_load(path: &Path, overrides: &Overrides) -> Result<ExperimentSpec> {
    let text = fs::read_to_string(path)?;
    parse_spec(&text, overrides).map_err(|e| match e {
        Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
        e => e,
    })
}

/// One CSV record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub experiment: String,
    pub sweep_var: String,
    pub sweep_value: f64,
    pub scenario: String,
    /// One-based user index, `avg`, or `error` for a failed grid point.
    pub user: String,
    pub mean_rate_bps_hz: f64,
    pub ci_half: f64,
    pub bound_bps_hz: Option<f64>,
    pub trials: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PointFailure {
    pub sweep_value: f64,
    pub message: String,
}

#[derive(Debug, Clone, Default)]
pub struct ExperimentOutput {
    pub rows: Vec<ResultRow>,
    pub failures: Vec<PointFailure>,
    pub redraws: usize,
}

impl ExperimentOutput {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

fn scenario_label(spec: &ExperimentSpec, sc: &Scenario, p_d_dbm: f64) -> String {
    if spec.experiment == ExperimentId::PowerSweep {
        sc.to_string()
    } else {
        format!("{sc}@{p_d_dbm}dBm")
    }
}

#[allow(clippy::too_many_arguments)]
fn push_rows(
    out: &mut Vec<ResultRow>,
    spec: &ExperimentSpec,
    scene: &SceneConfig,
    gains: &LargeScaleGains,
    sweep_value: f64,
    p_d_dbm: f64,
    est: &ErgodicEstimate,
) -> Result<()> {
    let bound = BoundKind::for_scenario(&est.scenario).filter(|b| spec.bounds.contains(b));
    let per_user_bounds = bound
        .map(|b| {
            (0..scene.n_users)
                .map(|k| b.evaluate(scene, gains, p_d_dbm, k))
                .collect::<Result<Vec<_>>>()
        })
        .transpose()?;
    let label = scenario_label(spec, &est.scenario, p_d_dbm);
    let row = |user: String, mean: f64, ci: f64, bound: Option<f64>| ResultRow {
        experiment: spec.experiment.to_string(),
        sweep_var: spec.experiment.sweep_var().to_string(),
        sweep_value,
        scenario: label.clone(),
        user,
        mean_rate_bps_hz: mean,
        ci_half: ci,
        bound_bps_hz: bound,
        trials: est.trials,
        seed: scene.seed,
    };
    for (k, st) in est.per_user.iter().enumerate() {
        out.push(row(
            (k + 1).to_string(),
            st.mean,
            st.half_width,
            per_user_bounds.as_ref().map(|b| b[k]),
        ));
    }
    let avg_bound = per_user_bounds.map(|b| b.iter().sum::<f64>() / b.len() as f64);
    out.push(row(
        "avg".into(),
        est.user_average.mean,
        est.user_average.half_width,
        avg_bound,
    ));
    Ok(())
}

fn failure_rows(out: &mut Vec<ResultRow>, spec: &ExperimentSpec, sweep_value: f64, powers: &[f64]) {
    for &p in powers {
        for sc in &spec.scenarios {
            out.push(ResultRow {
                experiment: spec.experiment.to_string(),
                sweep_var: spec.experiment.sweep_var().to_string(),
                sweep_value,
                scenario: scenario_label(spec, sc, p),
                user: "error".into(),
                mean_rate_bps_hz: f64::NAN,
                ci_half: f64::NAN,
                bound_bps_hz: None,
                trials: spec.scene.trials,
                seed: spec.scene.seed,
            });
        }
    }
}

/// Evaluates every grid point and scenario.
///
/// A grid point that fails numerically yields `user = "error"` rows and a
/// [`PointFailure`]; the remaining points still run.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentOutput> {
    spec.validate()?;
    let mut out = ExperimentOutput::default();
    let opts = |scene: &SceneConfig| ErgodicOptions {
        phase_law: spec.phase_law,
        rcg: spec.rcg.clone(),
        ..ErgodicOptions::from_scene(scene)
    };

    if spec.experiment == ExperimentId::PowerSweep {
        let scene = &spec.scene;
        match ergodic_grid(scene, &spec.scenarios, &spec.grid, &opts(scene)) {
            Ok(grid) => {
                out.redraws += grid.redraws;
                for (pi, &p) in spec.grid.iter().enumerate() {
                    for est in &grid.estimates[pi] {
                        push_rows(&mut out.rows, spec, scene, &grid.prep.gains, p, p, est)?;
                    }
                }
            }
            Err(e) => {
                for &p in &spec.grid {
                    failure_rows(&mut out.rows, spec, p, &[p]);
                    out.failures.push(PointFailure {
                        sweep_value: p,
                        message: e.to_string(),
                    });
                }
            }
        }
        return Ok(out);
    }

    for &v in &spec.grid {
        let scene = spec.experiment.apply(&spec.scene, v);
        match ergodic_grid(&scene, &spec.scenarios, &spec.powers_dbm, &opts(&scene)) {
            Ok(grid) => {
                out.redraws += grid.redraws;
                for (pi, &p) in spec.powers_dbm.iter().enumerate() {
                    for est in &grid.estimates[pi] {
                        push_rows(&mut out.rows, spec, &scene, &grid.prep.gains, v, p, est)?;
                    }
                }
            }
            Err(e) => {
                failure_rows(&mut out.rows, spec, v, &spec.powers_dbm);
                out.failures.push(PointFailure {
                    sweep_value: v,
                    message: e.to_string(),
                });
            }
        }
    }
    Ok(out)
}

pub fn write_csv<W: Write>(out: W, rows: &[ResultRow]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(CSV_COLUMNS).map_err(|e| Error::Parse(e.to_string()))?;
    for r in rows {
        w.serialize(r).map_err(|e| Error::Parse(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    schema_version: u32,
    generated_unix_s: u64,
    csv: String,
    csv_columns: &'a [&'a str],
    spec: &'a ExperimentSpec,
    rows: usize,
    zf_redraws: usize,
    failures: &'a [PointFailure],
}

/// Writes `<experiment>.csv` and `manifest.json` into `dir`.
pub fn write_outputs(dir: &Path, spec: &ExperimentSpec, output: &ExperimentOutput) -> Result<()> {
    fs::create_dir_all(dir)?;
    let csv_name = format!("{}.csv", spec.experiment);
    write_csv(fs::File::create(dir.join(&csv_name))?, &output.rows)?;
    let generated = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let manifest = Manifest {
        schema_version: SCHEMA_VERSION,
        generated_unix_s: generated,
        csv: csv_name,
        csv_columns: &CSV_COLUMNS,
        spec,
        rows: output.rows.len(),
        zf_redraws: output.redraws,
        failures: &output.failures,
    };
    let text = serde_json::to_string_pretty(&manifest).map_err(|e| Error::Parse(e.to_string()))?;
    fs::write(dir.join("manifest.json"), text + "\n")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn over(e: ExperimentId) -> Overrides {
        Overrides {
            experiment: Some(e),
            ..Overrides::default()
        }
    }

    #[test]
    fn minimal_file_gives_documented_defaults() {
        let spec = parse_spec(r#"{"experiment": "power_sweep"}"#, &Overrides::default()).unwrap();
        assert_eq!(spec, ExperimentSpec::defaults(ExperimentId::PowerSweep));
        assert_eq!(spec.grid.len(), 31);
        assert_eq!(spec.scene.n_antennas, 256);
        assert_eq!(spec.scene.n_dirs_elements, 4096);
        assert_eq!(spec.scene.n_users, 8);
        assert_eq!(spec.scene.bs_dirs_distance(), 2.0);
        let empty = parse_spec("{}", &over(ExperimentId::KSweep)).unwrap();
        assert_eq!(empty.grid, vec![2.0, 4.0, 8.0, 12.0, 16.0]);
    }

    #[test]
    fn empty_grid_is_rejected_by_name() {
        let err = parse_spec(r#"{"grid": []}"#, &over(ExperimentId::NdSweep)).unwrap_err();
        assert!(matches!(&err, Error::Config { field, .. } if field == "grid"), "{err}");
        let err = parse_spec(r#"{"grid": [3, 1]}"#, &over(ExperimentId::NdSweep)).unwrap_err();
        assert!(err.to_string().contains("grid"));
    }

    #[test]
    fn aj_needs_a_position() {
        let text = r#"{"scenarios": ["AJ(4dBm)"], "scene": {"aj_position": null}}"#;
        let err = parse_spec(text, &over(ExperimentId::PowerSweep)).unwrap_err();
        assert!(matches!(&err, Error::Config { field, .. } if field == "aj_position"), "{err}");
    }

    #[test]
    fn unknown_keys_are_rejected_with_location() {
        let err = parse_spec("{\n  \"gird\": [1]\n}", &over(ExperimentId::NdSweep)).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 2") && msg.contains("gird"), "{msg}");
        let err = parse_spec(r#"{"scene": {"n_antenas": 4}}"#, &over(ExperimentId::NdSweep)).unwrap_err();
        assert!(err.to_string().contains("n_antenas"));
    }

    #[test]
    fn invalid_grid_points_are_caught() {
        let err = parse_spec(r#"{"grid": [4, 8]}"#, &over(ExperimentId::NtSweep)).unwrap_err();
        assert!(err.to_string().contains("grid"), "{err}");
        let err = parse_spec(r#"{"grid": [0, 1]}"#, &over(ExperimentId::BitsSweep)).unwrap_err();
        assert!(err.to_string().contains("grid"));
    }

    #[test]
    fn overrides_take_precedence() {
        let o = Overrides {
            experiment: Some(ExperimentId::BitsSweep),
            trials: Some(7),
            seed: Some(99),
        };
        let spec = parse_spec(r#"{"experiment": "power_sweep", "scene": {"trials": 3}}"#, &o).unwrap();
        assert_eq!(spec.experiment, ExperimentId::BitsSweep);
        assert_eq!(spec.scene.trials, 7);
        assert_eq!(spec.scene.seed, 99);
    }

    #[test]
    fn scenario_labels_round_trip() {
        for s in ["NoJam-ZF", "NoJam-MRC", "DIRS-ZF", "DIRS-MRC", "AJ(-4dBm)", "AJ(4dBm)", "AJ-MRC(4dBm)", "PJ-RCG", "PJ-RCG-MRC"] {
            let sc: Scenario = s.parse().unwrap();
            assert_eq!(sc.to_string(), s);
        }
        assert!("AJ(4)".parse::<Scenario>().is_err());
        assert!("DIRS-MMSE".parse::<Scenario>().is_err());
    }

    #[test]
    fn grid_application() {
        let base = SceneConfig::default();
        assert_eq!(ExperimentId::NtNdLockedSweep.apply(&base, 64.0).n_dirs_elements, 1024);
        assert_eq!(ExperimentId::DbdSweep.apply(&base, 6.0).bs_dirs_distance(), 6.0);
        assert_eq!(
            ExperimentId::BitsSweep.apply(&base, 3.0).phase_bits,
            PhaseResolution::Bits(3)
        );
    }
}
