//! Per-realization SINRs and the ergodic-rate Monte Carlo estimator.
//!
//! Rates are computed from the SINR expressions directly; no symbols are
//! simulated. The estimator draws one independent realization per trial
//! (channels, DIRS phases, AJ channel) from the stream `(seed, trial)` and
//! evaluates every requested scenario and transmit power on it.

use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::str::FromStr;

use crate::channel::{compose_dirs_channel, draw_aj, draw_aoa, draw_realization, AjChannel, ChannelRealization};
use crate::detect::{mrc, zf, DetectorKind, DetectorMatrix};
use crate::jam::{random_phases_with, PhaseLaw};
use crate::rcg::{self, RcgConfig};
use crate::scene::{dbm_to_watts, large_scale, place_users, LargeScaleGains, Point, SceneConfig};
use crate::stream::{scene_stream, trial_stream, RandomStream};
use crate::{CMatrix, CVector, Error, Result};

/// Two-sided 95% normal quantile.
pub const Z_95: f64 = 1.96;

/// Consecutive ZF failures tolerated within one trial before giving up.
const MAX_REDRAWS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ScenarioTag {
    NoJam,
    #[serde(rename = "DIRS")]
    Dirs,
    #[serde(rename = "AJ")]
    Aj,
    #[serde(rename = "PJ")]
    Pj,
}

/// What is jamming the uplink and which detector the BS uses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Scenario {
    NoJam(DetectorKind),
    /// Random-phase reflecting surface.
    Dirs(DetectorKind),
    /// Active jammer with the given power.
    Aj { detector: DetectorKind, p_j_dbm: f64 },
    /// CSI-based passive jammer optimized per realization by RCG.
    Pj(DetectorKind),
}

impl Scenario {
    pub fn tag(&self) -> ScenarioTag {
        match self {
            Scenario::NoJam(_) => ScenarioTag::NoJam,
            Scenario::Dirs(_) => ScenarioTag::Dirs,
            Scenario::Aj { .. } => ScenarioTag::Aj,
            Scenario::Pj(_) => ScenarioTag::Pj,
        }
    }

    pub fn detector(&self) -> DetectorKind {
        match *self {
            Scenario::NoJam(d) | Scenario::Dirs(d) | Scenario::Pj(d) => d,
            Scenario::Aj { detector, .. } => detector,
        }
    }
}

impl std::fmt::Display for Scenario {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Scenario::NoJam(d) => write!(f, "NoJam-{d}"),
            Scenario::Dirs(d) => write!(f, "DIRS-{d}"),
            Scenario::Aj {
                detector: DetectorKind::Zf,
                p_j_dbm,
            } => write!(f, "AJ({p_j_dbm}dBm)"),
            Scenario::Aj { detector, p_j_dbm } => write!(f, "AJ-{detector}({p_j_dbm}dBm)"),
            Scenario::Pj(DetectorKind::Zf) => write!(f, "PJ-RCG"),
            Scenario::Pj(d) => write!(f, "PJ-RCG-{d}"),
        }
    }
}

impl FromStr for Scenario {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let det = |d: &str| match d {
            "ZF" => Ok(DetectorKind::Zf),
            "MRC" => Ok(DetectorKind::Mrc),
            _ => Err(format!("unknown detector {d:?} in scenario {s:?}")),
        };
        if let Some(d) = s.strip_prefix("NoJam-") {
            return Ok(Scenario::NoJam(det(d)?));
        }
        if let Some(d) = s.strip_prefix("DIRS-") {
            return Ok(Scenario::Dirs(det(d)?));
        }
        if s == "PJ-RCG" {
            return Ok(Scenario::Pj(DetectorKind::Zf));
        }
        if let Some(d) = s.strip_prefix("PJ-RCG-") {
            return Ok(Scenario::Pj(det(d)?));
        }
        if let Some(rest) = s.strip_prefix("AJ") {
            let (detector, rest) = match rest.strip_prefix('-') {
                Some(r) => {
                    let open = r.find('(').ok_or_else(|| format!("malformed scenario {s:?}"))?;
                    (det(&r[..open])?, &r[open..])
                }
                None => (DetectorKind::Zf, rest),
            };
            let power = rest
                .strip_prefix('(')
                .and_then(|r| r.strip_suffix("dBm)"))
                .ok_or_else(|| format!("malformed scenario {s:?}, expected e.g. AJ(4dBm)"))?;
            let p_j_dbm = power
                .parse::<f64>()
                .map_err(|e| format!("bad jamming power in {s:?}: {e}"))?;
            return Ok(Scenario::Aj { detector, p_j_dbm });
        }
        Err(format!("unknown scenario {s:?}"))
    }
}

impl TryFrom<String> for Scenario {
    type Error = String;
    fn try_from(s: String) -> std::result::Result<Self, String> {
        s.parse()
    }
}

impl From<Scenario> for String {
    fn from(s: Scenario) -> String {
        s.to_string()
    }
}

/// SINRs and rates of all users for one realization.
#[derive(Debug, Clone, PartialEq)]
pub struct RateSample {
    pub sinr: Vec<f64>,
    pub rate: Vec<f64>,
    pub tag: ScenarioTag,
}

impl RateSample {
    pub fn from_sinr(sinr: Vec<f64>, tag: ScenarioTag) -> Self {
        let rate = sinr.iter().map(|g| (1.0 + g).log2()).collect();
        RateSample { sinr, rate, tag }
    }
}

fn check_user(k: usize, h: &CMatrix) -> Result<()> {
    if k >= h.ncols() {
        return Err(Error::Domain(format!(
            "user index {k} out of range for {} users",
            h.ncols()
        )));
    }
    Ok(())
}

/// MRC SINR of user `k` under DIRS jamming (`k` zero-based).
pub fn sinr_mrc_dirs(
    h_d: &CMatrix,
    h_dirs: &CMatrix,
    k: usize,
    p_d_watts: f64,
    noise_watts: f64,
) -> Result<f64> {
    check_user(k, h_d)?;
    let hk = h_d.column(k);
    let norm2 = hk.norm_squared();
    if norm2 == 0.0 {
        return Err(Error::Degenerate(format!("direct channel of user {k} is zero")));
    }
    let iui: f64 = (0..h_d.ncols())
        .filter(|&i| i != k)
        .map(|i| hk.dotc(&h_d.column(i)).norm_sqr())
        .sum();
    let aca: f64 = h_dirs.column_iter().map(|c| hk.dotc(&c).norm_sqr()).sum();
    Ok(p_d_watts * norm2 * norm2 / (p_d_watts * iui + p_d_watts * aca + noise_watts * norm2))
}

/// ZF SINR of user `k` under DIRS jamming; the inter-user term is zero by construction.
pub fn sinr_zf_dirs(
    w: &DetectorMatrix,
    h_dirs: &CMatrix,
    k: usize,
    p_d_watts: f64,
    noise_watts: f64,
) -> Result<f64> {
    if w.kind != DetectorKind::Zf {
        return Err(Error::Domain("sinr_zf_dirs needs a ZF detector".into()));
    }
    check_user(k, &w.w)?;
    let wk = w.w.column(k);
    let aca: f64 = h_dirs.column_iter().map(|c| wk.dotc(&c).norm_sqr()).sum();
    Ok(p_d_watts / (p_d_watts * aca + noise_watts * wk.norm_squared()))
}

/// SINR of user `k` with an active jammer (or none, when `h_j` is `None` or `p_j` is zero).
pub fn sinr_aj(
    w: &DetectorMatrix,
    h_d: &CMatrix,
    h_j: Option<&CVector>,
    k: usize,
    p_d_watts: f64,
    p_j_watts: f64,
    noise_watts: f64,
) -> Result<f64> {
    check_user(k, h_d)?;
    let wk = w.w.column(k);
    let signal = wk.dotc(&h_d.column(k)).norm_sqr();
    let iui: f64 = (0..h_d.ncols())
        .filter(|&i| i != k)
        .map(|i| wk.dotc(&h_d.column(i)).norm_sqr())
        .sum();
    let aj = h_j.map_or(0.0, |h| wk.dotc(h).norm_sqr());
    Ok(p_d_watts * signal / (p_d_watts * iui + p_j_watts * aj + noise_watts * wk.norm_squared()))
}

/// Power-independent interference terms of one detector on one realization.
///
/// With them every SINR is `p s / (p (iui + aca) + p_J aj + sigma^2 |w|^2)`,
/// so sweeping transmit power costs only scalar arithmetic.
#[derive(Debug, Clone)]
struct LinkTerms {
    signal: Vec<f64>,
    iui: Vec<f64>,
    aca: Vec<f64>,
    aj: Vec<f64>,
    w_norm2: Vec<f64>,
}

impl LinkTerms {
    fn new(det: &DetectorMatrix, h_d: &CMatrix, h_dirs: Option<&CMatrix>, aj: Option<&AjChannel>) -> Self {
        let k_users = h_d.ncols();
        let wh = det.w.adjoint();
        let direct = &wh * h_d;
        let reflected = h_dirs.map(|h| &wh * h);
        let jam = aj.map(|a| &wh * &a.h_j);
        let mut t = LinkTerms {
            signal: vec![0.0; k_users],
            iui: vec![0.0; k_users],
            aca: vec![0.0; k_users],
            aj: vec![0.0; k_users],
            w_norm2: vec![0.0; k_users],
        };
        for k in 0..k_users {
            t.w_norm2[k] = det.w.column(k).norm_squared();
            match det.kind {
                // w_k^H h_d,i = delta_ki exactly for ZF
                DetectorKind::Zf => t.signal[k] = 1.0,
                DetectorKind::Mrc => {
                    t.signal[k] = direct[(k, k)].norm_sqr();
                    t.iui[k] = (0..k_users)
                        .filter(|&i| i != k)
                        .map(|i| direct[(k, i)].norm_sqr())
                        .sum();
                }
            }
            if let Some(r) = &reflected {
                t.aca[k] = r.row(k).iter().map(|z| z.norm_sqr()).sum();
            }
            if let Some(j) = &jam {
                t.aj[k] = j[k].norm_sqr();
            }
        }
        t
    }

    fn sinr(&self, k: usize, p_d: f64, p_j: f64, noise: f64, with_aca: bool, with_aj: bool) -> f64 {
        let aca = if with_aca { self.aca[k] } else { 0.0 };
        let aj = if with_aj { p_j * self.aj[k] } else { 0.0 };
        p_d * self.signal[k] / (p_d * (self.iui[k] + aca) + aj + noise * self.w_norm2[k])
    }
}

/// Sample statistics of one rate quantity across trials.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateStat {
    pub mean: f64,
    pub variance: f64,
    /// 95% normal-approximation half-width, `1.96 sqrt(var / n)`.
    pub half_width: f64,
}

impl RateStat {
    pub fn from_samples(xs: &[f64]) -> Self {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let variance = if xs.len() > 1 {
            xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        RateStat {
            mean,
            variance,
            half_width: Z_95 * (variance / n).sqrt(),
        }
    }

    pub fn lower(&self) -> f64 {
        self.mean - self.half_width
    }

    pub fn upper(&self) -> f64 {
        self.mean + self.half_width
    }

    /// Whether the two 95% intervals intersect.
    pub fn overlaps(&self, other: &RateStat) -> bool {
        self.lower() <= other.upper() && other.lower() <= self.upper()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErgodicEstimate {
    pub scenario: Scenario,
    pub per_user: Vec<RateStat>,
    /// Per-trial average over users.
    pub user_average: RateStat,
    pub sum_rate: RateStat,
    pub trials: usize,
    /// Trials redrawn because the direct channel was too ill-conditioned for ZF.
    pub redraws: usize,
}

#[derive(Debug, Clone)]
pub struct ErgodicOptions {
    pub trials: usize,
    pub seed: u64,
    /// Use stream 0 for every trial (degenerate, for testing the estimator).
    pub fixed_stream: bool,
    pub phase_law: PhaseLaw,
    pub rcg: RcgConfig,
}

impl ErgodicOptions {
    pub fn from_scene(cfg: &SceneConfig) -> Self {
        ErgodicOptions {
            trials: cfg.trials,
            seed: cfg.seed,
            fixed_stream: false,
            phase_law: PhaseLaw::Uniform,
            rcg: RcgConfig::default(),
        }
    }
}

/// Per-scene draws shared by all trials.
#[derive(Debug, Clone)]
pub struct ScenePrep {
    pub users: Vec<Point>,
    pub gains: LargeScaleGains,
    pub frozen_aoa: Option<Vec<f64>>,
}

pub fn prepare_scene(cfg: &SceneConfig) -> Result<ScenePrep> {
    let mut rng = scene_stream(cfg.seed);
    let users = place_users(cfg, &mut rng);
    let gains = large_scale(cfg, &users)?;
    let frozen_aoa = cfg.freeze_aoa.then(|| draw_aoa(cfg, &mut rng));
    Ok(ScenePrep {
        users,
        gains,
        frozen_aoa,
    })
}

/// Everything drawn for one trial.
struct TrialDraw {
    real: ChannelRealization,
    h_dirs: CMatrix,
    aj: Option<AjChannel>,
    zf: Option<DetectorMatrix>,
    mrc: DetectorMatrix,
    redraws: usize,
}

fn draw_trial(
    cfg: &SceneConfig,
    prep: &ScenePrep,
    opts: &ErgodicOptions,
    need_zf: bool,
    rng: &mut RandomStream,
    trial: usize,
) -> Result<TrialDraw> {
    let mut redraws = 0;
    loop {
        let gains = if cfg.redraw_users_per_trial {
            large_scale(cfg, &place_users(cfg, rng))?
        } else {
            prep.gains.clone()
        };
        let real = draw_realization(cfg, &gains, prep.frozen_aoa.as_deref(), rng);
        let phases = random_phases_with(cfg.n_dirs_elements, cfg.phase_bits, opts.phase_law, rng);
        let aj = match cfg.aj_position {
            Some(_) => Some(draw_aj(cfg, &gains, rng)?),
            None => None,
        };
        let zf_det = if need_zf {
            match zf(&real.h_d) {
                Ok(d) => Some(d),
                Err(Error::Singular { condition, .. }) => {
                    redraws += 1;
                    warn!("trial {trial}: ill-conditioned direct channel (cond {condition:.3e}), redrawing");
                    if redraws >= MAX_REDRAWS {
                        return Err(Error::Singular {
                            context: format!("trial {trial} after {redraws} redraws"),
                            condition,
                        });
                    }
                    continue;
                }
                Err(e) => return Err(e),
            }
        } else {
            None
        };
        let h_dirs = compose_dirs_channel(&real, &phases)?;
        let mrc_det = mrc(&real.h_d);
        return Ok(TrialDraw {
            real,
            h_dirs,
            aj,
            zf: zf_det,
            mrc: mrc_det,
            redraws,
        });
    }
}

/// Per-user rates for every (power, scenario) pair of one trial: `[power][scenario][user]`.
type TrialRates = Vec<Vec<Vec<f64>>>;

fn evaluate_trial(
    cfg: &SceneConfig,
    draw: &TrialDraw,
    scenarios: &[Scenario],
    powers_watts: &[f64],
    noise: f64,
    opts: &ErgodicOptions,
    rng: &mut RandomStream,
) -> Result<TrialRates> {
    let k_users = cfg.n_users;
    let det = |kind: DetectorKind| -> &DetectorMatrix {
        match kind {
            DetectorKind::Mrc => &draw.mrc,
            DetectorKind::Zf => draw.zf.as_ref().expect("ZF detector drawn"),
        }
    };
    let terms_for = |kind: DetectorKind| {
        LinkTerms::new(det(kind), &draw.real.h_d, Some(&draw.h_dirs), draw.aj.as_ref())
    };
    let zf_terms = draw.zf.as_ref().map(|_| terms_for(DetectorKind::Zf));
    let mrc_terms = terms_for(DetectorKind::Mrc);
    let terms = |kind| match kind {
        DetectorKind::Zf => zf_terms.as_ref().expect("ZF detector drawn"),
        DetectorKind::Mrc => &mrc_terms,
    };

    let mut out = Vec::with_capacity(powers_watts.len());
    for &p_d in powers_watts {
        let mut per_scenario = Vec::with_capacity(scenarios.len());
        for sc in scenarios {
            let sinr: Vec<f64> = match *sc {
                Scenario::NoJam(d) => (0..k_users)
                    .map(|k| terms(d).sinr(k, p_d, 0.0, noise, false, false))
                    .collect(),
                Scenario::Dirs(d) => (0..k_users)
                    .map(|k| terms(d).sinr(k, p_d, 0.0, noise, true, false))
                    .collect(),
                Scenario::Aj { detector, p_j_dbm } => {
                    if draw.aj.is_none() {
                        return Err(Error::Missing("active jammer position (aj_position)".into()));
                    }
                    let p_j = dbm_to_watts(p_j_dbm);
                    (0..k_users)
                        .map(|k| terms(detector).sinr(k, p_d, p_j, noise, false, true))
                        .collect()
                }
                Scenario::Pj(d) => {
                    let outcome = rcg::optimize(
                        &draw.real,
                        det(d),
                        p_d,
                        noise,
                        cfg.phase_bits,
                        &opts.rcg,
                        rng,
                    )?;
                    let phases = outcome.quantized.as_ref().unwrap_or(&outcome.continuous);
                    rcg::pj_user_sinrs(phases, &draw.real, det(d), p_d, noise)?
                }
            };
            per_scenario.push(sinr.iter().map(|g| (1.0 + g).log2()).collect());
        }
        out.push(per_scenario);
    }
    Ok(out)
}

/// Monte Carlo estimates for every transmit power and scenario on shared
/// realizations.
#[derive(Debug, Clone)]
pub struct GridEstimate {
    /// `[power][scenario]`.
    pub estimates: Vec<Vec<ErgodicEstimate>>,
    pub prep: ScenePrep,
    pub redraws: usize,
}

pub fn ergodic_grid(
    cfg: &SceneConfig,
    scenarios: &[Scenario],
    powers_dbm: &[f64],
    opts: &ErgodicOptions,
) -> Result<GridEstimate> {
    cfg.validate()?;
    if opts.trials < 2 {
        return Err(Error::config("trials", "ergodic estimation needs at least 2 trials"));
    }
    let prep = prepare_scene(cfg)?;
    let noise = cfg.noise_watts()?;
    let powers: Vec<f64> = powers_dbm.iter().map(|&p| dbm_to_watts(p)).collect();
    let need_zf = scenarios.iter().any(|s| s.detector() == DetectorKind::Zf);

    let results: Vec<(TrialRates, usize)> = (0..opts.trials)
        .into_par_iter()
        .map(|t| {
            let stream = if opts.fixed_stream { 0 } else { t as u64 };
            let mut rng = trial_stream(opts.seed, stream);
            let draw = draw_trial(cfg, &prep, opts, need_zf, &mut rng, t)?;
            let rates = evaluate_trial(cfg, &draw, scenarios, &powers, noise, opts, &mut rng)?;
            Ok((rates, draw.redraws))
        })
        .collect::<Result<Vec<_>>>()?;

    let redraws: usize = results.iter().map(|r| r.1).sum();
    let k_users = cfg.n_users;
    let mut estimates = Vec::with_capacity(powers.len());
    for pi in 0..powers.len() {
        let mut row = Vec::with_capacity(scenarios.len());
        for (si, sc) in scenarios.iter().enumerate() {
            let per_user = (0..k_users)
                .map(|k| {
                    let xs: Vec<f64> = results.iter().map(|r| r.0[pi][si][k]).collect();
                    RateStat::from_samples(&xs)
                })
                .collect();
            let sums: Vec<f64> = results.iter().map(|r| r.0[pi][si].iter().sum()).collect();
            let avgs: Vec<f64> = sums.iter().map(|s| s / k_users as f64).collect();
            row.push(ErgodicEstimate {
                scenario: *sc,
                per_user,
                user_average: RateStat::from_samples(&avgs),
                sum_rate: RateStat::from_samples(&sums),
                trials: opts.trials,
                redraws,
            });
        }
        estimates.push(row);
    }
    Ok(GridEstimate {
        estimates,
        prep,
        redraws,
    })
}

/// Ergodic rate of one scenario at the scene's configured transmit power.
pub fn ergodic(cfg: &SceneConfig, scenario: Scenario, opts: &ErgodicOptions) -> Result<ErgodicEstimate> {
    let mut grid = ergodic_grid(cfg, &[scenario], &[cfg.p_d_dbm], opts)?;
    Ok(grid.estimates.remove(0).remove(0))
}

/// Per-user SINRs of one realization and scenario at the scene's power.
///
/// Exposed mainly for tests; the estimator uses the cached path.
pub fn sample(
    cfg: &SceneConfig,
    scenario: Scenario,
    real: &ChannelRealization,
    h_dirs: &CMatrix,
    aj: Option<&AjChannel>,
) -> Result<RateSample> {
    let p_d = cfg.p_d_watts();
    let noise = cfg.noise_watts()?;
    let det = DetectorMatrix::build(scenario.detector(), &real.h_d)?;
    let k_users = real.h_d.ncols();
    let sinr = match scenario {
        Scenario::NoJam(_) => (0..k_users)
            .map(|k| sinr_aj(&det, &real.h_d, None, k, p_d, 0.0, noise))
            .collect::<Result<Vec<_>>>()?,
        Scenario::Dirs(DetectorKind::Zf) => (0..k_users)
            .map(|k| sinr_zf_dirs(&det, h_dirs, k, p_d, noise))
            .collect::<Result<Vec<_>>>()?,
        Scenario::Dirs(DetectorKind::Mrc) => (0..k_users)
            .map(|k| sinr_mrc_dirs(&real.h_d, h_dirs, k, p_d, noise))
            .collect::<Result<Vec<_>>>()?,
        Scenario::Aj { p_j_dbm, .. } => {
            let aj = aj.ok_or_else(|| Error::Missing("active jammer channel".into()))?;
            (0..k_users)
                .map(|k| sinr_aj(&det, &real.h_d, Some(&aj.h_j), k, p_d, dbm_to_watts(p_j_dbm), noise))
                .collect::<Result<Vec<_>>>()?
        }
        Scenario::Pj(_) => {
            return Err(Error::Domain(
                "passive-jammer samples need an optimized phase vector; use rcg::pj_user_sinrs".into(),
            ))
        }
    };
    Ok(RateSample::from_sinr(sinr, scenario.tag()))
}

