//! Scenario configuration, geometry, unit conversions and large-scale fading.
//!
//! All power arithmetic downstream of this module is in linear watts; dBm and
//! dB only appear in [`SceneConfig`] and in reporting.

use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

use crate::jam::PhaseResolution;
use crate::{Error, Result};

/// Cartesian position in meters.
pub type Point = [f64; 3];

pub fn distance(a: &Point, b: &Point) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Per-BS-antenna Rician factors: one value for every antenna, or an explicit list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RicianFactors {
    Uniform(f64),
    PerAntenna(Vec<f64>),
}

impl RicianFactors {
    pub fn get(&self, antenna: usize) -> f64 {
        match self {
            RicianFactors::Uniform(e) => *e,
            RicianFactors::PerAntenna(v) => v[antenna],
        }
    }
}

impl Default for RicianFactors {
    fn default() -> Self {
        RicianFactors::Uniform(10.0)
    }
}

/// Full description of one simulated deployment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SceneConfig {
    pub n_antennas: usize,
    pub n_dirs_elements: usize,
    pub n_users: usize,
    pub bs_position: Point,
    pub dirs_position: Point,
    pub lu_region_center: Point,
    pub lu_region_radius: f64,
    pub aj_position: Option<Point>,
    pub p_d_dbm: f64,
    pub p_j_dbm: f64,
    pub bandwidth_hz: f64,
    pub rician_factors: RicianFactors,
    /// AoA half-range in radians; AoAs are drawn on `[-theta_a, theta_a]`.
    pub theta_a: f64,
    pub element_spacing_over_wavelength: f64,
    pub phase_bits: PhaseResolution,
    pub trials: usize,
    pub seed: u64,
    /// Redraw user positions every trial instead of once per scene.
    pub redraw_users_per_trial: bool,
    /// Draw the AoAs once per scene instead of every trial.
    pub freeze_aoa: bool,
}

impl Default for SceneConfig {
    fn default() -> Self {
        SceneConfig {
            n_antennas: 256,
            n_dirs_elements: 4096,
            n_users: 8,
            bs_position: [0.0, 0.0, 2.0],
            dirs_position: [-2.0, 0.0, 2.0],
            lu_region_center: [0.0, 160.0, 0.0],
            lu_region_radius: 10.0,
            aj_position: Some([20.0, 160.0, 0.0]),
            p_d_dbm: 0.0,
            p_j_dbm: 4.0,
            bandwidth_hz: 180e3,
            rician_factors: RicianFactors::default(),
            theta_a: FRAC_PI_2,
            element_spacing_over_wavelength: 0.5,
            phase_bits: PhaseResolution::Bits(1),
            trials: 500,
            seed: 1,
            redraw_users_per_trial: false,
            freeze_aoa: false,
        }
    }
}

impl SceneConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_antennas == 0 {
            return Err(Error::config("n_antennas", "must be positive"));
        }
        if self.n_users == 0 {
            return Err(Error::config("n_users", "must be positive"));
        }
        if self.n_antennas <= self.n_users {
            return Err(Error::config(
                "n_antennas",
                format!(
                    "must exceed n_users ({} <= {})",
                    self.n_antennas, self.n_users
                ),
            ));
        }
        if !(self.theta_a > 0.0 && self.theta_a <= PI) {
            return Err(Error::config("theta_a", "must lie in (0, pi]"));
        }
        if !(self.lu_region_radius > 0.0) {
            return Err(Error::config("lu_region_radius", "must be positive"));
        }
        if self.trials == 0 {
            return Err(Error::config("trials", "must be at least 1"));
        }
        if !(self.bandwidth_hz > 0.0) {
            return Err(Error::config("bandwidth_hz", "must be positive"));
        }
        if !self.element_spacing_over_wavelength.is_finite() {
            return Err(Error::config(
                "element_spacing_over_wavelength",
                "must be finite",
            ));
        }
        match &self.rician_factors {
            RicianFactors::Uniform(e) if !(*e >= 0.0) => {
                return Err(Error::config("rician_factors", "must be non-negative"))
            }
            RicianFactors::PerAntenna(v) => {
                if v.len() != self.n_antennas {
                    return Err(Error::config(
                        "rician_factors",
                        format!("expected {} entries, got {}", self.n_antennas, v.len()),
                    ));
                }
                if v.iter().any(|e| !(*e >= 0.0)) {
                    return Err(Error::config("rician_factors", "must be non-negative"));
                }
            }
            _ => {}
        }
        if let PhaseResolution::Bits(b) = self.phase_bits {
            if b == 0 || b > 30 {
                return Err(Error::config("phase_bits", "must be in 1..=30 or \"continuous\""));
            }
        }
        Ok(())
    }

    /// BS-DIRS distance.
    pub fn bs_dirs_distance(&self) -> f64 {
        distance(&self.bs_position, &self.dirs_position)
    }

    /// Places the DIRS `d` meters from the BS along the negative x axis.
    pub fn set_bs_dirs_distance(&mut self, d: f64) {
        let [x, y, z] = self.bs_position;
        self.dirs_position = [x - d, y, z];
    }

    pub fn p_d_watts(&self) -> f64 {
        dbm_to_watts(self.p_d_dbm)
    }

    pub fn p_j_watts(&self) -> f64 {
        dbm_to_watts(self.p_j_dbm)
    }

    pub fn noise_watts(&self) -> Result<f64> {
        Ok(dbm_to_watts(noise_power_dbm(self.bandwidth_hz)?))
    }
}

/// Large-scale power gains for one deployment, all linear.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LargeScaleGains {
    /// BS-DIRS (LOS model).
    pub l_g: f64,
    /// BS-LU_k (NLOS model).
    pub l_d: Vec<f64>,
    /// DIRS-LU_k (NLOS model).
    pub l_i: Vec<f64>,
    /// BS-AJ (NLOS model), when an active jammer is deployed.
    pub l_j: Option<f64>,
}

impl LargeScaleGains {
    pub fn n_users(&self) -> usize {
        self.l_d.len()
    }
}

/// Uniform placement of `n_users` over the LU disk, at the center's height.
pub fn place_users<R: Rng + ?Sized>(cfg: &SceneConfig, rng: &mut R) -> Vec<Point> {
    let [cx, cy, cz] = cfg.lu_region_center;
    (0..cfg.n_users)
        .map(|_| {
            let u: f64 = rng.random();
            let v: f64 = rng.random();
            let r = cfg.lu_region_radius * u.sqrt();
            let t = 2.0 * PI * v;
            [cx + r * t.cos(), cy + r * t.sin(), cz]
        })
        .collect()
}

fn check_distance(distance_m: f64) -> Result<()> {
    if distance_m > 0.0 && distance_m.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "distance must be positive and finite, got {distance_m}"
        )))
    }
}

/// LOS path loss in dB: `35.6 + 22 log10(d)`.
pub fn path_loss_los_db(distance_m: f64) -> Result<f64> {
    check_distance(distance_m)?;
    Ok(35.6 + 22.0 * distance_m.log10())
}

/// NLOS path loss in dB: `32.6 + 36.7 log10(d)`.
pub fn path_loss_nlos_db(distance_m: f64) -> Result<f64> {
    check_distance(distance_m)?;
    Ok(32.6 + 36.7 * distance_m.log10())
}

/// Thermal noise power in dBm: `-170 + 10 log10(BW)`.
pub fn noise_power_dbm(bandwidth_hz: f64) -> Result<f64> {
    if !(bandwidth_hz > 0.0 && bandwidth_hz.is_finite()) {
        return Err(Error::Domain(format!(
            "bandwidth must be positive, got {bandwidth_hz}"
        )));
    }
    Ok(-170.0 + 10.0 * bandwidth_hz.log10())
}

pub fn dbm_to_watts(x_dbm: f64) -> f64 {
    10f64.powf((x_dbm - 30.0) / 10.0)
}

/// Converts a path loss in dB to a multiplicative power gain.
pub fn db_to_linear_gain(loss_db: f64) -> f64 {
    10f64.powf(-loss_db / 10.0)
}

pub fn large_scale(cfg: &SceneConfig, lu_positions: &[Point]) -> Result<LargeScaleGains> {
    let nlos_gain = |a: &Point, b: &Point| -> Result<f64> {
        Ok(db_to_linear_gain(path_loss_nlos_db(distance(a, b))?))
    };
    let l_g = db_to_linear_gain(path_loss_los_db(cfg.bs_dirs_distance())?);
    let l_d = lu_positions
        .iter()
        .map(|p| nlos_gain(&cfg.bs_position, p))
        .collect::<Result<Vec<_>>>()?;
    let l_i = lu_positions
        .iter()
        .map(|p| nlos_gain(&cfg.dirs_position, p))
        .collect::<Result<Vec<_>>>()?;
    let l_j = cfg
        .aj_position
        .as_ref()
        .map(|aj| nlos_gain(&cfg.bs_position, aj))
        .transpose()?;
    Ok(LargeScaleGains { l_g, l_d, l_i, l_j })
}
