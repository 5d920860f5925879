//! Small-scale fading draws and the DIRS-jammed cascade `H_D = G^H diag(phi) H_I`.

use rand::Rng;
use std::f64::consts::TAU;
use std::io::Write;

use crate::jam::PhaseVector;
use crate::linalg::adjoint_mul;
use crate::scene::{LargeScaleGains, SceneConfig};
use crate::stream::complex_normal;
use crate::{CMatrix, CVector, Error, Result, C64};

/// One draw of all channels in the scene.
#[derive(Debug, Clone)]
pub struct ChannelRealization {
    /// BS-DIRS channel, `N_D x N_t` (Rician).
    pub g: CMatrix,
    /// DIRS-LU channel, `N_D x K` (Rayleigh).
    pub h_i: CMatrix,
    /// Direct BS-LU channel, `N_t x K` (Rayleigh).
    pub h_d: CMatrix,
    pub gains: LargeScaleGains,
    /// Angle of arrival per reflecting element.
    pub aoa: Vec<f64>,
}

/// BS-AJ channel `h_J`.
#[derive(Debug, Clone)]
pub struct AjChannel {
    pub h_j: CVector,
}

/// `rows x gains.len()` matrix whose column `k` is `sqrt(gains[k])` times CN(0, I).
fn scaled_rayleigh<R: Rng + ?Sized>(rows: usize, gains: &[f64], rng: &mut R) -> CMatrix {
    let mut m = CMatrix::zeros(rows, gains.len());
    for (k, &l) in gains.iter().enumerate() {
        let s = l.sqrt();
        for n in 0..rows {
            m[(n, k)] = complex_normal(rng) * s;
        }
    }
    m
}

pub fn draw_direct<R: Rng + ?Sized>(
    cfg: &SceneConfig,
    gains: &LargeScaleGains,
    rng: &mut R,
) -> CMatrix {
    scaled_rayleigh(cfg.n_antennas, &gains.l_d, rng)
}

pub fn draw_dirs_lu<R: Rng + ?Sized>(
    cfg: &SceneConfig,
    gains: &LargeScaleGains,
    rng: &mut R,
) -> CMatrix {
    scaled_rayleigh(cfg.n_dirs_elements, &gains.l_i, rng)
}

pub fn draw_aoa<R: Rng + ?Sized>(cfg: &SceneConfig, rng: &mut R) -> Vec<f64> {
    (0..cfg.n_dirs_elements)
        .map(|_| rng.random_range(-cfg.theta_a..=cfg.theta_a))
        .collect()
}

/// LOS steering matrix `[G_LOS]_rn = exp(j 2pi (d/lambda) (n-1) sin(theta_r))`.
pub fn los_matrix(aoa: &[f64], n_antennas: usize, spacing_over_wavelength: f64) -> CMatrix {
    CMatrix::from_fn(aoa.len(), n_antennas, |r, n| {
        C64::from_polar(1.0, TAU * spacing_over_wavelength * n as f64 * aoa[r].sin())
    })
}

/// Draws the AoAs and the Rician BS-DIRS channel.
pub fn draw_bs_dirs<R: Rng + ?Sized>(
    cfg: &SceneConfig,
    gains: &LargeScaleGains,
    rng: &mut R,
) -> (CMatrix, Vec<f64>) {
    let aoa = draw_aoa(cfg, rng);
    let g = draw_bs_dirs_with_aoa(cfg, gains, &aoa, rng);
    (g, aoa)
}

const LOS_RESYNC: usize = 32;

/// Rician BS-DIRS channel for given AoAs; the Rician weights scale BS-antenna columns.
pub fn draw_bs_dirs_with_aoa<R: Rng + ?Sized>(
    cfg: &SceneConfig,
    gains: &LargeScaleGains,
    aoa: &[f64],
    rng: &mut R,
) -> CMatrix {
    let nd = aoa.len();
    let scale = gains.l_g.sqrt();
    let sines: Vec<f64> = aoa.iter().map(|t| t.sin()).collect();
    let step: Vec<C64> = sines
        .iter()
        .map(|s| C64::from_polar(1.0, TAU * cfg.element_spacing_over_wavelength * s))
        .collect();
    // LOS phasors advance by one steering step per antenna, re-anchored exactly
    // every LOS_RESYNC columns to bound rounding drift.
    let mut los = vec![C64::new(1.0, 0.0); nd];
    let mut g = CMatrix::zeros(nd, cfg.n_antennas);
    for n in 0..cfg.n_antennas {
        if n > 0 && n % LOS_RESYNC == 0 {
            let base = TAU * cfg.element_spacing_over_wavelength * n as f64;
            for (l, s) in los.iter_mut().zip(&sines) {
                *l = C64::from_polar(1.0, base * s);
            }
        } else if n > 0 {
            for (l, z) in los.iter_mut().zip(&step) {
                *l *= z;
            }
        }
        let eps = cfg.rician_factors.get(n);
        let los_w = scale * (eps / (eps + 1.0)).sqrt();
        let nlos_w = scale * (1.0 / (eps + 1.0)).sqrt();
        let mut col = g.column_mut(n);
        for r in 0..nd {
            col[r] = los[r] * los_w + complex_normal(rng) * nlos_w;
        }
    }
    g
}

/// Draws `(H_d, H_I, G)` in that order from `rng`; AoAs are drawn unless supplied.
pub fn draw_realization<R: Rng + ?Sized>(
    cfg: &SceneConfig,
    gains: &LargeScaleGains,
    frozen_aoa: Option<&[f64]>,
    rng: &mut R,
) -> ChannelRealization {
    let h_d = draw_direct(cfg, gains, rng);
    let h_i = draw_dirs_lu(cfg, gains, rng);
    let (g, aoa) = match frozen_aoa {
        Some(aoa) => (draw_bs_dirs_with_aoa(cfg, gains, aoa, rng), aoa.to_vec()),
        None => draw_bs_dirs(cfg, gains, rng),
    };
    ChannelRealization {
        g,
        h_i,
        h_d,
        gains: gains.clone(),
        aoa,
    }
}

/// `H_D = G^H diag(phi) H_I`, the `N_t x K` reflected channel seen by the BS.
pub fn compose_dirs_channel(real: &ChannelRealization, phases: &PhaseVector) -> Result<CMatrix> {
    let nd = real.g.nrows();
    if phases.len() != nd || real.h_i.nrows() != nd {
        return Err(Error::Dimension(format!(
            "G has {} rows, H_I has {}, phase vector has {}",
            nd,
            real.h_i.nrows(),
            phases.len()
        )));
    }
    let mut v = real.h_i.clone();
    for (r, phi) in phases.coeffs().iter().enumerate() {
        v.row_mut(r).scale_mut_complex(*phi);
    }
    Ok(adjoint_mul(&real.g, &v))
}

trait ScaleComplex {
    fn scale_mut_complex(&mut self, c: C64);
}

impl<S> ScaleComplex for nalgebra::Matrix<C64, nalgebra::U1, nalgebra::Dyn, S>
where
    S: nalgebra::StorageMut<C64, nalgebra::U1, nalgebra::Dyn>,
{
    fn scale_mut_complex(&mut self, c: C64) {
        for z in self.iter_mut() {
            *z *= c;
        }
    }
}

pub fn draw_aj<R: Rng + ?Sized>(
    cfg: &SceneConfig,
    gains: &LargeScaleGains,
    rng: &mut R,
) -> Result<AjChannel> {
    let l_j = match (cfg.aj_position, gains.l_j) {
        (Some(_), Some(l)) => l,
        _ => return Err(Error::Missing("active jammer position (aj_position)".into())),
    };
    let s = l_j.sqrt();
    let h_j = CVector::from_fn(cfg.n_antennas, |_, _| complex_normal(rng) * s);
    Ok(AjChannel { h_j })
}

/// Writes a matrix as CSV rows `row,col,re,im` (zero-based indices).
pub fn write_matrix_csv<W: Write>(mut out: W, m: &CMatrix) -> std::io::Result<()> {
    writeln!(out, "row,col,re,im")?;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            let z = m[(i, j)];
            writeln!(out, "{i},{j},{:e},{:e}", z.re, z.im)?;
        }
    }
    Ok(())
}
