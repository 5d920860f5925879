//! CSI-based passive-jammer baseline.
//!
//! Minimizes the uplink sum rate over unit-modulus reflection coefficients
//! with Riemannian conjugate gradient on the complex circle manifold, then
//! projects the result onto the surface's phase grid. This jammer needs full
//! knowledge of `H_d`, `G`, `H_I` and the detector.
//!
//! Gradients use the Wirtinger convention: for real `f`, the Euclidean
//! gradient is `2 df/d(conj phi)`, so a first-order change along `delta` is
//! `Re(sum conj(grad_r) delta_r)`.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::{LN_2, TAU};
use std::io::Write;

use crate::channel::{compose_dirs_channel, ChannelRealization};
use crate::detect::DetectorMatrix;
use crate::jam::{quantize_phases, PhaseResolution, PhaseVector};
use crate::{CMatrix, Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RcgConfig {
    pub max_iterations: usize,
    /// Stop once an accepted step changes the objective by less than this.
    pub tolerance: f64,
    /// First Armijo trial, as the tangent length of the largest coordinate move.
    pub initial_step: f64,
    pub shrink: f64,
    /// Armijo sufficient-decrease constant.
    pub sufficient_decrease: f64,
    pub max_backtracks: usize,
    /// Extra random initializations; the best final objective wins.
    pub restarts: usize,
}

impl Default for RcgConfig {
    fn default() -> Self {
        RcgConfig {
            max_iterations: 500,
            tolerance: 1e-6,
            initial_step: 1.0,
            shrink: 0.5,
            sufficient_decrease: 1e-4,
            max_backtracks: 60,
            restarts: 0,
        }
    }
}

/// Snapshot handed to observers after every accepted iteration.
#[derive(Debug, Clone)]
pub struct RcgState {
    pub phi: PhaseVector,
    /// Sum rate in bits/s/Hz.
    pub objective: f64,
    pub euclid_grad: Vec<Complex64>,
    pub riem_grad: Vec<Complex64>,
    pub search_dir: Vec<Complex64>,
    pub iteration: usize,
    pub armijo_step: f64,
    pub cg_beta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceRow {
    pub iteration: usize,
    pub objective: f64,
    pub step: f64,
    pub gradient_norm: f64,
}

#[derive(Debug, Clone)]
pub struct RcgOutcome {
    pub continuous: PhaseVector,
    pub objective_continuous: f64,
    /// Grid projection, absent for continuous-phase surfaces.
    pub quantized: Option<PhaseVector>,
    pub objective_quantized: Option<f64>,
    pub initial_objective: f64,
    pub trace: Vec<TraceRow>,
}

/// Effective-channel SINRs `p|w_k^H(h_d,k + h_D,k)|^2 / (p sum_{i!=k} |w_k^H(h_d,i + h_D,i)|^2 + sigma^2 |w_k|^2)`.
pub fn pj_user_sinrs(
    phi: &PhaseVector,
    real: &ChannelRealization,
    detector: &DetectorMatrix,
    p_d_watts: f64,
    noise_watts: f64,
) -> Result<Vec<f64>> {
    let h_eff = &real.h_d + compose_dirs_channel(real, phi)?;
    let k_users = h_eff.ncols();
    Ok((0..k_users)
        .map(|k| {
            let wk = detector.w.column(k);
            let mut signal = 0.0;
            let mut interference = 0.0;
            for i in 0..k_users {
                let a = wk.dotc(&h_eff.column(i)).norm_sqr();
                if i == k {
                    signal = a;
                } else {
                    interference += a;
                }
            }
            p_d_watts * signal / (p_d_watts * interference + noise_watts * wk.norm_squared())
        })
        .collect())
}

/// Sum rate seen by the passive jammer for phase vector `phi`.
pub fn pj_objective(
    phi: &PhaseVector,
    real: &ChannelRealization,
    detector: &DetectorMatrix,
    p_d_watts: f64,
    noise_watts: f64,
) -> Result<f64> {
    Ok(pj_user_sinrs(phi, real, detector, p_d_watts, noise_watts)?
        .iter()
        .map(|g| (1.0 + g).log2())
        .sum())
}

/// Objective and gradient with everything independent of `phi` precomputed.
///
/// `w_k^H (h_d,i + h_D,i) = d_ki + sum_r m_kir phi_r` where
/// `d_ki = w_k^H h_d,i` and `m_kir = conj([G w_k]_r) [H_I]_ri`.
pub struct PjProblem {
    k_users: usize,
    n_elements: usize,
    direct: Vec<Complex64>,
    mix: Vec<Complex64>,
    w_norm2: Vec<f64>,
    p_d: f64,
    noise: f64,
}

impl PjProblem {
    pub fn new(real: &ChannelRealization, detector: &DetectorMatrix, p_d_watts: f64, noise_watts: f64) -> Self {
        let k_users = detector.w.ncols();
        let nd = real.g.nrows();
        let direct_m: CMatrix = detector.w.adjoint() * &real.h_d;
        let u: CMatrix = &real.g * &detector.w;
        let mut direct = Vec::with_capacity(k_users * k_users);
        let mut mix = Vec::with_capacity(k_users * k_users * nd);
        for k in 0..k_users {
            for i in 0..k_users {
                direct.push(direct_m[(k, i)]);
                let hi = real.h_i.column(i);
                mix.extend((0..nd).map(|r| u[(r, k)].conj() * hi[r]));
            }
        }
        PjProblem {
            k_users,
            n_elements: nd,
            direct,
            mix,
            w_norm2: (0..k_users).map(|k| detector.w.column(k).norm_squared()).collect(),
            p_d: p_d_watts,
            noise: noise_watts,
        }
    }

    pub fn n_elements(&self) -> usize {
        self.n_elements
    }

    fn mix_row(&self, k: usize, i: usize) -> &[Complex64] {
        let start = (k * self.k_users + i) * self.n_elements;
        &self.mix[start..start + self.n_elements]
    }

    fn amplitudes(&self, phi: &[Complex64]) -> Vec<Complex64> {
        let mut a = self.direct.clone();
        for k in 0..self.k_users {
            for i in 0..self.k_users {
                let s: Complex64 = self.mix_row(k, i).iter().zip(phi).map(|(m, p)| m * p).sum();
                a[k * self.k_users + i] += s;
            }
        }
        a
    }

    /// `(total, interference-plus-noise)` power of every user.
    fn powers(&self, a: &[Complex64]) -> Vec<(f64, f64)> {
        (0..self.k_users)
            .map(|k| {
                let noise = self.noise * self.w_norm2[k];
                let mut total = noise;
                let mut others = noise;
                for i in 0..self.k_users {
                    let e = self.p_d * a[k * self.k_users + i].norm_sqr();
                    total += e;
                    if i != k {
                        others += e;
                    }
                }
                (total, others)
            })
            .collect()
    }

    pub fn objective(&self, phi: &[Complex64]) -> f64 {
        let a = self.amplitudes(phi);
        self.powers(&a).iter().map(|(t, o)| (t / o).log2()).sum()
    }

    pub fn value_and_gradient(&self, phi: &[Complex64]) -> (f64, Vec<Complex64>) {
        let a = self.amplitudes(phi);
        let powers = self.powers(&a);
        let value = powers.iter().map(|(t, o)| (t / o).log2()).sum();
        let mut grad = vec![Complex64::new(0.0, 0.0); self.n_elements];
        let scale = 2.0 * self.p_d / LN_2;
        for (k, &(total, others)) in powers.iter().enumerate() {
            for i in 0..self.k_users {
                let c = if i == k { 1.0 / total } else { 1.0 / total - 1.0 / others };
                let coef = a[k * self.k_users + i] * (scale * c);
                for (g, m) in grad.iter_mut().zip(self.mix_row(k, i)) {
                    *g += m.conj() * coef;
                }
            }
        }
        (value, grad)
    }
}

/// `Re(z conj(phi)) phi`, the radial component of `z` at `phi`.
fn radial(z: Complex64, phi: Complex64) -> Complex64 {
    phi * (z * phi.conj()).re
}

/// Projects the Euclidean gradient onto the tangent space at `phi`.
pub fn riemannian_gradient(phi: &[Complex64], euclid_grad: &[Complex64]) -> Vec<Complex64> {
    assert_eq!(phi.len(), euclid_grad.len());
    phi.iter()
        .zip(euclid_grad)
        .map(|(&p, &g)| g - radial(g, p))
        .collect()
}

/// `-grad + beta * P_phi(prev_dir)`.
pub fn search_direction(
    riem_grad: &[Complex64],
    prev_dir: &[Complex64],
    phi: &[Complex64],
    cg_beta: f64,
) -> Vec<Complex64> {
    assert!(riem_grad.len() == prev_dir.len() && prev_dir.len() == phi.len());
    riem_grad
        .iter()
        .zip(prev_dir)
        .zip(phi)
        .map(|((&g, &d), &p)| -g + (d - radial(d, p)) * cg_beta)
        .collect()
}

/// Elementwise `(phi + step * dir) / |phi + step * dir|`.
pub fn retract(phi: &[Complex64], dir: &[Complex64], step: f64) -> Result<Vec<Complex64>> {
    assert_eq!(phi.len(), dir.len());
    phi.iter()
        .zip(dir)
        .map(|(&p, &d)| {
            let z = p + d * step;
            let n = z.norm();
            if n < 1e-15 {
                Err(Error::Numerical {
                    iteration: 0,
                    message: format!("degenerate retraction, |phi + t D| = {n:e}"),
                })
            } else {
                Ok(z / n)
            }
        })
        .collect()
}

fn inner(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x.conj() * y).re).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    inner(a, a).sqrt()
}

fn dump(trace: &[TraceRow]) -> String {
    trace
        .iter()
        .rev()
        .take(5)
        .map(|t| format!("[it {} f {:e} step {:e} |g| {:e}]", t.iteration, t.objective, t.step, t.gradient_norm))
        .collect::<Vec<_>>()
        .join(" ")
}

/// One RCG descent from `start`.
pub fn descend(
    problem: &PjProblem,
    start: &[Complex64],
    cfg: &RcgConfig,
    observer: &mut dyn FnMut(&RcgState),
) -> Result<(Vec<Complex64>, f64, Vec<TraceRow>)> {
    let mut phi = start.to_vec();
    let (mut value, mut egrad) = problem.value_and_gradient(&phi);
    let mut rgrad = riemannian_gradient(&phi, &egrad);
    let mut dir: Vec<Complex64> = rgrad.iter().map(|g| -g).collect();
    let mut trace = vec![TraceRow {
        iteration: 0,
        objective: value,
        step: 0.0,
        gradient_norm: norm(&rgrad),
    }];
    if !value.is_finite() {
        return Err(Error::Numerical {
            iteration: 0,
            message: format!("non-finite initial objective {value}"),
        });
    }

    for iteration in 1..=cfg.max_iterations {
        let mut slope = inner(&rgrad, &dir);
        if slope >= 0.0 {
            dir = rgrad.iter().map(|g| -g).collect();
            slope = -inner(&rgrad, &rgrad);
        }
        if slope == 0.0 {
            break;
        }

        // Armijo backtracking; the first trial moves the largest coordinate by initial_step
        let dir_max = dir.iter().map(|d| d.norm()).fold(0.0, f64::max);
        let mut step = cfg.initial_step / dir_max;
        let mut accepted = None;
        for _ in 0..=cfg.max_backtracks {
            let cand = retract(&phi, &dir, step).map_err(|e| match e {
                Error::Numerical { message, .. } => Error::Numerical { iteration, message },
                e => e,
            })?;
            let f = problem.objective(&cand);
            if !f.is_finite() {
                return Err(Error::Numerical {
                    iteration,
                    message: format!("non-finite objective {f}; recent: {}", dump(&trace)),
                });
            }
            if f <= value + cfg.sufficient_decrease * step * slope {
                accepted = Some((cand, f));
                break;
            }
            step *= cfg.shrink;
        }
        let Some((next, next_value)) = accepted else {
            break;
        };

        let decrease = value - next_value;
        let (v, eg) = problem.value_and_gradient(&next);
        let next_rgrad = riemannian_gradient(&next, &eg);
        // Polak-Ribiere with the previous gradient transported by projection
        let moved_grad: Vec<Complex64> = next.iter().zip(&rgrad).map(|(&p, &g)| g - radial(g, p)).collect();
        let diff: Vec<Complex64> = next_rgrad.iter().zip(&moved_grad).map(|(a, b)| a - b).collect();
        let prev_norm2 = inner(&rgrad, &rgrad);
        let beta = if prev_norm2 > 0.0 {
            (inner(&next_rgrad, &diff) / prev_norm2).max(0.0)
        } else {
            0.0
        };
        let next_dir = search_direction(&next_rgrad, &dir, &next, beta);

        phi = next;
        value = v;
        egrad = eg;
        rgrad = next_rgrad;
        dir = next_dir;
        trace.push(TraceRow {
            iteration,
            objective: value,
            step,
            gradient_norm: norm(&rgrad),
        });
        observer(&RcgState {
            phi: PhaseVector::from_coeffs(&phi),
            objective: value,
            euclid_grad: egrad.clone(),
            riem_grad: rgrad.clone(),
            search_dir: dir.clone(),
            iteration,
            armijo_step: step,
            cg_beta: beta,
        });
        if decrease.abs() < cfg.tolerance {
            break;
        }
    }
    Ok((phi, value, trace))
}

/// Optimizes the passive-jammer phases from random continuous starting points.
pub fn optimize<R: Rng + ?Sized>(
    real: &ChannelRealization,
    detector: &DetectorMatrix,
    p_d_watts: f64,
    noise_watts: f64,
    resolution: PhaseResolution,
    cfg: &RcgConfig,
    rng: &mut R,
) -> Result<RcgOutcome> {
    optimize_observed(real, detector, p_d_watts, noise_watts, resolution, cfg, rng, &mut |_| {})
}

#[allow(clippy::too_many_arguments)]
pub fn optimize_observed<R: Rng + ?Sized>(
    real: &ChannelRealization,
    detector: &DetectorMatrix,
    p_d_watts: f64,
    noise_watts: f64,
    resolution: PhaseResolution,
    cfg: &RcgConfig,
    rng: &mut R,
    observer: &mut dyn FnMut(&RcgState),
) -> Result<RcgOutcome> {
    let problem = PjProblem::new(real, detector, p_d_watts, noise_watts);
    let nd = problem.n_elements();
    let mut best: Option<(Vec<Complex64>, f64, Vec<TraceRow>, f64)> = None;
    for _ in 0..=cfg.restarts {
        let start: Vec<Complex64> = (0..nd)
            .map(|_| Complex64::from_polar(1.0, rng.random::<f64>() * TAU))
            .collect();
        let initial = problem.objective(&start);
        let (phi, value, trace) = if nd == 0 {
            (start, initial, vec![])
        } else {
            descend(&problem, &start, cfg, observer)?
        };
        if best.as_ref().is_none_or(|b| value < b.1) {
            best = Some((phi, value, trace, initial));
        }
    }
    let (phi, value, trace, initial) = best.expect("at least one start");
    let continuous = PhaseVector::from_coeffs(&phi);
    let (quantized, objective_quantized) = match resolution {
        PhaseResolution::Continuous => (None, None),
        PhaseResolution::Bits(b) => {
            let q = quantize_phases(&continuous, b);
            let f = problem.objective(q.coeffs());
            (Some(q), Some(f))
        }
    };
    Ok(RcgOutcome {
        continuous,
        objective_continuous: value,
        quantized,
        objective_quantized,
        initial_objective: initial,
        trace,
    })
}

/// Iteration trace as CSV `iteration,objective,step,gradient_norm`.
pub fn write_trace_csv<W: Write>(out: W, trace: &[TraceRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in trace {
        w.serialize(row).map_err(|e| Error::Parse(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}
