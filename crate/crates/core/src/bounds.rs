//! Closed-form ergodic-rate lower bounds under DIRS jamming, plus the
//! statistical identities they rest on (exposed for use as test oracles).
//!
//! All inputs are linear (watts, power gains); no dB arithmetic happens here.

use crate::scene::LargeScaleGains;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct BoundInput {
    pub n_antennas: usize,
    pub n_users: usize,
    pub n_dirs_elements: usize,
    pub p_d_watts: f64,
    pub noise_watts: f64,
    pub gains: LargeScaleGains,
    /// Zero-based user index.
    pub target_user: usize,
}

impl BoundInput {
    fn check(&self) -> Result<()> {
        if self.gains.l_d.len() != self.n_users || self.gains.l_i.len() != self.n_users {
            return Err(Error::Dimension(format!(
                "gains cover {} users, expected {}",
                self.gains.l_d.len(),
                self.n_users
            )));
        }
        if self.target_user >= self.n_users {
            return Err(Error::Domain(format!(
                "target user {} out of range for {} users",
                self.target_user, self.n_users
            )));
        }
        Ok(())
    }
}

/// `p_d N_D sum_i L_G L_{I,i}`: expected ACA interference power entering both bounds.
pub fn aca_interference_expect(gains: &LargeScaleGains, n_dirs_elements: usize, p_d_watts: f64) -> f64 {
    p_d_watts * n_dirs_elements as f64 * gains.l_i.iter().map(|li| gains.l_g * li).sum::<f64>()
}

/// Lower bound on the MRC ergodic rate of `target_user` (bits/s/Hz).
///
/// Valid for `N_t >= 3`; the Wishart step behind the `(N_t - 1)` factor
/// needs `N_t > 2`.
pub fn lower_bound_mrc(input: &BoundInput) -> Result<f64> {
    input.check()?;
    if input.n_antennas < 3 {
        return Err(Error::Domain(format!(
            "MRC bound needs at least 3 antennas, got {}",
            input.n_antennas
        )));
    }
    let k = input.target_user;
    let g = &input.gains;
    let p = input.p_d_watts;
    let co_users: f64 = g
        .l_d
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != k)
        .map(|(_, l)| l)
        .sum();
    let signal = p * (input.n_antennas - 1) as f64 * g.l_d[k];
    let denom = p * co_users + aca_interference_expect(g, input.n_dirs_elements, p) + input.noise_watts;
    Ok((1.0 + signal / denom).log2())
}

/// Lower bound on the ZF ergodic rate of `target_user` (bits/s/Hz). Needs `N_t > K`.
pub fn lower_bound_zf(input: &BoundInput) -> Result<f64> {
    input.check()?;
    if input.n_antennas <= input.n_users {
        return Err(Error::Domain(format!(
            "ZF bound needs more antennas than users ({} <= {})",
            input.n_antennas, input.n_users
        )));
    }
    let k = input.target_user;
    let g = &input.gains;
    let p = input.p_d_watts;
    let signal = p * (input.n_antennas - input.n_users) as f64 * g.l_d[k];
    let denom = aca_interference_expect(g, input.n_dirs_elements, p) + input.noise_watts;
    Ok((1.0 + signal / denom).log2())
}

/// Power-free limit of the ZF bound as `p_d` grows without bound.
pub fn zf_bound_asymptote(input: &BoundInput) -> Result<f64> {
    input.check()?;
    let k = input.target_user;
    let g = &input.gains;
    let aca = aca_interference_expect(g, input.n_dirs_elements, 1.0);
    let sinr = (input.n_antennas - input.n_users) as f64 * g.l_d[k] / aca;
    Ok((1.0 + sinr).log2())
}

/// `E[tr(W^{-1})] = m / (n - m)` for a central complex Wishart `W = H^H H`
/// with `H` an `n x m` matrix of i.i.d. CN(0, 1) entries.
pub fn wishart_trace_expect(m: usize, n: usize) -> Result<f64> {
    if n <= m {
        return Err(Error::Domain(format!(
            "Wishart inverse moment needs n > m (n = {n}, m = {m})"
        )));
    }
    Ok(m as f64 / (n - m) as f64)
}

/// Implicit Jensen bound `log2(1 + 1 / E[1/gamma])` estimated from SINR samples.
pub fn jensen_bound_from_sinr(sinr: &[f64]) -> f64 {
    let inv_mean = sinr.iter().map(|g| 1.0 / g).sum::<f64>() / sinr.len() as f64;
    (1.0 + 1.0 / inv_mean).log2()
}
