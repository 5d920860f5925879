//! DIRS phase vectors and the active-jammer interference term.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::CVector;

/// Phase-shift resolution of the reflecting surface.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawResolution", into = "RawResolution")]
pub enum PhaseResolution {
    Continuous,
    /// `b`-bit grid `{0, 2pi/2^b, ..., 2pi(2^b - 1)/2^b}`.
    Bits(u32),
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RawResolution {
    Bits(u32),
    Word(String),
}

impl TryFrom<RawResolution> for PhaseResolution {
    type Error = String;

    fn try_from(raw: RawResolution) -> Result<Self, Self::Error> {
        match raw {
            RawResolution::Bits(b) => Ok(PhaseResolution::Bits(b)),
            RawResolution::Word(w) if w == "continuous" => Ok(PhaseResolution::Continuous),
            RawResolution::Word(w) => Err(format!(
                "expected a bit count or \"continuous\", got {w:?}"
            )),
        }
    }
}

impl From<PhaseResolution> for RawResolution {
    fn from(r: PhaseResolution) -> Self {
        match r {
            PhaseResolution::Continuous => RawResolution::Word("continuous".into()),
            PhaseResolution::Bits(b) => RawResolution::Bits(b),
        }
    }
}

impl std::fmt::Display for PhaseResolution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PhaseResolution::Continuous => write!(f, "continuous"),
            PhaseResolution::Bits(b) => write!(f, "{b}-bit"),
        }
    }
}

/// Distribution the random phases are drawn from.
///
/// The lower bounds do not depend on the law, so alternatives are exposed
/// for checking that claim.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum PhaseLaw {
    /// Uniform over the whole grid (or `[0, 2pi)` when continuous).
    #[default]
    Uniform,
    /// Uniform over the part of the support below `max_phase` radians.
    Truncated { max_phase: f64 },
}

/// Unit-modulus reflection coefficients `e^{j phi_r}` together with their phases.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseVector {
    phases: Vec<f64>,
    coeffs: Vec<Complex64>,
}

impl PhaseVector {
    pub fn from_phases(phases: Vec<f64>) -> Self {
        let coeffs = phases.iter().map(|&p| Complex64::from_polar(1.0, p)).collect();
        PhaseVector { phases, coeffs }
    }

    /// Normalizes each entry onto the unit circle; phases are reported in `[0, 2pi)`.
    pub fn from_coeffs(coeffs: &[Complex64]) -> Self {
        let phases = coeffs.iter().map(|c| wrap_phase(c.arg())).collect();
        let coeffs = coeffs.iter().map(|c| c / c.norm()).collect();
        PhaseVector { phases, coeffs }
    }

    pub fn ones(n: usize) -> Self {
        Self::from_phases(vec![0.0; n])
    }

    pub fn len(&self) -> usize {
        self.phases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phases.is_empty()
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn to_vector(&self) -> CVector {
        CVector::from_column_slice(&self.coeffs)
    }
}

/// Maps an angle into `[0, 2pi)`.
pub fn wrap_phase(p: f64) -> f64 {
    let w = p.rem_euclid(TAU);
    if w >= TAU {
        0.0
    } else {
        w
    }
}

fn grid_phase(index: u64, bits: u32) -> f64 {
    TAU * index as f64 / (1u64 << bits) as f64
}

pub fn random_phases<R: Rng + ?Sized>(
    n: usize,
    resolution: PhaseResolution,
    rng: &mut R,
) -> PhaseVector {
    random_phases_with(n, resolution, PhaseLaw::Uniform, rng)
}

pub fn random_phases_with<R: Rng + ?Sized>(
    n: usize,
    resolution: PhaseResolution,
    law: PhaseLaw,
    rng: &mut R,
) -> PhaseVector {
    let support = match law {
        PhaseLaw::Uniform => TAU,
        PhaseLaw::Truncated { max_phase } => max_phase.clamp(0.0, TAU),
    };
    let phases = match resolution {
        PhaseResolution::Continuous => (0..n).map(|_| rng.random::<f64>() * support).collect(),
        PhaseResolution::Bits(bits) => {
            let levels = 1u64 << bits;
            // grid points strictly below the support, at least the zero phase
            let usable = ((support / TAU * levels as f64).ceil() as u64).clamp(1, levels);
            (0..n)
                .map(|_| grid_phase(rng.random_range(0..usable), bits))
                .collect()
        }
    };
    PhaseVector::from_phases(phases)
}

/// Projects each phase onto the nearest point of the `bits`-bit grid.
///
/// Distance is angular (wrapping at 2pi); exact ties go to the smaller grid angle.
pub fn quantize_phases(continuous: &PhaseVector, bits: u32) -> PhaseVector {
    assert!(bits >= 1, "quantization needs at least one bit");
    let levels = 1u64 << bits;
    let step = TAU / levels as f64;
    let phases = continuous
        .phases()
        .iter()
        .map(|&p| {
            let x = wrap_phase(p) / step;
            let lo = x.floor();
            let frac = x - lo;
            let lo = (lo as u64) % levels;
            let hi = (lo + 1) % levels;
            let idx = if frac < 0.5 {
                lo
            } else if frac > 0.5 {
                hi
            } else {
                lo.min(hi)
            };
            grid_phase(idx, bits)
        })
        .collect();
    PhaseVector::from_phases(phases)
}

/// `p_J |w_k^H h_J|^2`.
pub fn aj_interference_power(w_k: &CVector, h_j: &CVector, p_j_watts: f64) -> f64 {
    assert_eq!(w_k.len(), h_j.len(), "detector and AJ channel lengths differ");
    p_j_watts * w_k.dotc(h_j).norm_sqr()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stream::trial_stream;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn empty_vector() {
        let v = random_phases(0, PhaseResolution::Bits(1), &mut trial_stream(0, 0));
        assert!(v.is_empty());
    }

    #[test]
    fn one_bit_is_fair_coin() {
        let n = 1_000_000;
        let v = random_phases(n, PhaseResolution::Bits(1), &mut trial_stream(2, 0));
        let pis = v.phases().iter().filter(|&&p| p == PI).count();
        assert!(v.phases().iter().all(|&p| p == 0.0 || p == PI));
        let frac = pis as f64 / n as f64;
        // binomial sd = 0.0005; 0.002 is four of them
        assert!((frac - 0.5).abs() < 0.002, "{frac}");
    }

    #[test]
    fn continuous_phases_have_zero_circular_mean() {
        let n = 1_000_000;
        let v = random_phases(n, PhaseResolution::Continuous, &mut trial_stream(3, 0));
        let mean: Complex64 = v.coeffs().iter().sum::<Complex64>() / n as f64;
        // each component has sd sqrt(1/(2n)) ~ 7e-4
        assert!(mean.norm() < 0.004, "{mean}");
    }

    #[test]
    fn truncated_law_respects_support() {
        let v = random_phases_with(
            10_000,
            PhaseResolution::Bits(3),
            PhaseLaw::Truncated { max_phase: PI },
            &mut trial_stream(1, 1),
        );
        assert!(v.phases().iter().all(|&p| p < PI));
        let c = random_phases_with(
            10_000,
            PhaseResolution::Continuous,
            PhaseLaw::Truncated { max_phase: 1.0 },
            &mut trial_stream(1, 2),
        );
        assert!(c.phases().iter().all(|&p| (0.0..1.0).contains(&p)));
    }

    #[test]
    fn quantize_examples() {
        let q = quantize_phases(&PhaseVector::from_phases(vec![0.6 * PI]), 1);
        assert_eq!(q.phases(), &[PI]);
        let q = quantize_phases(&PhaseVector::from_phases(vec![PI / 2.0]), 1);
        assert_eq!(q.phases(), &[0.0]);
        let on_grid = PhaseVector::from_phases(vec![0.0, PI / 2.0, PI, 1.5 * PI]);
        assert_eq!(quantize_phases(&on_grid, 2).phases(), on_grid.phases());
        // wraps: just below 2pi goes to 0
        let q = quantize_phases(&PhaseVector::from_phases(vec![TAU - 0.1]), 2);
        assert_eq!(q.phases(), &[0.0]);
    }

    #[test]
    fn aj_interference_examples() {
        let ones = CVector::from_element(4, Complex64::new(1.0, 0.0));
        assert_eq!(aj_interference_power(&ones, &ones, 0.0), 0.0);
        assert!((aj_interference_power(&ones, &ones, 2.0) - 32.0).abs() < 1e-12);
        let a = CVector::from_column_slice(&[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]);
        let b = CVector::from_column_slice(&[Complex64::new(0.0, 0.0), Complex64::new(0.0, 3.0)]);
        assert_eq!(aj_interference_power(&a, &b, 5.0), 0.0);
    }

    proptest! {
        #[test]
        fn quantization_keeps_unit_modulus_and_is_idempotent(
            phases in prop::collection::vec(-20.0f64..20.0, 1..64),
            bits in 1u32..8,
        ) {
            let v = PhaseVector::from_phases(phases);
            let q = quantize_phases(&v, bits);
            let levels = (1u64 << bits) as f64;
            for (c, p) in q.coeffs().iter().zip(q.phases()) {
                prop_assert!((c.norm() - 1.0).abs() < 1e-12);
                let m = p / TAU * levels;
                prop_assert!((m - m.round()).abs() < 1e-9);
            }
            prop_assert_eq!(quantize_phases(&q, bits), q);
        }

        #[test]
        fn quantization_error_within_half_bin(phases in prop::collection::vec(0.0f64..TAU, 1..64)) {
            let bits = 16;
            let v = PhaseVector::from_phases(phases);
            let q = quantize_phases(&v, bits);
            let chord = 2.0 * (PI / (1u64 << bits) as f64).sin() * 0.5;
            for (a, b) in v.coeffs().iter().zip(q.coeffs()) {
                prop_assert!((a - b).norm() <= chord + 1e-12);
            }
        }

        #[test]
        fn quantization_picks_nearest_grid_point(p in 0.0f64..TAU, bits in 1u32..6) {
            let q = quantize_phases(&PhaseVector::from_phases(vec![p]), bits);
            let chosen = (Complex64::from_polar(1.0, p) - q.coeffs()[0]).norm();
            for m in 0..(1u64 << bits) {
                let g = Complex64::from_polar(1.0, grid_phase(m, bits));
                prop_assert!(chosen <= (Complex64::from_polar(1.0, p) - g).norm() + 1e-12);
            }
        }
    }
}
