//! MRC and ZF linear detectors.
//!
//! Both are built from the direct channel `H_d` only: the base station never
//! observes the reflected channel, which is what makes the random DIRS
//! phases act as interference.

use serde::{Deserialize, Serialize};

use crate::{CMatrix, CVector, Error, Result};

/// Above this condition number of `H_d` the ZF detector is refused.
pub const CONDITION_LIMIT: f64 = 1e10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DetectorKind {
    #[serde(rename = "MRC")]
    Mrc,
    #[serde(rename = "ZF")]
    Zf,
}

impl std::fmt::Display for DetectorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            DetectorKind::Mrc => "MRC",
            DetectorKind::Zf => "ZF",
        })
    }
}

/// `N_t x K` detector; column `k` is `w_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectorMatrix {
    pub w: CMatrix,
    pub kind: DetectorKind,
}

impl DetectorMatrix {
    pub fn build(kind: DetectorKind, h_d: &CMatrix) -> Result<Self> {
        match kind {
            DetectorKind::Mrc => Ok(mrc(h_d)),
            DetectorKind::Zf => zf(h_d),
        }
    }

    pub fn column(&self, k: usize) -> CVector {
        self.w.column(k).into_owned()
    }

    pub fn n_users(&self) -> usize {
        self.w.ncols()
    }
}

pub fn mrc(h_d: &CMatrix) -> DetectorMatrix {
    DetectorMatrix {
        w: h_d.clone(),
        kind: DetectorKind::Mrc,
    }
}

/// 2-norm condition number from the singular values of `m`.
pub fn condition_number(m: &CMatrix) -> f64 {
    let sv = m.clone().singular_values();
    let max = sv.iter().cloned().fold(0.0f64, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if min > 0.0 {
        max / min
    } else {
        f64::INFINITY
    }
}

/// Zero-forcing detector `W = H_d (H_d^H H_d)^{-1}`, computed from a thin QR
/// factorization `H_d = QR` as `W = Q R^{-H}`.
pub fn zf(h_d: &CMatrix) -> Result<DetectorMatrix> {
    let (nt, k) = h_d.shape();
    if nt < k {
        return Err(Error::Dimension(format!(
            "ZF needs at least as many antennas as users ({nt} < {k})"
        )));
    }
    let qr = h_d.clone().qr();
    let r = qr.r();
    // cond(H_d) == cond(R)
    let cond = condition_number(&r);
    if !(cond <= CONDITION_LIMIT) {
        return Err(Error::Singular {
            context: "direct channel".into(),
            condition: cond,
        });
    }
    let q = qr.q();
    let r_inv_h = r
        .adjoint()
        .solve_lower_triangular(&CMatrix::identity(k, k))
        .ok_or_else(|| Error::Singular {
            context: "direct channel".into(),
            condition: cond,
        })?;
    Ok(DetectorMatrix {
        w: q * r_inv_h,
        kind: DetectorKind::Zf,
    })
}

/// `max |W^H H_d - I|`.
pub fn zf_residual(det: &DetectorMatrix, h_d: &CMatrix) -> f64 {
    crate::linalg::identity_residual(&(det.w.adjoint() * h_d))
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::stream::{complex_normal, trial_stream};
    use crate::C64;

    fn random(nt: usize, k: usize, seed: u64) -> CMatrix {
        let mut rng = trial_stream(seed, 0);
        CMatrix::from_fn(nt, k, |_, _| complex_normal(&mut rng))
    }

    #[test]
    fn mrc_is_the_channel() {
        let h = random(8, 2, 1);
        let d = mrc(&h);
        assert_eq!(d.w, h);
        assert_eq!(d.kind, DetectorKind::Mrc);
        let z = CMatrix::zeros(4, 2);
        assert_eq!(mrc(&z).w, z);
        for k in 0..2 {
            let hk = h.column(k);
            assert!((d.column(k).dotc(&hk).re - hk.norm_squared()).abs() < 1e-12);
        }
    }

    #[test]
    fn zf_single_user_is_scaled_channel() {
        let h = random(6, 1, 2);
        let d = zf(&h).unwrap();
        let want = h.column(0) / C64::new(h.column(0).norm_squared(), 0.0);
        assert!((d.column(0) - want).norm() < 1e-14);
    }

    #[test]
    fn zf_with_orthogonal_columns() {
        // columns along distinct axes with squared norms a_k
        let a: [f64; 3] = [2.0, 5.0, 0.5];
        let mut h = CMatrix::zeros(4, 3);
        for (k, ak) in a.iter().enumerate() {
            h[(k, k)] = C64::from_polar(ak.sqrt(), 0.3 * k as f64);
        }
        let d = zf(&h).unwrap();
        for k in 0..3 {
            let want = h.column(k) / C64::new(a[k], 0.0);
            assert!((d.column(k) - want).norm() < 1e-14);
        }
    }

    #[test]
    fn zf_rejects_rank_deficient_input() {
        let mut h = random(8, 3, 3);
        let c0 = h.column(0).into_owned();
        h.set_column(2, &(c0 * C64::new(2.0, -1.0)));
        match zf(&h) {
            Err(Error::Singular { condition, .. }) => assert!(condition > CONDITION_LIMIT),
            other => panic!("expected singularity error, got {other:?}"),
        }
        assert!(zf(&CMatrix::zeros(4, 2)).is_err());
    }

    #[test]
    fn zf_zero_forces_and_satisfies_norm_identity() {
        let h = random(16, 4, 4);
        let d = zf(&h).unwrap();
        assert!(zf_residual(&d, &h) <= 1e-10);
        let gram_inv = (h.adjoint() * &h).try_inverse().unwrap();
        for k in 0..4 {
            let wk = d.column(k);
            assert!((wk.norm_squared() - gram_inv[(k, k)].re).abs() < 1e-10 * gram_inv[(k, k)].re);
            for i in (0..4).filter(|&i| i != k) {
                let leak = wk.dotc(&h.column(i)).norm();
                assert!(leak <= 1e-10 * wk.norm() * h.column(i).norm());
            }
        }
    }
}
