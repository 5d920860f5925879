//! Link-level Monte Carlo simulation of an uplink multi-user MISO system
//! jammed by a "disco" reflecting surface whose phases are redrawn at random
//! during data transmission.
//!
//! The crate is organised bottom-up:
//!
//! - [`scene`]: configuration, geometry, unit conversions and path loss.
//! - [`channel`]: Rician/Rayleigh fading draws and the reflected cascade.
//! - [`detect`]: MRC and ZF linear detectors built on the direct channel.
//! - [`jam`]: random and quantized phase vectors, active-jammer interference.
//! - [`rate`]: per-realization SINRs and the ergodic Monte Carlo estimator.
//! - [`bounds`]: closed-form ergodic-rate lower bounds and statistical identities.
//! - [`rcg`]: CSI-based passive-jammer baseline (Riemannian conjugate gradient).
//! - [`experiment`]: sweep definitions, config loading and CSV emission.

pub mod bounds;
pub mod channel;
pub mod detect;
pub mod error;
pub mod experiment;
pub mod jam;
pub mod linalg;
pub mod rate;
pub mod rcg;
pub mod scene;
pub mod stream;

pub use error::{Error, Result};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
/// Dense complex matrix (column-major).
pub type CMatrix = nalgebra::DMatrix<C64>;
/// Dense complex column vector.
pub type CVector = nalgebra::DVector<C64>;
