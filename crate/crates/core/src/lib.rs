//! Simulation and analysis of bidirectional amplify-and-forward relaying
//! with analog network coding and best-worse-channel relay selection under
//! outdated and imperfect channel state information.
//!
//! The crate is organised bottom-up:
//!
//! - [`numerics`]: Bessel functions, Q-function, combinatorics, quadrature.
//! - [`channel`]: CSI parameters and Rayleigh channel sampling.
//! - [`selection`]: the max-min relay selection rule.
//! - [`transceiver`]: one symbol exchange end to end, and Monte Carlo SER.
//! - [`analytics`]: closed-form CDF, semi-analytical and asymptotic SER.
//! - [`experiment`]: scenario files, SNR sweeps and CSV output.

// `!(x > 0.0)` is the NaN-rejecting guard used throughout; quadrature
// nodes are kept at their tabulated precision.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod analytics;
pub mod channel;
mod error;
pub mod experiment;
pub mod numerics;
pub mod selection;
pub mod transceiver;

pub use analytics::{
    asymptotic_coeffs, asymptotic_ser, cdf_gamma1, diversity_order, modulation_constants, AsymptoticCoeffs,
    ModulationConstants,
};
pub use channel::{derive_csi_params, CsiParams, RelayChannelSet};
pub use error::{Error, Result};
pub use selection::{best_worse_channel, SelectionResult};
pub use transceiver::{estimate_ser, Modulation, SerEstimate, SystemConfig, TrialOutcome};
