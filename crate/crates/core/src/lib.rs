// SPDX-License-Identifier: Apache-2.0

//! Wavelength assignment for DWDM links that carry decoy-state QKD channels
//! alongside classical data channels.
//!
//! The crate is organised bottom-up:
//!
//! * [`grid`] and [`raman`] describe the channel plan, the physical/protocol
//!   parameters and the Raman cross-section surface.
//! * [`noise`] turns classical launch power into crosstalk photon counts at
//!   each quantum receiver.
//! * [`rate`] is the secret-key-rate engine (exact curve, linear model and
//!   threshold inversion).
//! * [`assign`] builds the cost matrices and runs the matrix-based search,
//!   the exhaustive oracles and the conventional baseline.
//! * [`experiments`] and [`report`] drive the sweeps and render results.
//!
//! Candidate enumeration runs on rayon when the `parallel` feature is enabled
//! and falls back to a sequential loop otherwise; both produce identical
//! results.

pub mod assign;
pub mod error;
pub mod experiments;
pub mod grid;
pub mod noise;
pub mod par;
pub mod raman;
pub mod rate;
pub mod report;
pub mod scenario;

pub use error::{Error, Result};
