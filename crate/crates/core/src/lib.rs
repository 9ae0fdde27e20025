//! Link-level simulation and analysis of two-user hybrid mmWave NOMA with
//! analog beamwidth control.
//!
//! A single RF chain serves two users through one analog beam. When the users'
//! angles of departure are too far apart for the full-array beam, the transmit
//! beam is widened by switching off trailing antennas. The crate provides:
//!
//! * [`array`]: ULA steering vectors, the reduced-aperture conventional
//!   beamformer, its beam response and half-power beamwidth.
//! * [`channel`]: two-user drops and multipath (one LOS plus `L` NLOS paths)
//!   channel matrices.
//! * [`beam`]: transmit/receive analog beamformer design.
//! * [`rates`]: effective channels, NOMA/TDMA sum-rates and their large-array
//!   asymptotes, the gain condition and NOMA-group feasibility.
//! * [`experiments`]: seeded Monte-Carlo drivers for the beam pattern, gain
//!   region, group-formation probability and average sum-rate studies.
//! * [`config`], [`output`], [`cli`]: JSON configuration, CSV/JSON result
//!   files and the command-line front end.

pub mod array;
pub mod beam;
pub mod channel;
pub mod cli;
pub mod config;
mod error;
pub mod experiments;
pub mod output;
pub mod rates;

pub use error::{Error, Result};

pub use num_complex::Complex64;

/// Constant of the half-power beamwidth approximation `0.891 * 2π / N`.
pub const HALF_POWER_CONSTANT: f64 = 0.891;
