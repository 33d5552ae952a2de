//! Biphoton generation in a Doppler-broadened vapor by spontaneous four-wave mixing.
//!
//! Start with the examples:
//!
//! - `doppler_kernels`: velocity-averaged κ̄ and ρ̄, closed form vs quadrature
//! - `wavepacket`: G²(τ) and F(δ) with their widths
//! - `fit_histogram`: phenomenological fit and linewidth of a noisy histogram
//! - `detection_chain`: Monte Carlo counting at the calibrated top point
//! - `thermal_autocorrelation`: g²(0) under Poisson and thermal statistics
//! - `pump_sweep`: rate, linewidth, SBR and brightness against pump power
//! - `phase_mismatch`: Δφ for co- and counter-propagating geometries
//!
//! The `biphoton` binary wraps the same calls; see [`cli`].

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acceptance;
pub mod analysis;
pub mod cli;
pub mod detection;
pub mod fitting;
pub mod io;
pub mod model;
pub mod quadrature;
pub mod waveform;
