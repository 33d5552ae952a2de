//! Physical parameters, Doppler-averaged kernels, OD conversion, phase mismatch
//! and the spectral-brightness limit.

mod doppler;
mod kernels;
mod limit;
mod od;
mod params;
mod phase;

pub use doppler::{doppler_average, GaussHermite, MAX_NODES, MIN_NODES, TOLERANCE};
pub use kernels::{
    biphoton_amplitude, kappa_bar, kappa_integrand, resolvent_average, rho_bar, rho_integrand, sinc,
};
pub use limit::{reference_limit, ultimate_brightness_limit, BrightnessLimitInput};
pub use od::{od_convert, od_invert};
pub use params::{SourceParams, DELTA_P, GAMMA_DOPPLER, GAMMA_NAT, OMEGA_C};
pub use phase::{
    average_mismatch, phase_mismatch, BeamGeometry, BeamTilts, Directions, JitterModel,
    MismatchEstimate, Wavelengths, COUPLING_WAVELENGTH_M, HYPERFINE_SPLITTING_HZ,
    PUMP_WAVELENGTH_M, SPEED_OF_LIGHT,
};

use num_complex::Complex64;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error("invalid parameter `{name}` = {value}: expected {expected}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },
    #[error(
        "quadrature did not converge with {nodes} nodes (last two estimates {previous} and {last})"
    )]
    QuadratureFailure {
        previous: Complex64,
        last: Complex64,
        nodes: usize,
    },
}
