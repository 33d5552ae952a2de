//! Conversion between the entire-atom OD α and the measured resonant OD α′.

use super::SourceParams;

fn factor(params: &SourceParams) -> f64 {
    std::f64::consts::PI.sqrt() / 2.0 / params.gamma_doppler
}

/// α′ = α (√π/2)(Γ/Γ_D).
pub fn od_convert(alpha: f64, params: &SourceParams) -> f64 {
    alpha * factor(params)
}

/// Inverse of [`od_convert`].
pub fn od_invert(od_measured: f64, params: &SourceParams) -> f64 {
    od_measured / factor(params)
}
