use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BrightnessLimitInput {
    /// Ratio of wave-packet width to delay separation, τ_p/τ_d.
    pub width_to_separation: f64,
}

/// Ultimate spectral brightness 2π(τ_p/τ_d)×10⁶ pairs/s/MHz.
pub fn ultimate_brightness_limit(input: BrightnessLimitInput) -> f64 {
    2.0 * std::f64::consts::PI * input.width_to_separation.max(0.0) * 1e6
}

/// The limit at τ_p/τ_d = 0.25, (π/2)×10⁶ pairs/s/MHz.
pub fn reference_limit() -> f64 {
    ultimate_brightness_limit(BrightnessLimitInput {
        width_to_separation: 0.25,
    })
}
