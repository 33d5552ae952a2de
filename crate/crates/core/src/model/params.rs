use serde::{Deserialize, Serialize};

use super::ModelError;

/// Natural decay rate Γ of the D-line excited state, rad/s.
pub const GAMMA_NAT: f64 = 2.0 * std::f64::consts::PI * 5.9e6;
/// Doppler width Γ_D in units of Γ.
pub const GAMMA_DOPPLER: f64 = 55.0;
/// Pump detuning Δ_p, rad/s.
pub const DELTA_P: f64 = -2.0 * std::f64::consts::PI * 2.0e9;
/// Coupling Rabi frequency used throughout the measurements, units of Γ.
pub const OMEGA_C: f64 = 5.4;

/// Physical inputs of the Doppler-averaged biphoton model.
///
/// Frequencies are in units of Γ except `gamma_nat` and `delta_p`, which are in rad/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SourceParams {
    /// Optical depth of the entire atomic ensemble (α).
    pub alpha: f64,
    /// Pump Rabi frequency Ω_p / Γ.
    pub omega_p: f64,
    /// Coupling Rabi frequency Ω_c / Γ.
    pub omega_c: f64,
    /// Ground-state decoherence rate γ / Γ.
    pub gamma_dec: f64,
    /// Γ in rad/s.
    pub gamma_nat: f64,
    /// Γ_D / Γ.
    pub gamma_doppler: f64,
    /// Δ_p in rad/s.
    pub delta_p: f64,
}

impl Default for SourceParams {
    fn default() -> Self {
        Self::high_od()
    }
}

impl SourceParams {
    /// High-OD operating point: α = 370, γ = 0.030Γ.
    pub fn high_od() -> Self {
        Self {
            alpha: 370.0,
            omega_p: 1.0,
            omega_c: OMEGA_C,
            gamma_dec: 0.030,
            gamma_nat: GAMMA_NAT,
            gamma_doppler: GAMMA_DOPPLER,
            delta_p: DELTA_P,
        }
    }

    /// Low-OD operating point: α = 93, γ = 0.020Γ.
    pub fn low_od() -> Self {
        Self {
            alpha: 93.0,
            gamma_dec: 0.020,
            ..Self::high_od()
        }
    }

    pub fn with_alpha(self, alpha: f64) -> Self {
        Self { alpha, ..self }
    }

    pub fn with_omega_p(self, omega_p: f64) -> Self {
        Self { omega_p, ..self }
    }

    pub fn with_gamma_dec(self, gamma_dec: f64) -> Self {
        Self { gamma_dec, ..self }
    }

    /// Pump detuning in units of Γ.
    pub fn delta_p_gamma(&self) -> f64 {
        self.delta_p / self.gamma_nat
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let checks: [(&'static str, f64, bool, &'static str); 7] = [
            ("alpha", self.alpha, self.alpha >= 0.0, ">= 0"),
            ("omega_p", self.omega_p, self.omega_p.is_finite(), "finite"),
            ("omega_c", self.omega_c, self.omega_c > 0.0, "> 0"),
            ("gamma_dec", self.gamma_dec, self.gamma_dec >= 0.0, ">= 0"),
            ("gamma_nat", self.gamma_nat, self.gamma_nat > 0.0, "> 0"),
            (
                "gamma_doppler",
                self.gamma_doppler,
                self.gamma_doppler > 0.0,
                "> 0",
            ),
            ("delta_p", self.delta_p, self.delta_p.is_finite(), "finite"),
        ];
        for (name, value, ok, expected) in checks {
            if !ok || !value.is_finite() {
                return Err(ModelError::InvalidParameter {
                    name,
                    value,
                    expected,
                });
            }
        }
        Ok(())
    }
}
