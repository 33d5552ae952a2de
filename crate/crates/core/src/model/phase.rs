//! Longitudinal phase mismatch Δφ = L(k_p − k_as + k_c − k_s)·ẑ.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::ModelError;

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// Ground-state hyperfine splitting of ⁸⁷Rb, Hz.
pub const HYPERFINE_SPLITTING_HZ: f64 = 6.834_682_610_904e9;
pub const PUMP_WAVELENGTH_M: f64 = 780.241e-9;
pub const COUPLING_WAVELENGTH_M: f64 = 794.979e-9;

/// Vacuum wavelengths of the four fields, m.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Wavelengths {
    pub pump: f64,
    pub coupling: f64,
    pub anti_stokes: f64,
    pub stokes: f64,
}

impl Wavelengths {
    /// Anti-Stokes one ground splitting above the pump, Stokes one below the
    /// coupling, so ω_p + ω_c = ω_as + ω_s.
    pub fn energy_conserving(pump: f64, coupling: f64, splitting_hz: f64) -> Self {
        let nu_p = SPEED_OF_LIGHT / pump;
        let nu_c = SPEED_OF_LIGHT / coupling;
        Self {
            pump,
            coupling,
            anti_stokes: SPEED_OF_LIGHT / (nu_p + splitting_hz),
            stokes: SPEED_OF_LIGHT / (nu_c - splitting_hz),
        }
    }

    /// All four fields at two wavelengths only, pump = anti-Stokes and coupling = Stokes.
    pub fn degenerate(pump: f64, coupling: f64) -> Self {
        Self {
            pump,
            coupling,
            anti_stokes: pump,
            stokes: coupling,
        }
    }
}

/// Propagation direction (+1 forward, −1 backward) of each field along ẑ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Directions {
    pub pump: f64,
    pub coupling: f64,
    pub anti_stokes: f64,
    pub stokes: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeamGeometry {
    pub length_m: f64,
    pub wavelengths: Wavelengths,
    pub direction_signs: Directions,
    pub angle_jitter_rad: f64,
}

/// Polar tilt of each field from its nominal axis, rad.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct BeamTilts {
    pub pump: f64,
    pub coupling: f64,
    pub anti_stokes: f64,
    pub stokes: f64,
}

impl BeamGeometry {
    /// 75 mm cell, all four fields forward, ±0.1° pointing.
    pub fn copropagating() -> Self {
        Self {
            length_m: 0.075,
            wavelengths: Wavelengths::energy_conserving(
                PUMP_WAVELENGTH_M,
                COUPLING_WAVELENGTH_M,
                HYPERFINE_SPLITTING_HZ,
            ),
            direction_signs: Directions {
                pump: 1.0,
                coupling: 1.0,
                anti_stokes: 1.0,
                stokes: 1.0,
            },
            angle_jitter_rad: 0.1f64.to_radians(),
        }
    }

    /// Pump and anti-Stokes forward, coupling and Stokes backward.
    pub fn counter_propagating() -> Self {
        Self {
            direction_signs: Directions {
                pump: 1.0,
                coupling: -1.0,
                anti_stokes: 1.0,
                stokes: -1.0,
            },
            ..Self::copropagating()
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let w = &self.wavelengths;
        let checks: [(&'static str, f64, bool, &'static str); 6] = [
            ("length_m", self.length_m, self.length_m > 0.0, "> 0"),
            ("wavelengths.pump", w.pump, w.pump > 0.0, "> 0"),
            ("wavelengths.coupling", w.coupling, w.coupling > 0.0, "> 0"),
            (
                "wavelengths.anti_stokes",
                w.anti_stokes,
                w.anti_stokes > 0.0,
                "> 0",
            ),
            ("wavelengths.stokes", w.stokes, w.stokes > 0.0, "> 0"),
            (
                "angle_jitter_rad",
                self.angle_jitter_rad,
                self.angle_jitter_rad >= 0.0,
                ">= 0",
            ),
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

fn wavenumber(lambda: f64) -> f64 {
    2.0 * std::f64::consts::PI / lambda
}

/// Δφ in rad for the given tilts. Refractive indices are taken as 1.
pub fn phase_mismatch(geometry: &BeamGeometry, tilts: &BeamTilts) -> Result<f64, ModelError> {
    geometry.validate()?;
    let half_pi = std::f64::consts::FRAC_PI_2;
    for (name, t) in [
        ("tilts.pump", tilts.pump),
        ("tilts.coupling", tilts.coupling),
        ("tilts.anti_stokes", tilts.anti_stokes),
        ("tilts.stokes", tilts.stokes),
    ] {
        if !(t.abs() <= half_pi) {
            return Err(ModelError::InvalidParameter {
                name,
                value: t,
                expected: "|tilt| <= pi/2",
            });
        }
    }
    let w = &geometry.wavelengths;
    let d = &geometry.direction_signs;
    let kz = |lambda: f64, sign: f64, tilt: f64| sign * wavenumber(lambda) * tilt.cos();
    let sum = kz(w.pump, d.pump, tilts.pump) - kz(w.anti_stokes, d.anti_stokes, tilts.anti_stokes)
        + kz(w.coupling, d.coupling, tilts.coupling)
        - kz(w.stokes, d.stokes, tilts.stokes);
    Ok(geometry.length_m * sum)
}

/// How pointing jitter is distributed when averaging |Δφ|.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum JitterModel {
    /// Each of the four beams tilted independently, uniform in ±θ_max.
    IndependentTilts,
    /// Driving fields on axis; each generated photon mode uniformly distributed
    /// over a cone of half-angle θ_max about its nominal direction.
    PhotonModeCone,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MismatchEstimate {
    pub mean_abs: f64,
    pub std_err: f64,
    pub draws: usize,
}

/// Monte Carlo mean of |Δφ| under pointing jitter.
pub fn average_mismatch(
    geometry: &BeamGeometry,
    model: JitterModel,
    draws: usize,
    seed: u64,
) -> Result<MismatchEstimate, ModelError> {
    geometry.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let theta = geometry.angle_jitter_rad;
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..draws {
        let tilts = match model {
            JitterModel::IndependentTilts => {
                let mut u = || {
                    if theta > 0.0 {
                        rng.gen_range(-theta..=theta)
                    } else {
                        0.0
                    }
                };
                BeamTilts {
                    pump: u(),
                    coupling: u(),
                    anti_stokes: u(),
                    stokes: u(),
                }
            }
            JitterModel::PhotonModeCone => {
                let mut polar = || theta * rng.gen::<f64>().sqrt();
                BeamTilts {
                    pump: 0.0,
                    coupling: 0.0,
                    anti_stokes: polar(),
                    stokes: polar(),
                }
            }
        };
        let v = phase_mismatch(geometry, &tilts)?.abs();
        sum += v;
        sum_sq += v * v;
    }
    let n = draws.max(1) as f64;
    let mean = sum / n;
    let var = (sum_sq / n - mean * mean).max(0.0);
    Ok(MismatchEstimate {
        mean_abs: mean,
        std_err: (var / (n - 1.0).max(1.0)).sqrt(),
        draws,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn collinear_energy_conserving_is_zero() {
        let g = BeamGeometry::copropagating();
        let dphi = phase_mismatch(&g, &BeamTilts::default()).unwrap();
        assert!(
            dphi.abs() < 1e-12 * g.length_m * wavenumber(PUMP_WAVELENGTH_M),
            "{dphi}"
        );
    }

    #[test]
    fn counter_propagating_offset_is_twice_the_splitting() {
        let g = BeamGeometry::counter_propagating();
        let dphi = phase_mismatch(&g, &BeamTilts::default()).unwrap();
        let expected =
            2.0 * g.length_m * 2.0 * std::f64::consts::PI * HYPERFINE_SPLITTING_HZ / SPEED_OF_LIGHT;
        assert!((dphi.abs() - expected).abs() < 1e-6, "{dphi} vs {expected}");
    }

    #[test]
    fn cone_average_matches_small_angle_formula() {
        let g = BeamGeometry::copropagating();
        let est = average_mismatch(&g, JitterModel::PhotonModeCone, 100_000, 7).unwrap();
        let w = &g.wavelengths;
        let th = g.angle_jitter_rad;
        let expected =
            g.length_m * (wavenumber(w.anti_stokes) + wavenumber(w.stokes)) * th * th / 4.0;
        assert!((est.mean_abs - expected).abs() < 4.0 * est.std_err + 1e-6 * expected);
    }

    #[test]
    fn rejects_bad_tilt() {
        let g = BeamGeometry::copropagating();
        let tilts = BeamTilts {
            pump: 2.0,
            ..Default::default()
        };
        assert!(phase_mismatch(&g, &tilts).is_err());
    }
}
