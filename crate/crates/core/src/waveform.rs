//! Temporal wave packet G²(τ) and spectrum F(δ).

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::model::{biphoton_amplitude, ModelError, SourceParams};

/// Largest |amplitude| allowed at the grid ends, relative to the peak.
pub const TAIL_LIMIT: f64 = 1e-4;
/// Wave-packet samples below this fraction of the peak are cropped from both ends.
pub const CROP_LEVEL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum WaveformError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error(
        "grid too narrow: amplitude at the ends is {ratio:.3e} of peak (limit {TAIL_LIMIT:e})"
    )]
    GridTooNarrow { ratio: f64 },
    #[error(
        "resolution check failed: doubling the grid moved values by {max_deviation:.3e} of peak"
    )]
    Resolution { max_deviation: f64 },
    #[error("curve has no half-maximum crossing on one side")]
    NoCrossing,
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Uniform detuning grid δ_k = (k − N/2)·Δ, spanning ±`half_span_gamma` Γ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WaveformGrid {
    pub half_span_gamma: f64,
    pub n_points: usize,
}

impl Default for WaveformGrid {
    fn default() -> Self {
        Self {
            half_span_gamma: 400.0,
            n_points: 1 << 18,
        }
    }
}

impl WaveformGrid {
    pub fn validate(&self) -> Result<(), WaveformError> {
        if !self.n_points.is_power_of_two() || self.n_points < 1 << 12 {
            return Err(WaveformError::InvalidGrid(format!(
                "n_points = {} must be a power of two >= 4096",
                self.n_points
            )));
        }
        if !(self.half_span_gamma > 0.0 && self.half_span_gamma.is_finite()) {
            return Err(WaveformError::InvalidGrid(format!(
                "half_span_gamma = {} must be > 0",
                self.half_span_gamma
            )));
        }
        Ok(())
    }

    /// Detuning step in units of Γ.
    pub fn step_gamma(&self) -> f64 {
        2.0 * self.half_span_gamma / self.n_points as f64
    }

    /// Detunings in units of Γ.
    pub fn deltas_gamma(&self) -> Vec<f64> {
        let h = self.step_gamma();
        let half = (self.n_points / 2) as f64;
        (0..self.n_points).map(|k| (k as f64 - half) * h).collect()
    }

    /// Delay step of the implied FFT window, s.
    pub fn tau_step(&self, gamma_nat: f64) -> f64 {
        2.0 * std::f64::consts::PI / (self.n_points as f64 * self.step_gamma() * gamma_nat)
    }

    pub fn doubled(&self) -> Self {
        Self {
            n_points: self.n_points * 2,
            ..*self
        }
    }
}

/// Sampled G²(τ) in s⁻² on a uniform delay grid in s.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WavePacket {
    pub tau_grid: Vec<f64>,
    pub values: Vec<f64>,
    pub params_snapshot: SourceParams,
}

impl WavePacket {
    pub fn dt(&self) -> f64 {
        self.tau_grid[1] - self.tau_grid[0]
    }

    pub fn peak(&self) -> f64 {
        self.values.iter().cloned().fold(0.0, f64::max)
    }

    /// FWHM of the sampled curve, s.
    pub fn fwhm(&self) -> Result<f64, WaveformError> {
        fwhm(&self.tau_grid, &self.values).map(|f| f.width)
    }
}

/// Sampled F(δ) on a uniform detuning grid in rad/s.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralProfile {
    pub delta_grid: Vec<f64>,
    pub values: Vec<f64>,
    /// Hz.
    pub fwhm: f64,
    /// Whether the region above half maximum is a single interval.
    pub single_peak: bool,
}

/// κ̄ sinc(ρ̄) e^{iρ̄} on a detuning grid in units of Γ.
pub fn amplitude_spectrum(
    deltas_gamma: &[f64],
    params: &SourceParams,
) -> Result<Vec<Complex64>, WaveformError> {
    params.validate()?;
    let n = deltas_gamma.len();
    if n < 3 {
        return Err(WaveformError::InvalidGrid(
            "fewer than three detunings".into(),
        ));
    }
    let step = deltas_gamma[1] - deltas_gamma[0];
    if (deltas_gamma[0] + deltas_gamma[n - 1]).abs() > 1.000001 * step.abs() {
        return Err(WaveformError::InvalidGrid(
            "detuning grid not symmetric about 0".into(),
        ));
    }
    let amp: Vec<Complex64> = deltas_gamma
        .par_iter()
        .map(|&d| biphoton_amplitude(d, params))
        .collect();
    let peak = amp.iter().map(|a| a.norm()).fold(0.0, f64::max);
    if peak > 0.0 {
        let ratio = amp[0].norm().max(amp[n - 1].norm()) / peak;
        if ratio >= TAIL_LIMIT {
            return Err(WaveformError::GridTooNarrow { ratio });
        }
    }
    Ok(amp)
}

/// Uncropped G²(τ_n) for n = −N/2 … N/2−1, from a precomputed amplitude array.
fn transform(amp: &[Complex64], grid: &WaveformGrid, gamma_nat: f64) -> (f64, Vec<f64>) {
    let n = amp.len();
    let mut buf = amp.to_vec();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let scale = grid.step_gamma() * gamma_nat / (2.0 * std::f64::consts::PI);
    let half = n / 2;
    // δ_k = (k − N/2)Δ only contributes a (−1)^n phase, dropped by |·|².
    let values = (0..n)
        .map(|i| (buf[(i + half) % n] * scale).norm_sqr())
        .collect();
    (-(half as f64) * grid.tau_step(gamma_nat), values)
}

/// G²(τ) by FFT of the amplitude spectrum, cropped where it falls below
/// [`CROP_LEVEL`] of the peak.
pub fn wavepacket(params: &SourceParams, grid: &WaveformGrid) -> Result<WavePacket, WaveformError> {
    grid.validate()?;
    let amp = amplitude_spectrum(&grid.deltas_gamma(), params)?;
    wavepacket_from_amplitude(&amp, params, grid)
}

/// As [`wavepacket`], reusing an amplitude array evaluated on `grid`.
pub fn wavepacket_from_amplitude(
    amp: &[Complex64],
    params: &SourceParams,
    grid: &WaveformGrid,
) -> Result<WavePacket, WaveformError> {
    let dt = grid.tau_step(params.gamma_nat);
    let (tau0, full) = transform(amp, grid, params.gamma_nat);
    let peak = full.iter().cloned().fold(0.0, f64::max);
    let (lo, hi) = if peak > 0.0 {
        let keep = |v: &f64| *v >= CROP_LEVEL * peak;
        let lo = full.iter().position(keep).unwrap_or(0).saturating_sub(1);
        let hi = (full.iter().rposition(keep).unwrap_or(full.len() - 1) + 1).min(full.len() - 1);
        (lo, hi)
    } else {
        (0, full.len() - 1)
    };
    let tau_grid: Vec<f64> = (lo..=hi).map(|i| tau0 + i as f64 * dt).collect();
    let values = full[lo..=hi].to_vec();
    if peak > 0.0 {
        let width = fwhm(&tau_grid, &values)?.width;
        let window = grid.n_points as f64 * dt;
        if window < 10.0 * width {
            return Err(WaveformError::InvalidGrid(format!(
                "delay window {window:.3e} s is shorter than 10x the FWHM {width:.3e} s"
            )));
        }
    }
    Ok(WavePacket {
        tau_grid,
        values,
        params_snapshot: *params,
    })
}

/// Doubles `n_points` at fixed span and compares the two packets on their common
/// delays. Returns the largest change relative to the peak.
pub fn check_resolution(params: &SourceParams, grid: &WaveformGrid) -> Result<f64, WaveformError> {
    let coarse = wavepacket(params, grid)?;
    let fine = wavepacket(params, &grid.doubled())?;
    let dt = coarse.dt();
    let peak = coarse.peak();
    if peak == 0.0 {
        return Ok(0.0);
    }
    let offset = ((coarse.tau_grid[0] - fine.tau_grid[0]) / dt).round() as i64;
    let mut worst: f64 = 0.0;
    for (i, v) in coarse.values.iter().enumerate() {
        let j = i as i64 + offset;
        let other = if j >= 0 && (j as usize) < fine.values.len() {
            fine.values[j as usize]
        } else {
            0.0
        };
        worst = worst.max((v - other).abs() / peak);
    }
    if worst >= 1e-3 {
        return Err(WaveformError::Resolution {
            max_deviation: worst,
        });
    }
    Ok(worst)
}

/// G²(τ) at one delay by direct summation over the amplitude array.
pub fn g2_direct(
    amp: &[Complex64],
    grid: &WaveformGrid,
    gamma_nat: f64,
    tau: f64,
    reverse: bool,
) -> f64 {
    let d = grid.step_gamma() * gamma_nat;
    let deltas = grid.deltas_gamma();
    let term = |k: usize| amp[k] * Complex64::from_polar(1.0, -deltas[k] * gamma_nat * tau);
    let sum: Complex64 = if reverse {
        (0..amp.len()).rev().map(term).sum()
    } else {
        (0..amp.len()).map(term).sum()
    };
    (sum * d / (2.0 * std::f64::consts::PI)).norm_sqr()
}

/// F(δ) = |κ̄ sinc(ρ̄) e^{iρ̄}|² and its FWHM.
pub fn spectrum(
    params: &SourceParams,
    grid: &WaveformGrid,
) -> Result<SpectralProfile, WaveformError> {
    grid.validate()?;
    let amp = amplitude_spectrum(&grid.deltas_gamma(), params)?;
    spectrum_from_amplitude(&amp, params, grid)
}

pub fn spectrum_from_amplitude(
    amp: &[Complex64],
    params: &SourceParams,
    grid: &WaveformGrid,
) -> Result<SpectralProfile, WaveformError> {
    let delta_grid: Vec<f64> = grid
        .deltas_gamma()
        .iter()
        .map(|d| d * params.gamma_nat)
        .collect();
    let values: Vec<f64> = amp.iter().map(|a| a.norm_sqr()).collect();
    let w = fwhm(&delta_grid, &values)?;
    Ok(SpectralProfile {
        delta_grid,
        values,
        fwhm: w.width / (2.0 * std::f64::consts::PI),
        single_peak: !w.multiple_crossings,
    })
}

/// ∫G²(τ)dτ by the trapezoidal rule, s⁻¹.
pub fn integrated_rate(wp: &WavePacket) -> f64 {
    trapezoid(&wp.values, wp.dt())
}

/// (1/2π)∫F(δ)dδ, s⁻¹.
pub fn spectral_rate(profile: &SpectralProfile) -> f64 {
    let d = profile.delta_grid[1] - profile.delta_grid[0];
    trapezoid(&profile.values, d) / (2.0 * std::f64::consts::PI)
}

fn trapezoid(values: &[f64], step: f64) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let inner: f64 = values.iter().sum();
    (inner - 0.5 * (values[0] + values[n - 1])) * step
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fwhm {
    pub width: f64,
    pub left: f64,
    pub right: f64,
    /// More than two half-maximum crossings; the outermost pair was used.
    pub multiple_crossings: bool,
}

/// Full width at half maximum by linear interpolation of the outermost
/// half-maximum crossings.
pub fn fwhm(x: &[f64], y: &[f64]) -> Result<Fwhm, WaveformError> {
    let n = y.len();
    if n < 3 || x.len() != n {
        return Err(WaveformError::NoCrossing);
    }
    let (imax, &ymax) = y
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .ok_or(WaveformError::NoCrossing)?;
    if !(ymax > 0.0) {
        return Err(WaveformError::NoCrossing);
    }
    let half = 0.5 * ymax;
    if y[0] >= half || y[n - 1] >= half {
        return Err(WaveformError::NoCrossing);
    }
    let i = (1..=imax)
        .find(|&i| y[i] >= half)
        .ok_or(WaveformError::NoCrossing)?;
    let j = (imax..n - 1)
        .rev()
        .find(|&j| y[j] >= half)
        .ok_or(WaveformError::NoCrossing)?;
    let cross = |a: usize, b: usize| x[a] + (half - y[a]) / (y[b] - y[a]) * (x[b] - x[a]);
    let left = cross(i - 1, i);
    let right = cross(j + 1, j);
    let crossings = y
        .windows(2)
        .filter(|w| (w[0] >= half) != (w[1] >= half))
        .count();
    Ok(Fwhm {
        width: right - left,
        left,
        right,
        multiple_crossings: crossings > 2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle() {
        let w = fwhm(&[0.0, 1.0, 2.0], &[0.0, 1.0, 0.0]).unwrap();
        assert_eq!(w.width, 1.0);
    }

    #[test]
    fn lorentzian_and_gaussian() {
        let x: Vec<f64> = (0..20001).map(|i| -10.0 + i as f64 * 1e-3).collect();
        let lor: Vec<f64> = x.iter().map(|t| 1.0 / (1.0 + (t / 0.7).powi(2))).collect();
        assert!((fwhm(&x, &lor).unwrap().width - 1.4).abs() < 1e-6);
        let sigma = 1.3;
        let gau: Vec<f64> = x
            .iter()
            .map(|t| (-t * t / (2.0 * sigma * sigma)).exp())
            .collect();
        let expected = 2.0 * sigma * (2.0 * 2f64.ln()).sqrt();
        assert!((fwhm(&x, &gau).unwrap().width - expected).abs() < 1e-6);
    }

    #[test]
    fn outermost_crossings_reported() {
        let y = [0.0, 1.0, 0.2, 0.9, 0.0];
        let x = [0.0, 1.0, 2.0, 3.0, 4.0];
        let w = fwhm(&x, &y).unwrap();
        assert!(w.multiple_crossings);
        assert!((w.left - 0.5).abs() < 1e-12);
        assert!((w.right - (3.0 + 0.4 / 0.9)).abs() < 1e-12);
    }

    #[test]
    fn no_crossing() {
        assert_eq!(
            fwhm(&[0.0, 1.0, 2.0], &[1.0, 1.0, 0.0]),
            Err(WaveformError::NoCrossing)
        );
    }

    #[test]
    fn grid_validation() {
        assert!(WaveformGrid {
            half_span_gamma: 40.0,
            n_points: 3000
        }
        .validate()
        .is_err());
        assert!(WaveformGrid {
            half_span_gamma: 40.0,
            n_points: 1 << 11
        }
        .validate()
        .is_err());
    }

    #[test]
    fn narrow_grid_rejected() {
        let grid = WaveformGrid {
            half_span_gamma: 40.0,
            n_points: 1 << 14,
        };
        let err = wavepacket(&SourceParams::high_od(), &grid).unwrap_err();
        assert!(
            matches!(err, WaveformError::GridTooNarrow { .. }),
            "{err:?}"
        );
    }
}
