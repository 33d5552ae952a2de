//! Linewidth from a temporal fit: square the Fourier transform of √(curve − B).

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::phenom::{support, PhenomParams};
use super::FitError;
use crate::waveform::fwhm;

/// Samples across the pulse support.
const SAMPLES_IN_SUPPORT: usize = 2048;
/// Transform length (zero padded).
const FFT_LEN: usize = 1 << 18;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Linewidth {
    pub linewidth_hz: f64,
    pub lorentzian_residual: f64,
}

/// FWHM of |FT[√max(f(t), 0)]|² for a curve sampled on t_start + k·dt over
/// `duration`, zero padded.
pub fn linewidth_from_curve<F>(curve: F, t_start: f64, duration: f64) -> Result<Linewidth, FitError>
where
    F: Fn(f64) -> f64,
{
    let dt = duration / SAMPLES_IN_SUPPORT as f64;
    let mut buf = vec![Complex64::new(0.0, 0.0); FFT_LEN];
    for (k, slot) in buf.iter_mut().take(SAMPLES_IN_SUPPORT).enumerate() {
        *slot = Complex64::new(curve(t_start + k as f64 * dt).max(0.0).sqrt(), 0.0);
    }
    FftPlanner::new()
        .plan_fft_forward(FFT_LEN)
        .process(&mut buf);
    let df = 1.0 / (FFT_LEN as f64 * dt);
    let half = FFT_LEN / 2;
    let freq: Vec<f64> = (0..FFT_LEN)
        .map(|i| (i as f64 - half as f64) * df)
        .collect();
    let power: Vec<f64> = (0..FFT_LEN)
        .map(|i| buf[(i + half) % FFT_LEN].norm_sqr())
        .collect();
    let w = fwhm(&freq, &power)?;
    let peak = power.iter().cloned().fold(0.0, f64::max);
    let centre = 0.5 * (w.left + w.right);
    let hw = 0.5 * w.width;
    let (mut ss, mut count) = (0.0, 0usize);
    for (f, p) in freq.iter().zip(&power) {
        let x = (f - centre) / hw;
        if x.abs() <= 3.0 {
            let lor = peak / (1.0 + x * x);
            ss += ((p - lor) / peak).powi(2);
            count += 1;
        }
    }
    Ok(Linewidth {
        linewidth_hz: w.width,
        lorentzian_residual: (ss / count.max(1) as f64).sqrt(),
    })
}

/// Linewidth of a fitted wave packet. The baseline is subtracted and negative
/// values clipped before the square root; the sampling grid is anchored at t0.
pub fn linewidth_from_params(p: &PhenomParams) -> Result<Linewidth, FitError> {
    let (lo, hi) = support(p);
    linewidth_from_curve(|t| p.signal(t), lo, hi - lo)
}

pub fn linewidth_from_fit(fit: &super::WavePacketFit) -> Result<Linewidth, FitError> {
    linewidth_from_params(&fit.params)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay_gives_lorentzian() {
        let tau = 50e-9;
        let lw = linewidth_from_curve(
            |t| if t >= 0.0 { (-t / tau).exp() } else { 0.0 },
            0.0,
            40.0 * tau,
        )
        .unwrap();
        let expected = 1.0 / (2.0 * std::f64::consts::PI * tau);
        assert!(
            ((lw.linewidth_hz - expected) / expected).abs() < 2e-3,
            "{} vs {expected}",
            lw.linewidth_hz
        );
        assert!(lw.lorentzian_residual < 0.01);
    }
}
