use rand::Rng;
use serde::{Deserialize, Serialize};

use super::rng::{stream, substream};
use super::stream::{emission_times, Pair};
use super::{DetectorConfig, SimError, Statistics};

/// Field powers and source-side singles that set the spurious count rates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Illumination {
    pub pump_mw: f64,
    pub coupling_mw: f64,
    /// Detected anti-Stokes-band photons without a Stokes partner, counts/s.
    pub uncorrelated_as: f64,
    /// Statistics of the uncorrelated anti-Stokes photons.
    pub uncorrelated_statistics: Statistics,
    pub coherence_time_s: f64,
}

impl Default for Illumination {
    fn default() -> Self {
        Self {
            pump_mw: 0.0,
            coupling_mw: 0.0,
            uncorrelated_as: 0.0,
            uncorrelated_statistics: Statistics::Poisson,
            coherence_time_s: 0.0,
        }
    }
}

/// Detected timestamps of both channels, sorted, s.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct DetectedStreams {
    pub anti_stokes: Vec<f64>,
    pub stokes: Vec<f64>,
    /// Pairs emitted before thinning.
    pub emitted_pairs: usize,
    /// Pairs with both photons detected.
    pub coincident_pairs: u64,
}

/// Thins each pair photon by its channel efficiency and merges independent
/// dark, leakage, fluorescence and uncorrelated streams.
pub fn detect(
    pairs: &[Pair],
    det: &DetectorConfig,
    light: &Illumination,
    duration: f64,
    seed: u64,
) -> Result<DetectedStreams, SimError> {
    detect_with_unpaired(pairs, &[], det, light, duration, seed)
}

/// As [`detect`], also thinning pre-drawn unpaired anti-Stokes emissions by
/// the anti-Stokes efficiency.
pub fn detect_with_unpaired(
    pairs: &[Pair],
    unpaired_as: &[f64],
    det: &DetectorConfig,
    light: &Illumination,
    duration: f64,
    seed: u64,
) -> Result<DetectedStreams, SimError> {
    det.validate()?;
    if pairs.windows(2).any(|w| w[1].t_as < w[0].t_as) {
        return Err(SimError::InvalidConfig(
            "pair stream is not time-sorted".into(),
        ));
    }
    let mut rng = substream(seed, stream::EFFICIENCY);
    let mut anti_stokes = Vec::with_capacity((pairs.len() as f64 * det.eff_as * 1.1) as usize + 16);
    let mut stokes = Vec::with_capacity((pairs.len() as f64 * det.eff_s * 1.1) as usize + 16);
    let mut coincident_pairs = 0;
    for pair in pairs {
        let a = det.eff_as >= 1.0 || rng.gen::<f64>() < det.eff_as;
        let s = det.eff_s >= 1.0 || rng.gen::<f64>() < det.eff_s;
        if a {
            anti_stokes.push(pair.t_as);
        }
        if s {
            stokes.push(pair.t_s);
        }
        if a && s {
            coincident_pairs += 1;
        }
    }

    let spurious_as = det.dark_as + det.leak_as * light.pump_mw;
    let spurious_s = det.dark_s + det.leak_s * light.coupling_mw + det.fluorescence_s;
    let mut extra_as = emission_times(
        spurious_as,
        Statistics::Poisson,
        0.0,
        duration,
        &mut substream(seed, stream::SPURIOUS_AS),
    )?;
    let extra_s = emission_times(
        spurious_s,
        Statistics::Poisson,
        0.0,
        duration,
        &mut substream(seed, stream::SPURIOUS_S),
    )?;
    extra_as.extend(emission_times(
        light.uncorrelated_as,
        light.uncorrelated_statistics,
        light.coherence_time_s,
        duration,
        &mut substream(seed, stream::UNCORRELATED_AS),
    )?);
    let mut unpaired_rng = substream(seed, stream::UNPAIRED);
    extra_as.extend(
        unpaired_as
            .iter()
            .filter(|_| det.eff_as >= 1.0 || unpaired_rng.gen::<f64>() < det.eff_as),
    );
    anti_stokes.extend(extra_as);
    stokes.extend(extra_s);
    anti_stokes.sort_unstable_by(f64::total_cmp);
    stokes.sort_unstable_by(f64::total_cmp);
    Ok(DetectedStreams {
        anti_stokes,
        stokes,
        emitted_pairs: pairs.len(),
        coincident_pairs,
    })
}
