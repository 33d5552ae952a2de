//! Photon-counting chain: pair emission, detection, trigger-window histograms,
//! auto-correlation and SBR.

mod config;
mod correlation;
mod detect;
mod histogram;
pub mod rng;
mod stream;

pub use config::{fluorescence_from_budget, DetectorConfig, HistogramConfig, Statistics};
pub use correlation::{auto_correlation, AutoCorrelation, MIN_EVENTS};
pub use detect::{detect, detect_with_unpaired, DetectedStreams, Illumination};
pub use histogram::{coincidence_histogram, cross_correlation, CoincidenceHistogram};
pub use stream::{
    emission_times, sample_delay, simulate_pair_stream, simulate_shared_modes, DelaySampler, Pair,
    PairStreamConfig,
};

use crate::fitting::WavePacketFit;

/// Emits pairs from `cfg` and passes them through the detectors.
///
/// With THERMAL statistics the uncorrelated anti-Stokes light is drawn from
/// the same modes as the pairs instead of an independent stream.
pub fn emit_and_detect(
    cfg: &PairStreamConfig,
    det: &DetectorConfig,
    light: &Illumination,
    duration: f64,
) -> Result<DetectedStreams, SimError> {
    if cfg.statistics_mode == Statistics::Thermal && light.uncorrelated_as > 0.0 && det.eff_as > 0.0
    {
        let (pairs, unpaired) =
            simulate_shared_modes(cfg, light.uncorrelated_as / det.eff_as, duration)?;
        let light = Illumination {
            uncorrelated_as: 0.0,
            ..*light
        };
        detect_with_unpaired(&pairs, &unpaired, det, &light, duration, cfg.seed)
    } else {
        let pairs = simulate_pair_stream(cfg, duration)?;
        detect(&pairs, det, light, duration, cfg.seed)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SimError {
    #[error("invalid simulation setting: {0}")]
    InvalidConfig(String),
    #[error("{found} events is below the {required} needed for a correlation estimate")]
    InsufficientEvents { found: usize, required: usize },
}

/// (peak − baseline)/baseline of the fitted curve. A zero baseline under a
/// nonzero peak gives `f64::INFINITY`.
pub fn measure_sbr(fit: &WavePacketFit) -> f64 {
    let signal = fit.peak_above_baseline();
    let b = fit.params.baseline;
    if b > 0.0 {
        signal / b
    } else if signal > 0.0 {
        f64::INFINITY
    } else {
        0.0
    }
}
