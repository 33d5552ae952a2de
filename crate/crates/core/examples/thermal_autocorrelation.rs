//! Zero-delay autocorrelation of the heralding channel for both photon statistics.

use biphoton::acceptance::zero_delay_autocorrelation;
use biphoton::analysis::{evaluate_point, Calibration, OperatingPoint};
use biphoton::detection::{DetectorConfig, HistogramConfig, Illumination, Statistics};
use biphoton::waveform::WaveformGrid;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let op = OperatingPoint::top();
    let det = DetectorConfig::default();
    let theory = evaluate_point(
        &op,
        &Calibration::default(),
        &det,
        &HistogramConfig::default(),
        &WaveformGrid::default(),
    )?;
    let light = Illumination {
        pump_mw: op.pump_mw,
        coupling_mw: op.coupling_mw,
        uncorrelated_as: theory.channels.uncorrelated_as,
        coherence_time_s: theory.temporal_fwhm(),
        ..Illumination::default()
    };
    for stats in [Statistics::Poisson, Statistics::Thermal] {
        let g = zero_delay_autocorrelation(&theory, &det, &light, stats, 4, 5.0, 12.8e-9, 7)?;
        println!(
            "{stats:?}: anti-Stokes g2(0) = {:.3} ± {:.3}, Stokes g2(0) = {:.3} ± {:.3}",
            g.anti_stokes.g2, g.anti_stokes.sigma, g.stokes.g2, g.stokes.sigma
        );
    }
    Ok(())
}
