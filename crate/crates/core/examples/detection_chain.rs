//! Pair emission through the detector budget at the top operating point.

use biphoton::analysis::{simulate_point, Calibration, OperatingPoint, SimSettings};
use biphoton::detection::{DetectorConfig, HistogramConfig};
use biphoton::waveform::WaveformGrid;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let det = DetectorConfig::default();
    let out = simulate_point(
        &OperatingPoint::top(),
        &Calibration::default(),
        &det,
        &HistogramConfig::default(),
        &WaveformGrid::default(),
        &SimSettings {
            duration_s: 5.0,
            ..SimSettings::default()
        },
    )?;
    let secs = 5.0;
    println!("emitted pairs        {:>10}", out.n_pairs);
    println!(
        "anti-Stokes singles  {:>10.1} /s",
        out.anti_stokes.len() as f64 / secs
    );
    println!(
        "Stokes singles       {:>10.1} /s",
        out.stokes.len() as f64 / secs
    );
    println!("coincident pairs     {:>10.1} /s", out.coincident_pair_rate);
    println!(
        "fitted linewidth     {:>10.1} kHz",
        out.record.linewidth_hz * 1e-3
    );
    println!("SBR                  {:>10.2}", out.record.sbr);
    println!(
        "success probability  {:>10.2} %",
        out.success_probability * 100.0
    );
    Ok(())
}
