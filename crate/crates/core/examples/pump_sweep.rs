//! Theory sweep over pump power at two cell temperatures, with scaling fits.

use biphoton::analysis::{sweep, Calibration, Mode, OperatingPoint, SimSettings};
use biphoton::detection::{DetectorConfig, HistogramConfig};
use biphoton::fitting::{fit_scaling, ScalingModel};
use biphoton::waveform::WaveformGrid;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let pumps = [2.0, 6.0, 10.0, 16.0];
    let points: Vec<OperatingPoint> = [0, 4]
        .iter()
        .flat_map(|&i| pumps.iter().map(move |&p| OperatingPoint::measured(i, p)))
        .collect();
    let table = sweep(
        &points,
        &Calibration::default(),
        &DetectorConfig::default(),
        &HistogramConfig::default(),
        &WaveformGrid::default(),
        Mode::Theory,
        &SimSettings::default(),
    )?;
    println!(
        "{:>6} {:>6} {:>11} {:>10} {:>8} {:>11}",
        "T(C)", "P(mW)", "rate", "lw(kHz)", "SBR", "brightness"
    );
    for r in &table.records {
        println!(
            "{:>6.0} {:>6.1} {:>11.4e} {:>10.1} {:>8.2} {:>11.4e}",
            r.op.temp_c,
            r.op.pump_mw,
            r.generation_rate,
            r.linewidth_hz * 1e-3,
            r.sbr,
            r.brightness
        );
    }
    for t in [38.0, 65.0] {
        let pts: Vec<(f64, f64)> = table
            .records
            .iter()
            .filter(|r| r.op.temp_c == t)
            .map(|r| (r.op.pump_mw, r.sbr))
            .collect();
        let f = fit_scaling(&pts, ScalingModel::Sbr)?;
        println!(
            "{t} C: SBR = A P/(P^2 + B), A = {:.3}, B = {:.3}",
            f.param_a, f.param_b
        );
    }
    Ok(())
}
