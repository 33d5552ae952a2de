//! Biphoton wave packets at the two optical depths, with spectral and fitted widths.

use biphoton::analysis::fit_theory;
use biphoton::detection::HistogramConfig;
use biphoton::model::SourceParams;
use biphoton::waveform::{integrated_rate, spectrum, wavepacket, WaveformGrid};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid = WaveformGrid::default();
    let hist = HistogramConfig::default();
    for (name, p) in [
        ("alpha 370", SourceParams::high_od()),
        ("alpha 93", SourceParams::low_od()),
    ] {
        let wp = wavepacket(&p, &grid)?;
        let sp = spectrum(&p, &grid)?;
        let fit = fit_theory(&wp, &hist)?;
        println!("{name}");
        println!("  sampled FWHM   {:8.1} ns", wp.fwhm()? * 1e9);
        println!("  fitted FWHM    {:8.1} ns", fit.temporal_fwhm * 1e9);
        println!("  spectral FWHM  {:8.1} kHz", sp.fwhm * 1e-3);
        println!("  rate / Omega_p^2 {:.4e} 1/s", integrated_rate(&wp));
    }
    Ok(())
}
