//! Fits the wave-packet function to a noisy synthetic coincidence histogram.

use biphoton::detection::{measure_sbr, CoincidenceHistogram};
use biphoton::fitting::{eval_phenomenological, fit_wavepacket, PhenomParams};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let ns = 1e-9;
    let truth = PhenomParams {
        a_amp: 400.0,
        baseline: 25.0,
        epsilon: 2.0,
        t0: 5.0 * ns,
        p_exp: 1.5,
        tau1: 8.0 * ns,
        tau2: 140.0 * ns,
        t_d: 50.0 * ns,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let width = 0.8 * ns;
    let counts = (0..2000)
        .map(|k| {
            let t = -200.0 * ns + (k as f64 + 0.5) * width;
            Poisson::new(eval_phenomenological(t, &truth)).map(|d| d.sample(&mut rng) as u64)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let hist = CoincidenceHistogram {
        bin_width_s: width,
        window_s: 2000.0 * width,
        start_s: -200.0 * ns,
        duration_s: 1.0,
        counts,
        n_triggers: 0,
    };
    let fit = fit_wavepacket(&hist)?;
    for (i, name) in PhenomParams::NAMES.iter().enumerate() {
        println!(
            "{name:>8} {:>12.4e} ± {:>10.3e}  (true {:.4e})",
            fit.params.to_array()[i],
            fit.uncertainties[i],
            truth.to_array()[i]
        );
    }
    println!(
        "FWHM {:.1} ns, linewidth {:.1} kHz",
        fit.temporal_fwhm * 1e9,
        fit.linewidth_hz * 1e-3
    );
    println!(
        "SBR {:.2}, reduced chi2 {:.3}",
        measure_sbr(&fit),
        fit.chi2_reduced
    );
    Ok(())
}
