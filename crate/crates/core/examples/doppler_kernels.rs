//! κ̄(δ) and ρ̄(δ) from the closed form, compared with two quadratures of the
//! Doppler integral. The Hermite rule gives up when a pole sits near the real
//! axis; adaptive Gauss–Kronrod does not.

use biphoton::model::{doppler_average, kappa_bar, kappa_integrand, rho_bar, SourceParams};
use biphoton::quadrature::gaussian_average;

fn main() {
    let p = SourceParams::high_od();
    println!(
        "{:>6} {:>24} {:>24} {:>10} {:>10}",
        "delta", "kappa_bar", "rho_bar", "hermite", "adaptive"
    );
    for delta in [-4.0, -1.0, -0.25, 0.0, 0.25, 1.0, 4.0] {
        let k = kappa_bar(delta, &p);
        let r = rho_bar(delta, &p);
        let f = |w: f64| kappa_integrand(delta, w, &p);
        let hermite = match doppler_average(f, &p) {
            Ok(h) => format!("{:.1e}", (k - h).norm() / k.norm()),
            Err(_) => "no conv.".into(),
        };
        let adaptive = gaussian_average(f, p.gamma_doppler, 1e-12).value;
        println!(
            "{delta:>6.2} {:>11.4e}{:+11.4e}i {:>11.4e}{:+11.4e}i {:>10} {:>10.1e}",
            k.re,
            k.im,
            r.re,
            r.im,
            hermite,
            (k - adaptive).norm() / k.norm()
        );
    }
}
