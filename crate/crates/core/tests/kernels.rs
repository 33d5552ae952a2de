mod common;

use biphoton::model::{
    doppler_average, kappa_bar, kappa_integrand, resolvent_average, rho_bar, rho_integrand,
    SourceParams,
};
use common::{doppler_oracle, rel_err};
use num_complex::Complex64;
use proptest::prelude::*;

const DELTAS: [f64; 7] = [-8.0, -2.5, -0.4, 0.0, 0.3, 1.7, 12.0];

fn poles(delta: f64, p: &SourceParams) -> Vec<f64> {
    let s = Complex64::new(delta, p.gamma_dec);
    let b = p.omega_c * p.omega_c / (4.0 * s) - delta;
    vec![b.re, p.delta_p_gamma()]
}

#[test]
fn kappa_closed_form_matches_direct_average() {
    for p in [SourceParams::high_od(), SourceParams::low_od()] {
        for d in DELTAS {
            let oracle = doppler_oracle(
                |w| kappa_integrand(d, w, &p),
                p.gamma_doppler,
                &poles(d, &p),
                1e-13,
            );
            let e = rel_err(kappa_bar(d, &p), oracle);
            assert!(e < 1e-8, "alpha {} delta {d}: rel err {e:e}", p.alpha);
        }
    }
}

#[test]
fn rho_closed_form_matches_direct_average() {
    for p in [SourceParams::high_od(), SourceParams::low_od()] {
        for d in DELTAS {
            let oracle = doppler_oracle(
                |w| rho_integrand(d, w, &p),
                p.gamma_doppler,
                &poles(d, &p),
                1e-13,
            );
            let e = rel_err(rho_bar(d, &p), oracle);
            assert!(e < 1e-8, "alpha {} delta {d}: rel err {e:e}", p.alpha);
        }
    }
}

#[test]
fn kernels_scale_with_optical_depth_and_pump() {
    let p = SourceParams::high_od();
    for d in DELTAS {
        let k2 = kappa_bar(
            d,
            &p.with_alpha(2.0 * p.alpha).with_omega_p(3.0 * p.omega_p),
        );
        assert!(rel_err(k2, kappa_bar(d, &p) * 6.0) < 1e-12);
        let r2 = rho_bar(d, &p.with_alpha(2.0 * p.alpha).with_omega_p(3.0));
        assert!(rel_err(r2, rho_bar(d, &p) * 2.0) < 1e-12);
    }
}

#[test]
fn resolvent_limits() {
    // Far from the distribution, ⟨1/(ω − z)⟩ → −1/z − Γ_D²/(2z³).
    let gd = 55.0;
    for z in [Complex64::new(3000.0, 1.0), Complex64::new(-2500.0, -4.0)] {
        let asym = -1.0 / z - gd * gd / (2.0 * z * z * z);
        assert!(rel_err(resolvent_average(z, gd), asym) < 1e-6);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Hermite rule on sums of simple poles kept at least 0.3Γ_D off the axis.
    #[test]
    fn hermite_matches_direct_average_for_rational_integrands(
        terms in prop::collection::vec(
            (-2.0f64..2.0, 0.3f64..2.0, prop::bool::ANY, -1.0f64..1.0, -1.0f64..1.0),
            1..4,
        )
    ) {
        let p = SourceParams::high_od();
        let gd = p.gamma_doppler;
        let poles: Vec<(Complex64, Complex64)> = terms
            .iter()
            .map(|&(x, y, up, cr, ci)| {
                let y = if up { y } else { -y };
                (Complex64::new(x * gd, y * gd), Complex64::new(cr, ci))
            })
            .collect();
        let f = |w: f64| -> Complex64 {
            poles.iter().map(|(z, c)| c / (w - z)).sum()
        };
        let reals: Vec<f64> = poles.iter().map(|(z, _)| z.re).collect();
        let oracle = doppler_oracle(f, gd, &reals, 1e-14);
        let exact: Complex64 = poles.iter().map(|(z, c)| c * resolvent_average(*z, gd)).sum();
        let scale = poles.iter().map(|(z, c)| c.norm() / z.im.abs()).sum::<f64>();
        let got = doppler_average(f, &p).unwrap();
        prop_assert!((got - oracle).norm() <= 1e-8 * scale, "hermite {got} oracle {oracle}");
        prop_assert!((exact - oracle).norm() <= 1e-9 * scale, "closed {exact} oracle {oracle}");
    }

    #[test]
    fn kappa_closed_form_matches_hermite(d in -30.0f64..30.0, alpha in 1.0f64..500.0, gamma in 0.0f64..0.2) {
        let p = SourceParams::high_od().with_alpha(alpha).with_gamma_dec(gamma);
        let hermite = doppler_average(|w| kappa_integrand(d, w, &p), &p);
        // Near-axis poles can defeat the rule; only compare when it converges.
        if let Ok(h) = hermite {
            let k = kappa_bar(d, &p);
            prop_assert!(rel_err(k, h) < 1e-6, "delta {d}: closed {k} hermite {h}");
        }
    }
}
