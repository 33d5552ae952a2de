mod common;

use biphoton::model::{biphoton_amplitude, SourceParams};
use biphoton::waveform::{
    amplitude_spectrum, check_resolution, g2_direct, integrated_rate, spectral_rate, spectrum,
    wavepacket, wavepacket_from_amplitude, WaveformGrid,
};
use common::simpson_integral;
use num_complex::Complex64;
use proptest::prelude::*;

fn small_grid() -> WaveformGrid {
    WaveformGrid {
        half_span_gamma: 400.0,
        n_points: 1 << 16,
    }
}

/// (Γ/2π)∫A(x)e^{−ixΓτ}dx over |x| ≤ span, squared.
fn g2_oracle(p: &SourceParams, tau: f64, span: f64) -> f64 {
    let g = p.gamma_nat;
    // At most one radian of phase per panel so the first Simpson pass cannot alias.
    let h = (1.0 / (g * tau.abs())).min(0.5);
    let n = (span / h).ceil() as i64;
    let breaks: Vec<f64> = (-n..=n).map(|k| k as f64 * span / n as f64).collect();
    let v = simpson_integral(
        |x| biphoton_amplitude(x, p) * Complex64::from_polar(1.0, -x * g * tau),
        &breaks,
        1e-9,
    );
    (v * g / (2.0 * std::f64::consts::PI)).norm_sqr()
}

#[test]
fn fft_matches_direct_fourier_integral() {
    for p in [SourceParams::high_od(), SourceParams::low_od()] {
        let wp = wavepacket(&p, &WaveformGrid::default()).unwrap();
        let peak = wp.peak();
        let i_peak = wp.values.iter().position(|&v| v == peak).unwrap();
        let n = wp.values.len();
        for i in [i_peak, i_peak + n / 8, i_peak + n / 4, n / 2] {
            let tau = wp.tau_grid[i];
            let oracle = g2_oracle(&p, tau, 400.0);
            let d = (wp.values[i] - oracle).abs() / peak;
            assert!(
                d < 1e-4,
                "alpha {} tau {tau:e}: fft {} oracle {oracle}",
                p.alpha,
                wp.values[i]
            );
        }
    }
}

#[test]
fn direct_sum_agrees_with_fft_and_is_order_independent() {
    let p = SourceParams::low_od();
    let grid = small_grid();
    let amp = amplitude_spectrum(&grid.deltas_gamma(), &p).unwrap();
    let wp = wavepacket_from_amplitude(&amp, &p, &grid).unwrap();
    let peak = wp.peak();
    for i in (0..wp.values.len()).step_by(wp.values.len() / 7) {
        let tau = wp.tau_grid[i];
        let fwd = g2_direct(&amp, &grid, p.gamma_nat, tau, false);
        let rev = g2_direct(&amp, &grid, p.gamma_nat, tau, true);
        assert!((fwd - wp.values[i]).abs() < 1e-9 * peak);
        assert!((fwd - rev).abs() < 1e-12 * peak);
    }
}

#[test]
fn parseval_holds_on_both_operating_points() {
    for p in [SourceParams::high_od(), SourceParams::low_od()] {
        let grid = WaveformGrid::default();
        let t = integrated_rate(&wavepacket(&p, &grid).unwrap());
        let f = spectral_rate(&spectrum(&p, &grid).unwrap());
        assert!(((t - f) / f).abs() < 1e-6, "time {t} freq {f}");
    }
}

#[test]
fn default_grid_is_resolved() {
    for p in [SourceParams::high_od(), SourceParams::low_od()] {
        let dev = check_resolution(&p, &WaveformGrid::default()).unwrap();
        assert!(dev < 1e-3, "{dev}");
    }
}

#[test]
fn negative_delays_carry_no_weight() {
    let p = SourceParams::high_od();
    let wp = wavepacket(&p, &WaveformGrid::default()).unwrap();
    let dt = wp.dt();
    let total: f64 = wp.values.iter().sum::<f64>() * dt;
    let early: f64 = wp
        .tau_grid
        .iter()
        .zip(&wp.values)
        .filter(|(t, _)| **t < -5e-9)
        .map(|(_, v)| v * dt)
        .sum();
    assert!(early < 1e-3 * total, "{early} of {total}");
}

#[test]
fn zero_pump_gives_no_pairs() {
    let p = SourceParams::high_od().with_omega_p(0.0);
    let amp = amplitude_spectrum(&small_grid().deltas_gamma(), &p).unwrap();
    assert!(amp.iter().all(|a| a.norm() == 0.0));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    /// G² ∝ Ω_p² at fixed shape; the spectral width does not depend on the pump.
    #[test]
    fn pump_only_rescales(scale in 0.2f64..5.0, alpha in 60.0f64..400.0) {
        let grid = small_grid();
        let p = SourceParams::high_od().with_alpha(alpha);
        let q = p.with_omega_p(p.omega_p * scale);
        let a = spectrum(&p, &grid).unwrap();
        let b = spectrum(&q, &grid).unwrap();
        prop_assert!(((a.fwhm - b.fwhm) / a.fwhm).abs() < 1e-9);
        let ra = integrated_rate(&wavepacket(&p, &grid).unwrap());
        let rb = integrated_rate(&wavepacket(&q, &grid).unwrap());
        prop_assert!((rb / ra / (scale * scale) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn wavepacket_is_nonnegative_and_finite(alpha in 10.0f64..500.0, gamma in 0.0f64..0.1) {
        let p = SourceParams::high_od().with_alpha(alpha).with_gamma_dec(gamma);
        let wp = wavepacket(&p, &small_grid()).unwrap();
        prop_assert!(wp.values.iter().all(|v| v.is_finite() && *v >= 0.0));
    }

    /// Larger optical depth narrows the spectrum.
    #[test]
    fn linewidth_falls_with_optical_depth(alpha in 60.0f64..300.0) {
        let grid = small_grid();
        let p = SourceParams::high_od().with_alpha(alpha);
        let w1 = spectrum(&p, &grid).unwrap().fwhm;
        let w2 = spectrum(&p.with_alpha(1.5 * alpha), &grid).unwrap().fwhm;
        prop_assert!(w2 < w1, "{w1} -> {w2}");
    }
}

/// Largest gap between peak-normalized profiles at two pump detunings,
/// compared on the delays both grids cover.
fn normalized_gap(a: &SourceParams, b: &SourceParams, grid: &WaveformGrid) -> f64 {
    let wa = wavepacket(a, grid).unwrap();
    let wb = wavepacket(b, grid).unwrap();
    let (pa, pb) = (wa.peak(), wb.peak());
    let dt = wa.dt();
    let shift = ((wb.tau_grid[0] - wa.tau_grid[0]) / dt).round() as i64;
    let mut gap = 0.0f64;
    for (i, x) in wa.values.iter().enumerate() {
        let j = i as i64 - shift;
        let y = match usize::try_from(j).ok().and_then(|j| wb.values.get(j)) {
            Some(y) => y / pb,
            None => 0.0,
        };
        gap = gap.max((x / pa - y).abs());
    }
    gap
}

#[test]
fn pump_detuning_leaves_profile_nearly_unchanged() {
    let grid = WaveformGrid::default();
    for base in [SourceParams::high_od(), SourceParams::low_od()] {
        let far = SourceParams {
            delta_p: 1.5 * base.delta_p,
            ..base
        };
        let gap = normalized_gap(&base, &far, &grid);
        println!("alpha {:.0}: normalized profile gap {gap:.3e}", base.alpha);
        assert!(gap < 0.05, "gap {gap}");
    }
}
