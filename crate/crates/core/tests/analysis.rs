use biphoton::analysis::{
    brightness, cauchy_schwarz, predict_point, simulate_point, trigger_rates, Calibration,
    OperatingPoint, SimSettings, DEFAULT_OMEGA_P_PER_SQRT_MW, KT_PER_OD, MEASURED_KS, MEASURED_KT,
    MEASURED_OD,
};
use biphoton::detection::{DetectorConfig, HistogramConfig};
use biphoton::model::{od_convert, od_invert, reference_limit, SourceParams};
use biphoton::waveform::WaveformGrid;
use proptest::prelude::*;

#[test]
fn cauchy_schwarz_from_reported_correlations() {
    let r = cauchy_schwarz(2.7, 1.95, 1.97);
    assert!((r - 3.56).abs() < 0.01, "{r}");
}

#[test]
fn brightness_limit_is_pi_over_two_million() {
    let l = reference_limit();
    assert!((l / (std::f64::consts::FRAC_PI_2 * 1e6) - 1.0).abs() < 1e-15);
    let b = brightness(3.7e5, 960e3).unwrap();
    assert!((b.value / 3.8e5 - 1.0).abs() < 0.05, "{}", b.value);
}

#[test]
fn anchored_calibration_matches_the_stored_constant() {
    let cal = Calibration::anchored(&WaveformGrid::default()).unwrap();
    let rel = (cal.omega_p_per_sqrt_mw / DEFAULT_OMEGA_P_PER_SQRT_MW - 1.0).abs();
    assert!(rel < 1e-9, "{}", cal.omega_p_per_sqrt_mw);
}

#[test]
fn trigger_law_constants_agree_with_reported_rates() {
    for (od, kt) in MEASURED_OD.iter().zip(MEASURED_KT) {
        assert!(
            (KT_PER_OD * od / kt - 1.0).abs() < 0.06,
            "{od}: {}",
            KT_PER_OD * od
        );
    }
    let cal = Calibration::default();
    for (i, ks) in MEASURED_KS.iter().enumerate() {
        let op = OperatingPoint::measured(i, cal.reference_pump_mw);
        let r = trigger_rates(&op, &cal);
        assert!((r.r_s / (ks * op.pump_mw) - 1.0).abs() < 1e-12);
        assert!((r.r_t / (KT_PER_OD * op.od_measured * op.pump_mw) - 1.0).abs() < 1e-12);
    }
}

#[test]
fn theory_rate_is_linear_in_pump() {
    let (cal, det, hist, grid) = (
        Calibration::default(),
        DetectorConfig::default(),
        HistogramConfig::default(),
        WaveformGrid::default(),
    );
    let lo = predict_point(&OperatingPoint::measured(2, 6.0), &cal, &det, &hist, &grid).unwrap();
    let hi = predict_point(&OperatingPoint::measured(2, 12.0), &cal, &det, &hist, &grid).unwrap();
    assert!((hi.generation_rate / lo.generation_rate - 2.0).abs() < 1e-9);
    let top = predict_point(&OperatingPoint::top(), &cal, &det, &hist, &grid).unwrap();
    assert!((top.generation_rate / 3.7e5 - 1.0).abs() < 1e-6);
}

/// The simulated chain reproduces the closed-form rate and SBR at the top point.
#[test]
fn monte_carlo_agrees_with_theory_at_top_point() {
    let (cal, det, hist, grid) = (
        Calibration::default(),
        DetectorConfig::default(),
        HistogramConfig::default(),
        WaveformGrid::default(),
    );
    let op = OperatingPoint::top();
    let theory = predict_point(&op, &cal, &det, &hist, &grid).unwrap();
    let mc = simulate_point(&op, &cal, &det, &hist, &grid, &SimSettings::default()).unwrap();
    let rate = mc.record.generation_rate / theory.generation_rate;
    assert!((rate - 1.0).abs() < 0.08, "rate ratio {rate}");
    let sbr = mc.record.sbr / theory.sbr;
    assert!((sbr - 1.0).abs() < 0.15, "sbr ratio {sbr}");
    let pair = mc.coincident_pair_rate / (theory.generation_rate * det.eff_as * det.eff_s);
    assert!((pair - 1.0).abs() < 0.02, "coincident ratio {pair}");
}

proptest! {
    #[test]
    fn od_conversion_round_trips(alpha in 0.0f64..2000.0) {
        let p = SourceParams::high_od();
        prop_assert!((od_invert(od_convert(alpha, &p), &p) - alpha).abs() <= 1e-12 * alpha.max(1.0));
    }

    #[test]
    fn gamma_grows_with_pump_and_temperature(p in 2.0f64..16.0, dp in 0.1f64..8.0) {
        let cal = Calibration::default();
        for i in 0..4 {
            let a = cal.gamma(&OperatingPoint::measured(i, p));
            prop_assert!(cal.gamma(&OperatingPoint::measured(i, p + dp)) > a);
            prop_assert!(cal.gamma(&OperatingPoint::measured(i + 1, p)) > a);
        }
    }
}
