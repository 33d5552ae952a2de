//! Operating points, calibration, figures of merit and pump/OD sweeps.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::detection::{
    coincidence_histogram, emit_and_detect, CoincidenceHistogram, DelaySampler, DetectorConfig,
    HistogramConfig, Illumination, PairStreamConfig, SimError, Statistics,
};
use crate::fitting::{fit_histogram, fit_samples, FitError, WavePacketFit, Weighting};
use crate::model::{od_invert, reference_limit, ModelError, SourceParams};
use crate::waveform::{
    amplitude_spectrum, integrated_rate, spectrum_from_amplitude, wavepacket_from_amplitude,
    WavePacket, WaveformError, WaveformGrid,
};

/// Cell temperatures of the measurement series, °C.
pub const MEASURED_TEMPERATURES: [f64; 5] = [38.0, 44.0, 53.0, 60.0, 65.0];
/// Measured OD α′ at each temperature.
pub const MEASURED_OD: [f64; 5] = [1.44, 2.08, 3.28, 4.96, 6.08];
/// Trigger-rate slopes k_t, counts/s/mW.
pub const MEASURED_KT: [f64; 5] = [1.8e3, 2.6e3, 4.1e3, 6.2e3, 7.6e3];
/// Anti-Stokes singles slopes k_s, counts/s/mW.
pub const MEASURED_KS: [f64; 5] = [1.9e3, 2.9e3, 4.6e3, 7.2e3, 9.2e3];
/// Pump powers of the sweeps, mW.
pub const MEASURED_PUMPS: [f64; 8] = [2.0, 4.0, 6.0, 8.0, 10.0, 12.0, 14.0, 16.0];
/// k_t / α′, counts/s/mW.
pub const KT_PER_OD: f64 = 1.25e3;
/// Coupling power of all measurements, mW.
pub const COUPLING_MW: f64 = 4.0;
/// Generation rate at 16 mW and α′ = 6.08, pairs/s.
pub const ANCHOR_RATE: f64 = 3.7e5;

#[derive(Debug, Clone, thiserror::Error)]
pub enum AnalysisError {
    #[error("invalid operating point: {0}")]
    InvalidPoint(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Waveform(#[from] WaveformError),
    #[error(transparent)]
    Fit(#[from] FitError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatingPoint {
    pub pump_mw: f64,
    pub temp_c: f64,
    pub od_measured: f64,
    #[serde(default = "default_coupling")]
    pub coupling_mw: f64,
    /// Fixes γ (units of Γ) instead of the calibrated γ(T, P).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_override: Option<f64>,
}

impl Default for OperatingPoint {
    fn default() -> Self {
        Self::top()
    }
}

fn default_coupling() -> f64 {
    COUPLING_MW
}

impl OperatingPoint {
    pub fn new(pump_mw: f64, temp_c: f64, od_measured: f64) -> Self {
        Self {
            pump_mw,
            temp_c,
            od_measured,
            coupling_mw: COUPLING_MW,
            gamma_override: None,
        }
    }

    /// Series `index` (0 = 38 °C … 4 = 65 °C) at the given pump power.
    pub fn measured(index: usize, pump_mw: f64) -> Self {
        Self::new(pump_mw, MEASURED_TEMPERATURES[index], MEASURED_OD[index])
    }

    /// Top operating point: 16 mW, 65 °C, α′ = 6.08, γ = 0.030Γ.
    pub fn top() -> Self {
        Self {
            gamma_override: Some(0.030),
            ..Self::measured(4, 16.0)
        }
    }

    /// Low-OD point: 16 mW, 38 °C, α = 93, γ = 0.020Γ.
    pub fn low_od() -> Self {
        let od = crate::model::od_convert(93.0, &SourceParams::low_od());
        Self {
            gamma_override: Some(0.020),
            ..Self::new(16.0, 38.0, od)
        }
    }

    pub fn validate(&self) -> Result<(), AnalysisError> {
        if !(0.0..=64.0).contains(&self.pump_mw) {
            return Err(AnalysisError::InvalidPoint(format!(
                "pump_mw = {} outside [0, 64]",
                self.pump_mw
            )));
        }
        if !(self.od_measured > 0.0 && self.od_measured.is_finite()) {
            return Err(AnalysisError::InvalidPoint(format!(
                "od_measured = {} must be > 0",
                self.od_measured
            )));
        }
        if !(self.coupling_mw > 0.0) {
            return Err(AnalysisError::InvalidPoint(format!(
                "coupling_mw = {} must be > 0",
                self.coupling_mw
            )));
        }
        if !self.temp_c.is_finite() {
            return Err(AnalysisError::InvalidPoint("temp_c must be finite".into()));
        }
        Ok(())
    }
}

/// Maps laboratory settings onto model parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Calibration {
    /// Multiplies ∫G²dτ to give pairs/s.
    pub rate_scale: f64,
    /// Ω_p/Γ per √mW.
    pub omega_p_per_sqrt_mw: f64,
    /// Δt, s.
    pub background_window_s: f64,
    /// dγ/dP, Γ/mW.
    pub gamma_slope: f64,
    /// γ at the lowest series temperature, Γ.
    pub gamma_low: f64,
    /// γ at the highest series temperature, Γ.
    pub gamma_high: f64,
    /// Pump power at which γ equals its per-temperature value, mW.
    pub reference_pump_mw: f64,
    /// Ω_c/Γ at 4 mW coupling power.
    pub omega_c_at_4mw: f64,
}

/// Value of [`Calibration::anchored`] on the default grid.
pub const DEFAULT_OMEGA_P_PER_SQRT_MW: f64 = 2.479_688_892_201_328;

impl Default for Calibration {
    fn default() -> Self {
        Self {
            rate_scale: 1.0,
            omega_p_per_sqrt_mw: DEFAULT_OMEGA_P_PER_SQRT_MW,
            background_window_s: 1.6e-6,
            gamma_slope: 2.5e-4,
            gamma_low: 0.020,
            gamma_high: 0.030,
            reference_pump_mw: 16.0,
            omega_c_at_4mw: 5.4,
        }
    }
}

impl Calibration {
    /// Solves for Ω_p per √mW so that the top operating point generates
    /// [`ANCHOR_RATE`] pairs/s.
    pub fn anchored(grid: &WaveformGrid) -> Result<Self, AnalysisError> {
        let base = Self::default();
        let op = OperatingPoint::top();
        let params = base.source_params(&op, 0.030).with_omega_p(1.0);
        let unit = integrated_rate(&crate::waveform::wavepacket(&params, grid)?);
        let omega_p2 = ANCHOR_RATE / (base.rate_scale * unit);
        Ok(Self {
            omega_p_per_sqrt_mw: (omega_p2 / op.pump_mw).sqrt(),
            ..base
        })
    }

    pub fn validate(&self) -> Result<(), AnalysisError> {
        let positive = [
            ("rate_scale", self.rate_scale),
            ("omega_p_per_sqrt_mw", self.omega_p_per_sqrt_mw),
            ("background_window_s", self.background_window_s),
            ("reference_pump_mw", self.reference_pump_mw),
            ("omega_c_at_4mw", self.omega_c_at_4mw),
        ];
        for (k, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(AnalysisError::InvalidPoint(format!(
                    "calibration.{k} = {v} must be > 0"
                )));
            }
        }
        for (k, v) in [
            ("gamma_slope", self.gamma_slope),
            ("gamma_low", self.gamma_low),
            ("gamma_high", self.gamma_high),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(AnalysisError::InvalidPoint(format!(
                    "calibration.{k} = {v} must be >= 0"
                )));
            }
        }
        Ok(())
    }

    pub fn omega_p(&self, pump_mw: f64) -> f64 {
        self.omega_p_per_sqrt_mw * pump_mw.max(0.0).sqrt()
    }

    /// γ at the reference pump power, linear in temperature between the endpoints.
    pub fn gamma_reference(&self, op: &OperatingPoint) -> f64 {
        if let Some(g) = op.gamma_override {
            return g;
        }
        let (t_lo, t_hi) = (MEASURED_TEMPERATURES[0], MEASURED_TEMPERATURES[4]);
        let f = ((op.temp_c - t_lo) / (t_hi - t_lo)).clamp(0.0, 1.0);
        self.gamma_low + f * (self.gamma_high - self.gamma_low)
    }

    /// γ(P) = γ_ref + slope·(P − P_ref), floored at 0.
    pub fn gamma(&self, op: &OperatingPoint) -> f64 {
        (self.gamma_reference(op) + self.gamma_slope * (op.pump_mw - self.reference_pump_mw))
            .max(0.0)
    }

    /// Model parameters at `op` with decoherence `gamma`.
    pub fn source_params(&self, op: &OperatingPoint, gamma: f64) -> SourceParams {
        let base = SourceParams::high_od();
        SourceParams {
            alpha: od_invert(op.od_measured, &base),
            omega_p: self.omega_p(op.pump_mw),
            omega_c: self.omega_c_at_4mw * (op.coupling_mw / COUPLING_MW).sqrt(),
            gamma_dec: gamma,
            ..base
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TriggerRates {
    /// Trigger rate, counts/s.
    pub r_t: f64,
    /// Anti-Stokes singles rate, counts/s.
    pub r_s: f64,
    /// α′ outside [1, 7].
    pub extrapolated: bool,
}

/// Piecewise-linear k_s(α′) through the five measured values, linearly
/// extended beyond the ends.
pub fn interpolate_ks(od: f64) -> f64 {
    let x = &MEASURED_OD;
    let y = &MEASURED_KS;
    let i = if od <= x[0] {
        0
    } else if od >= x[4] {
        3
    } else {
        x.partition_point(|&v| v <= od) - 1
    };
    y[i] + (od - x[i]) * (y[i + 1] - y[i]) / (x[i + 1] - x[i])
}

/// R_t = 1.25×10³ α′ P and R_s = R_t + (k_s − k_t) P²/P_ref, so that R_s = k_s P
/// at the reference power and the excess grows as P².
pub fn trigger_rates(op: &OperatingPoint, cal: &Calibration) -> TriggerRates {
    let extrapolated = !(1.0..=7.0).contains(&op.od_measured);
    if extrapolated {
        log::warn!(
            "alpha' = {} is outside [1, 7]; trigger rates are extrapolated",
            op.od_measured
        );
    }
    let k_t = KT_PER_OD * op.od_measured;
    let k_s = interpolate_ks(op.od_measured);
    let r_t = k_t * op.pump_mw;
    let r_s = r_t + (k_s - k_t) * op.pump_mw * op.pump_mw / cal.reference_pump_mw;
    TriggerRates {
        r_t,
        r_s: r_s.max(0.0),
        extrapolated,
    }
}

/// (1 + R_SB)² / (g²_as,as · g²_s,s).
pub fn cauchy_schwarz(r_sb: f64, g_aa: f64, g_ss: f64) -> f64 {
    (1.0 + r_sb).powi(2) / (g_aa * g_ss)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Brightness {
    /// pairs/s/MHz
    pub value: f64,
    pub fraction_of_limit: f64,
}

/// Generation rate per MHz of linewidth and its fraction of (π/2)×10⁶.
pub fn brightness(rate: f64, linewidth_hz: f64) -> Result<Brightness, AnalysisError> {
    if !(linewidth_hz > 0.0) {
        return Err(AnalysisError::InvalidPoint(format!(
            "linewidth {linewidth_hz} Hz must be > 0"
        )));
    }
    let value = rate / (linewidth_hz * 1e-6);
    Ok(Brightness {
        value,
        fraction_of_limit: value / reference_limit(),
    })
}

/// Background-subtracted coincidences per trigger.
pub fn success_probability(
    hist: &CoincidenceHistogram,
    fit: &WavePacketFit,
) -> Result<f64, AnalysisError> {
    if hist.n_triggers == 0 {
        return Err(AnalysisError::InvalidPoint(
            "histogram has zero triggers".into(),
        ));
    }
    let excess: f64 = hist
        .counts
        .iter()
        .map(|&c| c as f64 - fit.params.baseline)
        .sum();
    Ok(excess.max(0.0) / hist.n_triggers as f64)
}

/// Count rates of the two detection channels implied by the theory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelRates {
    /// Anti-Stokes singles, counts/s.
    pub anti_stokes: f64,
    /// Anti-Stokes-band photons without a partner, counts/s.
    pub uncorrelated_as: f64,
    /// Stokes singles, counts/s.
    pub stokes: f64,
}

/// Anti-Stokes singles follow the R_s law; whatever pairs, dark counts and
/// leakage do not supply is attributed to uncorrelated anti-Stokes photons.
pub fn channel_rates(
    op: &OperatingPoint,
    cal: &Calibration,
    det: &DetectorConfig,
    rate: f64,
) -> ChannelRates {
    let known = rate * det.eff_as + det.dark_as + det.leak_as * op.pump_mw;
    let uncorrelated_as = (trigger_rates(op, cal).r_s - known).max(0.0);
    let stokes = rate * det.eff_s + det.dark_s + det.leak_s * op.coupling_mw + det.fluorescence_s;
    ChannelRates {
        anti_stokes: known + uncorrelated_as,
        uncorrelated_as,
        stokes,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Theory,
    Mc,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Theory => "theory",
            Mode::Mc => "mc",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub op: OperatingPoint,
    /// pairs/s
    pub generation_rate: f64,
    /// Hz
    pub linewidth_hz: f64,
    pub sbr: f64,
    /// pairs/s/MHz
    pub brightness: f64,
    pub s_product: f64,
    /// Accidental coincidences per bin per second of accumulation.
    pub background_per_bin: f64,
    pub r_t: f64,
    pub r_s: f64,
    pub mode: Mode,
    pub seed: u64,
}

#[allow(clippy::too_many_arguments)]
fn record(
    op: OperatingPoint,
    rate: f64,
    linewidth_hz: f64,
    sbr: f64,
    background_per_bin: f64,
    rates: TriggerRates,
    mode: Mode,
    seed: u64,
) -> SweepRecord {
    let brightness = if linewidth_hz > 0.0 {
        rate / (linewidth_hz * 1e-6)
    } else {
        0.0
    };
    SweepRecord {
        op,
        generation_rate: rate,
        linewidth_hz,
        sbr,
        brightness,
        s_product: brightness * sbr,
        background_per_bin,
        r_t: rates.r_t,
        r_s: rates.r_s,
        mode,
        seed,
    }
}

/// Bin-averaged G² on the histogram grid, s⁻².
pub fn binned_wavepacket(
    wp: &WavePacket,
    hist: &HistogramConfig,
) -> Result<(Vec<f64>, Vec<f64>), AnalysisError> {
    let n = hist.n_bins()?;
    let dt = wp.dt();
    let mut cum = Vec::with_capacity(wp.values.len());
    let mut acc = 0.0;
    cum.push(0.0);
    for w in wp.values.windows(2) {
        acc += 0.5 * (w[0] + w[1]) * dt;
        cum.push(acc);
    }
    let at = |x: f64| {
        let f = (x - wp.tau_grid[0]) / dt;
        if f <= 0.0 {
            0.0
        } else if f >= (cum.len() - 1) as f64 {
            acc
        } else {
            let i = f as usize;
            cum[i] + (f - i as f64) * (cum[i + 1] - cum[i])
        }
    };
    let edge = |k: usize| hist.start_s + k as f64 * hist.bin_width_s;
    let t = (0..n).map(|k| edge(k) + 0.5 * hist.bin_width_s).collect();
    let y = (0..n)
        .map(|k| (at(edge(k + 1)) - at(edge(k))) / hist.bin_width_s)
        .collect();
    Ok((t, y))
}

/// Wave-packet fit to the bin-averaged theoretical G², normalized to unit peak.
pub fn fit_theory(wp: &WavePacket, hist: &HistogramConfig) -> Result<WavePacketFit, AnalysisError> {
    let (t, y) = binned_wavepacket(wp, hist)?;
    let peak = y.iter().cloned().fold(0.0, f64::max);
    if !(peak > 0.0) {
        return Err(AnalysisError::InvalidPoint(
            "wave packet is identically zero".into(),
        ));
    }
    let y: Vec<f64> = y.iter().map(|v| v / peak).collect();
    accept_finite(fit_samples(&t, &y, Weighting::Uniform))
}

/// Keeps the best iterate of a stalled fit when its widths are usable.
fn accept_finite(r: Result<WavePacketFit, FitError>) -> Result<WavePacketFit, AnalysisError> {
    match r {
        Ok(f) => Ok(f),
        Err(FitError::NotConverged { best })
            if best.temporal_fwhm.is_finite() && best.linewidth_hz.is_finite() =>
        {
            Ok(*best)
        }
        Err(e) => Err(e.into()),
    }
}

/// Theory quantities shared by the theory and Monte Carlo paths.
#[derive(Debug, Clone)]
pub struct TheoryPoint {
    pub params: SourceParams,
    pub wavepacket: WavePacket,
    pub rate: f64,
    pub linewidth_hz: f64,
    pub shape_fit: WavePacketFit,
    /// Fitted peak of G² over ∫G², 1/s.
    pub peak_fraction: f64,
    pub channels: ChannelRates,
}

impl TheoryPoint {
    /// Fit-based temporal FWHM, s.
    pub fn temporal_fwhm(&self) -> f64 {
        self.shape_fit.temporal_fwhm
    }
}

/// Evaluates the model at `op`. The rate uses γ at the reference pump power so
/// that it is exactly proportional to P; the shape and linewidth use γ(P).
pub fn evaluate_point(
    op: &OperatingPoint,
    cal: &Calibration,
    det: &DetectorConfig,
    hist: &HistogramConfig,
    grid: &WaveformGrid,
) -> Result<TheoryPoint, AnalysisError> {
    op.validate()?;
    cal.validate()?;
    let gamma = cal.gamma(op);
    let shape_params = cal.source_params(op, gamma).with_omega_p(1.0);
    let deltas = grid.deltas_gamma();
    let amp = amplitude_spectrum(&deltas, &shape_params)?;
    let wavepacket = wavepacket_from_amplitude(&amp, &shape_params, grid)?;
    let linewidth_hz = spectrum_from_amplitude(&amp, &shape_params, grid)?.fwhm;
    let shape_area = integrated_rate(&wavepacket);

    let gamma_ref = cal.gamma_reference(op);
    let unit_rate = if gamma_ref == gamma {
        shape_area
    } else {
        let p = cal.source_params(op, gamma_ref).with_omega_p(1.0);
        integrated_rate(&wavepacket_from_amplitude(
            &amplitude_spectrum(&deltas, &p)?,
            &p,
            grid,
        )?)
    };
    let omega_p = cal.omega_p(op.pump_mw);
    let rate = cal.rate_scale * unit_rate * omega_p * omega_p;

    let shape_fit = fit_theory(&wavepacket, hist)?;
    let (_, binned) = binned_wavepacket(&wavepacket, hist)?;
    let binned_peak = binned.iter().cloned().fold(0.0, f64::max);
    let peak_fraction = shape_fit.peak_above_baseline() * binned_peak / shape_area;
    let channels = channel_rates(op, cal, det, rate);
    Ok(TheoryPoint {
        params: cal.source_params(op, gamma),
        wavepacket,
        rate,
        linewidth_hz,
        shape_fit,
        peak_fraction,
        channels,
    })
}

/// Theory-path figures of merit at `op`.
pub fn predict_point(
    op: &OperatingPoint,
    cal: &Calibration,
    det: &DetectorConfig,
    hist: &HistogramConfig,
    grid: &WaveformGrid,
) -> Result<SweepRecord, AnalysisError> {
    let theory = evaluate_point(op, cal, det, hist, grid)?;
    let rates = trigger_rates(op, cal);
    let background = theory.channels.anti_stokes * theory.channels.stokes * hist.bin_width_s;
    let signal = theory.rate * det.eff_as * det.eff_s * theory.peak_fraction * hist.bin_width_s;
    let sbr = if background > 0.0 {
        signal / background
    } else {
        0.0
    };
    Ok(record(
        *op,
        theory.rate,
        theory.linewidth_hz,
        sbr,
        background,
        rates,
        Mode::Theory,
        0,
    ))
}

/// Peak-to-baseline guard for simulated histograms; high-OD points sit near 4.
pub const SIM_MIN_PEAK_RATIO: f64 = 2.0;

/// Monte Carlo run settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimSettings {
    pub duration_s: f64,
    pub seed: u64,
    pub statistics: Statistics,
    /// Mode duration for THERMAL statistics; defaults to the fitted temporal FWHM.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coherence_time_s: Option<f64>,
}

impl Default for SimSettings {
    fn default() -> Self {
        Self {
            duration_s: 10.0,
            seed: 42,
            statistics: Statistics::Poisson,
            coherence_time_s: None,
        }
    }
}

/// Everything produced by one simulated accumulation.
#[derive(Debug, Clone)]
pub struct McOutcome {
    pub record: SweepRecord,
    pub theory: TheoryPoint,
    pub histogram: CoincidenceHistogram,
    pub fit: WavePacketFit,
    pub success_probability: f64,
    pub n_pairs: usize,
    /// Pairs with both photons detected, per second.
    pub coincident_pair_rate: f64,
    pub anti_stokes: Vec<f64>,
    pub stokes: Vec<f64>,
}

/// Simulates pair emission, detection and correlation at `op`, then fits the
/// histogram.
pub fn simulate_point(
    op: &OperatingPoint,
    cal: &Calibration,
    det: &DetectorConfig,
    hist: &HistogramConfig,
    grid: &WaveformGrid,
    sim: &SimSettings,
) -> Result<McOutcome, AnalysisError> {
    let theory = evaluate_point(op, cal, det, hist, grid)?;
    let coherence = sim.coherence_time_s.unwrap_or(theory.temporal_fwhm());
    let cfg = PairStreamConfig {
        generation_rate: theory.rate,
        delay_distribution: Arc::new(DelaySampler::new(&theory.wavepacket)?),
        statistics_mode: sim.statistics,
        coherence_time_s: coherence,
        seed: sim.seed,
    };
    let light = Illumination {
        pump_mw: op.pump_mw,
        coupling_mw: op.coupling_mw,
        uncorrelated_as: theory.channels.uncorrelated_as,
        uncorrelated_statistics: sim.statistics,
        coherence_time_s: coherence,
    };
    let streams = emit_and_detect(&cfg, det, &light, sim.duration_s)?;
    let histogram =
        coincidence_histogram(&streams.anti_stokes, &streams.stokes, hist, sim.duration_s)?;
    let fit = accept_finite(fit_histogram(&histogram, SIM_MIN_PEAK_RATIO))?;
    let success = success_probability(&histogram, &fit)?;
    let sbr = crate::detection::measure_sbr(&fit);
    let excess = success * histogram.n_triggers as f64;
    let rate = excess / (sim.duration_s * det.eff_as * det.eff_s);
    let rates = TriggerRates {
        r_t: histogram.n_triggers as f64 / sim.duration_s,
        r_s: streams.anti_stokes.len() as f64 / sim.duration_s,
        extrapolated: false,
    };
    let rec = record(
        *op,
        rate,
        fit.linewidth_hz,
        sbr,
        fit.params.baseline / sim.duration_s,
        rates,
        Mode::Mc,
        sim.seed,
    );
    Ok(McOutcome {
        record: rec,
        theory,
        histogram,
        fit,
        success_probability: success,
        n_pairs: streams.emitted_pairs,
        coincident_pair_rate: streams.coincident_pairs as f64 / sim.duration_s,
        anti_stokes: streams.anti_stokes,
        stokes: streams.stokes,
    })
}

/// Grid of operating points: each temperature series at each pump power.
pub fn measured_grid(pumps: &[f64]) -> Vec<OperatingPoint> {
    (0..MEASURED_TEMPERATURES.len())
        .flat_map(|i| pumps.iter().map(move |&p| OperatingPoint::measured(i, p)))
        .collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepFailure {
    pub op: OperatingPoint,
    pub error: String,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct SweepTable {
    pub records: Vec<SweepRecord>,
    pub failures: Vec<SweepFailure>,
}

/// Evaluates every point in parallel; records are sorted by (temperature, pump).
/// Monte Carlo points use seeds derived from `sim.seed` and the point index.
pub fn sweep(
    points: &[OperatingPoint],
    cal: &Calibration,
    det: &DetectorConfig,
    hist: &HistogramConfig,
    grid: &WaveformGrid,
    mode: Mode,
    sim: &SimSettings,
) -> Result<SweepTable, AnalysisError> {
    if points.is_empty() {
        return Err(AnalysisError::InvalidPoint("empty sweep grid".into()));
    }
    let results: Vec<(usize, Result<SweepRecord, AnalysisError>)> = points
        .par_iter()
        .enumerate()
        .map(|(i, op)| {
            let r = match mode {
                Mode::Theory => predict_point(op, cal, det, hist, grid),
                Mode::Mc => {
                    let s = SimSettings {
                        seed: crate::detection::rng::derive_seed(sim.seed, i as u64),
                        ..*sim
                    };
                    simulate_point(op, cal, det, hist, grid, &s).map(|o| o.record)
                }
            };
            (i, r)
        })
        .collect();
    let mut table = SweepTable::default();
    for (i, r) in results {
        match r {
            Ok(rec) => table.records.push(rec),
            Err(e) => table.failures.push(SweepFailure {
                op: points[i],
                error: e.to_string(),
            }),
        }
    }
    table.records.sort_by(|a, b| {
        a.op.temp_c
            .total_cmp(&b.op.temp_c)
            .then(a.op.pump_mw.total_cmp(&b.op.pump_mw))
    });
    Ok(table)
}
