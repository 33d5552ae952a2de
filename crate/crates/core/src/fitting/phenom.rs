//! Phenomenological wave-packet function
//! {A[1 + tanh((t−t0)/τ1)]^p + ε}[1 − erf((t−t0−t_d)/τ2)] + B
//! and its least-squares fit.

use errorfunctions::RealErrorFunctions;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::linewidth::linewidth_from_params;
use super::lm::{minimize, LmOptions};
use super::FitError;
use crate::detection::CoincidenceHistogram;
use crate::waveform::fwhm;

/// Internal time unit of the optimizer, s.
const NS: f64 = 1e-9;

/// The eight parameters of the wave-packet function. Times in s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhenomParams {
    pub a_amp: f64,
    pub baseline: f64,
    pub epsilon: f64,
    pub t0: f64,
    pub p_exp: f64,
    pub tau1: f64,
    pub tau2: f64,
    pub t_d: f64,
}

impl PhenomParams {
    pub const NAMES: [&'static str; 8] = [
        "a_amp", "baseline", "epsilon", "t0", "p_exp", "tau1", "tau2", "t_d",
    ];

    pub fn to_array(&self) -> [f64; 8] {
        [
            self.a_amp,
            self.baseline,
            self.epsilon,
            self.t0,
            self.p_exp,
            self.tau1,
            self.tau2,
            self.t_d,
        ]
    }

    pub fn from_array(v: [f64; 8]) -> Self {
        Self {
            a_amp: v[0],
            baseline: v[1],
            epsilon: v[2],
            t0: v[3],
            p_exp: v[4],
            tau1: v[5],
            tau2: v[6],
            t_d: v[7],
        }
    }

    /// The curve minus its baseline.
    pub fn signal(&self, t: f64) -> f64 {
        eval_phenomenological(t, self) - self.baseline
    }
}

/// ln[1 + tanh(u)] = ln 2 − ln(1 + e^{−2u}), without cancellation.
fn ln_one_plus_tanh(u: f64) -> f64 {
    let x = -2.0 * u;
    let softplus = if x > 30.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    };
    std::f64::consts::LN_2 - softplus
}

/// Evaluates the wave-packet function at `t` (s).
pub fn eval_phenomenological(t: f64, p: &PhenomParams) -> f64 {
    let u = (t - p.t0) / p.tau1;
    let v = (t - p.t0 - p.t_d) / p.tau2;
    let rise = if p.a_amp == 0.0 {
        0.0
    } else {
        p.a_amp * (p.p_exp * ln_one_plus_tanh(u)).exp()
    };
    (rise + p.epsilon) * RealErrorFunctions::erfc(v) + p.baseline
}

/// Optimizer coordinates: [ln(A·2^p), B, ε, t0, x₄, ln(τ1 − τ_min), ln τ2, √t_d], times in ns,
/// with ln p = L·tanh(x₄/L).
/// τ_min is a fraction of the sample spacing; faster rises are unresolved.
#[derive(Debug, Clone, Copy)]
struct Coords {
    tau1_floor: f64,
}

/// τ_min as a fraction of the sample spacing.
const TAU1_FLOOR_FRACTION: f64 = 0.5;
/// L, the bound on |ln p|.
const LN_P_MAX: f64 = 4.0;

fn ln_p(x4: f64) -> f64 {
    LN_P_MAX * (x4 / LN_P_MAX).tanh()
}

/// d(ln p)/dx₄.
fn dln_p(x4: f64) -> f64 {
    1.0 - (x4 / LN_P_MAX).tanh().powi(2)
}

impl Coords {
    fn for_spacing(spacing_s: f64) -> Self {
        Self {
            tau1_floor: TAU1_FLOOR_FRACTION * spacing_s / NS,
        }
    }

    #[allow(clippy::wrong_self_convention)]
    fn to_internal(&self, p: &PhenomParams) -> DVector<f64> {
        DVector::from_vec(vec![
            p.a_amp.ln() + p.p_exp * std::f64::consts::LN_2,
            p.baseline,
            p.epsilon,
            p.t0 / NS,
            LN_P_MAX
                * (p.p_exp.ln() / LN_P_MAX)
                    .clamp(-1.0 + 1e-12, 1.0 - 1e-12)
                    .atanh(),
            (p.tau1 / NS - self.tau1_floor)
                .max(1e-6 * self.tau1_floor.max(1e-12))
                .ln(),
            (p.tau2 / NS).ln(),
            (p.t_d / NS).max(0.0).sqrt(),
        ])
    }

    #[allow(clippy::wrong_self_convention)]
    fn from_internal(&self, x: &DVector<f64>) -> PhenomParams {
        PhenomParams {
            a_amp: (x[0] - ln_p(x[4]).exp() * std::f64::consts::LN_2).exp(),
            baseline: x[1],
            epsilon: x[2],
            t0: x[3] * NS,
            p_exp: ln_p(x[4]).exp(),
            tau1: (self.tau1_floor + x[5].exp()) * NS,
            tau2: x[6].exp() * NS,
            t_d: x[7] * x[7] * NS,
        }
    }

    /// Value and gradient in optimizer coordinates, `t` in ns.
    fn value_and_gradient(&self, t: f64, x: &DVector<f64>) -> (f64, [f64; 8]) {
        let (b, eps, t0, p, tau2, td) =
            (x[1], x[2], x[3], ln_p(x[4]).exp(), x[6].exp(), x[7] * x[7]);
        let tau1 = self.tau1_floor + x[5].exp();
        let a = (x[0] - p * std::f64::consts::LN_2).exp();
        let u = (t - t0) / tau1;
        let v = (t - t0 - td) / tau2;
        let ln_s = ln_one_plus_tanh(u);
        let sp = (p * ln_s).exp();
        let s = ln_s.exp();
        let e = RealErrorFunctions::erfc(v);
        let gauss = 2.0 / std::f64::consts::PI.sqrt() * (-v * v).exp();
        let head = a * sp + eps;
        let value = head * e + b;
        // d/du of A S^p = A p S^p (2 − S)
        let drise_du = a * p * sp * (2.0 - s);
        let grad = [
            a * sp * e,
            1.0,
            e,
            -drise_du * e / tau1 + head * gauss / tau2,
            if sp == 0.0 {
                0.0
            } else {
                a * sp * p * (ln_s - std::f64::consts::LN_2) * e * dln_p(x[4])
            },
            -drise_du * u * e * x[5].exp() / tau1,
            head * gauss * v,
            head * gauss / tau2 * 2.0 * x[7],
        ];
        (value, grad)
    }
}

/// Residual weighting for [`fit_samples`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Weighting {
    /// 1/√max(y, 1).
    Poisson,
    Uniform,
}

/// Result of a wave-packet fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WavePacketFit {
    #[serde(flatten)]
    pub params: PhenomParams,
    /// One-sigma uncertainties in the order of [`PhenomParams::NAMES`].
    pub uncertainties: [f64; 8],
    pub covariance: [[f64; 8]; 8],
    /// s.
    pub temporal_fwhm: f64,
    /// Hz.
    pub linewidth_hz: f64,
    /// RMS deviation of the Fourier spectrum from a Lorentzian of equal height and width.
    pub lorentzian_residual: f64,
    /// Weighted residual 2-norm.
    pub residual_norm: f64,
    pub chi2_reduced: f64,
    pub residual_mean: f64,
    pub residual_std: f64,
    /// Plateau duration not longer than one sample spacing.
    pub degenerate_plateau: bool,
    pub converged: bool,
    pub n_points: usize,
}

impl WavePacketFit {
    pub fn eval(&self, t: f64) -> f64 {
        eval_phenomenological(t, &self.params)
    }

    /// Fit curve minus baseline, maximized over a dense grid.
    pub fn peak_above_baseline(&self) -> f64 {
        let (lo, hi) = support(&self.params);
        let n = 40_000;
        (0..=n)
            .map(|k| self.params.signal(lo + (hi - lo) * k as f64 / n as f64))
            .fold(0.0, f64::max)
    }
}

/// Interval that contains the fitted pulse.
pub(crate) fn support(p: &PhenomParams) -> (f64, f64) {
    let lo = p.t0 - 40.0 * p.tau1 - 4.0 * p.tau2;
    let hi = p.t0 + p.t_d.max(0.0) + 8.0 * p.tau2;
    (lo, hi)
}

/// FWHM of the fitted curve minus baseline, s.
pub fn temporal_fwhm(p: &PhenomParams) -> Result<f64, FitError> {
    let (lo, hi) = support(p);
    let n = 40_001;
    let t: Vec<f64> = (0..n)
        .map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
        .collect();
    let y: Vec<f64> = t.iter().map(|&t| p.signal(t)).collect();
    Ok(fwhm(&t, &y)?.width)
}

struct Moments {
    baseline: f64,
    height: f64,
    t_rise: f64,
    width: f64,
    spacing: f64,
}

fn moments(t: &[f64], y: &[f64]) -> Moments {
    let n = y.len();
    let mut head: Vec<f64> = y[..(n / 20).max(1)].to_vec();
    let mut tail: Vec<f64> = y[n - (n / 10).max(1)..].to_vec();
    let median = |v: &mut Vec<f64>| {
        v.sort_by(f64::total_cmp);
        v[v.len() / 2]
    };
    let baseline = median(&mut head).min(median(&mut tail)).max(0.0);
    let (imax, &ymax) = y
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .unwrap();
    let height = (ymax - baseline).max(f64::MIN_POSITIVE);
    let half = baseline + 0.5 * height;
    let i_rise = (0..=imax).find(|&i| y[i] >= half).unwrap_or(imax);
    let i_fall = (imax..n).rev().find(|&i| y[i] >= half).unwrap_or(imax);
    let spacing = (t[n - 1] - t[0]) / (n - 1) as f64;
    Moments {
        baseline,
        height,
        t_rise: t[i_rise],
        width: (t[i_fall] - t[i_rise]).max(4.0 * spacing),
        spacing,
    }
}

/// Deterministic start list derived from the sample moments.
fn starts(m: &Moments) -> Vec<PhenomParams> {
    let mut out = Vec::with_capacity(8);
    for &p in &[1.0, 2.5] {
        for &tau1_frac in &[0.05, 0.2] {
            for &(td_frac, tau2_frac) in &[(0.8, 0.4), (0.3, 1.0)] {
                let tau1 = (tau1_frac * m.width).max(2.0 * m.spacing);
                // Onset where S^p reaches half its plateau.
                let u_half = (2f64.powf(1.0 - 1.0 / p) - 1.0).atanh();
                out.push(PhenomParams {
                    a_amp: m.height / (2.0 * 2f64.powf(p)),
                    baseline: m.baseline,
                    epsilon: 0.02 * m.height,
                    t0: m.t_rise - tau1 * u_half,
                    p_exp: p,
                    tau1,
                    tau2: tau2_frac * m.width,
                    t_d: td_frac * m.width,
                });
            }
        }
    }
    out
}

/// Least-squares fit of the wave-packet function to samples (`t` in s).
pub fn fit_samples(t: &[f64], y: &[f64], weighting: Weighting) -> Result<WavePacketFit, FitError> {
    if t.len() != y.len() || t.len() < 10 {
        return Err(FitError::InsufficientData(format!(
            "{} samples",
            t.len().min(y.len())
        )));
    }
    let m = moments(t, y);
    let mut best: Option<(f64, super::lm::LmResult)> = None;
    for start in starts(&m) {
        let res = fit_from(t, y, weighting, &start, Coords::for_spacing(m.spacing));
        if best.as_ref().is_none_or(|(c, _)| res.cost < *c) {
            best = Some((res.cost, res));
        }
    }
    let (_, res) = best.expect("start list is nonempty");
    finish(y, res, m.spacing)
}

/// Single local fit from a given starting point.
pub fn fit_from_start(
    t: &[f64],
    y: &[f64],
    weighting: Weighting,
    start: &PhenomParams,
) -> Result<WavePacketFit, FitError> {
    let spacing = (t[t.len() - 1] - t[0]) / (t.len() - 1) as f64;
    let res = fit_from(t, y, weighting, start, Coords::for_spacing(spacing));
    finish(y, res, spacing)
}

fn weights(y: &[f64], weighting: Weighting) -> Vec<f64> {
    match weighting {
        Weighting::Poisson => y.iter().map(|v| 1.0 / v.max(1.0).sqrt()).collect(),
        Weighting::Uniform => vec![1.0; y.len()],
    }
}

fn fit_from(
    t: &[f64],
    y: &[f64],
    weighting: Weighting,
    start: &PhenomParams,
    c: Coords,
) -> super::lm::LmResult {
    let w = weights(y, weighting);
    let t_ns: Vec<f64> = t.iter().map(|t| t / NS).collect();
    let model = |x: &DVector<f64>| {
        if x.iter().any(|v| !v.is_finite()) || x[0] > 700.0 {
            return None;
        }
        let mut r = DVector::zeros(t_ns.len());
        let mut j = DMatrix::zeros(t_ns.len(), 8);
        for (i, &ti) in t_ns.iter().enumerate() {
            let (v, g) = c.value_and_gradient(ti, x);
            r[i] = w[i] * (v - y[i]);
            for (k, gk) in g.iter().enumerate() {
                j[(i, k)] = w[i] * gk;
            }
        }
        if r.iter().any(|v| !v.is_finite()) {
            return None;
        }
        Some((r, j))
    };
    minimize(c.to_internal(start), model, &LmOptions::default())
}

fn finish(y: &[f64], res: super::lm::LmResult, spacing: f64) -> Result<WavePacketFit, FitError> {
    let c = Coords::for_spacing(spacing);
    let params = c.from_internal(&res.x);
    let n = y.len();
    let dof = (n as f64 - 8.0).max(1.0);
    let chi2_reduced = 2.0 * res.cost / dof;
    let residual_mean = res.residuals.mean();
    let residual_std = (res
        .residuals
        .iter()
        .map(|r| (r - residual_mean).powi(2))
        .sum::<f64>()
        / dof)
        .sqrt();

    let mut covariance = [[f64::NAN; 8]; 8];
    let mut uncertainties = [f64::NAN; 8];
    if res.jacobian.nrows() == n {
        if let Some(inv) = res.jacobian.tr_mul(&res.jacobian).try_inverse() {
            let x = &res.x;
            let diag = [
                params.a_amp,
                1.0,
                1.0,
                NS,
                params.p_exp * dln_p(x[4]),
                x[5].exp() * NS,
                params.tau2,
                2.0 * x[7] * NS,
            ];
            let mut t = DMatrix::from_diagonal(&DVector::from_row_slice(&diag));
            t[(0, 4)] = -params.a_amp * params.p_exp * dln_p(x[4]) * std::f64::consts::LN_2;
            let cov = &t * inv * t.transpose() * chi2_reduced;
            for a in 0..8 {
                for b in 0..8 {
                    covariance[a][b] = cov[(a, b)];
                }
                uncertainties[a] = covariance[a][a].max(0.0).sqrt();
            }
        }
    }

    let fwhm = temporal_fwhm(&params);
    let lw = linewidth_from_params(&params);
    let fit = WavePacketFit {
        params,
        uncertainties,
        covariance,
        temporal_fwhm: fwhm.as_ref().copied().unwrap_or(f64::NAN),
        linewidth_hz: lw.as_ref().map(|l| l.linewidth_hz).unwrap_or(f64::NAN),
        lorentzian_residual: lw
            .as_ref()
            .map(|l| l.lorentzian_residual)
            .unwrap_or(f64::NAN),
        residual_norm: (2.0 * res.cost).sqrt(),
        chi2_reduced,
        residual_mean,
        residual_std,
        degenerate_plateau: params.t_d <= spacing,
        converged: res.converged,
        n_points: n,
    };
    if !res.converged || fwhm.is_err() || lw.is_err() {
        return Err(FitError::NotConverged {
            best: Box::new(fit),
        });
    }
    Ok(fit)
}

/// Smallest peak-to-baseline ratio accepted by [`fit_wavepacket`].
pub const MIN_PEAK_RATIO: f64 = 5.0;

/// Fits a coincidence histogram with Poisson weights.
pub fn fit_wavepacket(hist: &CoincidenceHistogram) -> Result<WavePacketFit, FitError> {
    fit_histogram(hist, MIN_PEAK_RATIO)
}

/// As [`fit_wavepacket`] with a caller-chosen peak-to-baseline guard.
pub fn fit_histogram(
    hist: &CoincidenceHistogram,
    min_peak_ratio: f64,
) -> Result<WavePacketFit, FitError> {
    if hist.counts.len() < 100 {
        return Err(FitError::InsufficientData(format!(
            "{} bins (need >= 100)",
            hist.counts.len()
        )));
    }
    let t = hist.bin_centers();
    let y: Vec<f64> = hist.counts.iter().map(|&c| c as f64).collect();
    let m = moments(&t, &y);
    if m.baseline > 0.0 && m.baseline + m.height < min_peak_ratio * m.baseline {
        return Err(FitError::InsufficientData(format!(
            "peak {:.1} is below {min_peak_ratio}x the baseline estimate {:.1}",
            m.baseline + m.height,
            m.baseline
        )));
    }
    fit_samples(&t, &y, Weighting::Poisson)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> PhenomParams {
        PhenomParams {
            a_amp: 20.0,
            baseline: 3.0,
            epsilon: 4.0,
            t0: 30e-9,
            p_exp: 1.7,
            tau1: 8e-9,
            tau2: 40e-9,
            t_d: 120e-9,
        }
    }

    #[test]
    fn limits() {
        let p = sample();
        assert!((eval_phenomenological(-1e-3, &p) - (2.0 * p.epsilon + p.baseline)).abs() < 1e-12);
        assert!((eval_phenomenological(1e-3, &p) - p.baseline).abs() < 1e-12);
    }

    #[test]
    fn special_value() {
        let p = PhenomParams {
            a_amp: 1.0,
            baseline: 0.0,
            epsilon: 0.0,
            t0: 0.0,
            p_exp: 1.0,
            tau1: 1.0,
            tau2: 1.0,
            t_d: 5.0,
        };
        let expected = 1.0 + RealErrorFunctions::erf(5f64);
        assert!((eval_phenomenological(0.0, &p) - expected).abs() < 1e-15);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let c = Coords::for_spacing(1e-9);
        let x = c.to_internal(&sample());
        for &t in &[0.0, 25.0, 60.0, 150.0, 260.0] {
            let (_, g) = c.value_and_gradient(t, &x);
            for k in 0..8 {
                let h = 1e-6 * x[k].abs().max(1.0);
                let mut xp = x.clone();
                xp[k] += h;
                let mut xm = x.clone();
                xm[k] -= h;
                let fd =
                    (c.value_and_gradient(t, &xp).0 - c.value_and_gradient(t, &xm).0) / (2.0 * h);
                assert!(
                    (fd - g[k]).abs() < 1e-6 * (1.0 + g[k].abs()),
                    "t={t} k={k}: {fd} vs {}",
                    g[k]
                );
            }
        }
    }

    #[test]
    fn internal_round_trip() {
        let p = sample();
        let c = Coords::for_spacing(1e-9);
        let q = c.from_internal(&c.to_internal(&p));
        for (a, b) in p.to_array().iter().zip(q.to_array()) {
            assert!(((a - b) / a).abs() < 1e-12);
        }
    }
}
