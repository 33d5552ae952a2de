use serde::{Deserialize, Serialize};

use super::{HistogramConfig, SimError};

/// Trigger-referenced delay histogram.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoincidenceHistogram {
    pub bin_width_s: f64,
    pub window_s: f64,
    /// Left edge of the first bin, s.
    pub start_s: f64,
    pub duration_s: f64,
    pub counts: Vec<u64>,
    pub n_triggers: u64,
}

impl CoincidenceHistogram {
    pub fn bin_left(&self, k: usize) -> f64 {
        self.start_s + k as f64 * self.bin_width_s
    }

    pub fn bin_centers(&self) -> Vec<f64> {
        (0..self.counts.len())
            .map(|k| self.bin_left(k) + 0.5 * self.bin_width_s)
            .collect()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Bin containing delay `tau`; edges belong to the bin on their right.
    pub fn bin_index(&self, tau: f64) -> Option<usize> {
        bin_index(tau, self.start_s, self.bin_width_s, self.counts.len())
    }
}

fn bin_index(tau: f64, start: f64, width: f64, n: usize) -> Option<usize> {
    let x = (tau - start) / width;
    let r = x.round();
    let k = if (x - r).abs() < 1e-9 { r } else { x.floor() };
    (k >= 0.0 && (k as usize) < n).then_some(k as usize)
}

/// Multi-stop correlator: every accepted anti-Stokes trigger histograms all
/// Stokes events within [start, start + window) of it.
pub fn coincidence_histogram(
    anti_stokes: &[f64],
    stokes: &[f64],
    cfg: &HistogramConfig,
    duration_s: f64,
) -> Result<CoincidenceHistogram, SimError> {
    let n_bins = cfg.n_bins()?;
    if anti_stokes.windows(2).any(|w| w[1] < w[0]) || stokes.windows(2).any(|w| w[1] < w[0]) {
        return Err(SimError::InvalidConfig(
            "timestamp streams must be sorted".into(),
        ));
    }
    let mut counts = vec![0u64; n_bins];
    let mut n_triggers = 0u64;
    let mut last_accepted = f64::NEG_INFINITY;
    let mut lo = 0usize;
    for &t in anti_stokes {
        if t - last_accepted < cfg.dead_time_s {
            continue;
        }
        last_accepted = t;
        n_triggers += 1;
        let first = t + cfg.start_s;
        while lo < stokes.len() && stokes[lo] < first - cfg.bin_width_s {
            lo += 1;
        }
        for &s in &stokes[lo..] {
            let tau = s - t;
            if tau >= cfg.start_s + cfg.window_s + cfg.bin_width_s {
                break;
            }
            if let Some(k) = bin_index(tau, cfg.start_s, cfg.bin_width_s, n_bins) {
                counts[k] += 1;
            }
        }
    }
    Ok(CoincidenceHistogram {
        bin_width_s: cfg.bin_width_s,
        window_s: cfg.window_s,
        start_s: cfg.start_s,
        duration_s,
        counts,
        n_triggers,
    })
}

/// Cross-correlation g²_as,s(τ) per bin, normalized by the accidental level
/// n_triggers · (stokes events / duration) · bin width.
pub fn cross_correlation(hist: &CoincidenceHistogram, n_stokes: usize) -> Vec<f64> {
    let expected = hist.n_triggers as f64 * n_stokes as f64 / hist.duration_s * hist.bin_width_s;
    hist.counts.iter().map(|&c| c as f64 / expected).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_pair() {
        let cfg = HistogramConfig::default();
        let h = coincidence_histogram(&[1e-3], &[1e-3 + 100e-9], &cfg, 1.0).unwrap();
        assert_eq!(h.total(), 1);
        let k = h.counts.iter().position(|&c| c == 1).unwrap();
        assert!(h.bin_left(k) <= 100e-9 + 1e-18 && 100e-9 < h.bin_left(k) + h.bin_width_s);
        assert_eq!(h.n_triggers, 1);
    }

    #[test]
    fn dead_time_gates_triggers() {
        let cfg = HistogramConfig {
            dead_time_s: 1e-6,
            ..Default::default()
        };
        let h = coincidence_histogram(&[0.0, 0.5e-6, 1.2e-6], &[], &cfg, 1.0).unwrap();
        assert_eq!(h.n_triggers, 2);
    }

    #[test]
    fn rejects_fractional_bins() {
        let cfg = HistogramConfig {
            window_s: 1.0e-6,
            bin_width_s: 0.3e-6,
            ..Default::default()
        };
        assert!(coincidence_histogram(&[], &[], &cfg, 1.0).is_err());
    }
}
