use serde::{Deserialize, Serialize};

use super::SimError;

/// Minimum number of events for [`auto_correlation`].
pub const MIN_EVENTS: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AutoCorrelation {
    /// Bin centres, s.
    pub delays: Vec<f64>,
    pub g2: Vec<f64>,
    pub counts: Vec<u64>,
    /// Expected counts per bin for an uncorrelated stream, edge-corrected.
    pub expected: Vec<f64>,
}

impl AutoCorrelation {
    /// One-sigma Poisson band of g² per bin.
    pub fn sigma(&self) -> Vec<f64> {
        self.expected.iter().map(|e| 1.0 / e.sqrt()).collect()
    }
}

/// Pair-counting g²(τ) estimate of a sorted stream observed over [0, duration).
/// Bins are [kΔ, (k+1)Δ) in positive delay, normalized by N²(T − τ)Δ/T².
pub fn auto_correlation(
    stream: &[f64],
    bin_s: f64,
    max_delay_s: f64,
    duration_s: f64,
) -> Result<AutoCorrelation, SimError> {
    if stream.len() < MIN_EVENTS {
        return Err(SimError::InsufficientEvents {
            found: stream.len(),
            required: MIN_EVENTS,
        });
    }
    if !(bin_s > 0.0 && max_delay_s >= bin_s && duration_s > max_delay_s) {
        return Err(SimError::InvalidConfig(
            "need 0 < bin <= max delay < duration".into(),
        ));
    }
    let n_bins = (max_delay_s / bin_s).floor() as usize;
    let span = n_bins as f64 * bin_s;
    let mut counts = vec![0u64; n_bins];
    for (i, &t) in stream.iter().enumerate() {
        for &u in &stream[i + 1..] {
            let d = u - t;
            if d >= span {
                break;
            }
            counts[(d / bin_s) as usize] += 1;
        }
    }
    let n = stream.len() as f64;
    let delays: Vec<f64> = (0..n_bins).map(|k| (k as f64 + 0.5) * bin_s).collect();
    let expected: Vec<f64> = delays
        .iter()
        .map(|tau| n * n * (duration_s - tau) * bin_s / (duration_s * duration_s))
        .collect();
    let g2 = counts
        .iter()
        .zip(&expected)
        .map(|(&c, e)| c as f64 / e)
        .collect();
    Ok(AutoCorrelation {
        delays,
        g2,
        counts,
        expected,
    })
}
