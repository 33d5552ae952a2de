//! Pair and singles emission.

use std::sync::Arc;

use rand::Rng;
use rand_distr::{Distribution, Exp, Geometric};
use serde::{Deserialize, Serialize};

use super::rng::{stream, substream};
use super::{SimError, Statistics};
use crate::waveform::WavePacket;

/// Inverse-CDF sampler of the normalized G²(τ).
#[derive(Debug, Clone)]
pub struct DelaySampler {
    tau: Vec<f64>,
    cdf: Vec<f64>,
}

impl DelaySampler {
    pub fn new(wp: &WavePacket) -> Result<Self, SimError> {
        let n = wp.values.len();
        if n < 2 {
            return Err(SimError::InvalidConfig(
                "wave packet has fewer than two samples".into(),
            ));
        }
        let dt = wp.dt();
        let mut cdf = Vec::with_capacity(n);
        let mut acc = 0.0;
        cdf.push(0.0);
        for w in wp.values.windows(2) {
            acc += 0.5 * (w[0] + w[1]) * dt;
            cdf.push(acc);
        }
        if !(acc > 0.0) {
            return Err(SimError::InvalidConfig("wave packet has zero area".into()));
        }
        cdf.iter_mut().for_each(|c| *c /= acc);
        Ok(Self {
            tau: wp.tau_grid.clone(),
            cdf,
        })
    }

    /// τ with CDF(τ) = u, linear within grid cells.
    pub fn sample(&self, u: f64) -> f64 {
        let u = u.clamp(0.0, 1.0);
        let i = self.cdf.partition_point(|&c| c < u);
        if i == 0 {
            return self.tau[0];
        }
        if i >= self.cdf.len() {
            return self.tau[self.tau.len() - 1];
        }
        let (c0, c1) = (self.cdf[i - 1], self.cdf[i]);
        let f = if c1 > c0 { (u - c0) / (c1 - c0) } else { 0.0 };
        self.tau[i - 1] + f * (self.tau[i] - self.tau[i - 1])
    }

    /// Numeric CDF at τ, linear within grid cells.
    pub fn cdf(&self, tau: f64) -> f64 {
        let i = self.tau.partition_point(|&t| t <= tau);
        if i == 0 {
            return 0.0;
        }
        if i >= self.tau.len() {
            return 1.0;
        }
        let f = (tau - self.tau[i - 1]) / (self.tau[i] - self.tau[i - 1]);
        self.cdf[i - 1] + f * (self.cdf[i] - self.cdf[i - 1])
    }

    pub fn support(&self) -> (f64, f64) {
        (self.tau[0], self.tau[self.tau.len() - 1])
    }
}

/// One inverse-CDF draw from the normalized G² of `wp`.
pub fn sample_delay(wp: &WavePacket, u: f64) -> Result<f64, SimError> {
    Ok(DelaySampler::new(wp)?.sample(u))
}

#[derive(Debug, Clone)]
pub struct PairStreamConfig {
    /// pairs/s
    pub generation_rate: f64,
    pub delay_distribution: Arc<DelaySampler>,
    pub statistics_mode: Statistics,
    pub coherence_time_s: f64,
    pub seed: u64,
}

impl PairStreamConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        if !(self.generation_rate >= 0.0 && self.generation_rate.is_finite()) {
            return Err(SimError::InvalidConfig(format!(
                "generation_rate = {} must be >= 0",
                self.generation_rate
            )));
        }
        if self.statistics_mode == Statistics::Thermal && !(self.coherence_time_s > 0.0) {
            return Err(SimError::InvalidConfig(
                "THERMAL statistics need coherence_time_s > 0".into(),
            ));
        }
        Ok(())
    }
}

/// Emission times of one photon pair, s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pair {
    pub t_as: f64,
    pub t_s: f64,
}

/// Event times on [0, duration) with the given statistics, sorted.
pub fn emission_times<R: Rng>(
    rate: f64,
    mode: Statistics,
    coherence_time_s: f64,
    duration: f64,
    rng: &mut R,
) -> Result<Vec<f64>, SimError> {
    if !(duration > 0.0) {
        return Err(SimError::InvalidConfig(format!(
            "duration = {duration} must be > 0"
        )));
    }
    if rate <= 0.0 {
        return Ok(Vec::new());
    }
    let mut out = Vec::with_capacity((rate * duration * 1.05) as usize + 16);
    match mode {
        Statistics::Poisson => {
            let exp = Exp::new(rate).map_err(|e| SimError::InvalidConfig(e.to_string()))?;
            let mut t = exp.sample(rng);
            while t < duration {
                out.push(t);
                t += exp.sample(rng);
            }
        }
        Statistics::Thermal => {
            if !(coherence_time_s > 0.0) {
                return Err(SimError::InvalidConfig(
                    "THERMAL statistics need coherence_time_s > 0".into(),
                ));
            }
            let mean = rate * coherence_time_s;
            let geom = Geometric::new(1.0 / (1.0 + mean))
                .map_err(|e| SimError::InvalidConfig(e.to_string()))?;
            let n_slots = (duration / coherence_time_s).ceil() as u64;
            let mut slot_times = Vec::new();
            for k in 0..n_slots {
                let n = geom.sample(rng);
                if n == 0 {
                    continue;
                }
                let start = k as f64 * coherence_time_s;
                let len = coherence_time_s.min(duration - start);
                slot_times.clear();
                for _ in 0..n {
                    let t = start + rng.gen::<f64>() * coherence_time_s;
                    if t - start < len {
                        slot_times.push(t);
                    }
                }
                slot_times.sort_by(f64::total_cmp);
                out.extend_from_slice(&slot_times);
            }
        }
    }
    Ok(out)
}

/// Pair emission over `duration` seconds; each pair's Stokes photon is delayed
/// from its anti-Stokes partner by a draw from the delay distribution.
pub fn simulate_pair_stream(cfg: &PairStreamConfig, duration: f64) -> Result<Vec<Pair>, SimError> {
    cfg.validate()?;
    let mut rng = substream(cfg.seed, stream::PAIRS);
    let times = emission_times(
        cfg.generation_rate,
        cfg.statistics_mode,
        cfg.coherence_time_s,
        duration,
        &mut rng,
    )?;
    let mut delay_rng = substream(cfg.seed, stream::DELAYS);
    Ok(times
        .into_iter()
        .map(|t_as| Pair {
            t_as,
            t_s: t_as + cfg.delay_distribution.sample(delay_rng.gen::<f64>()),
        })
        .collect())
}

/// THERMAL-compatible emission of pairs plus anti-Stokes photons without a
/// partner, drawn from one stream at the combined rate so both share modes.
/// Returns the pairs and the unpaired anti-Stokes emission times.
pub fn simulate_shared_modes(
    cfg: &PairStreamConfig,
    unpaired_rate: f64,
    duration: f64,
) -> Result<(Vec<Pair>, Vec<f64>), SimError> {
    cfg.validate()?;
    if !(unpaired_rate >= 0.0 && unpaired_rate.is_finite()) {
        return Err(SimError::InvalidConfig(format!(
            "unpaired rate = {unpaired_rate} must be >= 0"
        )));
    }
    let total = cfg.generation_rate + unpaired_rate;
    let mut rng = substream(cfg.seed, stream::PAIRS);
    let times = emission_times(
        total,
        cfg.statistics_mode,
        cfg.coherence_time_s,
        duration,
        &mut rng,
    )?;
    let paired = if total > 0.0 {
        cfg.generation_rate / total
    } else {
        0.0
    };
    let mut split_rng = substream(cfg.seed, stream::SPLIT);
    let mut delay_rng = substream(cfg.seed, stream::DELAYS);
    let mut pairs = Vec::with_capacity((times.len() as f64 * paired * 1.05) as usize + 16);
    let mut unpaired = Vec::new();
    for t_as in times {
        if split_rng.gen::<f64>() < paired {
            pairs.push(Pair {
                t_as,
                t_s: t_as + cfg.delay_distribution.sample(delay_rng.gen::<f64>()),
            });
        } else {
            unpaired.push(t_as);
        }
    }
    Ok((pairs, unpaired))
}
