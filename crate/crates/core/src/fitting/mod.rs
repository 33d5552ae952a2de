//! Wave-packet fitting, Fourier linewidth extraction and pump-power scaling fits.

mod linewidth;
mod lm;
mod phenom;
mod scaling;

pub use linewidth::{linewidth_from_curve, linewidth_from_fit, linewidth_from_params, Linewidth};
pub use lm::{minimize, LmOptions, LmResult};
pub use phenom::{
    eval_phenomenological, fit_from_start, fit_histogram, fit_samples, fit_wavepacket,
    temporal_fwhm, PhenomParams, WavePacketFit, Weighting, MIN_PEAK_RATIO,
};
pub use scaling::{fit_scaling, ScalingFit, ScalingModel};

use crate::waveform::WaveformError;

#[derive(Debug, Clone, thiserror::Error)]
pub enum FitError {
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("rank-deficient fit: {0}")]
    RankDeficient(String),
    #[error("fit did not converge (best residual norm {:.3e})", best.residual_norm)]
    NotConverged { best: Box<WavePacketFit> },
    #[error(transparent)]
    Width(#[from] WaveformError),
}
