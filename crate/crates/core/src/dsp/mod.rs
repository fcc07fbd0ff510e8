//! Numerical primitives used by segmentation and featurization.

mod autocorr;
mod extrema;
mod filter;
mod stats;

pub use autocorr::{autocorrelate, estimate_period, PeriodEstimate};
pub use extrema::{find_extrema, zero_crossing, Direction, ExtremumEvent, ExtremumKind};
pub use filter::{design_lowpass, filter_zero_phase, Biquad, FilterCoefficients, FilterSpec};
pub use stats::{mean_and_std, std_dev};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DspError {
    #[error("empty-signal")]
    EmptySignal,
    #[error("cutoff-out-of-range: normalized cutoff {normalized} is outside (0, 1)")]
    CutoffOutOfRange { normalized: f64 },
    #[error("order-must-be-even: got {order}")]
    OrderMustBeEven { order: usize },
    #[error("signal-too-short: {len} samples, need more than {required}")]
    SignalTooShort { len: usize, required: usize },
    #[error("constant-signal")]
    ConstantSignal,
    #[error("no-periodicity in lag window [{min_lag}, {max_lag}]")]
    NoPeriodicity { min_lag: usize, max_lag: usize },
    #[error("no-zero-crossing")]
    NoZeroCrossing,
    #[error("bad-argument: {0}")]
    BadArgument(String),
}
