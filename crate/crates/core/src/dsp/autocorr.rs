use serde::{Deserialize, Serialize};

use super::DspError;

/// Dominant repetition length found in an autocorrelation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeriodEstimate {
    pub lag_samples: usize,
    pub period_ms: f64,
    pub peak_correlation: f64,
}

const MULTIPLE_TOLERANCE: f64 = 0.9;

/// Normalized, biased autocorrelation of the mean-removed signal for lags
/// `0..=max_lag`. `r[0]` is 1.
pub fn autocorrelate(x: &[f64], max_lag: usize) -> Result<Vec<f64>, DspError> {
    if max_lag == 0 {
        return Err(DspError::BadArgument("max_lag must be positive".into()));
    }
    if x.len() < 2 * max_lag {
        return Err(DspError::SignalTooShort { len: x.len(), required: 2 * max_lag - 1 });
    }
    let n = x.len();
    let mean = x.iter().sum::<f64>() / n as f64;
    let d: Vec<f64> = x.iter().map(|v| v - mean).collect();
    let energy: f64 = d.iter().map(|v| v * v).sum();
    if energy <= 0.0 || !energy.is_finite() {
        return Err(DspError::ConstantSignal);
    }
    let r = (0..=max_lag).map(|k| d[..n - k].iter().zip(&d[k..]).map(|(a, b)| a * b).sum::<f64>() / energy).collect();
    Ok(r)
}

/// Estimates the repetition length of `x` from its autocorrelation.
///
/// The lag window `[min_period_ms, max_period_ms]` is converted to integer
/// lags and capped at half the signal length. Candidates are the local
/// maxima of the autocorrelation inside the window with positive
/// correlation; the estimate is the earliest candidate reaching 90% of the
/// highest one. A window without candidates has no periodicity.
pub fn estimate_period(
    x: &[f64],
    sample_rate_hz: f64,
    min_period_ms: f64,
    max_period_ms: f64,
) -> Result<PeriodEstimate, DspError> {
    let min_lag = ((min_period_ms * sample_rate_hz / 1000.0).ceil() as usize).max(1);
    let max_lag = ((max_period_ms * sample_rate_hz / 1000.0).floor() as usize).min((x.len() / 2).saturating_sub(1));
    if max_lag < min_lag + 1 {
        return Err(DspError::BadArgument(format!(
            "lag window [{min_period_ms}, {max_period_ms}] ms covers fewer than 2 lags for {} samples at {sample_rate_hz} Hz",
            x.len()
        )));
    }
    let r = autocorrelate(x, max_lag + 1)?;
    let peaks: Vec<usize> =
        (min_lag..=max_lag).filter(|&k| r[k] > r[k - 1] && r[k] >= r[k + 1] && r[k] > 0.0).collect();
    let highest = peaks.iter().map(|&k| r[k]).fold(f64::NEG_INFINITY, f64::max);
    // integer multiples of the period can edge out the period itself when
    // repetition amplitudes vary, so the earliest near-highest peak wins
    let best = peaks.into_iter().find(|&k| r[k] >= MULTIPLE_TOLERANCE * highest);
    let lag = best.ok_or(DspError::NoPeriodicity { min_lag, max_lag })?;
    Ok(PeriodEstimate { lag_samples: lag, period_ms: lag as f64 * 1000.0 / sample_rate_hz, peak_correlation: r[lag] })
}
