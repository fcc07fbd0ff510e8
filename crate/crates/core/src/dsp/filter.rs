//! Butterworth low-pass design (bilinear transform with pre-warping) and
//! forward-backward application.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::DspError;

/// Low-pass design request. The corner frequency is `sample_rate_hz * cutoff_factor`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FilterSpec {
    pub order: usize,
    pub sample_rate_hz: f64,
    pub cutoff_factor: f64,
}

impl FilterSpec {
    pub fn new(order: usize, sample_rate_hz: f64, cutoff_factor: f64) -> Self {
        FilterSpec { order, sample_rate_hz, cutoff_factor }
    }

    pub fn cutoff_hz(&self) -> f64 {
        self.sample_rate_hz * self.cutoff_factor
    }

    /// Cutoff relative to Nyquist.
    pub fn normalized_cutoff(&self) -> f64 {
        self.cutoff_hz() / (self.sample_rate_hz / 2.0)
    }
}

/// One second-order section, `a0` normalized to 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Biquad {
    pub b: [f64; 3],
    pub a: [f64; 3],
}

impl Biquad {
    /// Direct form II transposed over `x`, starting from the steady state
    /// reached by a constant input equal to `x[0]`.
    fn run(&self, x: &mut [f64]) {
        let [b0, b1, b2] = self.b;
        let [_, a1, a2] = self.a;
        let Some(&x0) = x.first() else { return };
        let dc = (b0 + b1 + b2) / (1.0 + a1 + a2);
        let mut s1 = (dc - b0) * x0;
        let mut s2 = (b2 - a2 * dc) * x0;
        for v in x.iter_mut() {
            let input = *v;
            let y = b0 * input + s1;
            s1 = b1 * input - a1 * y + s2;
            s2 = b2 * input - a2 * y;
            *v = y;
        }
    }
}

/// Transfer function `B(z)/A(z)` with `a[0] = 1`, plus the cascade of
/// second-order sections it was expanded from. Filtering runs on the sections.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterCoefficients {
    pub b: Vec<f64>,
    pub a: Vec<f64>,
    pub sections: Vec<Biquad>,
}

impl FilterCoefficients {
    pub fn order(&self) -> usize {
        self.a.len() - 1
    }

    pub fn dc_gain(&self) -> f64 {
        self.b.iter().sum::<f64>() / self.a.iter().sum::<f64>()
    }
}

fn poly_mul(p: &[f64], q: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; p.len() + q.len() - 1];
    for (i, &pi) in p.iter().enumerate() {
        for (j, &qj) in q.iter().enumerate() {
            out[i + j] += pi * qj;
        }
    }
    out
}

/// Designs a digital Butterworth low-pass of even order.
///
/// Analog prototype poles are scaled to the pre-warped corner and mapped
/// through the bilinear transform; each conjugate pole pair becomes one
/// section with its double zero at `z = -1` and unity DC gain.
pub fn design_lowpass(spec: &FilterSpec) -> Result<FilterCoefficients, DspError> {
    if spec.order == 0 || !spec.order.is_multiple_of(2) {
        return Err(DspError::OrderMustBeEven { order: spec.order });
    }
    let wn = spec.normalized_cutoff();
    if !(wn > 0.0 && wn < 1.0) {
        return Err(DspError::CutoffOutOfRange { normalized: wn });
    }
    let n = spec.order;
    // bilinear transform with fs normalized to 2: s = 4 (z - 1) / (z + 1)
    let warped = 4.0 * (PI * wn / 2.0).tan();
    let mut sections = Vec::with_capacity(n / 2);
    for k in 0..n / 2 {
        let theta = PI * (2 * k + 1) as f64 / (2 * n) as f64;
        let (sr, si) = (-warped * theta.sin(), warped * theta.cos());
        // z = (4 + s) / (4 - s)
        let (nr, ni) = (4.0 + sr, si);
        let (dr, di) = (4.0 - sr, -si);
        let den = dr * dr + di * di;
        let zr = (nr * dr + ni * di) / den;
        let zi = (ni * dr - nr * di) / den;
        let a1 = -2.0 * zr;
        let a2 = zr * zr + zi * zi;
        let g = (1.0 + a1 + a2) / 4.0;
        sections.push(Biquad { b: [g, 2.0 * g, g], a: [1.0, a1, a2] });
    }
    let mut b = vec![1.0];
    let mut a = vec![1.0];
    for s in &sections {
        b = poly_mul(&b, &s.b);
        a = poly_mul(&a, &s.a);
    }
    Ok(FilterCoefficients { b, a, sections })
}

/// Zero-phase filtering: forward pass, reverse, second pass, reverse.
///
/// Both ends are extended by odd reflection over `3 * order` samples and the
/// section states start at the steady state of the first padded sample; the
/// padding is trimmed afterwards so the output has the input's length.
pub fn filter_zero_phase(coeffs: &FilterCoefficients, x: &[f64]) -> Result<Vec<f64>, DspError> {
    let required = 3 * coeffs.a.len().max(coeffs.b.len());
    if x.len() <= required {
        return Err(DspError::SignalTooShort { len: x.len(), required });
    }
    let pad = 3 * coeffs.order();
    let n = x.len();
    let mut ext = Vec::with_capacity(n + 2 * pad);
    ext.extend((1..=pad).rev().map(|i| 2.0 * x[0] - x[i]));
    ext.extend_from_slice(x);
    ext.extend((1..=pad).map(|i| 2.0 * x[n - 1] - x[n - 1 - i]));

    for s in &coeffs.sections {
        s.run(&mut ext);
    }
    ext.reverse();
    for s in &coeffs.sections {
        s.run(&mut ext);
    }
    ext.reverse();
    Ok(ext[pad..pad + n].to_vec())
}
