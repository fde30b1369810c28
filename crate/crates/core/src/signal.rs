//! FFT plumbing, padding, subsampled convolution and modulus.
//!
//! Convention: the forward transform carries no scaling, the inverse
//! divides by the length. Bin `k` of a length-`n` spectrum sampled at
//! `rate` Hz sits at angular frequency `2πk·rate/n`; bins above `n/2`
//! are read as negative frequencies.

use std::cell::RefCell;
use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

/// Largest tolerated ratio of out-of-band to in-band filter energy when
/// a filtered spectrum is folded onto a coarser grid.
pub const ALIAS_TOLERANCE: f64 = 0.01;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Unscaled forward FFT in place.
pub fn fft_in_place(buf: &mut [Complex64]) {
    if buf.len() <= 1 {
        return;
    }
    let plan = PLANNER.with(|p| p.borrow_mut().plan_fft_forward(buf.len()));
    plan.process(buf);
}

/// Inverse FFT in place, scaled by `1/n`.
pub fn ifft_in_place(buf: &mut [Complex64]) {
    let n = buf.len();
    if n <= 1 {
        return;
    }
    let plan = PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(n));
    plan.process(buf);
    let s = 1.0 / n as f64;
    for v in buf.iter_mut() {
        *v *= s;
    }
}

/// Spectrum of a real sequence whose length is already the transform size.
pub fn real_spectrum(x: &[f64]) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft_in_place(&mut buf);
    buf
}

pub fn is_power_of_two(n: usize) -> bool {
    n > 0 && n & (n - 1) == 0
}

/// Angular frequency (rad/s) of bin `k` on a grid of `len` bins at `rate` Hz.
pub fn bin_frequency(k: usize, len: usize, rate: f64) -> f64 {
    let kk = if k <= len / 2 { k as f64 } else { k as f64 - len as f64 };
    2.0 * PI * kk * rate / len as f64
}

fn check_finite<'a>(values: impl Iterator<Item = &'a f64>) -> Result<()> {
    for v in values {
        if !v.is_finite() {
            return Err(Error::InvalidSignal("non-finite sample".into()));
        }
    }
    Ok(())
}

fn check_rate(rate: f64) -> Result<()> {
    if !(rate.is_finite() && rate > 0.0) {
        return Err(Error::InvalidSignal(format!("sample rate must be positive, got {rate}")));
    }
    Ok(())
}

/// Uniformly sampled real time series.
#[derive(Debug, Clone, PartialEq)]
pub struct RealSignal {
    samples: Vec<f64>,
    rate: f64,
}

impl RealSignal {
    pub fn new(samples: Vec<f64>, rate: f64) -> Result<Self> {
        check_rate(rate)?;
        if samples.is_empty() {
            return Err(Error::InvalidSignal("empty signal".into()));
        }
        check_finite(samples.iter())?;
        Ok(Self { samples, rate })
    }

    pub fn zeros(len: usize, rate: f64) -> Result<Self> {
        Self::new(vec![0.0; len], rate)
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Duration in seconds.
    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 / self.rate
    }

    /// Sum of squared samples.
    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|v| v * v).sum()
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(self.samples.iter().map(|v| v * c).collect(), self.rate)
    }
}

/// Uniformly sampled complex time series.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSignal {
    samples: Vec<Complex64>,
    rate: f64,
}

impl ComplexSignal {
    pub fn new(samples: Vec<Complex64>, rate: f64) -> Result<Self> {
        check_rate(rate)?;
        if samples.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::InvalidSignal("non-finite sample".into()));
        }
        Ok(Self { samples, rate })
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

impl From<&RealSignal> for ComplexSignal {
    fn from(x: &RealSignal) -> Self {
        Self { samples: x.samples.iter().map(|&v| Complex64::new(v, 0.0)).collect(), rate: x.rate }
    }
}

/// Discrete spectrum over `[0, rate)` with a power-of-two number of bins.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    bins: Vec<Complex64>,
    rate: f64,
}

impl Spectrum {
    pub fn new(bins: Vec<Complex64>, rate: f64) -> Result<Self> {
        check_rate(rate)?;
        if !is_power_of_two(bins.len()) {
            return Err(Error::NotPowerOfTwo { size: bins.len() });
        }
        Ok(Self { bins, rate })
    }

    /// Builds a spectrum from real filter values.
    pub fn from_real(values: &[f64], rate: f64) -> Result<Self> {
        Self::new(values.iter().map(|&v| Complex64::new(v, 0.0)).collect(), rate)
    }

    pub fn bins(&self) -> &[Complex64] {
        &self.bins
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn len(&self) -> usize {
        self.bins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bins.is_empty()
    }

    /// Angular frequency of bin `k` in rad/s.
    pub fn frequency(&self, k: usize) -> f64 {
        bin_frequency(k, self.bins.len(), self.rate)
    }
}

/// Anything that can be zero-extended into an FFT buffer.
pub trait Sampled {
    fn rate(&self) -> f64;
    fn len(&self) -> usize;
    fn write_complex(&self, out: &mut [Complex64]);

    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl Sampled for RealSignal {
    fn rate(&self) -> f64 {
        self.rate
    }
    fn len(&self) -> usize {
        self.samples.len()
    }
    fn write_complex(&self, out: &mut [Complex64]) {
        for (o, &v) in out.iter_mut().zip(&self.samples) {
            *o = Complex64::new(v, 0.0);
        }
    }
}

impl Sampled for ComplexSignal {
    fn rate(&self) -> f64 {
        self.rate
    }
    fn len(&self) -> usize {
        self.samples.len()
    }
    fn write_complex(&self, out: &mut [Complex64]) {
        out[..self.samples.len()].copy_from_slice(&self.samples);
    }
}

/// Forward DFT of `signal` zero-extended to `size` bins.
pub fn fft_forward<S: Sampled + ?Sized>(signal: &S, size: usize) -> Result<Spectrum> {
    if !is_power_of_two(size) {
        return Err(Error::NotPowerOfTwo { size });
    }
    if size < signal.len() {
        return Err(Error::SizeTooSmall { size, len: signal.len() });
    }
    let mut buf = vec![Complex64::new(0.0, 0.0); size];
    signal.write_complex(&mut buf);
    fft_in_place(&mut buf);
    Spectrum::new(buf, signal.rate())
}

/// Inverse DFT, scaled by `1/n`.
pub fn fft_inverse(spectrum: &Spectrum) -> Result<ComplexSignal> {
    let mut buf = spectrum.bins.clone();
    ifft_in_place(&mut buf);
    ComplexSignal::new(buf, spectrum.rate)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PadMode {
    Reflect,
    Zero,
}

/// Records where the original samples live inside a padded buffer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Unpad {
    pub offset: usize,
    pub len: usize,
}

impl Unpad {
    pub fn apply<'a, T>(&self, padded: &'a [T]) -> &'a [T] {
        &padded[self.offset..self.offset + self.len]
    }
}

/// Extends `x` on the right to `target` samples. Reflection mirrors about
/// the end samples without repeating them and keeps bouncing if the
/// padding is longer than the signal.
pub fn pad_samples(x: &[f64], target: usize, mode: PadMode) -> Vec<f64> {
    let n = x.len();
    let mut out = Vec::with_capacity(target.max(n));
    out.extend_from_slice(x);
    match mode {
        PadMode::Zero => out.resize(target.max(n), 0.0),
        PadMode::Reflect => {
            if n == 1 {
                out.resize(target.max(1), x[0]);
            } else {
                let period = 2 * (n - 1);
                for i in n..target {
                    let j = i % period;
                    out.push(if j < n { x[j] } else { x[period - j] });
                }
            }
        }
    }
    out
}

/// Places `x` at offset `left` inside `target` samples, reflecting on both
/// sides. The wrap-around junction of the circular buffer then lies in the
/// middle of the padding, away from both ends of the signal.
pub fn pad_centered(x: &[f64], target: usize, left: usize) -> Vec<f64> {
    let n = x.len();
    assert!(left + n <= target, "padding target too small");
    if n == 1 {
        return vec![x[0]; target];
    }
    let period = 2 * (n - 1) as i64;
    let split = left + n + (target - left - n) / 2;
    (0..target)
        .map(|i| {
            // samples past `split` belong to the left extension, wrapped around
            let rel = if i < split { i as i64 - left as i64 } else { i as i64 - left as i64 - target as i64 };
            let j = rel.rem_euclid(period);
            x[if j < n as i64 { j } else { period - j } as usize]
        })
        .collect()
}

/// Pads to a power-of-two `target` and returns the descriptor needed to
/// cut the original span back out.
pub fn pad_for_transform(signal: &RealSignal, target: usize, mode: PadMode) -> Result<(RealSignal, Unpad)> {
    if !is_power_of_two(target) {
        return Err(Error::NotPowerOfTwo { size: target });
    }
    if target < signal.len() {
        return Err(Error::SizeTooSmall { size: target, len: signal.len() });
    }
    let padded = pad_samples(&signal.samples, target, mode);
    Ok((RealSignal { samples: padded, rate: signal.rate }, Unpad { offset: 0, len: signal.len() }))
}

/// Fraction of filter energy that cannot be placed inside any band of
/// `len/factor` consecutive bins, relative to the best such band.
pub fn leak_ratio(energy: &[f64], factor: usize) -> f64 {
    let m = energy.len();
    if factor <= 1 || m == 0 {
        return 0.0;
    }
    let w = (m / factor).max(1);
    let total: f64 = energy.iter().sum();
    if total == 0.0 {
        return 0.0;
    }
    let mut window: f64 = energy[..w].iter().sum();
    let mut best = window;
    for start in 1..m {
        window += energy[(start + w - 1) % m] - energy[start - 1];
        if window > best {
            best = window;
        }
    }
    if best <= 0.0 {
        return f64::INFINITY;
    }
    ((total - best) / best).max(0.0)
}

/// Folds a spectrum of length `m` onto `m/factor` bins and applies the
/// `1/factor` that makes the inverse transform equal plain decimation.
pub fn fold_spectrum(spec: &[Complex64], factor: usize) -> Vec<Complex64> {
    let m = spec.len();
    let out_len = m / factor;
    let mut out = vec![Complex64::new(0.0, 0.0); out_len];
    for (k, v) in spec.iter().enumerate() {
        out[k % out_len] += *v;
    }
    let s = 1.0 / factor as f64;
    for v in out.iter_mut() {
        *v *= s;
    }
    out
}

/// Moves a spectrum to a grid of `new_len` bins covering the same time
/// span: folding when shrinking, zero insertion when growing. The inverse
/// transform of the result samples the same signal on the new grid.
pub fn resample_spectrum(spec: &[Complex64], new_len: usize) -> Vec<Complex64> {
    let m = spec.len();
    if new_len == m {
        return spec.to_vec();
    }
    let scale = new_len as f64 / m as f64;
    let mut out = vec![Complex64::new(0.0, 0.0); new_len];
    if new_len < m {
        for (k, v) in spec.iter().enumerate() {
            out[k % new_len] += *v * scale;
        }
    } else if m == 1 {
        out[0] = spec[0] * scale;
    } else {
        let half = m / 2;
        for (k, v) in spec.iter().enumerate() {
            let v = *v * scale;
            if k < half {
                out[k] += v;
            } else if k > half {
                out[new_len - (m - k)] += v;
            } else {
                // split the Nyquist bin between both signs to stay real
                out[half] += v * 0.5;
                out[new_len - half] += v * 0.5;
            }
        }
    }
    out
}

/// Circular convolution with `filter` evaluated every `factor` samples.
pub fn convolve_subsampled(signal: &ComplexSignal, filter: &Spectrum, factor: usize) -> Result<ComplexSignal> {
    let m = filter.len();
    if !is_power_of_two(factor) {
        return Err(Error::NotPowerOfTwo { size: factor });
    }
    if signal.len() != m {
        return Err(Error::InvalidParameter(format!(
            "signal length {} must equal the filter grid {}",
            signal.len(),
            m
        )));
    }
    if factor > m {
        return Err(Error::InvalidParameter(format!("factor {factor} exceeds length {m}")));
    }
    if (signal.rate - filter.rate).abs() > 1e-9 * signal.rate {
        return Err(Error::ConfigMismatch("signal and filter rates differ".into()));
    }
    let energy: Vec<f64> = filter.bins.iter().map(|h| h.norm_sqr()).collect();
    let leak = leak_ratio(&energy, factor);
    if leak > ALIAS_TOLERANCE {
        return Err(Error::Aliasing { leak, tolerance: ALIAS_TOLERANCE, factor });
    }
    let mut buf = signal.samples.clone();
    fft_in_place(&mut buf);
    for (b, h) in buf.iter_mut().zip(&filter.bins) {
        *b *= h;
    }
    let mut folded = fold_spectrum(&buf, factor);
    ifft_in_place(&mut folded);
    ComplexSignal::new(folded, signal.rate / factor as f64)
}

/// Pointwise modulus.
pub fn complex_modulus(signal: &ComplexSignal) -> RealSignal {
    let samples: Vec<f64> = signal.samples.iter().map(|z| z.norm()).collect();
    RealSignal { samples, rate: signal.rate }
}

/// Piecewise-linear interpolation of `values` (one per `step` output
/// samples) onto `out_len` samples; held constant past the last knot.
pub fn interpolate_linear(values: &[f64], step: f64, out_len: usize) -> Vec<f64> {
    let n = values.len();
    (0..out_len)
        .map(|j| {
            let p = j as f64 / step;
            let i = p.floor() as usize;
            if i + 1 >= n {
                values[n - 1]
            } else {
                let f = p - i as f64;
                values[i] * (1.0 - f) + values[i + 1] * f
            }
        })
        .collect()
}

/// Linear interpolation of frame values onto a dense grid at `target_rate`.
pub fn upsample_linear(frames: &RealSignal, target_rate: f64) -> Result<RealSignal> {
    if frames.len() < 2 {
        return Err(Error::InvalidSignal("need at least two frames to interpolate".into()));
    }
    check_rate(target_rate)?;
    let step = target_rate / frames.rate;
    let out_len = ((frames.len() - 1) as f64 * step + 1e-9).floor() as usize + 1;
    RealSignal::new(interpolate_linear(&frames.samples, step, out_len), target_rate)
}
