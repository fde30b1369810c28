//! Synthetic sounds with known structure and the closed-form or Monte
//! Carlo predictions they are checked against.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filterbank::{FilterBank, Wavelet};
use crate::normalization::NormalizedScattering;
use crate::scattering::{scatter, ScatterOptions};
use crate::signal::{fft_in_place, ifft_in_place, RealSignal, Spectrum};

/// Seeded standard normal samples.
pub fn white_noise(len: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..len).map(|_| StandardNormal.sample(&mut rng)).collect()
}

/// Source of the source-filter model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Excitation {
    /// Σ_k e^{ikξt} over all harmonics below Nyquist, pitch in Hz.
    PulseTrain { pitch_hz: f64 },
    /// Unit-variance Gaussian white noise.
    WhiteNoise { seed: u64 },
}

/// Slowly varying amplitude a(t) ≥ 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Envelope {
    Constant(f64),
    /// mean·(1 + depth·cos(2π·freq·t)).
    Tremolo {
        mean: f64,
        depth: f64,
        freq_hz: f64,
    },
    /// Explicit samples at the synthesis rate; held at the last value.
    Sampled(Vec<f64>),
}

impl Envelope {
    pub fn value(&self, t: f64, rate: f64) -> f64 {
        match self {
            Envelope::Constant(c) => *c,
            Envelope::Tremolo { mean, depth, freq_hz } => mean * (1.0 + depth * (2.0 * PI * freq_hz * t).cos()),
            Envelope::Sampled(v) => {
                let i = (t * rate).round().max(0.0) as usize;
                v[i.min(v.len() - 1)]
            }
        }
    }

    /// sup |a'(t)| in amplitude units per second.
    pub fn max_slope(&self, rate: f64) -> f64 {
        match self {
            Envelope::Constant(_) => 0.0,
            Envelope::Tremolo { mean, depth, freq_hz } => (mean * depth * 2.0 * PI * freq_hz).abs(),
            Envelope::Sampled(v) => v.windows(2).map(|w| (w[1] - w[0]).abs() * rate).fold(0.0, f64::max),
        }
    }

    fn min_value(&self) -> f64 {
        match self {
            Envelope::Constant(c) => *c,
            Envelope::Tremolo { mean, depth, .. } => mean * (1.0 - depth.abs()),
            Envelope::Sampled(v) => v.iter().cloned().fold(f64::INFINITY, f64::min),
        }
    }
}

/// x(t) = a(t)·(e⋆h)(t).
#[derive(Debug, Clone, PartialEq)]
pub struct SourceFilterModel {
    pub excitation: Excitation,
    pub h: RealSignal,
    pub envelope: Envelope,
}

/// DTFT of the taps of `h` at `omega` rad/s.
pub fn dtft(h: &RealSignal, omega: f64) -> Complex64 {
    let w = omega / h.rate();
    h.samples().iter().enumerate().map(|(n, &v)| Complex64::from_polar(v, -w * n as f64)).sum()
}

/// Σ|t−c|·|h(t)| / Σ|h(t)| about the centroid c of |h|; a pure delay of
/// the impulse response does not change it.
pub fn mean_duration(h: &RealSignal) -> f64 {
    let l1: f64 = h.samples().iter().map(|v| v.abs()).sum();
    if l1 == 0.0 {
        return 0.0;
    }
    let t = |n: usize| n as f64 / h.rate();
    let c = h.samples().iter().enumerate().map(|(n, v)| t(n) * v.abs()).sum::<f64>() / l1;
    h.samples().iter().enumerate().map(|(n, v)| (t(n) - c).abs() * v.abs()).sum::<f64>() / l1
}

impl SourceFilterModel {
    fn validate(&self) -> Result<()> {
        if self.envelope.min_value() < 0.0 {
            return Err(Error::Precondition("envelope must be nonnegative".into()));
        }
        if let Excitation::PulseTrain { pitch_hz } = self.excitation {
            if pitch_hz.is_nan() || pitch_hz <= 0.0 {
                return Err(Error::Precondition("pitch must be positive".into()));
            }
            if self.h.duration() >= 1.0 / pitch_hz {
                return Err(Error::Precondition(format!(
                    "impulse response of {:.4} s is longer than the pitch period",
                    self.h.duration()
                )));
            }
        }
        Ok(())
    }

    /// Checks the bandwidth ordering for a wavelet: the envelope varies
    /// ten times slower than the wavelet bandwidth and the impulse response
    /// is shorter than the wavelet's time scale.
    pub fn check_ordering(&self, wavelet: &Wavelet, rate: f64) -> Result<()> {
        let slope = self.envelope.max_slope(rate);
        let bw = wavelet.bandwidth;
        if slope > bw / 10.0 {
            return Err(Error::Precondition(format!(
                "envelope slope {slope:.2}/s exceeds bandwidth/10 = {:.2}",
                bw / 10.0
            )));
        }
        if bw * mean_duration(&self.h) > 1.0 {
            return Err(Error::Precondition("impulse response too long for this wavelet".into()));
        }
        if let Excitation::PulseTrain { pitch_hz } = self.excitation {
            if bw > 2.0 * PI * pitch_hz {
                return Err(Error::Precondition("wavelet resolves no single harmonic".into()));
            }
        }
        Ok(())
    }
}

/// Renders the model for `duration` seconds at `rate` Hz.
pub fn gen_source_filter(model: &SourceFilterModel, duration: f64, rate: f64) -> Result<RealSignal> {
    model.validate()?;
    if (model.h.rate() - rate).abs() > 1e-9 * rate {
        return Err(Error::ConfigMismatch("impulse response rate differs from synthesis rate".into()));
    }
    let n = (duration * rate).round() as usize;
    if n == 0 {
        return Err(Error::InvalidParameter("duration too short".into()));
    }
    let carrier: Vec<f64> = match &model.excitation {
        Excitation::PulseTrain { pitch_hz } => {
            let xi = 2.0 * PI * pitch_hz;
            let kmax = ((rate / 2.0) / pitch_hz).ceil() as usize;
            let harmonics: Vec<(f64, Complex64)> = (1..kmax)
                .filter(|&k| (k as f64) * pitch_hz < rate / 2.0)
                .map(|k| (k as f64 * xi, dtft(&model.h, k as f64 * xi)))
                .collect();
            let dc = dtft(&model.h, 0.0).re;
            (0..n)
                .into_par_iter()
                .map(|i| {
                    let t = i as f64 / rate;
                    dc + 2.0 * harmonics.iter().map(|(w, c)| (c * Complex64::from_polar(1.0, w * t)).re).sum::<f64>()
                })
                .collect()
        }
        Excitation::WhiteNoise { seed } => {
            let taps = model.h.samples();
            let lead = taps.len() - 1;
            let e = white_noise(n + lead, *seed);
            (0..n).map(|i| taps.iter().enumerate().map(|(m, h)| h * e[i + lead - m]).sum()).collect()
        }
    };
    let x = carrier.iter().enumerate().map(|(i, c)| c * model.envelope.value(i as f64 / rate, rate)).collect();
    RealSignal::new(x, rate)
}

/// α1·cos(ξ1 t) + α2·cos(ξ2 t), frequencies in Hz.
pub fn gen_two_tone(xi1_hz: f64, xi2_hz: f64, a1: f64, a2: f64, duration: f64, rate: f64) -> Result<RealSignal> {
    let n = (duration * rate).round() as usize;
    let x = (0..n)
        .map(|i| {
            let t = i as f64 / rate;
            a1 * (2.0 * PI * xi1_hz * t).cos() + a2 * (2.0 * PI * xi2_hz * t).cos()
        })
        .collect();
    RealSignal::new(x, rate)
}

/// The two tones played one after the other, joined by a raised-cosine
/// crossfade of `ramp` seconds.
pub fn gen_arpeggio(
    xi1_hz: f64,
    xi2_hz: f64,
    a1: f64,
    a2: f64,
    duration: f64,
    rate: f64,
    ramp: f64,
) -> Result<RealSignal> {
    let n = (duration * rate).round() as usize;
    let mid = duration / 2.0;
    let x = (0..n)
        .map(|i| {
            let t = i as f64 / rate;
            let u = ((t - mid) / ramp + 0.5).clamp(0.0, 1.0);
            let w2 = 0.5 - 0.5 * (PI * u).cos();
            let w1 = (1.0 - w2 * w2).max(0.0).sqrt();
            let w2 = w2.sqrt();
            a1 * w1 * (2.0 * PI * xi1_hz * t).cos() + a2 * w2 * (2.0 * PI * xi2_hz * t).cos()
        })
        .collect();
    RealSignal::new(x, rate)
}

/// A sum of harmonics of `f0_hz` with fixed amplitudes and phases.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarmonicClip {
    pub f0_hz: f64,
    pub amplitudes: Vec<f64>,
    pub phases: Vec<f64>,
    pub envelope: Envelope,
}

impl HarmonicClip {
    /// Harmonics shaped by a smooth spectral envelope `amp(f_hz)`.
    pub fn with_envelope(f0_hz: f64, count: usize, amp: impl Fn(f64) -> f64, seed: u64) -> Self {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self {
            f0_hz,
            amplitudes: (1..=count).map(|k| amp(k as f64 * f0_hz)).collect(),
            phases: (0..count).map(|_| rng.random::<f64>() * 2.0 * PI).collect(),
            envelope: Envelope::Constant(1.0),
        }
    }

    /// Every partial multiplied by `ratio`, amplitudes unchanged.
    pub fn transposed(&self, ratio: f64) -> Self {
        Self { f0_hz: self.f0_hz * ratio, ..self.clone() }
    }

    /// Samples `x(map(t))` for `t = i/rate`.
    pub fn render_mapped(&self, duration: f64, rate: f64, map: impl Fn(f64) -> f64 + Sync) -> Result<RealSignal> {
        let n = (duration * rate).round() as usize;
        let x = (0..n)
            .into_par_iter()
            .map(|i| {
                let t = map(i as f64 / rate);
                let s: f64 = self
                    .amplitudes
                    .iter()
                    .zip(&self.phases)
                    .enumerate()
                    .filter(|(k, _)| (*k as f64 + 1.0) * self.f0_hz < rate / 2.0)
                    .map(|(k, (a, p))| a * (2.0 * PI * (k as f64 + 1.0) * self.f0_hz * t + p).cos())
                    .sum();
                s * self.envelope.value(t.max(0.0), rate)
            })
            .collect();
        RealSignal::new(x, rate)
    }

    pub fn render(&self, duration: f64, rate: f64) -> Result<RealSignal> {
        self.render_mapped(duration, rate, |t| t)
    }

    /// The clip dilated about its centre: `x((1−ε)(t − t_c) + t_c)`.
    pub fn render_warped(&self, duration: f64, rate: f64, epsilon: f64) -> Result<RealSignal> {
        let n = (duration * rate).round() as usize;
        let c = (n as f64 - 1.0) / 2.0 / rate;
        self.render_mapped(duration, rate, move |t| (1.0 - epsilon) * (t - c) + c)
    }
}

/// Gain of a formant-like spectral envelope with resonances at `formants` (Hz).
fn formant_gain(f: f64, formants: &[(f64, f64, f64)]) -> f64 {
    let tilt = 1.0 / (1.0 + f / 800.0);
    tilt * formants.iter().map(|(c, bw, g)| g * (-0.5 * ((f - c) / bw).powi(2)).exp()).sum::<f64>() + 0.02 * tilt
}

/// Speech-like clip: alternating voiced segments (gliding pitch, formant
/// envelope) and fricative noise bursts, with smooth onsets. Deterministic
/// in `seed`.
pub fn speech_like(duration: f64, rate: f64, seed: u64) -> Result<RealSignal> {
    use rand::Rng;
    let n = (duration * rate).round() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = vec![0.0; n];
    let mut start = (0.02 * rate) as usize;
    let noise = white_noise(n, seed.wrapping_add(0x5eed));
    let mut voiced = true;
    while start < n {
        let len = ((0.12 + 0.18 * rng.random::<f64>()) * rate) as usize;
        let end = (start + len).min(n);
        let seg = end - start;
        let ramp = (0.02 * rate) as usize;
        let gain = 0.3 + 0.7 * rng.random::<f64>();
        if voiced {
            let f0a = 100.0 + 120.0 * rng.random::<f64>();
            let f0b = f0a * (0.8 + 0.4 * rng.random::<f64>());
            let formants = [
                (300.0 + 600.0 * rng.random::<f64>(), 80.0, 1.0),
                (900.0 + 1400.0 * rng.random::<f64>(), 120.0, 0.6),
                (2300.0 + 900.0 * rng.random::<f64>(), 180.0, 0.3),
            ];
            let trem = 3.0 + 5.0 * rng.random::<f64>();
            let mut phase = 0.0;
            for i in 0..seg {
                let u = i as f64 / seg as f64;
                let f0 = f0a + (f0b - f0a) * u;
                phase += 2.0 * PI * f0 / rate;
                let mut s = 0.0;
                let mut k = 1;
                while (k as f64) * f0 < rate / 2.0 && k <= 80 {
                    s += formant_gain(k as f64 * f0, &formants) * (k as f64 * phase).cos();
                    k += 1;
                }
                let onset = ((i.min(seg - 1 - i)) as f64 / ramp as f64).min(1.0);
                let env = (0.5 - 0.5 * (PI * onset).cos()) * (1.0 + 0.3 * (2.0 * PI * trem * i as f64 / rate).sin());
                x[start + i] += gain * env * s;
            }
        } else {
            // fricative: noise through a two-pole resonance around 3-5 kHz
            let fc = 3000.0 + 2000.0 * rng.random::<f64>();
            let r: f64 = 0.9;
            let theta = 2.0 * PI * fc / rate;
            let (a1, a2) = (2.0 * r * theta.cos(), -r * r);
            let (mut y1, mut y2) = (0.0, 0.0);
            for i in 0..seg {
                let y = noise[start + i] + a1 * y1 + a2 * y2;
                y2 = y1;
                y1 = y;
                let onset = ((i.min(seg - 1 - i)) as f64 / ramp as f64).min(1.0);
                x[start + i] += 0.05 * gain * (0.5 - 0.5 * (PI * onset).cos()) * y;
            }
        }
        start = end + ((0.01 + 0.05 * rng.random::<f64>()) * rate) as usize;
        voiced = !voiced || rng.random::<f64>() < 0.4;
    }
    let peak = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if peak > 0.0 {
        for v in x.iter_mut() {
            *v *= 0.8 / peak;
        }
    }
    RealSignal::new(x, rate)
}

/// Locates the wavelet of `bank` centered at `lambda` (rad/s).
pub fn wavelet_at(bank: &FilterBank, lambda: f64) -> Result<(usize, &Wavelet)> {
    bank.wavelets()
        .iter()
        .enumerate()
        .find(|(_, w)| (w.center - lambda).abs() <= 1e-9 * lambda)
        .ok_or_else(|| Error::InvalidParameter(format!("no wavelet centered at {lambda} rad/s")))
}

/// The wavelet of `bank` whose center is closest to `lambda` (rad/s).
pub fn nearest_wavelet(bank: &FilterBank, lambda: f64) -> Result<(usize, &Wavelet)> {
    bank.wavelets()
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1.center - lambda).abs().total_cmp(&(b.1.center - lambda).abs()))
        .ok_or_else(|| Error::InvalidParameter("empty bank".into()))
}

/// ℓ2 norm of a wavelet's sampled taps, computed from its spectrum on the
/// bank grid.
pub fn wavelet_l2(w: &Wavelet, size: usize, rate: f64) -> f64 {
    let s = w.sample(size, rate);
    (s.values.iter().map(|v| v * v).sum::<f64>() / size as f64).sqrt()
}

/// ℓ1 norm of a wavelet's sampled taps.
pub fn wavelet_l1(w: &Wavelet, size: usize, rate: f64) -> f64 {
    let mut buf: Vec<Complex64> = w.sample(size, rate).to_dense().iter().map(|&v| Complex64::new(v, 0.0)).collect();
    ifft_in_place(&mut buf);
    buf.iter().map(|z| z.norm()).sum()
}

/// Predicted normalized first-order coefficient at the wavelet centered at `lambda1`.
pub fn predict_first_order(model: &SourceFilterModel, lambda1: f64, bank: &FilterBank) -> Result<f64> {
    let (_, w) = wavelet_at(bank, lambda1)?;
    model.validate()?;
    model.check_ordering(w, bank.rate())?;
    let h_hat = dtft(&model.h, lambda1).norm();
    match model.excitation {
        Excitation::PulseTrain { pitch_hz } => {
            let xi = 2.0 * PI * pitch_hz;
            let k = (lambda1 / xi).round().max(1.0);
            let l1: f64 = model.h.samples().iter().map(|v| v.abs()).sum();
            Ok(w.response(k * xi).abs() * h_hat / l1)
        }
        Excitation::WhiteNoise { .. } => {
            let l2 = model.h.energy().sqrt();
            let psi = wavelet_l2(w, bank.size(), bank.rate());
            Ok(PI / 2f64.powf(1.5) * psi * h_hat / l2)
        }
    }
}

/// Closed-form normalized second-order profile for two tones sharing a
/// first-order band.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterferencePrediction {
    /// Second-order centers (rad/s).
    pub lambda2: Vec<f64>,
    pub profile: Vec<f64>,
    /// In-band amplitudes a_i·|ψ̂_λ1(ξ_i)|.
    pub effective: (f64, f64),
}

impl InterferencePrediction {
    pub fn peak(&self) -> (usize, f64) {
        self.profile
            .iter()
            .cloned()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |b, (i, v)| if v > b.1 { (i, v) } else { b })
    }
}

/// |α1α2| / (|α1|² + |α2|²).
pub fn interference_factor(a1: f64, a2: f64) -> f64 {
    let d = a1 * a1 + a2 * a2;
    if d == 0.0 {
        0.0
    } else {
        (a1 * a2).abs() / d
    }
}

/// Predicted S̃_2 over the second-order bank at the first-order wavelet
/// centered at `lambda1`. The beat cos(Δt) reaches an analytic wavelet
/// through its positive-frequency half only, hence the factor ½ in front
/// of |ψ̂_λ2(Δ)|.
pub fn predict_interference(
    xi1_hz: f64,
    xi2_hz: f64,
    a1: f64,
    a2: f64,
    lambda1: f64,
    first: &FilterBank,
    second: &FilterBank,
) -> Result<InterferencePrediction> {
    let (_, w1) = wavelet_at(first, lambda1)?;
    let (x1, x2) = (2.0 * PI * xi1_hz, 2.0 * PI * xi2_hz);
    let peak = w1.response(w1.center);
    let (r1, r2) = (w1.response(x1).abs(), w1.response(x2).abs());
    if r1 < 0.1 * peak || r2 < 0.1 * peak {
        return Err(Error::Precondition(format!(
            "tones at {xi1_hz} and {xi2_hz} Hz do not share the band at {:.1} Hz",
            lambda1 / (2.0 * PI)
        )));
    }
    let delta = (x2 - x1).abs();
    if second.duration() * delta < 2.0 * 2.0 * PI {
        return Err(Error::Precondition("averaging window shorter than two beat periods".into()));
    }
    let (e1, e2) = (a1 * r1, a2 * r2);
    let factor = interference_factor(e1, e2);
    let lambda2 = second.centers();
    let profile = second.wavelets().iter().map(|w| 0.5 * w.response(delta).abs() * factor).collect();
    Ok(InterferencePrediction { lambda2, profile, effective: (e1, e2) })
}

/// Frames whose averaging window lies inside the clip: `T ≤ t ≤ L − T`.
pub fn interior_frames(frame_times: &[f64], duration: f64, clip: f64) -> std::ops::Range<usize> {
    let start = frame_times.partition_point(|&t| t < duration);
    let end = frame_times.partition_point(|&t| t <= clip - duration);
    start..end.max(start)
}

/// Measured normalized second-order profile under the first-order path
/// `parent` (bank index), averaged over `frames`: `(λ2 in rad/s, value)`.
pub fn second_order_profile(
    ns: &NormalizedScattering,
    parent: usize,
    frames: std::ops::Range<usize>,
) -> Vec<(f64, f64)> {
    let n = frames.len().max(1) as f64;
    ns.order_range(2)
        .filter(|&p| ns.paths[p].indices[0] == parent)
        .map(|p| (ns.paths[p].centers[1], ns.coefficients[p][frames.clone()].iter().sum::<f64>() / n))
        .collect()
}

/// Predicted amplitude-modulation profile (|a⋆ψ_λ2|⋆φ)/(a⋆φ) per frame.
#[derive(Debug, Clone, PartialEq)]
pub struct AmPrediction {
    pub lambda2: Vec<f64>,
    /// `per_frame[j][k]` for wavelet `j` and frame `k`.
    pub per_frame: Vec<Vec<f64>>,
}

impl AmPrediction {
    /// Mean over frames `range`.
    pub fn mean_over(&self, range: std::ops::Range<usize>) -> Vec<f64> {
        self.per_frame.iter().map(|v| v[range.clone()].iter().sum::<f64>() / range.len() as f64).collect()
    }
}

pub fn predict_second_order_am(a: &RealSignal, second: &FilterBank) -> Result<AmPrediction> {
    let (st, _) = scatter(a, std::slice::from_ref(second), 1, ScatterOptions::default())?;
    let denom = &st.coefficients[0];
    let range = st.order_range(1);
    let mut lambda2 = Vec::new();
    let mut per_frame = Vec::new();
    for p in range {
        lambda2.push(st.paths[p].centers[0]);
        per_frame.push(st.coefficients[p].iter().zip(denom).map(|(n, d)| if *d > 0.0 { n / d } else { 0.0 }).collect());
    }
    // paths without children (none at order 1) keep the bank's full list
    Ok(AmPrediction { lambda2, per_frame })
}

/// Zero-mean stationary processes with a known spectral bound.
#[derive(Debug, Clone, PartialEq)]
pub enum StationaryProcess {
    /// Unit-variance white Gaussian noise.
    WhiteGaussian,
    /// |e⋆ψ| − E|e⋆ψ| for white Gaussian e and an analytic filter ψ given
    /// by its spectrum on the probe grid.
    RayleighFluctuation { psi: Spectrum },
}

impl StationaryProcess {
    fn realize(&self, len: usize, seed: u64) -> Vec<f64> {
        let e = white_noise(len, seed);
        match self {
            StationaryProcess::WhiteGaussian => e,
            StationaryProcess::RayleighFluctuation { psi } => {
                let mean = PI.sqrt() / 2.0 * spectrum_l2(psi);
                let mut buf: Vec<Complex64> = e.iter().map(|&v| Complex64::new(v, 0.0)).collect();
                fft_in_place(&mut buf);
                for (b, h) in buf.iter_mut().zip(psi.bins()) {
                    *b *= h;
                }
                ifft_in_place(&mut buf);
                buf.iter().map(|z| z.norm() - mean).collect()
            }
        }
    }

    /// Upper bound on the power spectrum used on the right-hand side.
    pub fn spectral_bound(&self) -> f64 {
        match self {
            StationaryProcess::WhiteGaussian => 1.0,
            StationaryProcess::RayleighFluctuation { psi } => spectrum_l1(psi).powi(2) * (1.0 - PI / 4.0),
        }
    }
}

/// ℓ2 norm of the taps whose DFT is `s`.
pub fn spectrum_l2(s: &Spectrum) -> f64 {
    (s.bins().iter().map(|b| b.norm_sqr()).sum::<f64>() / s.len() as f64).sqrt()
}

/// ℓ1 norm of the taps whose DFT is `s`.
pub fn spectrum_l1(s: &Spectrum) -> f64 {
    let mut buf = s.bins().to_vec();
    ifft_in_place(&mut buf);
    buf.iter().map(|z| z.norm()).sum()
}

/// Monte Carlo estimate of E|((z·a)⋆h)(t)|² against the bound
/// sup R̂_z · (|a|²⋆|h|²)(t).
#[derive(Debug, Clone, PartialEq)]
pub struct LemmaProbe {
    pub empirical: Vec<f64>,
    pub std_error: Vec<f64>,
    pub bound: Vec<f64>,
    pub spectral_bound: f64,
}

impl LemmaProbe {
    /// Largest excess of the empirical mean over the bound in units of its
    /// standard error (negative when the bound holds everywhere).
    pub fn worst_excess(&self) -> f64 {
        self.empirical
            .iter()
            .zip(&self.bound)
            .zip(&self.std_error)
            .map(|((e, b), s)| {
                if *s > 0.0 {
                    (e - b) / s
                } else if e > b {
                    f64::INFINITY
                } else {
                    f64::NEG_INFINITY
                }
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

fn circular_convolve(x: &[Complex64], h: &Spectrum) -> Vec<Complex64> {
    let mut buf = x.to_vec();
    fft_in_place(&mut buf);
    for (b, k) in buf.iter_mut().zip(h.bins()) {
        *b *= k;
    }
    ifft_in_place(&mut buf);
    buf
}

pub fn lemma_bound_probe(
    process: &StationaryProcess,
    a: &RealSignal,
    h: &Spectrum,
    trials: usize,
    seed: u64,
) -> Result<LemmaProbe> {
    if trials < 30 {
        return Err(Error::InvalidParameter(format!("{trials} trials; at least 30 required")));
    }
    let len = a.len();
    if h.len() != len {
        return Err(Error::ConfigMismatch("filter grid must match the envelope length".into()));
    }
    let runs: Vec<Vec<f64>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let z = process.realize(len, seed.wrapping_add(t as u64));
            let za: Vec<Complex64> = z.iter().zip(a.samples()).map(|(z, a)| Complex64::new(z * a, 0.0)).collect();
            circular_convolve(&za, h).iter().map(|v| v.norm_sqr()).collect()
        })
        .collect();
    let n = trials as f64;
    let mut mean = vec![0.0; len];
    let mut sq = vec![0.0; len];
    for r in &runs {
        for (i, v) in r.iter().enumerate() {
            mean[i] += v;
            sq[i] += v * v;
        }
    }
    let std_error: Vec<f64> = mean
        .iter_mut()
        .zip(&sq)
        .map(|(m, s)| {
            *m /= n;
            ((s / n - *m * *m).max(0.0) / (n - 1.0)).sqrt()
        })
        .collect();
    let mut taps = h.bins().to_vec();
    ifft_in_place(&mut taps);
    let h2 = Spectrum::new(
        {
            let mut b: Vec<Complex64> = taps.iter().map(|z| Complex64::new(z.norm_sqr(), 0.0)).collect();
            fft_in_place(&mut b);
            b
        },
        h.rate(),
    )?;
    let a2: Vec<Complex64> = a.samples().iter().map(|v| Complex64::new(v * v, 0.0)).collect();
    let sup = process.spectral_bound();
    let bound = circular_convolve(&a2, &h2).iter().map(|v| sup * v.re.max(0.0)).collect();
    Ok(LemmaProbe { empirical: mean, std_error, bound, spectral_bound: sup })
}

/// Monte Carlo estimate of a moment ratio with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloRatio {
    pub estimate: f64,
    pub std_error: f64,
    pub expected: f64,
}

impl MonteCarloRatio {
    pub fn within(&self, sigmas: f64) -> bool {
        (self.estimate - self.expected).abs() <= sigmas * self.std_error
    }
}

/// (E|v|)² / E|v|² from per-trial first and second moments, with a
/// delta-method standard error.
fn moment_ratio(m1: &[f64], m2: &[f64], expected: f64) -> MonteCarloRatio {
    let n = m1.len() as f64;
    let mu1 = m1.iter().sum::<f64>() / n;
    let mu2 = m2.iter().sum::<f64>() / n;
    let v1 = m1.iter().map(|v| (v - mu1).powi(2)).sum::<f64>() / (n - 1.0);
    let v2 = m2.iter().map(|v| (v - mu2).powi(2)).sum::<f64>() / (n - 1.0);
    let c12 = m1.iter().zip(m2).map(|(a, b)| (a - mu1) * (b - mu2)).sum::<f64>() / (n - 1.0);
    let r = mu1 * mu1 / mu2;
    let g1 = 2.0 * mu1 / mu2;
    let g2 = -mu1 * mu1 / (mu2 * mu2);
    let var = (g1 * g1 * v1 + g2 * g2 * v2 + 2.0 * g1 * g2 * c12) / n;
    MonteCarloRatio { estimate: r, std_error: var.max(0.0).sqrt(), expected }
}

fn filtered_moments(h: &Spectrum, trials: usize, seed: u64, real: bool) -> (Vec<f64>, Vec<f64>) {
    let len = h.len();
    (0..trials)
        .into_par_iter()
        .map(|t| {
            let e: Vec<Complex64> =
                white_noise(len, seed.wrapping_add(t as u64)).into_iter().map(|v| Complex64::new(v, 0.0)).collect();
            let y = circular_convolve(&e, h);
            let mags: Vec<f64> = y.iter().map(|z| if real { z.re.abs() } else { z.norm() }).collect();
            let m1 = mags.iter().sum::<f64>() / len as f64;
            let m2 = mags.iter().map(|v| v * v).sum::<f64>() / len as f64;
            (m1, m2)
        })
        .unzip()
}

/// (E|e⋆ψ|)² / E|e⋆ψ|² for white Gaussian e and an analytic filter; → π/4.
pub fn rayleigh_ratio(psi: &Spectrum, trials: usize, seed: u64) -> MonteCarloRatio {
    let (m1, m2) = filtered_moments(psi, trials, seed, false);
    moment_ratio(&m1, &m2, PI / 4.0)
}

/// (E|e⋆h|)² / E|e⋆h|² for white Gaussian e and a real filter; → 2/π.
pub fn chi_ratio(h: &Spectrum, trials: usize, seed: u64) -> MonteCarloRatio {
    let (m1, m2) = filtered_moments(h, trials, seed, true);
    moment_ratio(&m1, &m2, 2.0 / PI)
}
