//! Morlet wavelet banks, the Gaussian low-pass, Littlewood-Paley sums and
//! dual (reconstruction) filters.
//!
//! Every filter is a closed-form real function of angular frequency, so it
//! can be sampled on any FFT grid without re-deriving the design.

use std::f64::consts::{LN_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::{bin_frequency, is_power_of_two, leak_ratio, Spectrum, ALIAS_TOLERANCE};

/// Number of Gaussian standard deviations kept when sampling a filter.
const SUPPORT_SIGMAS: f64 = 12.0;

#[inline]
fn gauss(u: f64) -> f64 {
    (-0.5 * u * u).exp()
}

/// Gaussian standard deviation (rad/s) giving a -3 dB full width `bandwidth`.
pub fn sigma_for_bandwidth(bandwidth: f64) -> f64 {
    bandwidth / (2.0 * LN_2.sqrt())
}

/// A Gaussian band-pass minus a scaled Gaussian at the origin so that the
/// response vanishes at zero frequency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Wavelet {
    /// Center frequency in rad/s.
    pub center: f64,
    /// Nominal -3 dB full width in rad/s.
    pub bandwidth: f64,
    pub sigma: f64,
    pub correction: f64,
    pub gain: f64,
    /// Largest power-of-two decimation allowed on the output.
    pub max_subsample: usize,
    pub constant_q: bool,
}

impl Wavelet {
    pub fn new(center: f64, bandwidth: f64, constant_q: bool) -> Self {
        let sigma = sigma_for_bandwidth(bandwidth);
        Self { center, bandwidth, sigma, correction: gauss(center / sigma), gain: 1.0, max_subsample: 1, constant_q }
    }

    /// Frequency response at `omega` rad/s.
    #[inline]
    pub fn response(&self, omega: f64) -> f64 {
        self.gain * (gauss((omega - self.center) / self.sigma) - self.correction * gauss(omega / self.sigma))
    }

    fn support(&self) -> (f64, f64) {
        let lo = if self.correction > 1e-30 {
            (-SUPPORT_SIGMAS * self.sigma).min(self.center - SUPPORT_SIGMAS * self.sigma)
        } else {
            self.center - SUPPORT_SIGMAS * self.sigma
        };
        (lo, self.center + SUPPORT_SIGMAS * self.sigma)
    }

    /// Samples the response on an FFT grid. The Nyquist bin stands for both
    /// signs of frequency and receives their root-mean-square.
    pub fn sample(&self, len: usize, rate: f64) -> SampledFilter {
        let (lo, hi) = self.support();
        SampledFilter::from_fn(
            len,
            rate,
            lo,
            hi,
            |w| self.response(w),
            |w| {
                let a = self.response(w);
                let b = self.response(-w);
                a.signum() * (0.5 * (a * a + b * b)).sqrt()
            },
        )
    }

    /// Fraction of energy at negative frequencies.
    pub fn negative_energy_fraction(&self) -> f64 {
        let (lo, hi) = self.support();
        let step = self.sigma / 200.0;
        let (mut neg, mut total) = (0.0, 0.0);
        let mut w = lo.min(-hi);
        while w <= hi {
            let e = self.response(w).powi(2);
            total += e;
            if w < 0.0 {
                neg += e;
            }
            w += step;
        }
        neg / total
    }
}

/// Gaussian low-pass whose impulse response has full width at half
/// maximum equal to `duration` and unit integral.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lowpass {
    pub duration: f64,
    /// Time-domain standard deviation in seconds.
    pub sigma_t: f64,
    pub gain: f64,
    pub max_subsample: usize,
}

impl Lowpass {
    pub fn new(duration: f64) -> Self {
        Self { duration, sigma_t: duration / (2.0 * (2.0 * LN_2).sqrt()), gain: 1.0, max_subsample: 1 }
    }

    #[inline]
    pub fn response(&self, omega: f64) -> f64 {
        self.gain * gauss(self.sigma_t * omega)
    }

    /// Impulse response value at `t` seconds.
    pub fn impulse(&self, t: f64) -> f64 {
        self.gain * gauss(t / self.sigma_t) / (self.sigma_t * (2.0 * PI).sqrt())
    }

    /// Samples of the analytic response on an FFT grid (no periodization).
    pub fn sample(&self, len: usize, rate: f64) -> Vec<f64> {
        (0..len).map(|k| self.response(bin_frequency(k, len, rate))).collect()
    }

    /// DFT of the sampled impulse response: the analytic response summed
    /// over its spectral replicas. Its time kernel is a sampled Gaussian,
    /// hence nonnegative.
    pub fn sample_periodized(&self, len: usize, rate: f64) -> Vec<f64> {
        let period = 2.0 * PI * rate;
        let reach = (SUPPORT_SIGMAS / (self.sigma_t * period)).ceil() as i64 + 1;
        (0..len)
            .map(|k| {
                let w = bin_frequency(k, len, rate);
                (-reach..=reach).map(|j| self.response(w + j as f64 * period)).sum()
            })
            .collect()
    }

    /// Largest power-of-two factor such that the response at the decimated
    /// grid's Nyquist frequency is below `1e-7`.
    pub fn safe_subsample(&self, rate: f64) -> usize {
        let cutoff = (2.0 * 1e7f64.ln()).sqrt() / self.sigma_t;
        let mut f = 1usize;
        while PI * rate / (2 * f) as f64 >= cutoff {
            f *= 2;
        }
        f
    }
}

/// A filter sampled on a circular FFT grid, stored as one contiguous
/// (possibly wrapping) run of bins; all other bins are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFilter {
    pub len: usize,
    pub start: usize,
    pub values: Vec<f64>,
}

impl SampledFilter {
    fn from_fn(len: usize, rate: f64, lo: f64, hi: f64, f: impl Fn(f64) -> f64, nyquist: impl Fn(f64) -> f64) -> Self {
        let dw = 2.0 * PI * rate / len as f64;
        let nyq = len / 2;
        let k_lo = (lo / dw).floor() as i64;
        let k_hi = (hi / dw).ceil() as i64;
        let (start, count) = if k_hi - k_lo + 1 >= len as i64 {
            (0usize, len)
        } else {
            (k_lo.rem_euclid(len as i64) as usize, (k_hi - k_lo + 1) as usize)
        };
        let values = (0..count)
            .map(|i| {
                let k = (start + i) % len;
                let w = bin_frequency(k, len, rate);
                if k == nyq && len > 1 {
                    nyquist(w)
                } else {
                    f(w)
                }
            })
            .collect();
        Self { len, start, values }
    }

    pub fn from_dense(values: Vec<f64>) -> Self {
        Self { len: values.len(), start: 0, values }
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.len];
        for (i, v) in self.values.iter().enumerate() {
            out[(self.start + i) % self.len] = *v;
        }
        out
    }

    /// Iterates (bin, value) over the stored run.
    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        let len = self.len;
        let start = self.start;
        self.values.iter().enumerate().map(move |(i, v)| ((start + i) % len, *v))
    }

    /// Out-of-band leak for decimation by `factor`, see [`leak_ratio`].
    pub fn leak(&self, factor: usize) -> f64 {
        let e: Vec<f64> = self.to_dense().iter().map(|v| v * v).collect();
        leak_ratio(&e, factor)
    }
}

/// Analytic Littlewood-Paley terms at `omega`: (|φ̂|², ½Σ(|ψ̂(ω)|²+|ψ̂(−ω)|²)).
fn lp_terms(wavelets: &[Wavelet], lowpass: &Lowpass, omega: f64) -> (f64, f64) {
    let phi = lowpass.response(omega);
    let mut psi = 0.0;
    for w in wavelets {
        let reach = SUPPORT_SIGMAS * w.sigma;
        let near = (omega - w.center).abs() < reach || (omega + w.center).abs() < reach;
        let near_dc = w.correction > 1e-30 && omega.abs() < reach;
        if near || near_dc {
            let a = w.response(omega);
            let b = w.response(-omega);
            psi += 0.5 * (a * a + b * b);
        }
    }
    (phi * phi, psi)
}

fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, iters: usize) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..iters {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Global minimum of `f` over sorted probe points, refined around the
/// smallest local minima.
fn refined_min(points: &[f64], f: impl Fn(f64) -> f64) -> (f64, f64) {
    let vals: Vec<f64> = points.iter().map(|&w| f(w)).collect();
    let mut cands: Vec<usize> = (0..points.len())
        .filter(|&i| {
            let l = if i > 0 { vals[i - 1] } else { f64::INFINITY };
            let r = if i + 1 < vals.len() { vals[i + 1] } else { f64::INFINITY };
            vals[i] <= l && vals[i] <= r
        })
        .collect();
    cands.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
    let mut best = (f64::NAN, f64::INFINITY);
    for &i in cands.iter().take(12) {
        if vals[i] < best.1 {
            best = (points[i], vals[i]);
        }
        let a = points[i.saturating_sub(1)];
        let b = points[(i + 1).min(points.len() - 1)];
        if b > a {
            let (w, v) = golden_min(&f, a, b, 60);
            if v < best.1 {
                best = (w, v);
            }
        }
    }
    best
}

/// Probe frequencies on [0, nyquist] dense enough to resolve every filter.
fn probe_points(wavelets: &[Wavelet], lowpass: &Lowpass, nyquist: f64) -> Vec<f64> {
    let mut pts = Vec::new();
    let per_sigma = 12.0;
    for w in wavelets {
        let step = w.sigma / per_sigma;
        let lo = (w.center - 8.0 * w.sigma).max(0.0);
        let hi = (w.center + 8.0 * w.sigma).min(nyquist);
        let mut x = lo;
        while x <= hi {
            pts.push(x);
            x += step;
        }
        if w.correction > 1e-30 {
            let mut x = 0.0;
            while x <= (8.0 * w.sigma).min(nyquist) {
                pts.push(x);
                x += step;
            }
        }
    }
    let step = 1.0 / (lowpass.sigma_t * per_sigma);
    let mut x = 0.0;
    while x <= (8.0 / lowpass.sigma_t).min(nyquist) {
        pts.push(x);
        x += step;
    }
    for i in 0..=4096 {
        pts.push(nyquist * i as f64 / 4096.0);
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

/// A constant-Q Morlet bank with a Gaussian low-pass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterBank {
    q: u32,
    duration: f64,
    rate: f64,
    size: usize,
    wavelets: Vec<Wavelet>,
    lowpass: Lowpass,
    alpha: f64,
    alpha_omega: f64,
    lp_max: f64,
}

impl FilterBank {
    /// Assembles a bank from explicit filters, computing its frame bounds
    /// and decimation grants without renormalizing anything.
    pub fn from_parts(
        q: u32,
        duration: f64,
        rate: f64,
        size: usize,
        mut wavelets: Vec<Wavelet>,
        mut lowpass: Lowpass,
    ) -> Result<Self> {
        if !is_power_of_two(size) {
            return Err(Error::NotPowerOfTwo { size });
        }
        wavelets.sort_by(|a, b| a.center.total_cmp(&b.center));
        for w in wavelets.iter_mut() {
            w.max_subsample = grant(&w.sample(size, rate), w.bandwidth, rate, size);
        }
        let phi_bw = 2.0 * LN_2.sqrt() / lowpass.sigma_t;
        lowpass.max_subsample = grant(&SampledFilter::from_dense(lowpass.sample(size, rate)), phi_bw, rate, size);
        let nyquist = PI * rate;
        let pts = probe_points(&wavelets, &lowpass, nyquist);
        let a = |w: f64| {
            let (p, s) = lp_terms(&wavelets, &lowpass, w);
            p + s
        };
        let (w_min, a_min) = refined_min(&pts, a);
        let (_, neg_max) = refined_min(&pts, |w| -a(w));
        Ok(Self {
            q,
            duration,
            rate,
            size,
            wavelets,
            lowpass,
            alpha: 1.0 - a_min,
            alpha_omega: w_min,
            lp_max: -neg_max,
        })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    /// Averaging duration T in seconds.
    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn wavelets(&self) -> &[Wavelet] {
        &self.wavelets
    }

    pub fn lowpass(&self) -> &Lowpass {
        &self.lowpass
    }

    pub fn len(&self) -> usize {
        self.wavelets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.wavelets.is_empty()
    }

    /// 1 − min A(ω) over [0, Nyquist], located by refined search on the
    /// analytic responses.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Frequency (rad/s) where A(ω) attains its minimum.
    pub fn alpha_frequency(&self) -> f64 {
        self.alpha_omega
    }

    /// max A(ω) over [0, Nyquist], refined the same way.
    pub fn lp_max(&self) -> f64 {
        self.lp_max
    }

    pub fn centers(&self) -> Vec<f64> {
        self.wavelets.iter().map(|w| w.center).collect()
    }

    /// Littlewood-Paley sum A(ω) at any frequency.
    pub fn lp_value(&self, omega: f64) -> f64 {
        let (p, s) = lp_terms(&self.wavelets, &self.lowpass, omega);
        p + s
    }

    pub fn wavelet_spectrum(&self, i: usize) -> Spectrum {
        let v = self.wavelets[i].sample(self.size, self.rate).to_dense();
        Spectrum::from_real(&v, self.rate).expect("bank grid is a power of two")
    }

    pub fn lowpass_spectrum(&self) -> Spectrum {
        Spectrum::from_real(&self.lowpass.sample(self.size, self.rate), self.rate).expect("bank grid is a power of two")
    }

    /// Copy with every filter multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        let mut ws = self.wavelets.clone();
        for w in ws.iter_mut() {
            w.gain *= c;
        }
        let mut lp = self.lowpass.clone();
        lp.gain *= c;
        Self::from_parts(self.q, self.duration, self.rate, self.size, ws, lp)
    }

    /// Copy holding only the low-pass.
    pub fn lowpass_only(&self) -> Result<Self> {
        Self::from_parts(self.q, self.duration, self.rate, self.size, Vec::new(), self.lowpass.clone())
    }

    pub fn descriptor(&self) -> BankDescriptor {
        BankDescriptor {
            q: self.q,
            duration_s: self.duration,
            rate_hz: self.rate,
            size: self.size,
            alpha: self.alpha,
            lp_max: self.lp_max,
            lowpass_fwhm_s: self.lowpass.duration,
            lowpass_max_subsample: self.lowpass.max_subsample,
            wavelets: self
                .wavelets
                .iter()
                .map(|w| WaveletDescriptor {
                    center_hz: w.center / (2.0 * PI),
                    bandwidth_hz: w.bandwidth / (2.0 * PI),
                    max_subsample: w.max_subsample,
                    constant_q: w.constant_q,
                })
                .collect(),
        }
    }
}

/// Largest power-of-two decimation with output rate at least twice the
/// bandwidth and aliasing leak within tolerance.
fn grant(filter: &SampledFilter, bandwidth: f64, rate: f64, size: usize) -> usize {
    let energy: Vec<f64> = filter.to_dense().iter().map(|v| v * v).collect();
    let mut f = 1;
    while 2 * f <= size {
        let g = 2 * f;
        if 2.0 * PI * rate / g as f64 >= 2.0 * bandwidth && leak_ratio(&energy, g) <= ALIAS_TOLERANCE {
            f = g;
        } else {
            break;
        }
    }
    f
}

/// JSON-friendly summary of a bank, frequencies in Hz.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BankDescriptor {
    pub q: u32,
    pub duration_s: f64,
    pub rate_hz: f64,
    pub size: usize,
    pub alpha: f64,
    pub lp_max: f64,
    pub lowpass_fwhm_s: f64,
    pub lowpass_max_subsample: usize,
    pub wavelets: Vec<WaveletDescriptor>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveletDescriptor {
    pub center_hz: f64,
    pub bandwidth_hz: f64,
    pub max_subsample: usize,
    pub constant_q: bool,
}

/// Constant-Q centers `λ_max·2^{−k/Q}` down to `2πQ/T`, in increasing order.
pub fn constant_q_centers(q: u32, duration: f64, rate: f64) -> Vec<f64> {
    let qf = q as f64;
    let limit = PI * rate / (1.0 + 1.0 / qf);
    let mut k = (qf * limit.log2()).floor() as i64;
    while 2f64.powf(k as f64 / qf) >= limit {
        k -= 1;
    }
    let floor = 2.0 * PI * qf / duration;
    let mut out = Vec::new();
    loop {
        let lambda = 2f64.powf(k as f64 / qf);
        if lambda < floor {
            break;
        }
        out.push(lambda);
        k -= 1;
    }
    out.reverse();
    out
}

/// Builds the Morlet bank: constant-Q wavelets of -3 dB width λ/Q above
/// `2πQ/T`, `max(1, Q−1)` equally spaced filters below, and a Gaussian
/// low-pass of half-maximum width T. Wavelets share one gain chosen so the
/// Littlewood-Paley sum never exceeds one.
pub fn build_morlet_bank(q: u32, duration: f64, rate: f64, size: usize) -> Result<FilterBank> {
    if q == 0 {
        return Err(Error::InvalidParameter("Q must be at least 1".into()));
    }
    if !(duration.is_finite() && duration > 0.0) {
        return Err(Error::InvalidParameter(format!("T must be positive, got {duration}")));
    }
    if !(rate.is_finite() && rate > 0.0) {
        return Err(Error::InvalidParameter(format!("rate must be positive, got {rate}")));
    }
    if !is_power_of_two(size) {
        return Err(Error::NotPowerOfTwo { size });
    }
    let qf = q as f64;
    if 2.0 * PI * qf / duration >= PI * rate {
        return Err(Error::InvalidParameter(format!(
            "2πQ/T = {:.1} rad/s is not below Nyquist {:.1} rad/s",
            2.0 * PI * qf / duration,
            PI * rate
        )));
    }
    if (size as f64) < duration * rate {
        return Err(Error::InvalidParameter(format!("grid of {size} samples is shorter than T = {duration} s")));
    }
    let cq = constant_q_centers(q, duration, rate);
    if cq.is_empty() {
        return Err(Error::InvalidParameter("no constant-Q center fits between 2πQ/T and Nyquist".into()));
    }
    let n_lin = (q as usize).saturating_sub(1).max(1);
    let spacing = cq[0] / (n_lin + 1) as f64;
    let mut wavelets: Vec<Wavelet> = (1..=n_lin).map(|k| Wavelet::new(k as f64 * spacing, spacing, false)).collect();
    wavelets.extend(cq.iter().map(|&l| Wavelet::new(l, l / qf, true)));
    let lowpass = Lowpass::new(duration);

    let nyquist = PI * rate;
    let pts = probe_points(&wavelets, &lowpass, nyquist);
    let ratio = |w: f64| {
        let (_, s) = lp_terms(&wavelets, &lowpass, w);
        if s < 1e-300 {
            f64::INFINITY
        } else {
            let phi = lowpass.sigma_t * w;
            -(-phi * phi).exp_m1() / s
        }
    };
    let (_, c2) = refined_min(&pts, ratio);
    let gain = (c2 * (1.0 - 1e-12)).sqrt();
    for w in wavelets.iter_mut() {
        w.gain = gain;
    }
    let bank = FilterBank::from_parts(q, duration, rate, size, wavelets, lowpass)?;
    if bank.alpha >= 1.0 {
        return Err(Error::FrameCondition { omega: bank.alpha_omega, value: 1.0 - bank.alpha });
    }
    Ok(bank)
}

/// A(ω) sampled on an FFT grid from sampled filters, with its minimum
/// over [0, Nyquist].
#[derive(Debug, Clone, PartialEq)]
pub struct LittlewoodPaley {
    /// Angular frequencies of bins 0..=len/2.
    pub omega: Vec<f64>,
    pub values: Vec<f64>,
    pub alpha: f64,
    pub max: f64,
}

/// Littlewood-Paley sum on the bank's own FFT grid.
pub fn littlewood_paley(bank: &FilterBank) -> LittlewoodPaley {
    let a = grid_lp(bank, bank.size, bank.rate, &bank.lowpass.sample(bank.size, bank.rate));
    let half = bank.size / 2;
    let values: Vec<f64> = a[..=half].to_vec();
    let omega = (0..=half).map(|k| bin_frequency(k, bank.size, bank.rate)).collect();
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    LittlewoodPaley { omega, values, alpha: 1.0 - min, max }
}

/// Full-circle A on a grid from the sampled filters: each bin pairs with
/// its mirror bin.
fn grid_lp(bank: &FilterBank, len: usize, rate: f64, phi: &[f64]) -> Vec<f64> {
    let mut psi2 = vec![0.0; len];
    for w in &bank.wavelets {
        for (k, v) in w.sample(len, rate).iter() {
            psi2[k] += v * v;
        }
    }
    (0..len)
        .map(|k| {
            let mirror = (len - k) % len;
            phi[k] * phi[k] + 0.5 * (psi2[k] + psi2[mirror])
        })
        .collect()
}

/// Reconstruction filters φ̂*/A and ψ̂*/A on a given grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DualBank {
    pub len: usize,
    pub rate: f64,
    /// Analysis filters on this grid.
    pub phi: Vec<f64>,
    pub psi: Vec<SampledFilter>,
    /// Dual filters on this grid.
    pub phi_dual: Vec<f64>,
    pub psi_dual: Vec<Vec<f64>>,
    /// Littlewood-Paley sum on this grid (full circle).
    pub lp: Vec<f64>,
}

impl DualBank {
    /// Duals for analysis filters already sampled on one grid.
    pub fn from_sampled(phi: Vec<f64>, psi: Vec<SampledFilter>, rate: f64) -> Result<Self> {
        let len = phi.len();
        let mut psi2 = vec![0.0; len];
        for f in &psi {
            if f.len != len {
                return Err(Error::ConfigMismatch("filters sampled on different grids".into()));
            }
            for (k, v) in f.iter() {
                psi2[k] += v * v;
            }
        }
        let lp: Vec<f64> = (0..len).map(|k| phi[k] * phi[k] + 0.5 * (psi2[k] + psi2[(len - k) % len])).collect();
        if let Some(k) = lp.iter().position(|&a| a <= 0.0) {
            return Err(Error::SingularFrame { omega: bin_frequency(k, len, rate) });
        }
        let phi_dual = phi.iter().zip(&lp).map(|(p, a)| p / a).collect();
        let psi_dual = psi
            .iter()
            .map(|f| {
                let mut d = vec![0.0; len];
                for (k, v) in f.iter() {
                    d[k] = v / lp[k];
                }
                d
            })
            .collect();
        Ok(Self { len, rate, phi, psi, phi_dual, psi_dual, lp })
    }

    /// Duals of `bank` sampled on an arbitrary grid.
    pub fn on_grid(bank: &FilterBank, len: usize, rate: f64) -> Result<Self> {
        if !is_power_of_two(len) {
            return Err(Error::NotPowerOfTwo { size: len });
        }
        let phi = bank.lowpass.sample(len, rate);
        let psi = bank.wavelets.iter().map(|w| w.sample(len, rate)).collect();
        Self::from_sampled(phi, psi, rate)
    }

    pub fn phi_dual_spectrum(&self) -> Spectrum {
        Spectrum::from_real(&self.phi_dual, self.rate).expect("power-of-two grid")
    }

    pub fn psi_dual_spectrum(&self, i: usize) -> Spectrum {
        Spectrum::from_real(&self.psi_dual[i], self.rate).expect("power-of-two grid")
    }
}

/// Dual filters on the bank's own grid.
pub fn dual_filters(bank: &FilterBank) -> Result<DualBank> {
    DualBank::on_grid(bank, bank.size, bank.rate)
}
