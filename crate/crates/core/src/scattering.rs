//! The wavelet-modulus cascade.
//!
//! Each retained path keeps the spectrum of its envelope on a decimated
//! grid. Children are obtained by multiplying that spectrum with a wavelet,
//! folding onto a coarser grid and taking the modulus; averages are read
//! off the same spectrum at the frame instants `k·T/2`.

use std::cmp::Ordering;
use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filterbank::{build_morlet_bank, FilterBank, Lowpass, Wavelet};
use crate::signal::{
    fft_in_place, ifft_in_place, pad_centered, pad_samples, real_spectrum, resample_spectrum, PadMode, RealSignal,
    ALIAS_TOLERANCE,
};

/// Relative slack used when comparing centers against the pruning bound.
const RULE_SLACK: f64 = 1e-9;

/// One branch of the cascade: the wavelet ordinals chosen at each order
/// and their center frequencies in rad/s.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScatteringPath {
    pub indices: Vec<usize>,
    pub centers: Vec<f64>,
}

impl ScatteringPath {
    pub fn root() -> Self {
        Self { indices: Vec::new(), centers: Vec::new() }
    }

    pub fn order(&self) -> usize {
        self.indices.len()
    }

    pub fn child(&self, index: usize, center: f64) -> Self {
        let mut p = self.clone();
        p.indices.push(index);
        p.centers.push(center);
        p
    }

    /// The path with its last entry removed.
    pub fn parent(&self) -> Option<Self> {
        if self.indices.is_empty() {
            return None;
        }
        let mut p = self.clone();
        p.indices.pop();
        p.centers.pop();
        Some(p)
    }

    pub fn centers_hz(&self) -> Vec<f64> {
        self.centers.iter().map(|c| c / (2.0 * PI)).collect()
    }

    pub fn last_center(&self) -> Option<f64> {
        self.centers.last().copied()
    }
}

impl Eq for ScatteringPath {}

impl PartialOrd for ScatteringPath {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Canonical order: by order, then lexicographically by increasing center.
impl Ord for ScatteringPath {
    fn cmp(&self, other: &Self) -> Ordering {
        self.order().cmp(&other.order()).then_with(|| self.indices.cmp(&other.indices))
    }
}

/// Whether a child center may follow `parent` under the frequency-decreasing rule.
pub fn path_allowed(parent: f64, parent_q: u32, child: f64, duration: f64) -> bool {
    let bound = (parent / parent_q as f64).max(2.0 * PI / duration);
    child <= bound * (1.0 + RULE_SLACK)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransformConfig {
    /// Wavelets per octave for orders 1, 2, ...
    pub q: Vec<u32>,
    /// Averaging duration T in seconds.
    pub duration: f64,
    pub max_order: usize,
    pub rate: f64,
    /// Frame hop in samples, `round(T·rate/2)`.
    pub hop: usize,
    /// Length of the analysed clip.
    pub len: usize,
    /// Length after padding to a power of two.
    pub padded_len: usize,
}

/// Exact energies gathered while the cascade runs, all in the padded domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    /// Σ x² of the padded input.
    pub input: f64,
    /// ‖S_m‖² for m = 0..=M.
    pub averaged: Vec<f64>,
    /// ‖U_m‖² entering layer m, summed over retained paths.
    pub layer_input: Vec<f64>,
    /// ‖U_{m+1}‖² produced by layer m from all its wavelets.
    pub layer_output: Vec<f64>,
    /// Part of `layer_output` carried by children that the rule discards.
    pub pruned: Vec<f64>,
}

impl EnergyReport {
    /// ‖U_{M+1}‖², the energy not yet averaged.
    pub fn residual(&self) -> f64 {
        *self.layer_output.last().unwrap_or(&0.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScatteringTransform {
    pub config: TransformConfig,
    /// Frame instants in seconds.
    pub frame_times: Vec<f64>,
    /// Paths in canonical order; `paths[0]` is the empty path (order 0).
    pub paths: Vec<ScatteringPath>,
    /// Decimation factor of each path's envelope grid.
    pub grid_factors: Vec<usize>,
    /// `coefficients[p][k]` is S at path `p` and frame `k`.
    pub coefficients: Vec<Vec<f64>>,
    pub energy: Option<EnergyReport>,
}

impl ScatteringTransform {
    pub fn frame_count(&self) -> usize {
        self.frame_times.len()
    }

    /// Position of `path` in the canonical list.
    pub fn index_of(&self, path: &ScatteringPath) -> Option<usize> {
        self.paths.binary_search(path).ok()
    }

    pub fn find(&self, indices: &[usize]) -> Option<usize> {
        self.paths
            .binary_search_by(|p| p.order().cmp(&indices.len()).then_with(|| p.indices.as_slice().cmp(indices)))
            .ok()
    }

    pub fn coefficient(&self, path: &ScatteringPath) -> Option<&[f64]> {
        self.index_of(path).map(|i| self.coefficients[i].as_slice())
    }

    /// Indices of paths of order `m`.
    pub fn order_range(&self, m: usize) -> std::ops::Range<usize> {
        let start = self.paths.partition_point(|p| p.order() < m);
        let end = self.paths.partition_point(|p| p.order() <= m);
        start..end
    }

    pub fn path_counts(&self) -> Vec<usize> {
        (0..=self.config.max_order).map(|m| self.order_range(m).len()).collect()
    }

    /// Squared norm of the frame-sampled representation, each frame
    /// weighted by the hop so it is comparable with Σ x².
    pub fn norm_sqr(&self) -> f64 {
        let h = self.config.hop as f64;
        self.coefficients.iter().flatten().map(|v| v * v).sum::<f64>() * h
    }

    /// Distance to another transform with the same path table.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        if self.paths != other.paths || self.frame_count() != other.frame_count() {
            return Err(Error::ConfigMismatch("transforms have different path tables".into()));
        }
        let h = self.config.hop as f64;
        let d: f64 = self
            .coefficients
            .iter()
            .flatten()
            .zip(other.coefficients.iter().flatten())
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        Ok((d * h).sqrt())
    }
}

/// Envelopes |U_m x| of every retained path at their own decimated rates,
/// cut to the span of the input.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EnvelopeSet {
    pub paths: Vec<ScatteringPath>,
    pub envelopes: Vec<RealSignal>,
}

impl EnvelopeSet {
    pub fn get(&self, path: &ScatteringPath) -> Option<&RealSignal> {
        self.paths.binary_search(path).ok().map(|i| &self.envelopes[i])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScatterOptions {
    pub track_energy: bool,
    pub keep_envelopes: bool,
    /// Apply the frequency-decreasing rule. Turning it off computes every
    /// path and is only meant as a brute-force reference.
    pub prune: bool,
}

impl Default for ScatterOptions {
    fn default() -> Self {
        Self { track_energy: false, keep_envelopes: false, prune: true }
    }
}

/// Frame hop in samples for averaging duration `duration`.
pub fn frame_hop(duration: f64, rate: f64) -> usize {
    ((duration * rate / 2.0).round() as usize).max(1)
}

/// Padded length and offset of the signal inside it. Both sides get at
/// least one averaging window of reflected signal, so edge frames average
/// a mirror image rather than the far end of the clip; the offset is a multiple of the
/// coarsest decimation so every grid sees the signal start on a sample.
pub fn padding_layout(len: usize, duration: f64, rate: f64) -> (usize, usize) {
    let margin = (duration * rate).ceil() as usize;
    let padded = (len + 2 * margin).next_power_of_two();
    let align = Lowpass::new(duration).safe_subsample(rate).clamp(1, padded);
    let left = (padded - len) / 2 / align * align;
    (padded, left)
}

/// Decimation of the grid on which frames are read: the largest power of
/// two dividing the hop, no coarser than the low-pass allows.
fn frame_factor(hop: usize, lowpass: &Lowpass, rate: f64, padded: usize) -> usize {
    let pow2 = 1usize << hop.trailing_zeros();
    pow2.min(lowpass.safe_subsample(rate)).min(padded)
}

struct Node {
    path: ScatteringPath,
    spec: Vec<Complex64>,
    factor: usize,
}

struct NodeOutput {
    frames: Vec<f64>,
    averaged: f64,
    input: f64,
    out_all: f64,
    out_pruned: f64,
    children: Vec<Node>,
}

struct Cascade<'a> {
    banks: &'a [FilterBank],
    lowpass: &'a Lowpass,
    rate: f64,
    duration: f64,
    padded: usize,
    hop: usize,
    frames: usize,
    frame_factor: usize,
    cap: usize,
    left: usize,
    options: ScatterOptions,
}

impl Cascade<'_> {
    /// Lowpass output of a node read at the frame instants, plus its exact energy.
    fn average(&self, node: &Node, clamp: bool) -> (Vec<f64>, f64) {
        let m = node.spec.len();
        let rate = self.rate / node.factor as f64;
        let phi = self.lowpass.sample_periodized(m, rate);
        let y: Vec<Complex64> = node.spec.iter().zip(&phi).map(|(u, p)| u * p).collect();
        let energy = node.factor as f64 / m as f64 * y.iter().map(|v| v.norm_sqr()).sum::<f64>();
        let new_len = self.padded / self.frame_factor;
        let mut z = resample_spectrum(&y, new_len);
        ifft_in_place(&mut z);
        let step = self.hop / self.frame_factor;
        let start = self.left / self.frame_factor;
        let frames = (0..self.frames)
            .map(|k| {
                let v = z[start + k * step].re;
                if clamp {
                    v.max(0.0)
                } else {
                    v
                }
            })
            .collect();
        (frames, energy)
    }

    fn child_factor(&self, w: &Wavelet, sampled: &crate::filterbank::SampledFilter, parent: usize) -> usize {
        let m = sampled.len;
        let target = w.max_subsample.min(self.cap);
        let mut f = (target / parent).max(1).min(m);
        while f > 1 && sampled.leak(f) > ALIAS_TOLERANCE {
            f /= 2;
        }
        f
    }

    fn process(&self, node: &Node, layer: usize, retain: bool) -> NodeOutput {
        let (frames, averaged) = self.average(node, layer > 0);
        let m = node.spec.len();
        let input = node.factor as f64 / m as f64 * node.spec.iter().map(|v| v.norm_sqr()).sum::<f64>();
        let mut out = NodeOutput { frames, averaged, input, out_all: 0.0, out_pruned: 0.0, children: Vec::new() };
        let Some(bank) = self.banks.get(layer) else {
            return out;
        };
        if !retain && !self.options.track_energy {
            return out;
        }
        let rate = self.rate / node.factor as f64;
        let parent_q = if layer == 0 { 1 } else { self.banks[layer - 1].q() };
        let results: Vec<(f64, bool, Option<Node>)> = bank
            .wavelets()
            .par_iter()
            .enumerate()
            .map(|(i, w)| {
                let allowed = match node.path.last_center() {
                    None => true,
                    Some(parent) => path_allowed(parent, parent_q, w.center, self.duration),
                };
                let keep = retain && (allowed || !self.options.prune);
                if !keep && !self.options.track_energy {
                    return (0.0, allowed, None);
                }
                let sampled = w.sample(m, rate);
                let energy = if self.options.track_energy {
                    node.factor as f64 / m as f64
                        * sampled.iter().map(|(k, v)| (node.spec[k] * v).norm_sqr()).sum::<f64>()
                } else {
                    0.0
                };
                if !keep {
                    return (energy, allowed, None);
                }
                let f = self.child_factor(w, &sampled, node.factor);
                let out_len = m / f;
                let mut folded = vec![Complex64::new(0.0, 0.0); out_len];
                for (k, v) in sampled.iter() {
                    folded[k % out_len] += node.spec[k] * v;
                }
                let s = 1.0 / f as f64;
                for v in folded.iter_mut() {
                    *v *= s;
                }
                ifft_in_place(&mut folded);
                for v in folded.iter_mut() {
                    *v = Complex64::new(v.norm(), 0.0);
                }
                fft_in_place(&mut folded);
                let child = Node { path: node.path.child(i, w.center), spec: folded, factor: node.factor * f };
                (energy, allowed, Some(child))
            })
            .collect();
        for (energy, allowed, child) in results {
            out.out_all += energy;
            if !allowed {
                out.out_pruned += energy;
            }
            if let Some(c) = child {
                out.children.push(c);
            }
        }
        out
    }
}

fn envelope_of(node: &Node, rate: f64, left: usize, len: usize) -> RealSignal {
    let mut buf = node.spec.clone();
    ifft_in_place(&mut buf);
    let (a, b) = (left / node.factor, (left + len).div_ceil(node.factor));
    let v = buf[a..b.min(buf.len())].iter().map(|z| z.re.max(0.0)).collect();
    RealSignal::new(v, rate / node.factor as f64).expect("finite envelope")
}

fn check_banks(banks: &[FilterBank], needed: usize) -> Result<()> {
    if banks.len() < needed {
        return Err(Error::InvalidParameter(format!("{needed} filter banks needed, {} given", banks.len())));
    }
    if let Some(first) = banks.first() {
        for b in banks {
            if (b.rate() - first.rate()).abs() > 1e-9 * first.rate() {
                return Err(Error::ConfigMismatch("banks have different sample rates".into()));
            }
            if (b.duration() - first.duration()).abs() > 1e-12 * first.duration() {
                return Err(Error::ConfigMismatch("banks have different averaging durations".into()));
            }
        }
    }
    Ok(())
}

/// Runs the cascade up to order `max_order`. `banks[m]` is the bank of
/// order `m + 1`; one extra bank is needed when energy tracking is on.
pub fn scatter(
    x: &RealSignal,
    banks: &[FilterBank],
    max_order: usize,
    options: ScatterOptions,
) -> Result<(ScatteringTransform, Option<EnvelopeSet>)> {
    if max_order > 3 {
        return Err(Error::InvalidParameter(format!("max order {max_order} exceeds 3")));
    }
    let needed = max_order.max(1) + usize::from(options.track_energy);
    check_banks(banks, needed)?;
    let bank0 = &banks[0];
    if (x.rate() - bank0.rate()).abs() > 1e-9 * x.rate() {
        return Err(Error::ConfigMismatch(format!("signal rate {} differs from bank rate {}", x.rate(), bank0.rate())));
    }
    let rate = x.rate();
    let duration = bank0.duration();
    let lowpass = bank0.lowpass();
    let len = x.len();
    let (padded, left) = padding_layout(len, duration, rate);
    let hop = frame_hop(duration, rate);
    let frames = len.div_ceil(hop);
    let xp = pad_centered(x.samples(), padded, left);
    let cascade = Cascade {
        banks,
        lowpass,
        rate,
        duration,
        padded,
        hop,
        frames,
        frame_factor: frame_factor(hop, lowpass, rate, padded),
        cap: lowpass.safe_subsample(rate),
        left,
        options,
    };

    let input_energy: f64 = xp.iter().map(|v| v * v).sum();
    let mut layer_nodes = vec![Node { path: ScatteringPath::root(), spec: real_spectrum(&xp), factor: 1 }];
    let mut report = EnergyReport {
        input: input_energy,
        averaged: Vec::new(),
        layer_input: Vec::new(),
        layer_output: Vec::new(),
        pruned: Vec::new(),
    };
    let mut collected: Vec<(ScatteringPath, usize, Vec<f64>)> = Vec::new();
    let mut envelopes = EnvelopeSet::default();

    for layer in 0..=max_order {
        let retain = layer < max_order;
        let outputs: Vec<NodeOutput> = layer_nodes.par_iter().map(|n| cascade.process(n, layer, retain)).collect();
        let (mut avg, mut inp, mut all, mut pruned) = (0.0, 0.0, 0.0, 0.0);
        let mut next = Vec::new();
        for (node, out) in layer_nodes.iter().zip(outputs) {
            avg += out.averaged;
            inp += out.input;
            all += out.out_all;
            pruned += out.out_pruned;
            if options.keep_envelopes && layer > 0 {
                envelopes.paths.push(node.path.clone());
                envelopes.envelopes.push(envelope_of(node, rate, left, len));
            }
            collected.push((node.path.clone(), node.factor, out.frames));
            next.extend(out.children);
        }
        report.averaged.push(avg);
        report.layer_input.push(inp);
        report.layer_output.push(all);
        report.pruned.push(pruned);
        layer_nodes = next;
    }

    collected.sort_by(|a, b| a.0.cmp(&b.0));
    let mut paths = Vec::with_capacity(collected.len());
    let mut grid_factors = Vec::with_capacity(collected.len());
    let mut coefficients = Vec::with_capacity(collected.len());
    for (p, f, c) in collected {
        paths.push(p);
        grid_factors.push(f);
        coefficients.push(c);
    }
    if options.keep_envelopes {
        let mut idx: Vec<usize> = (0..envelopes.paths.len()).collect();
        idx.sort_by(|&a, &b| envelopes.paths[a].cmp(&envelopes.paths[b]));
        envelopes = EnvelopeSet {
            paths: idx.iter().map(|&i| envelopes.paths[i].clone()).collect(),
            envelopes: idx.iter().map(|&i| envelopes.envelopes[i].clone()).collect(),
        };
    }
    let st = ScatteringTransform {
        config: TransformConfig {
            q: banks.iter().map(|b| b.q()).collect(),
            duration,
            max_order,
            rate,
            hop,
            len,
            padded_len: padded,
        },
        frame_times: (0..frames).map(|k| (k * hop) as f64 / rate).collect(),
        paths,
        grid_factors,
        coefficients,
        energy: options.track_energy.then_some(report),
    };
    Ok((st, options.keep_envelopes.then_some(envelopes)))
}

/// Convenience description of a cascade: Q per order, T, depth and flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScatterConfig {
    pub q: Vec<u32>,
    /// Averaging duration T in seconds.
    pub duration: f64,
    pub max_order: usize,
    pub options: ScatterOptions,
}

impl Default for ScatterConfig {
    fn default() -> Self {
        Self { q: vec![8, 1, 1, 1], duration: 0.19, max_order: 2, options: ScatterOptions::default() }
    }
}

impl ScatterConfig {
    pub fn new(duration: f64, max_order: usize) -> Self {
        Self { duration, max_order, ..Self::default() }
    }

    pub fn with_q(mut self, q: &[u32]) -> Self {
        self.q = q.to_vec();
        self
    }

    pub fn with_energy(mut self) -> Self {
        self.options.track_energy = true;
        self
    }

    pub fn with_envelopes(mut self) -> Self {
        self.options.keep_envelopes = true;
        self
    }

    pub fn q_for_order(&self, order: usize) -> u32 {
        self.q.get(order - 1).copied().unwrap_or(1)
    }

    /// T nudged so that the frame hop is a multiple of a power of two close
    /// to `T·rate/64`, letting frames be read from a decimated grid. The
    /// change is below 2%.
    pub fn snapped_duration(&self, rate: f64) -> f64 {
        let target = self.duration * rate / 64.0;
        if target < 2.0 {
            return self.duration;
        }
        let block = 1usize << (target.log2().floor() as u32);
        let hop = self.duration * rate / 2.0;
        let snapped = ((hop / block as f64).round().max(1.0) as usize) * block;
        2.0 * snapped as f64 / rate
    }

    pub fn snapped(&self, rate: f64) -> Self {
        Self { duration: self.snapped_duration(rate), ..self.clone() }
    }

    /// Banks for orders 1..=M, plus one more when energy is tracked.
    pub fn banks(&self, rate: f64, len: usize) -> Result<Vec<FilterBank>> {
        if !(self.duration.is_finite() && self.duration > 0.0) {
            return Err(Error::InvalidParameter("T must be positive".into()));
        }
        let size = padding_layout(len, self.duration, rate).0;
        let count = self.max_order.max(1) + usize::from(self.options.track_energy);
        (1..=count).map(|m| build_morlet_bank(self.q_for_order(m), self.duration, rate, size)).collect()
    }

    pub fn transform(&self, x: &RealSignal) -> Result<ScatteringTransform> {
        let banks = self.banks(x.rate(), x.len())?;
        Ok(scatter(x, &banks, self.max_order, self.options)?.0)
    }
}

/// Per-order energy shares relative to the padded input energy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyDecomposition {
    pub order_ratios: Vec<f64>,
    pub residual_ratio: f64,
    /// Share discarded by the frequency-decreasing rule.
    pub pruned_ratio: f64,
    /// Orders, residual and pruned share together.
    pub total: f64,
}

pub fn energy_decomposition(st: &ScatteringTransform, x: &RealSignal) -> Result<EnergyDecomposition> {
    let report = st.energy.as_ref().ok_or(Error::MissingResidual)?;
    if x.len() != st.config.len || (x.rate() - st.config.rate).abs() > 1e-9 * x.rate() {
        return Err(Error::ConfigMismatch("signal does not match the transform".into()));
    }
    if report.input <= 0.0 || x.energy() <= 0.0 {
        return Err(Error::Degenerate("zero-energy signal has no energy shares".into()));
    }
    let order_ratios: Vec<f64> = report.averaged.iter().map(|e| e / report.input).collect();
    let residual_ratio = report.residual() / report.input;
    let pruned_ratio = report.pruned.iter().take(report.pruned.len().saturating_sub(1)).sum::<f64>() / report.input;
    let total = order_ratios.iter().sum::<f64>() + residual_ratio + pruned_ratio;
    Ok(EnergyDecomposition { order_ratios, residual_ratio, pruned_ratio, total })
}

/// Output of one wavelet-modulus operator over the padded span.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveletModulus {
    /// Rate of the input signal.
    pub rate: f64,
    /// u⋆φ on the frame-compatible grid.
    pub lowpass: RealSignal,
    /// (center in rad/s, |u⋆ψ_λ| at the filter's decimated rate).
    pub envelopes: Vec<(f64, RealSignal)>,
}

impl WaveletModulus {
    fn outputs(&self) -> impl Iterator<Item = &RealSignal> {
        std::iter::once(&self.lowpass).chain(self.envelopes.iter().map(|(_, e)| e))
    }

    /// Squared norm with each sample weighted by its decimation factor.
    pub fn norm_sqr(&self) -> f64 {
        self.outputs().map(|s| self.rate / s.rate() * s.energy()).sum()
    }

    pub fn distance(&self, other: &Self) -> f64 {
        self.outputs()
            .zip(other.outputs())
            .map(|(a, b)| {
                self.rate / a.rate() * a.samples().iter().zip(b.samples()).map(|(x, y)| (x - y) * (x - y)).sum::<f64>()
            })
            .sum::<f64>()
            .sqrt()
    }
}

/// One application of |W|: the low-pass average and the envelope of every
/// wavelet output, each decimated as far as its bandwidth allows.
pub fn wavelet_modulus(u: &RealSignal, bank: &FilterBank) -> Result<WaveletModulus> {
    if (u.rate() - bank.rate()).abs() > 1e-9 * u.rate() {
        return Err(Error::ConfigMismatch("signal and bank rates differ".into()));
    }
    let rate = u.rate();
    let (padded, left) = padding_layout(u.len(), bank.duration(), rate);
    let xp = pad_centered(u.samples(), padded, left);
    let spec = real_spectrum(&xp);
    let lowpass = bank.lowpass();
    let cap = lowpass.safe_subsample(rate).min(padded);
    let hop = frame_hop(bank.duration(), rate);
    let fs = frame_factor(hop, lowpass, rate, padded);
    let phi = lowpass.sample_periodized(padded, rate);
    let y: Vec<Complex64> = spec.iter().zip(&phi).map(|(a, b)| a * b).collect();
    let mut z = resample_spectrum(&y, padded / fs);
    ifft_in_place(&mut z);
    let low = RealSignal::new(z.iter().map(|v| v.re).collect(), rate / fs as f64)?;
    let envelopes = bank
        .wavelets()
        .par_iter()
        .map(|w| {
            let sampled = w.sample(padded, rate);
            let mut f = w.max_subsample.min(cap).max(1);
            while f > 1 && sampled.leak(f) > ALIAS_TOLERANCE {
                f /= 2;
            }
            let out_len = padded / f;
            let mut folded = vec![Complex64::new(0.0, 0.0); out_len];
            for (k, v) in sampled.iter() {
                folded[k % out_len] += spec[k] * v;
            }
            ifft_in_place(&mut folded);
            let s = 1.0 / f as f64;
            let env = folded.iter().map(|v| v.norm() * s).collect();
            Ok((w.center, RealSignal::new(env, rate / f as f64)?))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(WaveletModulus { rate, lowpass: low, envelopes })
}

/// Windowed-sinc interpolation of `x` at fractional sample position `pos`,
/// reflecting indices at both ends.
pub fn sinc_interpolate(x: &[f64], pos: f64) -> f64 {
    const HALF: i64 = 48;
    let n = x.len() as i64;
    let base = pos.floor() as i64;
    let mut acc = 0.0;
    for j in (base - HALF + 1)..=(base + HALF) {
        let d = pos - j as f64;
        let window = 0.5 * (1.0 + (PI * d / HALF as f64).cos());
        let sinc = if d.abs() < 1e-12 { 1.0 } else { (PI * d).sin() / (PI * d) };
        let mut idx = j;
        if n > 1 {
            let period = 2 * (n - 1);
            idx = idx.rem_euclid(period);
            if idx >= n {
                idx = period - idx;
            }
        } else {
            idx = 0;
        }
        acc += x[idx as usize] * sinc * window;
    }
    acc
}

/// ‖S x_c − S x‖ / ‖x‖ for a delay of `c` seconds (band-limited shift).
pub fn shift_stability_probe(x: &RealSignal, c: f64, config: &ScatterConfig) -> Result<f64> {
    if c.abs() >= config.duration {
        return Err(Error::InvalidParameter("shift must be smaller than T".into()));
    }
    if c == 0.0 {
        return Ok(0.0);
    }
    let norm = x.energy().sqrt();
    if norm == 0.0 {
        return Ok(0.0);
    }
    let n = x.len();
    let padded = n.next_power_of_two() * 2;
    let xp = pad_samples(x.samples(), padded, PadMode::Reflect);
    let mut spec = real_spectrum(&xp);
    for (k, v) in spec.iter_mut().enumerate() {
        let w = crate::signal::bin_frequency(k, padded, x.rate());
        *v *= Complex64::from_polar(1.0, -w * c);
    }
    if padded.is_multiple_of(2) {
        let k = padded / 2;
        spec[k] = Complex64::new(spec[k].re, 0.0);
    }
    ifft_in_place(&mut spec);
    let shifted = RealSignal::new(spec[..n].iter().map(|v| v.re).collect(), x.rate())?;
    let banks = config.banks(x.rate(), n)?;
    let opts = ScatterOptions { track_energy: false, keep_envelopes: false, ..config.options };
    let a = scatter(x, &banks, config.max_order, opts)?.0;
    let b = scatter(&shifted, &banks, config.max_order, opts)?.0;
    Ok(a.distance(&b)? / norm)
}

/// `x` dilated about the clip centre: `x((1−ε)(t − t_c) + t_c)`.
pub fn warp_signal(x: &RealSignal, epsilon: f64) -> Result<RealSignal> {
    let n = x.len();
    let center = (n as f64 - 1.0) / 2.0;
    let samples =
        (0..n).map(|i| sinc_interpolate(x.samples(), (1.0 - epsilon) * (i as f64 - center) + center)).collect();
    RealSignal::new(samples, x.rate())
}

/// ‖S x_τ − S x‖ / ‖x‖ for the dilation `x_τ(t) = x((1−ε)t)`, taken about
/// the clip centre so the largest displacement is `ε·L/2`.
pub fn warp_stability_probe(x: &RealSignal, epsilon: f64, config: &ScatterConfig) -> Result<f64> {
    if epsilon.is_nan() || epsilon.abs() >= 1.0 {
        return Err(Error::InvalidParameter("warp factor must satisfy |ε| < 1".into()));
    }
    if epsilon == 0.0 {
        return Ok(0.0);
    }
    let warped = warp_signal(x, epsilon)?;
    warp_distance(x, &warped, config)
}

/// ‖S y − S x‖ / ‖x‖ for two clips of equal length.
pub fn warp_distance(x: &RealSignal, y: &RealSignal, config: &ScatterConfig) -> Result<f64> {
    let norm = x.energy().sqrt();
    if norm == 0.0 {
        return Ok(0.0);
    }
    let banks = config.banks(x.rate(), x.len())?;
    let opts = ScatterOptions { track_energy: false, keep_envelopes: false, ..config.options };
    let a = scatter(x, &banks, config.max_order, opts)?.0;
    let b = scatter(y, &banks, config.max_order, opts)?.0;
    Ok(a.distance(&b)? / norm)
}

/// ‖|x̂_τ| − |x̂|‖ / ‖x‖ on the plain Fourier modulus, Parseval-normalised.
pub fn fourier_modulus_distance(x: &RealSignal, y: &RealSignal) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::ConfigMismatch("clips differ in length".into()));
    }
    let n = x.len().next_power_of_two();
    let mut a = x.samples().to_vec();
    a.resize(n, 0.0);
    let mut b = y.samples().to_vec();
    b.resize(n, 0.0);
    let fa = real_spectrum(&a);
    let fb = real_spectrum(&b);
    let d: f64 = fa.iter().zip(&fb).map(|(p, q)| (p.norm() - q.norm()).powi(2)).sum::<f64>() / n as f64;
    Ok(d.sqrt() / x.energy().sqrt())
}
