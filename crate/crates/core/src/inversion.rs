//! Approximate inverse scattering.
//!
//! The deepest layer `U_M = S_M` deconvolved by φ (Richardson-Lucy), then
//! each `|W_m|` is inverted by alternating projections: impose the target
//! moduli on the current wavelet coefficients, project back through the
//! dual frame, repeat.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filterbank::{DualBank, FilterBank, Lowpass, SampledFilter};
use crate::scattering::{padding_layout, wavelet_modulus, ScatteringPath, ScatteringTransform};
use crate::signal::{
    fft_in_place, ifft_in_place, interpolate_linear, pad_centered, real_spectrum, resample_spectrum, RealSignal,
};

/// Divisions by `|·|` and `y⋆φ` are floored at this fraction of the maximum.
pub const DIVISION_FLOOR: f64 = 1e-12;
/// Phase-recovery iterations.
pub const DEFAULT_ITERATIONS: usize = 30;
/// Richardson-Lucy iterations. The frames are blurred by a full window
/// T, so sharpening them takes far more steps than phase recovery.
pub const DEFAULT_DECONVOLUTION_ITERATIONS: usize = 300;

/// Where a deconvolution runs: `len` samples of signal at offset `left`
/// inside a circle of `padded` samples, one frame every `step` samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeconvGrid {
    pub rate: f64,
    pub len: usize,
    pub padded: usize,
    pub left: usize,
    pub step: f64,
}

impl DeconvGrid {
    /// The grid of a transform decimated by `factor`.
    pub fn for_transform(st: &ScatteringTransform, factor: usize) -> Self {
        let c = &st.config;
        let (padded, left) = padding_layout(c.len, c.duration, c.rate);
        Self {
            rate: c.rate / factor as f64,
            len: c.len.div_ceil(factor),
            padded: padded / factor,
            left: left / factor,
            step: c.hop as f64 / factor as f64,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeconvolutionResult {
    /// Estimate over the signal span, nonnegative.
    pub estimate: RealSignal,
    /// The same estimate over the whole padded circle.
    pub padded: Vec<f64>,
    pub iterations: usize,
    /// `‖y⋆φ − y0‖/‖y0‖` of the returned estimate.
    pub residual: f64,
    /// Residual before each iteration, then after the last.
    pub residual_history: Vec<f64>,
    /// Smallest value of each iterate relative to its largest, before
    /// round-off below zero is cleared.
    pub min_relative: Vec<f64>,
}

impl DeconvolutionResult {
    /// Every iterate stayed nonnegative up to floating-point round-off.
    pub fn stayed_positive(&self) -> bool {
        self.min_relative.iter().all(|&m| m >= -1e-9)
    }
}

fn convolve(y: &[f64], kernel: &[f64]) -> Vec<f64> {
    let mut s = real_spectrum(y);
    for (v, k) in s.iter_mut().zip(kernel) {
        *v *= k;
    }
    ifft_in_place(&mut s);
    s.iter().map(|v| v.re).collect()
}

fn span_residual(c: &[f64], y0: &[f64], grid: &DeconvGrid) -> f64 {
    let r = grid.left..grid.left + grid.len;
    let num: f64 = c[r.clone()].iter().zip(&y0[r.clone()]).map(|(a, b)| (a - b).powi(2)).sum();
    let den: f64 = y0[r].iter().map(|b| b * b).sum();
    if den > 0.0 {
        (num / den).sqrt()
    } else {
        num.sqrt()
    }
}

/// Richardson-Lucy deconvolution of frame values `frames` by φ:
/// `y_{n+1} = y_n·[(y0/(y_n⋆φ))⋆φ̃]`, started from the linear
/// interpolation `y0` of the frames.
pub fn richardson_lucy(
    frames: &[f64],
    phi: &Lowpass,
    grid: &DeconvGrid,
    iterations: usize,
) -> Result<DeconvolutionResult> {
    if frames.is_empty() {
        return Err(Error::InvalidSignal("no frames to deconvolve".into()));
    }
    if let Some(v) = frames.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
        return Err(Error::Precondition(format!("frames must be finite and ≥ 0, found {v}")));
    }
    if grid.left + grid.len > grid.padded {
        return Err(Error::InvalidParameter("signal span exceeds the padded grid".into()));
    }
    let span = interpolate_linear(frames, grid.step, grid.len);
    let y0 = pad_centered(&span, grid.padded, grid.left);
    // the periodized Gaussian is even, so φ̃ = φ
    let kernel = Lowpass::new(phi.duration).sample_periodized(grid.padded, grid.rate);
    let mut y = y0.clone();
    let mut residual_history = Vec::with_capacity(iterations + 1);
    let mut min_relative = Vec::with_capacity(iterations);
    let peak0 = y0.iter().cloned().fold(0.0, f64::max);
    for _ in 0..iterations {
        if peak0 == 0.0 {
            residual_history.push(0.0);
            min_relative.push(0.0);
            continue;
        }
        let c = convolve(&y, &kernel);
        residual_history.push(span_residual(&c, &y0, grid));
        let floor = DIVISION_FLOOR * c.iter().cloned().fold(0.0, f64::max);
        let ratio: Vec<f64> = y0.iter().zip(&c).map(|(a, b)| if *a == 0.0 { 0.0 } else { a / b.max(floor) }).collect();
        let corr = convolve(&ratio, &kernel);
        for (v, r) in y.iter_mut().zip(&corr) {
            *v *= r;
        }
        let max = y.iter().cloned().fold(0.0, f64::max);
        let min = y.iter().cloned().fold(f64::INFINITY, f64::min);
        min_relative.push(if max > 0.0 { min / max } else { 0.0 });
        debug_assert!(min >= -1e-9 * max, "iterate lost positivity: {min} vs {max}");
        for v in y.iter_mut() {
            *v = v.max(0.0);
        }
    }
    let residual = span_residual(&convolve(&y, &kernel), &y0, grid);
    residual_history.push(residual);
    let estimate = RealSignal::new(y[grid.left..grid.left + grid.len].to_vec(), grid.rate)?;
    Ok(DeconvolutionResult { estimate, padded: y, iterations, residual, residual_history, min_relative })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GriffinLimOptions {
    pub iterations: usize,
    pub seed: u64,
    /// Starting point; Gaussian noise at the targets' RMS when absent.
    #[serde(skip)]
    pub init: Option<Vec<f64>>,
}

impl Default for GriffinLimOptions {
    fn default() -> Self {
        Self { iterations: DEFAULT_ITERATIONS, seed: 0, init: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseRecoveryResult {
    pub signal: RealSignal,
    /// `‖|x̃⋆ψ_λ| − targets‖/‖targets‖` of the returned signal.
    pub modulus_error: f64,
    pub initial_error: f64,
    /// Modulus error of every iterate, initial one first.
    pub history: Vec<f64>,
    pub iterations: usize,
}

/// `(x⋆ψ)` for one sampled filter on the full grid.
fn filtered(spec: &[Complex64], f: &SampledFilter) -> Vec<Complex64> {
    let mut buf = vec![Complex64::new(0.0, 0.0); spec.len()];
    for (k, v) in f.iter() {
        buf[k] = spec[k] * v;
    }
    ifft_in_place(&mut buf);
    buf
}

fn modulus_error(moduli: &[Vec<f64>], targets: &[Vec<f64>]) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for (m, t) in moduli.iter().zip(targets) {
        for (a, b) in m.iter().zip(t) {
            num += (a - b).powi(2);
            den += b * b;
        }
    }
    if den > 0.0 {
        (num / den).sqrt()
    } else {
        num.sqrt()
    }
}

/// Alternating projections: keep the phase of `x̃⋆ψ_λ`, replace its
/// modulus by the target, and go back through the dual frame together
/// with the known low-pass part. All arrays live on the grid of `duals`.
pub fn griffin_lim(
    targets: &[Vec<f64>],
    lowpass: &[f64],
    duals: &DualBank,
    options: &GriffinLimOptions,
) -> Result<PhaseRecoveryResult> {
    let n = duals.len;
    if targets.len() != duals.psi.len() {
        return Err(Error::ConfigMismatch(format!("{} targets for {} wavelets", targets.len(), duals.psi.len())));
    }
    if lowpass.len() != n || targets.iter().any(|t| t.len() != n) {
        return Err(Error::ConfigMismatch(format!("targets must have {n} samples")));
    }
    if targets.iter().flatten().any(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(Error::Precondition("target moduli must be finite and ≥ 0".into()));
    }
    let mut x = match &options.init {
        Some(v) if v.len() == n => v.clone(),
        Some(v) => return Err(Error::ConfigMismatch(format!("initial guess has {} samples, not {n}", v.len()))),
        None => {
            let energy =
                lowpass.iter().map(|v| v * v).sum::<f64>() + 0.5 * targets.iter().flatten().map(|v| v * v).sum::<f64>();
            let rms = (energy / n as f64).sqrt();
            let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
            (0..n).map(|_| rms * Distribution::<f64>::sample(&StandardNormal, &mut rng)).collect::<Vec<f64>>()
        }
    };
    let mut low_part = real_spectrum(lowpass);
    for (v, d) in low_part.iter_mut().zip(&duals.phi_dual) {
        *v *= d;
    }

    let mut history = Vec::with_capacity(options.iterations + 1);
    for it in 0..=options.iterations {
        let spec = real_spectrum(&x);
        let coeffs: Vec<Vec<Complex64>> = duals.psi.par_iter().map(|f| filtered(&spec, f)).collect();
        let moduli: Vec<Vec<f64>> = coeffs.iter().map(|c| c.iter().map(|v| v.norm()).collect()).collect();
        history.push(modulus_error(&moduli, targets));
        if it == options.iterations {
            break;
        }
        let contributions: Vec<Vec<(usize, Complex64)>> = coeffs
            .into_par_iter()
            .zip(moduli.par_iter())
            .zip(targets.par_iter())
            .enumerate()
            .map(|(i, ((c, m), t))| {
                let floor = DIVISION_FLOOR * m.iter().cloned().fold(0.0, f64::max);
                let mut z: Vec<Complex64> = c
                    .iter()
                    .zip(m)
                    .zip(t)
                    .map(|((v, a), b)| if *a == 0.0 { Complex64::new(0.0, 0.0) } else { v * (b / a.max(floor)) })
                    .collect();
                fft_in_place(&mut z);
                duals.psi[i].iter().map(|(k, _)| (k, z[k] * duals.psi_dual[i][k])).collect()
            })
            .collect();
        let mut acc = low_part.clone();
        for (k, v) in contributions.into_iter().flatten() {
            acc[k] += v;
        }
        ifft_in_place(&mut acc);
        x = acc.iter().map(|v| v.re).collect();
    }
    let modulus_error = *history.last().expect("at least one entry");
    Ok(PhaseRecoveryResult {
        signal: RealSignal::new(x, duals.rate)?,
        modulus_error,
        initial_error: history[0],
        history,
        iterations: options.iterations,
    })
}

/// Duals on a possibly decimated grid. Bins no filter covers (above the
/// last wavelet that fits under this grid's Nyquist) get zero duals.
fn grid_duals(bank: &FilterBank, len: usize, rate: f64, wavelets: &[usize]) -> Result<DualBank> {
    let phi = bank.lowpass().sample(len, rate);
    let psi = wavelets.iter().map(|&i| bank.wavelets()[i].sample(len, rate)).collect();
    let mut d = DualBank::from_sampled(phi, psi, rate)?;
    let threshold = 0.5 * (1.0 - bank.alpha());
    for k in 0..len {
        if d.lp[k] < threshold {
            d.phi_dual[k] = 0.0;
            for dual in d.psi_dual.iter_mut() {
                dual[k] = 0.0;
            }
        }
    }
    Ok(d)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InversionOptions {
    pub deconvolution_iterations: usize,
    pub phase_iterations: usize,
    pub seed: u64,
}

impl Default for InversionOptions {
    fn default() -> Self {
        Self {
            deconvolution_iterations: DEFAULT_DECONVOLUTION_ITERATIONS,
            phase_iterations: DEFAULT_ITERATIONS,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Reconstruction {
    pub signal: RealSignal,
    pub order: usize,
    /// Whether every Richardson-Lucy iterate stayed nonnegative.
    pub positivity_held: bool,
    /// Initial and final modulus error of the last |W_1| inversion.
    pub first_layer_errors: (f64, f64),
    /// Worst final-over-initial modulus error ratio among the |W_2| inversions.
    pub second_layer_worst: Option<f64>,
}

/// Moves values on a grid of `from` samples to `to` samples by spectral
/// interpolation and clears the negative overshoot.
fn upsample_modulus(values: &[f64], to: usize) -> Vec<f64> {
    let mut s = resample_spectrum(&real_spectrum(values), to);
    ifft_in_place(&mut s);
    s.iter().map(|v| v.re.max(0.0)).collect()
}

fn frames_on_grid(frames: &[f64], grid: &DeconvGrid) -> Vec<f64> {
    pad_centered(&interpolate_linear(frames, grid.step, grid.len), grid.padded, grid.left)
}

/// Estimated first-layer envelopes |x⋆ψ_λ1| on the full padded grid,
/// recovered from the coefficients of order `order`.
#[derive(Debug, Clone, PartialEq)]
pub struct FirstLayerEstimate {
    pub envelopes: Vec<Vec<f64>>,
    pub grid: DeconvGrid,
    pub positivity_held: bool,
    pub second_layer_worst: Option<f64>,
}

/// Recovers |x⋆ψ_λ1| for every first-order wavelet: by deconvolving S_1
/// (order 1) or by phase recovery from deconvolved S_2 (order 2).
pub fn estimate_first_layer(
    st: &ScatteringTransform,
    banks: &[FilterBank],
    order: usize,
    options: &InversionOptions,
) -> Result<FirstLayerEstimate> {
    if !(1..=2).contains(&order) {
        return Err(Error::InvalidParameter(format!("inversion order {order} must be 1 or 2")));
    }
    if st.config.max_order < order {
        return Err(Error::InvalidParameter(format!(
            "transform of order {} cannot be inverted at order {order}",
            st.config.max_order
        )));
    }
    if banks.len() < order {
        return Err(Error::InvalidParameter(format!("{order} filter banks needed, {} given", banks.len())));
    }
    let full = DeconvGrid::for_transform(st, 1);
    let phi = banks[0].lowpass();
    let rl = |path: &ScatteringPath| -> Result<(DeconvolutionResult, usize)> {
        let i = st.index_of(path).ok_or_else(|| Error::ConfigMismatch(format!("missing path {:?}", path.indices)))?;
        let f = st.grid_factors[i];
        let r = richardson_lucy(
            &st.coefficients[i],
            phi,
            &DeconvGrid::for_transform(st, f),
            options.deconvolution_iterations,
        )?;
        Ok((r, f))
    };

    let bank1 = &banks[0];
    let mut positivity = true;
    let mut second_worst: Option<f64> = None;
    let first_targets: Vec<Vec<f64>> = if order == 1 {
        let results = (0..bank1.len())
            .into_par_iter()
            .map(|j| rl(&ScatteringPath::root().child(j, bank1.wavelets()[j].center)))
            .collect::<Result<Vec<_>>>()?;
        results
            .into_iter()
            .map(|(r, _)| {
                positivity &= r.stayed_positive();
                upsample_modulus(&r.padded, full.padded)
            })
            .collect()
    } else {
        let bank2 = &banks[1];
        let per_first = (0..bank1.len())
            .into_par_iter()
            .map(|j| -> Result<(Vec<f64>, bool, Option<f64>)> {
                let parent = ScatteringPath::root().child(j, bank1.wavelets()[j].center);
                let pi =
                    st.index_of(&parent).ok_or_else(|| Error::ConfigMismatch("missing first-order path".into()))?;
                let f1 = st.grid_factors[pi];
                let g1 = DeconvGrid::for_transform(st, f1);
                let nyquist = std::f64::consts::PI * g1.rate;
                let ws: Vec<usize> = (0..bank2.len()).filter(|&k| bank2.wavelets()[k].center < nyquist).collect();
                // Start phase recovery from the first-order deconvolution so
                // the second order only has to add the detail it carries.
                let (start, _) = rl(&parent)?;
                let mut ok = start.stayed_positive();
                let targets = ws
                    .iter()
                    .map(|&k| {
                        let child = parent.child(k, bank2.wavelets()[k].center);
                        if st.index_of(&child).is_none() {
                            return Ok(vec![0.0; g1.padded]);
                        }
                        let (r, _) = rl(&child)?;
                        ok &= r.stayed_positive();
                        Ok(upsample_modulus(&r.padded, g1.padded))
                    })
                    .collect::<Result<Vec<_>>>()?;
                let low = frames_on_grid(&st.coefficients[pi], &g1);
                if targets.iter().flatten().all(|&v| v == 0.0) && low.iter().all(|&v| v == 0.0) {
                    return Ok((vec![0.0; full.padded], ok, None));
                }
                let duals = grid_duals(bank2, g1.padded, g1.rate, &ws)?;
                let gl = griffin_lim(
                    &targets,
                    &low,
                    &duals,
                    &GriffinLimOptions {
                        iterations: options.phase_iterations,
                        seed: options.seed.wrapping_add(1 + j as u64),
                        init: Some(start.padded),
                    },
                )?;
                let ratio = if gl.initial_error > 0.0 { gl.modulus_error / gl.initial_error } else { 0.0 };
                Ok((upsample_modulus(gl.signal.samples(), full.padded), ok, Some(ratio)))
            })
            .collect::<Result<Vec<_>>>()?;
        per_first
            .into_iter()
            .map(|(u, ok, ratio)| {
                positivity &= ok;
                if let Some(r) = ratio {
                    second_worst = Some(second_worst.map_or(r, |w: f64| w.max(r)));
                }
                u
            })
            .collect()
    };

    Ok(FirstLayerEstimate {
        envelopes: first_targets,
        grid: full,
        positivity_held: positivity,
        second_layer_worst: second_worst,
    })
}

/// Inverts a transform of order 1 or 2 back to a signal. `banks[m]` must
/// be the bank of order `m + 1` the transform was computed with.
pub fn inverse_scattering(
    st: &ScatteringTransform,
    banks: &[FilterBank],
    order: usize,
    options: &InversionOptions,
) -> Result<Reconstruction> {
    let est = estimate_first_layer(st, banks, order, options)?;
    let c = &st.config;
    let full = &est.grid;
    let bank1 = &banks[0];
    let low = frames_on_grid(&st.coefficients[0], full);
    let all: Vec<usize> = (0..bank1.len()).collect();
    let duals = grid_duals(bank1, full.padded, c.rate, &all)?;
    let gl = griffin_lim(
        &est.envelopes,
        &low,
        &duals,
        &GriffinLimOptions { iterations: options.phase_iterations, seed: options.seed, init: None },
    )?;
    let signal = RealSignal::new(gl.signal.samples()[full.left..full.left + full.len].to_vec(), c.rate)?;
    Ok(Reconstruction {
        signal,
        order,
        positivity_held: est.positivity_held,
        first_layer_errors: (gl.initial_error, gl.modulus_error),
        second_layer_worst: est.second_layer_worst,
    })
}

/// `‖|Wy| − |Wx|‖ / ‖|Wx|‖` over the wavelet envelopes of `bank`, each
/// sample weighted by its decimation factor.
pub fn scalogram_error(x: &RealSignal, y: &RealSignal, bank: &FilterBank) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::ConfigMismatch("signals differ in length".into()));
    }
    let a = wavelet_modulus(x, bank)?;
    let b = wavelet_modulus(y, bank)?;
    let mut num = 0.0;
    let mut den = 0.0;
    for ((_, u), (_, v)) in a.envelopes.iter().zip(&b.envelopes) {
        let w = x.rate() / u.rate();
        num += w * u.samples().iter().zip(v.samples()).map(|(p, q)| (p - q).powi(2)).sum::<f64>();
        den += w * u.energy();
    }
    if den == 0.0 {
        return Ok(if num == 0.0 { 0.0 } else { f64::INFINITY });
    }
    Ok((num / den).sqrt())
}

/// Center (rad/s) of the wavelet whose envelope carries the most energy.
pub fn dominant_ridge(x: &RealSignal, bank: &FilterBank) -> Result<f64> {
    let m = wavelet_modulus(x, bank)?;
    m.envelopes
        .iter()
        .map(|(c, e)| (*c, x.rate() / e.rate() * e.energy()))
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(c, _)| c)
        .ok_or_else(|| Error::Degenerate("bank has no wavelets".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filterbank::build_morlet_bank;

    fn grid(len: usize, rate: f64, step: f64) -> DeconvGrid {
        let padded = (len * 2).next_power_of_two();
        DeconvGrid { rate, len, padded, left: (padded - len) / 2, step }
    }

    #[test]
    fn constant_frames_are_a_fixed_point() {
        let phi = Lowpass::new(0.05);
        let r = richardson_lucy(&[2.0; 20], &phi, &grid(1000, 1000.0, 50.0), 10).unwrap();
        assert!(r.estimate.samples().iter().all(|v| (v - 2.0).abs() < 1e-9));
        assert!(r.stayed_positive());
    }

    #[test]
    fn zero_frames_stay_zero() {
        let r = richardson_lucy(&[0.0; 8], &Lowpass::new(0.05), &grid(400, 1000.0, 50.0), 5).unwrap();
        assert!(r.padded.iter().all(|&v| v == 0.0));
        assert!(richardson_lucy(&[1.0, -1.0], &Lowpass::new(0.05), &grid(400, 1000.0, 50.0), 5).is_err());
    }

    #[test]
    fn residual_decreases() {
        let rate = 1000.0;
        let g = grid(2000, rate, 1.0);
        let u: Vec<f64> = (0..g.padded).map(|i| 1.0 + (i as f64 * 0.02).sin().powi(4)).collect();
        let phi = Lowpass::new(0.03);
        let smooth = convolve(&u, &phi.sample_periodized(g.padded, rate));
        let frames = &smooth[g.left..g.left + g.len];
        let r = richardson_lucy(frames, &phi, &g, 10).unwrap();
        for w in r.residual_history.windows(2) {
            assert!(w[1] <= w[0] + 1e-15, "{:?}", r.residual_history);
        }
    }

    #[test]
    fn phase_recovery_fixed_point() {
        let rate = 4000.0;
        let bank = build_morlet_bank(4, 0.05, rate, 1024).unwrap();
        let duals = DualBank::on_grid(&bank, 1024, rate).unwrap();
        let x: Vec<f64> = crate::synth::white_noise(1024, 3);
        let spec = real_spectrum(&x);
        let targets: Vec<Vec<f64>> =
            duals.psi.iter().map(|f| filtered(&spec, f).iter().map(|v| v.norm()).collect()).collect();
        let mut low = spec.clone();
        for (v, p) in low.iter_mut().zip(&duals.phi) {
            *v *= p;
        }
        ifft_in_place(&mut low);
        let low: Vec<f64> = low.iter().map(|v| v.re).collect();
        let opts = GriffinLimOptions { iterations: 3, seed: 0, init: Some(x.clone()) };
        let r = griffin_lim(&targets, &low, &duals, &opts).unwrap();
        assert!(r.modulus_error < 1e-9, "{}", r.modulus_error);
        for (a, b) in r.signal.samples().iter().zip(&x) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn zero_targets_give_zero() {
        let rate = 4000.0;
        let bank = build_morlet_bank(2, 0.05, rate, 512).unwrap();
        let duals = DualBank::on_grid(&bank, 512, rate).unwrap();
        let targets = vec![vec![0.0; 512]; duals.psi.len()];
        let opts = GriffinLimOptions { iterations: 1, seed: 9, init: Some(crate::synth::white_noise(512, 1)) };
        let r = griffin_lim(&targets, &[0.0; 512], &duals, &opts).unwrap();
        assert!(r.signal.samples().iter().all(|v| v.abs() < 1e-12));
    }
}
