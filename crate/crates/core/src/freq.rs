//! Scattering along log-frequency.
//!
//! For every frame, the log normalized coefficients sharing a second-order
//! center (and the first-order coefficients) form a profile `z(γ)` over the
//! ordinals of the first-order centers. A Q = 1 Morlet bank along γ
//! turns these profiles into a zero-order average and first-order moduli,
//! which move little when the sound is transposed by a fraction of the
//! averaging width.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filterbank::{build_morlet_bank, BankDescriptor, FilterBank};
use crate::normalization::LogScattering;
use crate::signal::{fft_in_place, ifft_in_place, pad_samples, PadMode};

/// Shortest profile the bank is applied to.
pub const MIN_PROFILE: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FreqMode {
    /// Unaveraged moduli `|z⋆ψ_q|`.
    U,
    /// Moduli averaged along γ, `|z⋆ψ_q|⋆φ`.
    S,
}

/// Morlet bank along γ. Profiles are sampled `samples_per_octave` times per
/// octave; `width` is the FWHM of the averaging window in octaves.
pub fn build_quefrency_bank(profile_len: usize, samples_per_octave: u32, width: f64) -> Result<FilterBank> {
    if profile_len < MIN_PROFILE {
        return Err(Error::InvalidParameter(format!("profile of {profile_len} samples is shorter than {MIN_PROFILE}")));
    }
    let rate = samples_per_octave as f64;
    let size = profile_len.max((width * rate).ceil() as usize).next_power_of_two();
    build_morlet_bank(1, width, rate, size)
}

/// Which coefficients a profile is made of.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Slot {
    FirstOrder,
    /// Second-order coefficients sharing the center with this ordinal.
    SecondOrder {
        index: usize,
        center_hz: f64,
    },
}

impl Slot {
    pub fn name(&self) -> String {
        match self {
            Slot::FirstOrder => "s1".to_string(),
            Slot::SecondOrder { center_hz, .. } => format!("s2@{center_hz:.3}Hz"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FreqSlot {
    pub slot: Slot,
    /// First-order centers (Hz) along the profile, ascending.
    pub centers_hz: Vec<f64>,
    /// Path index (in the source transform) of each profile sample.
    pub paths: Vec<usize>,
    /// `z⋆φ` per frame over the profile.
    pub zero: Vec<Vec<f64>>,
    /// `first[t][q][γ]`.
    pub first: Vec<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FreqScattering {
    pub mode: FreqMode,
    pub frame_times: Vec<f64>,
    /// Quefrencies of the bank along γ, in cycles per octave.
    pub quefrencies: Vec<f64>,
    pub width: f64,
    pub slots: Vec<FreqSlot>,
    pub bank: BankDescriptor,
}

impl FreqScattering {
    /// Euclidean distance over all slots present in both.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        if self.mode != other.mode || self.frame_times.len() != other.frame_times.len() {
            return Err(Error::ConfigMismatch("frequency scatterings are not comparable".into()));
        }
        let mut acc = 0.0;
        for a in &self.slots {
            let Some(b) = other.slots.iter().find(|b| b.slot == a.slot) else {
                continue;
            };
            if a.centers_hz.len() != b.centers_hz.len() {
                return Err(Error::ConfigMismatch(format!("slot {} differs in length", a.slot.name())));
            }
            acc += sq_dist(a.zero.iter().flatten(), b.zero.iter().flatten());
            acc += sq_dist(a.first.iter().flatten().flatten(), b.first.iter().flatten().flatten());
        }
        Ok(acc.sqrt())
    }
}

fn sq_dist<'a>(a: impl Iterator<Item = &'a f64>, b: impl Iterator<Item = &'a f64>) -> f64 {
    a.zip(b).map(|(x, y)| (x - y).powi(2)).sum()
}

/// Profiles of `log` gathered per slot: `(slot, path indices, centers in Hz)`.
/// Profiles shorter than [`MIN_PROFILE`] are left out.
pub fn profiles(log: &LogScattering) -> Vec<(Slot, Vec<usize>, Vec<f64>)> {
    let mut out = Vec::new();
    let hz = |c: f64| c / (2.0 * PI);
    let first: Vec<usize> = log.order_range(1).collect();
    if first.len() >= MIN_PROFILE {
        let centers = first.iter().map(|&p| hz(log.paths[p].centers[0])).collect();
        out.push((Slot::FirstOrder, first, centers));
    }
    let mut by_lambda2: std::collections::BTreeMap<usize, (f64, Vec<usize>)> = Default::default();
    for p in log.order_range(2) {
        let path = &log.paths[p];
        by_lambda2.entry(path.indices[1]).or_insert((hz(path.centers[1]), Vec::new())).1.push(p);
    }
    for (index, (center_hz, mut ps)) in by_lambda2 {
        ps.sort_by(|&a, &b| log.paths[a].centers[0].total_cmp(&log.paths[b].centers[0]));
        if ps.len() >= MIN_PROFILE {
            let centers = ps.iter().map(|&p| hz(log.paths[p].centers[0])).collect();
            out.push((Slot::SecondOrder { index, center_hz }, ps, centers));
        }
    }
    out
}

fn padded_spectrum(z: &[f64], n: usize) -> Vec<Complex64> {
    let mut spec: Vec<Complex64> =
        pad_samples(z, n, PadMode::Reflect).into_iter().map(|v| Complex64::new(v, 0.0)).collect();
    fft_in_place(&mut spec);
    spec
}

fn apply(h: &[f64], s: &[Complex64], len: usize) -> Vec<Complex64> {
    let mut b: Vec<Complex64> = s.iter().zip(h).map(|(a, g)| a * g).collect();
    ifft_in_place(&mut b);
    b.truncate(len);
    b
}

/// `z⋆φ` along γ with reflected boundaries.
pub fn average_profile(z: &[f64], bank: &FilterBank) -> Vec<f64> {
    let n = bank.size();
    let phi = bank.lowpass().sample(n, bank.rate());
    apply(&phi, &padded_spectrum(z, n), z.len()).iter().map(|v| v.re).collect()
}

/// Returns `(z⋆φ, [|z⋆ψ_q|])` over one profile; in mode S the moduli are
/// also smoothed by φ.
pub fn scatter_profile(z: &[f64], bank: &FilterBank, mode: FreqMode) -> (Vec<f64>, Vec<Vec<f64>>) {
    let average = mode == FreqMode::S;
    let n = bank.size();
    let spec = padded_spectrum(z, n);
    let first = bank
        .wavelets()
        .iter()
        .map(|w| {
            let u: Vec<f64> =
                apply(&w.sample(n, bank.rate()).to_dense(), &spec, z.len()).iter().map(|v| v.norm()).collect();
            if average {
                average_profile(&u, bank)
            } else {
                u
            }
        })
        .collect();
    (average_profile(z, bank), first)
}

/// Scatters every profile of `log` along γ with a window `width` octaves
/// wide. `first` is the first-order bank `log` was computed with; profiles
/// are sampled `Q` times per octave in its constant-Q range.
pub fn freq_scatter(log: &LogScattering, first: &FilterBank, mode: FreqMode, width: f64) -> Result<FreqScattering> {
    let profs = profiles(log);
    check_grid(&profs, first)?;
    let longest = profs.iter().map(|p| p.1.len()).max().unwrap_or(0);
    let bank = build_quefrency_bank(longest.max(MIN_PROFILE), first.q(), width)?;
    let frames = log.frame_times.len();
    let slots = profs
        .into_par_iter()
        .map(|(slot, paths, centers_hz)| {
            let per_frame: Vec<(Vec<f64>, Vec<Vec<f64>>)> = (0..frames)
                .map(|t| {
                    let z: Vec<f64> = paths.iter().map(|&p| log.coefficients[p][t]).collect();
                    scatter_profile(&z, &bank, mode)
                })
                .collect();
            let (zero, first) = per_frame.into_iter().unzip();
            FreqSlot { slot, centers_hz, paths, zero, first }
        })
        .collect();
    Ok(FreqScattering {
        mode,
        frame_times: log.frame_times.clone(),
        quefrencies: bank.centers().iter().map(|c| c / (2.0 * PI)).collect(),
        width,
        slots,
        bank: bank.descriptor(),
    })
}

/// Profiles must increase along γ, and their constant-Q part must be
/// spaced by exactly `1/Q` octave.
fn check_grid(profs: &[(Slot, Vec<usize>, Vec<f64>)], first: &FilterBank) -> Result<()> {
    let step = 1.0 / first.q() as f64;
    let is_cq =
        |hz: f64| first.wavelets().iter().any(|w| w.constant_q && (w.center / (2.0 * PI) - hz).abs() <= 1e-9 * hz);
    for (slot, _, centers) in profs {
        for w in centers.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::IrregularGrid(format!("{}: centers not increasing", slot.name())));
            }
            if is_cq(w[0]) && is_cq(w[1]) {
                let d = (w[1] / w[0]).log2();
                if (d - step).abs() > 1e-6 * step {
                    return Err(Error::IrregularGrid(format!(
                        "{}: gap of {d:.4} octaves where 1/{} is expected",
                        slot.name(),
                        first.q()
                    )));
                }
            }
        }
    }
    Ok(())
}

/// Euclidean distance between the raw profiles of two log scatterings,
/// over the same slots [`freq_scatter`] would use.
pub fn profile_distance(a: &LogScattering, b: &LogScattering) -> Result<f64> {
    if a.paths != b.paths || a.frame_times.len() != b.frame_times.len() {
        return Err(Error::ConfigMismatch("log scatterings are not comparable".into()));
    }
    let mut acc = 0.0;
    for (_, paths, _) in profiles(a) {
        for p in paths {
            acc += sq_dist(a.coefficients[p].iter(), b.coefficients[p].iter());
        }
    }
    Ok(acc.sqrt())
}
