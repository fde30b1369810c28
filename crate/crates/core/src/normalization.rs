//! Renormalized scattering and its logarithm.
//!
//! First-order coefficients are divided by the local amplitude `|x|⋆φ`,
//! higher orders by the coefficient of their parent path. The result no
//! longer depends on the loudness of the input and, to first order, on the
//! filtering it went through.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filterbank::Lowpass;
use crate::scattering::{padding_layout, ScatteringPath, ScatteringTransform};
use crate::signal::{ifft_in_place, pad_centered, real_spectrum, RealSignal};

/// How the silence threshold added to every denominator is chosen.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EpsilonPolicy {
    /// `1e-6` times the median frame value of `|x|⋆φ`.
    #[default]
    Auto,
    Fixed(f64),
}

/// Relative size of the automatic silence threshold.
pub const AUTO_EPSILON: f64 = 1e-6;
/// Relative size of the automatic log floor.
pub const AUTO_FLOOR: f64 = 1e-6;
/// Log floor used when an order is identically zero.
pub const FALLBACK_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizedScattering {
    pub paths: Vec<ScatteringPath>,
    pub frame_times: Vec<f64>,
    /// Same layout as the source transform. The order-0 row holds
    /// `|S_0|` over the local amplitude.
    pub coefficients: Vec<Vec<f64>>,
    pub epsilon: f64,
    /// Duration of the low-pass used for `|x|⋆φ`, in seconds.
    pub norm_window: f64,
    /// `|x|⋆φ` at the frame instants.
    pub amplitude: Vec<f64>,
}

impl NormalizedScattering {
    pub fn order_range(&self, m: usize) -> std::ops::Range<usize> {
        let start = self.paths.partition_point(|p| p.order() < m);
        let end = self.paths.partition_point(|p| p.order() <= m);
        start..end
    }

    pub fn find(&self, indices: &[usize]) -> Option<usize> {
        self.paths.iter().position(|p| p.indices == indices)
    }
}

/// `(|x|⋆φ)(k·hop)` with a unit-mass Gaussian window of FWHM `window`.
pub fn local_amplitude(x: &RealSignal, window: f64, hop: usize, frames: usize) -> Vec<f64> {
    let (padded, left) = padding_layout(x.len(), window, x.rate());
    let ax: Vec<f64> = x.samples().iter().map(|v| v.abs()).collect();
    let spec = real_spectrum(&pad_centered(&ax, padded, left));
    let phi = Lowpass::new(window).sample_periodized(padded, x.rate());
    let mut y: Vec<Complex64> = spec.iter().zip(&phi).map(|(s, p)| s * p).collect();
    ifft_in_place(&mut y);
    (0..frames).map(|k| y[(left + k * hop).min(padded - 1)].re.max(0.0)).collect()
}

fn median(values: &mut [f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

fn ratio(num: f64, den: f64, epsilon: f64) -> f64 {
    let d = den + epsilon;
    if d > 0.0 {
        (num / d).max(0.0)
    } else {
        0.0
    }
}

/// Divides every coefficient by its parent-order coefficient (order 1 by
/// `|x|⋆φ` over `norm_window`, which defaults to T).
pub fn normalize(
    st: &ScatteringTransform,
    x: &RealSignal,
    epsilon: EpsilonPolicy,
    norm_window: Option<f64>,
) -> Result<NormalizedScattering> {
    if x.len() != st.config.len || (x.rate() - st.config.rate).abs() > 1e-9 * x.rate() {
        return Err(Error::ConfigMismatch("signal does not match the transform".into()));
    }
    let window = norm_window.unwrap_or(st.config.duration);
    if !(window.is_finite() && window > 0.0) {
        return Err(Error::InvalidParameter("normalization window must be positive".into()));
    }
    let frames = st.frame_count();
    let amplitude = local_amplitude(x, window, st.config.hop, frames);
    let epsilon = match epsilon {
        EpsilonPolicy::Auto => AUTO_EPSILON * median(&mut amplitude.clone()),
        EpsilonPolicy::Fixed(e) if e >= 0.0 && e.is_finite() => e,
        EpsilonPolicy::Fixed(e) => return Err(Error::InvalidParameter(format!("epsilon {e} must be ≥ 0"))),
    };
    let coefficients = st
        .paths
        .iter()
        .zip(&st.coefficients)
        .map(|(path, num)| {
            let den: &[f64] = match path.order() {
                0 | 1 => &amplitude,
                _ => {
                    let parent = path.parent().expect("order ≥ 2 has a parent");
                    st.coefficient(&parent)
                        .ok_or_else(|| Error::ConfigMismatch(format!("missing parent of {:?}", path.indices)))?
                }
            };
            Ok(num.iter().zip(den).map(|(n, d)| ratio(n.abs(), *d, epsilon)).collect())
        })
        .collect::<Result<Vec<Vec<f64>>>>()?;
    Ok(NormalizedScattering {
        paths: st.paths.clone(),
        frame_times: st.frame_times.clone(),
        coefficients,
        epsilon,
        norm_window: window,
        amplitude,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogScattering {
    pub paths: Vec<ScatteringPath>,
    pub frame_times: Vec<f64>,
    pub coefficients: Vec<Vec<f64>>,
    /// Floor added before the logarithm, per order.
    pub floors: Vec<f64>,
}

impl LogScattering {
    pub fn order_range(&self, m: usize) -> std::ops::Range<usize> {
        let start = self.paths.partition_point(|p| p.order() < m);
        let end = self.paths.partition_point(|p| p.order() <= m);
        start..end
    }
}

/// `log(S̃ + floor)`. Without an explicit floor each order uses `1e-6`
/// times its median value.
pub fn log_scattering(ns: &NormalizedScattering, floor: Option<f64>) -> Result<LogScattering> {
    let max_order = ns.paths.iter().map(|p| p.order()).max().unwrap_or(0);
    let floors = (0..=max_order)
        .map(|m| match floor {
            Some(f) if f > 0.0 && f.is_finite() => Ok(f),
            Some(f) => Err(Error::InvalidParameter(format!("log floor {f} must be positive"))),
            None => {
                let mut v: Vec<f64> = ns.order_range(m).flat_map(|p| ns.coefficients[p].iter().copied()).collect();
                let med = median(&mut v);
                Ok(if med > 0.0 { AUTO_FLOOR * med } else { FALLBACK_FLOOR })
            }
        })
        .collect::<Result<Vec<f64>>>()?;
    let coefficients = ns
        .paths
        .iter()
        .zip(&ns.coefficients)
        .map(|(p, c)| {
            let f = floors[p.order()];
            c.iter().map(|v| (v + f).ln()).collect()
        })
        .collect();
    Ok(LogScattering { paths: ns.paths.clone(), frame_times: ns.frame_times.clone(), coefficients, floors })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scattering::ScatterConfig;
    use crate::synth::speech_like;

    #[test]
    fn scale_invariance() {
        let x = speech_like(0.6, 8000.0, 3).unwrap();
        let cfg = ScatterConfig::new(0.064, 2);
        let a = normalize(&cfg.transform(&x).unwrap(), &x, EpsilonPolicy::Fixed(0.0), None).unwrap();
        let y = x.scaled(7.5).unwrap();
        let b = normalize(&cfg.transform(&y).unwrap(), &y, EpsilonPolicy::Fixed(0.0), None).unwrap();
        for (u, v) in a.coefficients.iter().flatten().zip(b.coefficients.iter().flatten()) {
            assert!((u - v).abs() <= 1e-9 * u.abs().max(1e-12), "{u} vs {v}");
        }
    }

    #[test]
    fn silence_is_zero() {
        let x = RealSignal::zeros(4000, 8000.0).unwrap();
        let st = ScatterConfig::new(0.064, 2).transform(&x).unwrap();
        let ns = normalize(&st, &x, EpsilonPolicy::Fixed(1e-3), None).unwrap();
        assert!(ns.coefficients.iter().flatten().all(|&v| v == 0.0));
        let ls = log_scattering(&ns, None).unwrap();
        let c = FALLBACK_FLOOR.ln();
        assert!(ls.coefficients.iter().flatten().all(|&v| v == c));
    }

    #[test]
    fn log_shift() {
        let x = speech_like(0.6, 8000.0, 4).unwrap();
        let st = ScatterConfig::new(0.064, 2).transform(&x).unwrap();
        let ns = normalize(&st, &x, EpsilonPolicy::Auto, None).unwrap();
        let mut scaled = ns.clone();
        for v in scaled.coefficients.iter_mut().flatten() {
            *v *= 3.0;
        }
        let a = log_scattering(&ns, Some(1e-300)).unwrap();
        let b = log_scattering(&scaled, Some(1e-300)).unwrap();
        for (u, v) in a.coefficients.iter().flatten().zip(b.coefficients.iter().flatten()) {
            if u.is_finite() && *u > -600.0 {
                assert!((v - u - 3f64.ln()).abs() < 1e-9);
            }
        }
    }
}
