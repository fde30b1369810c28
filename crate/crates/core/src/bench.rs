//! Timing and counting harness for the cascade.
//!
//! Coefficient counts and volumes are measured per frame of duration T,
//! where `N = T·rate` samples. Timings are taken over whole clips of
//! increasing length and fitted against `N log N`.

use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scattering::{scatter, ScatterConfig, ScatteringTransform};
use crate::signal::RealSignal;
use crate::synth::white_noise;

/// `(Q1·log2 N, Q1·Q2·(log2 N)²/2)` for frames of `N = T·rate` samples.
pub fn expected_counts(q1: u32, q2: u32, duration: f64, rate: f64) -> (f64, f64) {
    let l = (duration * rate).log2();
    (q1 as f64 * l, q1 as f64 * q2 as f64 * l * l / 2.0)
}

/// Wavelet-modulus samples per frame of duration T for each order, in
/// units of `N = T·rate`. Order 0 reports the input itself.
pub fn coefficient_volume(st: &ScatteringTransform) -> Vec<f64> {
    (0..=st.config.max_order).map(|m| st.order_range(m).map(|p| 1.0 / st.grid_factors[p] as f64).sum()).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchOptions {
    pub repetitions: usize,
    pub warmup: usize,
    /// Run the cascade on one thread so timings reflect operation counts.
    pub single_thread: bool,
    /// Largest accepted `(max − min)/median` over repetitions.
    pub max_spread: f64,
    pub rate: f64,
    pub seed: u64,
}

impl Default for BenchOptions {
    fn default() -> Self {
        Self { repetitions: 5, warmup: 1, single_thread: true, max_spread: 0.5, rate: 22050.0, seed: 1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub len: usize,
    /// Median seconds to build the banks.
    pub bank_seconds: f64,
    /// Median seconds for the cascade.
    pub scatter_seconds: f64,
    pub spread: f64,
    pub path_counts: Vec<usize>,
    /// Envelope samples per frame for each order, in units of `T·rate`.
    pub volume: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub config: ScatterConfig,
    pub options: BenchOptions,
    pub rows: Vec<BenchRow>,
    pub expected_first: f64,
    pub expected_second: f64,
    /// Slope of `log(time / log2 len)` against `log len`.
    pub exponent: f64,
    /// RMS residual of that fit in natural-log units.
    pub fit_residual: f64,
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Least-squares line `y = a + b·x`; returns `(b, rms residual)`.
pub fn fit_line(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let b = sxy / sxx;
    let a = my - b * mx;
    let rms = (x.iter().zip(y).map(|(p, q)| (q - a - b * p).powi(2)).sum::<f64>() / n).sqrt();
    (b, rms)
}

fn time_row(config: &ScatterConfig, len: usize, opts: &BenchOptions) -> Result<BenchRow> {
    let x = RealSignal::new(white_noise(len, opts.seed), opts.rate)?;
    let mut bank_times = Vec::new();
    let mut scatter_times = Vec::new();
    let mut last = None;
    for rep in 0..opts.warmup + opts.repetitions {
        let t0 = Instant::now();
        let banks = config.banks(opts.rate, len)?;
        let t1 = Instant::now();
        let (st, _) = scatter(&x, &banks, config.max_order, config.options)?;
        let t2 = Instant::now();
        if rep >= opts.warmup {
            bank_times.push((t1 - t0).as_secs_f64());
            scatter_times.push((t2 - t1).as_secs_f64());
        }
        last = Some(st);
    }
    let st = last.expect("at least one run");
    let scatter_seconds = median(&mut scatter_times.clone());
    let hi = scatter_times.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lo = scatter_times.iter().cloned().fold(f64::INFINITY, f64::min);
    let spread = (hi - lo) / scatter_seconds;
    if spread > opts.max_spread {
        return Err(Error::TimingVariance { spread, threshold: opts.max_spread });
    }
    Ok(BenchRow {
        len,
        bank_seconds: median(&mut bank_times),
        scatter_seconds,
        spread,
        path_counts: st.path_counts(),
        volume: coefficient_volume(&st),
    })
}

/// Times the cascade at each length and fits the growth exponent.
pub fn run_scaling(config: &ScatterConfig, lengths: &[usize], opts: &BenchOptions) -> Result<BenchReport> {
    if lengths.len() < 3 {
        return Err(Error::InvalidParameter("at least three lengths are needed".into()));
    }
    let lo = *lengths.iter().min().expect("nonempty");
    let hi = *lengths.iter().max().expect("nonempty");
    if hi < 8 * lo {
        return Err(Error::InvalidParameter(format!("lengths span {}×, at least 8× is needed", hi / lo.max(1))));
    }
    if opts.repetitions == 0 {
        return Err(Error::InvalidParameter("repetitions must be positive".into()));
    }
    let rows = if opts.single_thread {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .map_err(|e| Error::InvalidParameter(e.to_string()))?;
        pool.install(|| lengths.iter().map(|&n| time_row(config, n, opts)).collect::<Result<Vec<_>>>())?
    } else {
        lengths.iter().map(|&n| time_row(config, n, opts)).collect::<Result<Vec<_>>>()?
    };
    let x: Vec<f64> = rows.iter().map(|r| (r.len as f64).ln()).collect();
    let y: Vec<f64> = rows.iter().map(|r| (r.scatter_seconds / (r.len as f64).log2()).ln()).collect();
    let (exponent, fit_residual) = fit_line(&x, &y);
    let (expected_first, expected_second) =
        expected_counts(config.q_for_order(1), config.q_for_order(2), config.duration, opts.rate);
    Ok(BenchReport {
        config: config.clone(),
        options: opts.clone(),
        rows,
        expected_first,
        expected_second,
        exponent,
        fit_residual,
    })
}

impl BenchReport {
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = csv::Writer::from_path(path).map_err(|e| Error::Format(e.to_string()))?;
        let orders = self.rows.first().map_or(0, |r| r.path_counts.len());
        let mut header = vec!["len".to_string(), "bank_s".into(), "scatter_s".into(), "spread".into()];
        header.extend((0..orders).map(|m| format!("paths_{m}")));
        header.extend((0..orders).map(|m| format!("volume_{m}")));
        w.write_record(&header).map_err(|e| Error::Format(e.to_string()))?;
        for r in &self.rows {
            let mut rec = vec![
                r.len.to_string(),
                r.bank_seconds.to_string(),
                r.scatter_seconds.to_string(),
                r.spread.to_string(),
            ];
            rec.extend(r.path_counts.iter().map(|c| c.to_string()));
            rec.extend(r.volume.iter().map(|v| v.to_string()));
            w.write_record(&rec).map_err(|e| Error::Format(e.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }
}
