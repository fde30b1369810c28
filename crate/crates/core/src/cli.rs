//! Command line front end.
//!
//! Every subcommand writes into one output directory (`--out-dir`, or the
//! `SCATTER_OUT_DIR` environment variable) and leaves a `manifest.json`
//! describing what was computed. Outputs depend only on the input, the
//! configuration and the seed.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::bench::{expected_counts, run_scaling, BenchOptions, BenchReport};
use crate::error::{Error, Result};
use crate::filterbank::{build_morlet_bank, littlewood_paley, BankDescriptor, FilterBank};
use crate::freq::{freq_scatter, FreqMode};
use crate::inversion::{inverse_scattering, scalogram_error, InversionOptions};
use crate::io::{read_wav, write_triplets, write_wav, FeatureFormat, FeatureTable};
use crate::normalization::{log_scattering, normalize, EpsilonPolicy};
use crate::scattering::{
    energy_decomposition, padding_layout, scatter, EnergyDecomposition, ScatterConfig, ScatterOptions,
};
use crate::signal::RealSignal;
use crate::synth;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser)]
#[command(name = "scattering", version, about = "Scattering features, inversion and synthetic checks for audio")]
pub struct Cli {
    /// Directory receiving every output file.
    #[arg(long, global = true, env = "SCATTER_OUT_DIR", default_value = "out")]
    pub out_dir: PathBuf,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Scattering features of a WAV file.
    Scatter(RunConfig),
    /// Reconstruct a WAV file from its scattering coefficients.
    Invert(InvertArgs),
    /// Render a synthetic sound and compare it with its prediction.
    Synth(SynthArgs),
    /// Build a filter bank and report its frame bounds.
    Bank(BankArgs),
    /// Time the cascade over increasing lengths.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum FreqOption {
    Off,
    U,
    S,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Args)]
pub struct RunConfig {
    pub input: PathBuf,
    /// Averaging duration T in milliseconds.
    #[arg(long = "t-ms", default_value_t = 190.0)]
    pub t_ms: f64,
    /// Deepest order M.
    #[arg(long, default_value_t = 2)]
    pub max_order: usize,
    /// Wavelets per octave, one value per order.
    #[arg(long, value_delimiter = ',', default_value = "8,1")]
    pub q: Vec<u32>,
    /// Divide each order by its parent.
    #[arg(long)]
    pub normalize: bool,
    /// Take the logarithm of the normalized coefficients.
    #[arg(long)]
    pub log: bool,
    #[arg(long, value_enum, default_value_t = FreqOption::Off)]
    pub freq_scatter: FreqOption,
    /// Width of the log-frequency averaging in octaves.
    #[arg(long, default_value_t = 2.0)]
    pub freq_width: f64,
    /// Duration of the first-order normalizing window; T when absent.
    #[arg(long)]
    pub norm_window_ms: Option<f64>,
    /// Fixed silence threshold; chosen from the clip when absent.
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long, value_enum, default_value_t = FeatureFormat::Csv)]
    pub format: FeatureFormat,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also reconstruct the clip from its coefficients.
    #[arg(long)]
    pub invert: bool,
    /// Also write (t, λ, value) triplets of the first order for plotting.
    #[arg(long)]
    pub plot_data: bool,
}

impl RunConfig {
    pub fn new(input: impl Into<PathBuf>) -> Self {
        Self {
            input: input.into(),
            t_ms: 190.0,
            max_order: 2,
            q: vec![8, 1],
            normalize: false,
            log: false,
            freq_scatter: FreqOption::Off,
            freq_width: 2.0,
            norm_window_ms: None,
            epsilon: None,
            format: FeatureFormat::Csv,
            seed: 0,
            invert: false,
            plot_data: false,
        }
    }

    /// Checks every invariant before any computation starts.
    pub fn validate(&self) -> Result<()> {
        if !(self.t_ms.is_finite() && self.t_ms > 0.0) {
            return Err(Error::InvalidParameter(format!("T = {} ms must be positive", self.t_ms)));
        }
        if self.max_order > 3 {
            return Err(Error::InvalidParameter(format!("max order {} exceeds 3", self.max_order)));
        }
        if self.q.is_empty() || self.q.contains(&0) {
            return Err(Error::InvalidParameter("every Q must be at least 1".into()));
        }
        if self.log && !self.normalize {
            return Err(Error::InvalidParameter("--log needs --normalize".into()));
        }
        if self.freq_scatter != FreqOption::Off && !self.log {
            return Err(Error::InvalidParameter("--freq-scatter needs --log".into()));
        }
        if (self.normalize || self.invert) && self.max_order == 0 {
            return Err(Error::InvalidParameter("normalization and inversion need order ≥ 1".into()));
        }
        if !(self.freq_width.is_finite() && self.freq_width > 0.0) {
            return Err(Error::InvalidParameter("freq width must be positive".into()));
        }
        if let Some(w) = self.norm_window_ms {
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::InvalidParameter("normalization window must be positive".into()));
            }
        }
        if let Some(e) = self.epsilon {
            if !(e.is_finite() && e >= 0.0) {
                return Err(Error::InvalidParameter("epsilon must be ≥ 0".into()));
            }
        }
        Ok(())
    }

    pub fn scatter_config(&self) -> ScatterConfig {
        ScatterConfig {
            q: self.q.clone(),
            duration: self.t_ms / 1e3,
            max_order: self.max_order,
            options: ScatterOptions { track_energy: true, ..Default::default() },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BankSummary {
    pub order: usize,
    pub q: u32,
    pub wavelets: usize,
    pub alpha: f64,
    pub lp_max: f64,
}

impl BankSummary {
    fn of(order: usize, b: &FilterBank) -> Self {
        Self { order, q: b.q(), wavelets: b.len(), alpha: b.alpha(), lp_max: b.lp_max() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InversionReport {
    pub order: usize,
    pub scalogram_error: f64,
    pub positivity_held: bool,
    pub first_layer_initial_error: f64,
    pub first_layer_final_error: f64,
    pub output: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub version: String,
    pub command: String,
    pub config: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rate_hz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub frames: Option<usize>,
    pub banks: Vec<BankSummary>,
    /// Paths per order.
    pub path_counts: Vec<usize>,
    /// `Q1·log2 N` and `Q1·Q2·(log2 N)²/2` with `N = T·rate`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected_counts: Option<(f64, f64)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub energy: Option<EnergyDecomposition>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inversion: Option<InversionReport>,
    pub outputs: Vec<String>,
}

impl Manifest {
    fn new(command: &str, config: &impl Serialize) -> Result<Self> {
        Ok(Self {
            version: VERSION.to_string(),
            command: command.to_string(),
            config: serde_json::to_value(config)?,
            rate_hz: None,
            samples: None,
            frames: None,
            banks: Vec::new(),
            path_counts: Vec::new(),
            expected_counts: None,
            energy: None,
            inversion: None,
            outputs: Vec::new(),
        })
    }

    fn finish(mut self, out_dir: &Path) -> Result<Self> {
        self.outputs.push("manifest.json".into());
        write_json(&self, &out_dir.join("manifest.json"))?;
        Ok(self)
    }
}

fn write_json(value: &impl Serialize, path: &Path) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

fn reconstruct(
    x: &RealSignal,
    cfg: &ScatterConfig,
    order: usize,
    seed: u64,
    out_dir: &Path,
) -> Result<InversionReport> {
    let cfg = ScatterConfig { max_order: order, options: ScatterOptions::default(), ..cfg.clone() };
    let banks = cfg.banks(x.rate(), x.len())?;
    let st = scatter(x, &banks, order, cfg.options)?.0;
    let r = inverse_scattering(&st, &banks, order, &InversionOptions { seed, ..Default::default() })?;
    let name = format!("reconstruction_m{order}.wav");
    write_wav(&r.signal, out_dir.join(&name))?;
    Ok(InversionReport {
        order,
        scalogram_error: scalogram_error(x, &r.signal, &banks[0])?,
        positivity_held: r.positivity_held,
        first_layer_initial_error: r.first_layer_errors.0,
        first_layer_final_error: r.first_layer_errors.1,
        output: name,
    })
}

/// Ingest, scatter, optionally normalize / log / frequency-scatter, export.
pub fn run(config: &RunConfig, out_dir: &Path) -> Result<Manifest> {
    config.validate()?;
    let x = read_wav(&config.input)?;
    std::fs::create_dir_all(out_dir)?;
    let cfg = config.scatter_config();
    let banks = cfg.banks(x.rate(), x.len())?;
    let (st, _) = scatter(&x, &banks, cfg.max_order, cfg.options)?;

    let mut manifest = Manifest::new("scatter", config)?;
    manifest.rate_hz = Some(x.rate());
    manifest.samples = Some(x.len());
    manifest.frames = Some(st.frame_count());
    manifest.banks = banks.iter().enumerate().map(|(m, b)| BankSummary::of(m + 1, b)).collect();
    manifest.path_counts = st.path_counts();
    manifest.expected_counts = Some(expected_counts(cfg.q_for_order(1), cfg.q_for_order(2), cfg.duration, x.rate()));
    manifest.energy = Some(energy_decomposition(&st, &x)?);

    let table = if config.normalize {
        let eps = config.epsilon.map_or(EpsilonPolicy::Auto, EpsilonPolicy::Fixed);
        let ns = normalize(&st, &x, eps, config.norm_window_ms.map(|w| w / 1e3))?;
        if config.log {
            let ls = log_scattering(&ns, None)?;
            match config.freq_scatter {
                FreqOption::Off => FeatureTable::from_log(&ls),
                mode => {
                    let mode = if mode == FreqOption::U { FreqMode::U } else { FreqMode::S };
                    FeatureTable::from_freq(&freq_scatter(&ls, &banks[0], mode, config.freq_width)?)
                }
            }
        } else {
            FeatureTable::from_normalized(&ns)
        }
    } else {
        FeatureTable::from_transform(&st)
    };
    let name = format!("features.{}", config.format.extension());
    table.write(config.format, out_dir.join(&name))?;
    manifest.outputs.push(name);

    if config.plot_data {
        let rows = st.order_range(1).flat_map(|p| {
            let hz = st.paths[p].centers[0] / (2.0 * PI);
            st.frame_times.iter().zip(&st.coefficients[p]).map(move |(t, v)| (*t, hz, *v))
        });
        write_triplets(rows, out_dir.join("scalogram.csv"))?;
        manifest.outputs.push("scalogram.csv".into());
    }
    if config.invert {
        let report = reconstruct(&x, &cfg, cfg.max_order.min(2), config.seed, out_dir)?;
        manifest.outputs.push(report.output.clone());
        manifest.inversion = Some(report);
    }
    manifest.finish(out_dir)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Args)]
pub struct InvertArgs {
    pub input: PathBuf,
    #[arg(long = "t-ms", default_value_t = 190.0)]
    pub t_ms: f64,
    /// Order of the coefficients inverted (1 or 2).
    #[arg(long, default_value_t = 2)]
    pub order: usize,
    #[arg(long, value_delimiter = ',', default_value = "8,1")]
    pub q: Vec<u32>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

pub fn run_invert(args: &InvertArgs, out_dir: &Path) -> Result<Manifest> {
    if !(1..=2).contains(&args.order) {
        return Err(Error::InvalidParameter(format!("order {} must be 1 or 2", args.order)));
    }
    let mut rc = RunConfig::new(&args.input);
    rc.t_ms = args.t_ms;
    rc.q = args.q.clone();
    rc.max_order = args.order;
    rc.validate()?;
    let x = read_wav(&args.input)?;
    std::fs::create_dir_all(out_dir)?;
    let cfg = rc.scatter_config();
    let report = reconstruct(&x, &cfg, args.order, args.seed, out_dir)?;
    let mut manifest = Manifest::new("invert", args)?;
    manifest.rate_hz = Some(x.rate());
    manifest.samples = Some(x.len());
    manifest.banks = cfg
        .banks(x.rate(), x.len())?
        .iter()
        .take(args.order)
        .enumerate()
        .map(|(m, b)| BankSummary::of(m + 1, b))
        .collect();
    manifest.outputs.push(report.output.clone());
    manifest.inversion = Some(report);
    manifest.finish(out_dir)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum SynthKind {
    /// Two simultaneous tones; checks the beat in the second order.
    TwoTone,
    /// The same tones one after the other.
    Arpeggio,
    /// Pulse train through a resonance under tremolo; checks the first order.
    Voiced,
    /// White noise through a resonance under tremolo; checks the first order.
    Unvoiced,
    /// Harmonic note with a smooth spectral envelope.
    Harmonic,
    /// Alternating voiced and noisy segments.
    Speech,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Args)]
pub struct SynthArgs {
    #[arg(value_enum)]
    pub kind: SynthKind,
    #[arg(long, default_value_t = 4.0)]
    pub duration: f64,
    #[arg(long, default_value_t = 22050.0)]
    pub rate: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Averaging duration used for the oracle comparison.
    #[arg(long = "t-ms", default_value_t = 512.0)]
    pub t_ms: f64,
    /// Tone or pitch frequencies in Hz.
    #[arg(long, value_delimiter = ',', default_value = "600,675")]
    pub freqs: Vec<f64>,
    /// Tremolo rate in Hz.
    #[arg(long, default_value_t = 4.0)]
    pub eta: f64,
}

/// Gaussian-windowed resonance at `fc` Hz, 32 taps.
pub fn resonance(fc: f64, rate: f64) -> Result<RealSignal> {
    let sigma = 0.18e-3 * rate;
    let h = (0..32)
        .map(|i| {
            let t = i as f64 - 16.0;
            (-0.5 * (t / sigma).powi(2)).exp() * (2.0 * PI * fc * t / rate).cos()
        })
        .collect();
    RealSignal::new(h, rate)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleRow {
    pub lambda_hz: Vec<f64>,
    pub measured: f64,
    pub predicted: f64,
}

pub fn run_synth(args: &SynthArgs, out_dir: &Path) -> Result<Manifest> {
    if !(args.duration > 0.0 && args.rate > 0.0 && args.t_ms > 0.0) {
        return Err(Error::InvalidParameter("duration, rate and T must be positive".into()));
    }
    let f = |i: usize| {
        args.freqs.get(i).copied().ok_or_else(|| Error::InvalidParameter(format!("--freqs needs {} values", i + 1)))
    };
    let rate = args.rate;
    let tremolo = synth::Envelope::Tremolo { mean: 1.0, depth: 0.5, freq_hz: args.eta };
    let model = |excitation| -> Result<synth::SourceFilterModel> {
        let pitch = f(0)?;
        Ok(synth::SourceFilterModel { excitation, h: resonance(2.0 * pitch, rate)?, envelope: tremolo.clone() })
    };
    let (x, model) = match args.kind {
        SynthKind::TwoTone => (synth::gen_two_tone(f(0)?, f(1)?, 1.0, 1.0, args.duration, rate)?, None),
        SynthKind::Arpeggio => (synth::gen_arpeggio(f(0)?, f(1)?, 1.0, 1.0, args.duration, rate, 0.05)?, None),
        SynthKind::Voiced => {
            let m = model(synth::Excitation::PulseTrain { pitch_hz: f(0)? })?;
            (synth::gen_source_filter(&m, args.duration, rate)?, Some(m))
        }
        SynthKind::Unvoiced => {
            let m = model(synth::Excitation::WhiteNoise { seed: args.seed })?;
            (synth::gen_source_filter(&m, args.duration, rate)?, Some(m))
        }
        SynthKind::Harmonic => {
            let clip = synth::HarmonicClip::with_envelope(f(0)?, 60, |hz| (-(hz / 1500.0)).exp(), args.seed);
            (clip.render(args.duration, rate)?, None)
        }
        SynthKind::Speech => (synth::speech_like(args.duration, rate, args.seed)?, None),
    };
    std::fs::create_dir_all(out_dir)?;
    let kind = serde_json::to_value(args.kind)?.as_str().unwrap_or("synth").to_string();
    let wav = format!("{kind}.wav");
    write_wav(&x, out_dir.join(&wav))?;
    let mut manifest = Manifest::new("synth", args)?;
    manifest.rate_hz = Some(rate);
    manifest.samples = Some(x.len());
    manifest.outputs.push(wav);

    let cfg = ScatterConfig::new(args.t_ms / 1e3, 2);
    let banks = cfg.banks(rate, x.len())?;
    let rows: Vec<OracleRow> = match args.kind {
        SynthKind::TwoTone | SynthKind::Arpeggio => {
            let st = scatter(&x, &banks, 2, cfg.options)?.0;
            let ns = normalize(&st, &x, EpsilonPolicy::Auto, None)?;
            let (j, w) = synth::nearest_wavelet(&banks[0], 2.0 * PI * f(0)?)?;
            let pred = synth::predict_interference(f(0)?, f(1)?, 1.0, 1.0, w.center, &banks[0], &banks[1])?;
            let frames = synth::interior_frames(&ns.frame_times, cfg.duration, x.duration());
            synth::second_order_profile(&ns, j, frames)
                .into_iter()
                .map(|(l2, v)| {
                    let k = pred.lambda2.iter().position(|c| (c - l2).abs() <= 1e-9 * l2).unwrap_or(0);
                    OracleRow {
                        lambda_hz: vec![w.center / (2.0 * PI), l2 / (2.0 * PI)],
                        measured: v,
                        predicted: pred.profile[k],
                    }
                })
                .collect()
        }
        SynthKind::Voiced | SynthKind::Unvoiced => {
            let m = model.expect("source-filter kinds carry a model");
            let st = scatter(&x, &banks, 1, cfg.options)?.0;
            let ns = normalize(&st, &x, EpsilonPolicy::Auto, None)?;
            let frames = synth::interior_frames(&ns.frame_times, cfg.duration, x.duration());
            ns.order_range(1)
                .filter_map(|p| {
                    let lambda = ns.paths[p].centers[0];
                    let predicted = synth::predict_first_order(&m, lambda, &banks[0]).ok()?;
                    let v = &ns.coefficients[p][frames.clone()];
                    let measured = v.iter().sum::<f64>() / v.len().max(1) as f64;
                    Some(OracleRow { lambda_hz: vec![lambda / (2.0 * PI)], measured, predicted })
                })
                .collect()
        }
        SynthKind::Harmonic | SynthKind::Speech => Vec::new(),
    };
    if !rows.is_empty() {
        write_json(&rows, &out_dir.join("oracle.json"))?;
        manifest.outputs.push("oracle.json".into());
    }
    manifest.banks = banks.iter().enumerate().map(|(m, b)| BankSummary::of(m + 1, b)).collect();
    manifest.finish(out_dir)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Args)]
pub struct BankArgs {
    #[arg(long, default_value_t = 8)]
    pub q: u32,
    #[arg(long = "t-ms", default_value_t = 190.0)]
    pub t_ms: f64,
    #[arg(long, default_value_t = 22050.0)]
    pub rate: f64,
    /// FFT grid; the padded length of a clip of `--samples` when absent.
    #[arg(long)]
    pub size: Option<usize>,
    #[arg(long, default_value_t = 1 << 15)]
    pub samples: usize,
}

pub fn run_bank(args: &BankArgs, out_dir: &Path) -> Result<Manifest> {
    let t = args.t_ms / 1e3;
    let size = args.size.unwrap_or_else(|| padding_layout(args.samples, t, args.rate).0);
    let bank = build_morlet_bank(args.q, t, args.rate, size)?;
    std::fs::create_dir_all(out_dir)?;
    let desc: BankDescriptor = bank.descriptor();
    write_json(&desc, &out_dir.join("bank.json"))?;
    let lp = littlewood_paley(&bank);
    let mut w =
        csv::Writer::from_path(out_dir.join("littlewood_paley.csv")).map_err(|e| Error::Format(e.to_string()))?;
    w.write_record(["freq_hz", "a"]).map_err(|e| Error::Format(e.to_string()))?;
    for (o, a) in lp.omega.iter().zip(&lp.values) {
        w.write_record([(o / (2.0 * PI)).to_string(), a.to_string()]).map_err(|e| Error::Format(e.to_string()))?;
    }
    w.flush()?;
    let mut manifest = Manifest::new("bank", args)?;
    manifest.rate_hz = Some(args.rate);
    manifest.banks.push(BankSummary::of(1, &bank));
    manifest.outputs.extend(["bank.json".to_string(), "littlewood_paley.csv".to_string()]);
    manifest.finish(out_dir)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Args)]
pub struct BenchArgs {
    /// Clip lengths in samples.
    #[arg(long, value_delimiter = ',', default_value = "16384,65536,262144")]
    pub lengths: Vec<usize>,
    #[arg(long = "t-ms", default_value_t = 190.0)]
    pub t_ms: f64,
    #[arg(long, default_value_t = 2)]
    pub max_order: usize,
    #[arg(long, default_value_t = 5)]
    pub repetitions: usize,
    /// Let the cascade use every core.
    #[arg(long)]
    pub parallel: bool,
}

pub fn run_bench(args: &BenchArgs, out_dir: &Path) -> Result<(Manifest, BenchReport)> {
    let cfg = ScatterConfig::new(args.t_ms / 1e3, args.max_order);
    let opts = BenchOptions { repetitions: args.repetitions, single_thread: !args.parallel, ..Default::default() };
    let report = run_scaling(&cfg, &args.lengths, &opts)?;
    std::fs::create_dir_all(out_dir)?;
    report.write_csv(out_dir.join("bench.csv"))?;
    let mut manifest = Manifest::new("bench", args)?;
    manifest.rate_hz = Some(opts.rate);
    manifest.path_counts = report.rows.last().map(|r| r.path_counts.clone()).unwrap_or_default();
    manifest.expected_counts = Some((report.expected_first, report.expected_second));
    manifest.outputs.push("bench.csv".into());
    Ok((manifest.finish(out_dir)?, report))
}

/// Parses arguments, runs the subcommand and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let out = cli.out_dir.as_path();
    let result = match &cli.command {
        Command::Scatter(c) => run(c, out).map(|m| summary(&m)),
        Command::Invert(a) => run_invert(a, out).map(|m| summary(&m)),
        Command::Synth(a) => run_synth(a, out).map(|m| summary(&m)),
        Command::Bank(a) => run_bank(a, out).map(|m| summary(&m)),
        Command::Bench(a) => run_bench(a, out)
            .map(|(m, r)| format!("{}\nexponent {:.3} (fit residual {:.3})", summary(&m), r.exponent, r.fit_residual)),
    };
    match result {
        Ok(text) => {
            println!("{text}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn summary(m: &Manifest) -> String {
    let mut s = format!("{}: wrote {}", m.command, m.outputs.join(", "));
    if !m.path_counts.is_empty() {
        s.push_str(&format!("\npaths per order {:?}", m.path_counts));
    }
    if let Some(inv) = &m.inversion {
        s.push_str(&format!("\nscalogram error at order {}: {:.3}", inv.order, inv.scalogram_error));
    }
    s
}
