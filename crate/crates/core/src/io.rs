//! WAV ingestion and feature files.
//!
//! A feature file holds a path table followed by frame-major records.
//! Frequencies are written in Hz; everything inside the library is rad/s.
//!
//! Binary layout (little-endian): the magic `SCATFEAT`, `u32` version,
//! `u32` path count, `u32` frame count, then per path `u32` order, `u32`
//! number of centers, the centers as `f64`, the quefrency as `f64` (NaN
//! when absent) and the slot name as `u32` length plus UTF-8 bytes; then
//! per frame the time and one `f64` per path.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::freq::{FreqScattering, Slot};
use crate::normalization::{LogScattering, NormalizedScattering};
use crate::scattering::{ScatteringPath, ScatteringTransform};
use crate::signal::RealSignal;

pub const MAGIC: &[u8; 8] = b"SCATFEAT";
pub const FORMAT_VERSION: u32 = 1;

/// Reads 16-bit PCM or 32-bit float WAV; stereo is averaged to mono and
/// samples are scaled to [−1, 1].
pub fn read_wav(path: impl AsRef<Path>) -> Result<RealSignal> {
    let mut reader = hound::WavReader::open(path)?;
    let spec = reader.spec();
    let interleaved: Vec<f64> = match (spec.sample_format, spec.bits_per_sample) {
        (hound::SampleFormat::Int, 16) => {
            reader.samples::<i16>().map(|s| s.map(|v| v as f64 / 32768.0)).collect::<std::result::Result<_, _>>()?
        }
        (hound::SampleFormat::Float, 32) => {
            reader.samples::<f32>().map(|s| s.map(|v| v as f64)).collect::<std::result::Result<_, _>>()?
        }
        (format, bits) => {
            return Err(Error::Format(format!("unsupported WAV encoding: {bits}-bit {format:?}")));
        }
    };
    let channels = spec.channels as usize;
    if !(1..=2).contains(&channels) {
        return Err(Error::Format(format!("{channels} channels; only mono and stereo are read")));
    }
    if !interleaved.len().is_multiple_of(channels) {
        return Err(Error::Format("truncated sample frame".into()));
    }
    let mono = interleaved.chunks(channels).map(|c| c.iter().sum::<f64>() / channels as f64).collect();
    RealSignal::new(mono, spec.sample_rate as f64)
}

/// Writes mono 32-bit float WAV. The rate is rounded to whole hertz.
pub fn write_wav(signal: &RealSignal, path: impl AsRef<Path>) -> Result<()> {
    let spec = hound::WavSpec {
        channels: 1,
        sample_rate: signal.rate().round() as u32,
        bits_per_sample: 32,
        sample_format: hound::SampleFormat::Float,
    };
    let mut w = hound::WavWriter::create(path, spec)?;
    for &v in signal.samples() {
        w.write_sample(v as f32)?;
    }
    w.finalize()?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum FeatureFormat {
    Csv,
    Jsonl,
    Binary,
}

impl FeatureFormat {
    pub fn extension(self) -> &'static str {
        match self {
            FeatureFormat::Csv => "csv",
            FeatureFormat::Jsonl => "jsonl",
            FeatureFormat::Binary => "bin",
        }
    }
}

/// One column of a feature table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathDescriptor {
    pub order: usize,
    /// Centers along the path in Hz.
    pub lambdas_hz: Vec<f64>,
    /// Log-frequency slot for frequency-scattered features.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub slot: Option<String>,
    /// Quefrency in cycles per octave; absent for the zero-order average.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub quefrency: Option<f64>,
}

impl PathDescriptor {
    fn from_path(p: &ScatteringPath) -> Self {
        Self { order: p.order(), lambdas_hz: p.centers_hz(), slot: None, quefrency: None }
    }
}

/// Values laid out as `values[frame][path]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureTable {
    pub paths: Vec<PathDescriptor>,
    pub frame_times: Vec<f64>,
    pub values: Vec<Vec<f64>>,
}

fn transpose(by_path: &[Vec<f64>], frames: usize) -> Vec<Vec<f64>> {
    (0..frames).map(|t| by_path.iter().map(|c| c[t]).collect()).collect()
}

impl FeatureTable {
    fn from_paths(paths: &[ScatteringPath], frame_times: &[f64], coefficients: &[Vec<f64>]) -> Self {
        Self {
            paths: paths.iter().map(PathDescriptor::from_path).collect(),
            frame_times: frame_times.to_vec(),
            values: transpose(coefficients, frame_times.len()),
        }
    }

    pub fn from_transform(st: &ScatteringTransform) -> Self {
        Self::from_paths(&st.paths, &st.frame_times, &st.coefficients)
    }

    pub fn from_normalized(ns: &NormalizedScattering) -> Self {
        Self::from_paths(&ns.paths, &ns.frame_times, &ns.coefficients)
    }

    pub fn from_log(ls: &LogScattering) -> Self {
        Self::from_paths(&ls.paths, &ls.frame_times, &ls.coefficients)
    }

    /// Slot by slot: the zero-order average over every γ, then each
    /// quefrency over every γ.
    pub fn from_freq(fs: &FreqScattering) -> Self {
        let mut paths = Vec::new();
        let mut by_path: Vec<Vec<f64>> = Vec::new();
        for slot in &fs.slots {
            let (order, extra) = match slot.slot {
                Slot::FirstOrder => (1, None),
                Slot::SecondOrder { center_hz, .. } => (2, Some(center_hz)),
            };
            let name = slot.slot.name();
            let lambdas = |c: f64| std::iter::once(c).chain(extra).collect::<Vec<f64>>();
            for (g, &c) in slot.centers_hz.iter().enumerate() {
                paths.push(PathDescriptor { order, lambdas_hz: lambdas(c), slot: Some(name.clone()), quefrency: None });
                by_path.push(slot.zero.iter().map(|z| z[g]).collect());
            }
            for (q, &qf) in fs.quefrencies.iter().enumerate() {
                for (g, &c) in slot.centers_hz.iter().enumerate() {
                    paths.push(PathDescriptor {
                        order,
                        lambdas_hz: lambdas(c),
                        slot: Some(name.clone()),
                        quefrency: Some(qf),
                    });
                    by_path.push(slot.first.iter().map(|f| f[q][g]).collect());
                }
            }
        }
        Self { values: transpose(&by_path, fs.frame_times.len()), paths, frame_times: fs.frame_times.clone() }
    }

    pub fn write(&self, format: FeatureFormat, path: impl AsRef<Path>) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        match format {
            FeatureFormat::Csv => self.write_csv(&mut w)?,
            FeatureFormat::Jsonl => self.write_jsonl(&mut w)?,
            FeatureFormat::Binary => self.write_binary(&mut w)?,
        }
        w.flush()?;
        Ok(())
    }

    pub fn read(format: FeatureFormat, path: impl AsRef<Path>) -> Result<Self> {
        let r = BufReader::new(File::open(path)?);
        match format {
            FeatureFormat::Csv => Err(Error::Format("CSV exports are not read back".into())),
            FeatureFormat::Jsonl => Self::read_jsonl(r),
            FeatureFormat::Binary => Self::read_binary(r),
        }
    }

    /// One row per (frame, path) with the path spelled out.
    pub fn write_csv(&self, w: impl Write) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record([
            "frame",
            "time_s",
            "path",
            "order",
            "lambda1_hz",
            "lambda2_hz",
            "lambda3_hz",
            "slot",
            "quefrency",
            "value",
        ])
        .map_err(csv_error)?;
        for (t, (time, row)) in self.frame_times.iter().zip(&self.values).enumerate() {
            for (p, (desc, v)) in self.paths.iter().zip(row).enumerate() {
                let lam = |i: usize| desc.lambdas_hz.get(i).map(|l| l.to_string()).unwrap_or_default();
                out.write_record([
                    t.to_string(),
                    time.to_string(),
                    p.to_string(),
                    desc.order.to_string(),
                    lam(0),
                    lam(1),
                    lam(2),
                    desc.slot.clone().unwrap_or_default(),
                    desc.quefrency.map(|q| q.to_string()).unwrap_or_default(),
                    v.to_string(),
                ])
                .map_err(csv_error)?;
            }
        }
        out.flush()?;
        Ok(())
    }

    /// A header object with the path table, then one object per frame.
    pub fn write_jsonl(&self, mut w: impl Write) -> Result<()> {
        let header = JsonlHeader {
            magic: "SCATFEAT".into(),
            version: FORMAT_VERSION,
            frames: self.frame_times.len(),
            paths: self.paths.clone(),
        };
        serde_json::to_writer(&mut w, &header)?;
        writeln!(w)?;
        for (t, row) in self.frame_times.iter().zip(&self.values) {
            serde_json::to_writer(&mut w, &JsonlFrame { t: *t, values: row.clone() })?;
            writeln!(w)?;
        }
        Ok(())
    }

    pub fn read_jsonl(r: impl BufRead) -> Result<Self> {
        let mut lines = r.lines();
        let first = lines.next().ok_or_else(|| Error::Format("empty feature file".into()))??;
        let header: JsonlHeader = serde_json::from_str(&first)?;
        if header.magic != "SCATFEAT" || header.version != FORMAT_VERSION {
            return Err(Error::Format(format!("unknown header {} v{}", header.magic, header.version)));
        }
        let mut frame_times = Vec::with_capacity(header.frames);
        let mut values = Vec::with_capacity(header.frames);
        for line in lines {
            let f: JsonlFrame = serde_json::from_str(&line?)?;
            if f.values.len() != header.paths.len() {
                return Err(Error::Format("frame record does not match the path table".into()));
            }
            frame_times.push(f.t);
            values.push(f.values);
        }
        if frame_times.len() != header.frames {
            return Err(Error::Format(format!("{} frames announced, {} found", header.frames, frame_times.len())));
        }
        Ok(Self { paths: header.paths, frame_times, values })
    }

    pub fn write_binary(&self, mut w: impl Write) -> Result<()> {
        w.write_all(MAGIC)?;
        for v in [FORMAT_VERSION, self.paths.len() as u32, self.frame_times.len() as u32] {
            w.write_all(&v.to_le_bytes())?;
        }
        for p in &self.paths {
            w.write_all(&(p.order as u32).to_le_bytes())?;
            w.write_all(&(p.lambdas_hz.len() as u32).to_le_bytes())?;
            for l in &p.lambdas_hz {
                w.write_all(&l.to_le_bytes())?;
            }
            w.write_all(&p.quefrency.unwrap_or(f64::NAN).to_le_bytes())?;
            let slot = p.slot.as_deref().unwrap_or("");
            w.write_all(&(slot.len() as u32).to_le_bytes())?;
            w.write_all(slot.as_bytes())?;
        }
        for (t, row) in self.frame_times.iter().zip(&self.values) {
            w.write_all(&t.to_le_bytes())?;
            for v in row {
                w.write_all(&v.to_le_bytes())?;
            }
        }
        Ok(())
    }

    pub fn read_binary(mut r: impl Read) -> Result<Self> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic).map_err(truncated)?;
        if &magic != MAGIC {
            return Err(Error::Format("bad magic number".into()));
        }
        let version = read_u32(&mut r)?;
        if version != FORMAT_VERSION {
            return Err(Error::Format(format!("unsupported version {version}")));
        }
        let n_paths = read_u32(&mut r)? as usize;
        let n_frames = read_u32(&mut r)? as usize;
        let mut paths = Vec::with_capacity(n_paths);
        for _ in 0..n_paths {
            let order = read_u32(&mut r)? as usize;
            let k = read_u32(&mut r)? as usize;
            let lambdas_hz = (0..k).map(|_| read_f64(&mut r)).collect::<Result<Vec<_>>>()?;
            let q = read_f64(&mut r)?;
            let len = read_u32(&mut r)? as usize;
            let mut buf = vec![0u8; len];
            r.read_exact(&mut buf).map_err(truncated)?;
            let slot = String::from_utf8(buf).map_err(|e| Error::Format(e.to_string()))?;
            paths.push(PathDescriptor {
                order,
                lambdas_hz,
                slot: (!slot.is_empty()).then_some(slot),
                quefrency: (!q.is_nan()).then_some(q),
            });
        }
        let mut frame_times = Vec::with_capacity(n_frames);
        let mut values = Vec::with_capacity(n_frames);
        for _ in 0..n_frames {
            frame_times.push(read_f64(&mut r)?);
            values.push((0..n_paths).map(|_| read_f64(&mut r)).collect::<Result<Vec<_>>>()?);
        }
        Ok(Self { paths, frame_times, values })
    }
}

#[derive(Serialize, Deserialize)]
struct JsonlHeader {
    magic: String,
    version: u32,
    frames: usize,
    paths: Vec<PathDescriptor>,
}

#[derive(Serialize, Deserialize)]
struct JsonlFrame {
    t: f64,
    values: Vec<f64>,
}

fn csv_error(e: csv::Error) -> Error {
    Error::Format(e.to_string())
}

fn truncated(e: std::io::Error) -> Error {
    if e.kind() == std::io::ErrorKind::UnexpectedEof {
        Error::Format("truncated feature file".into())
    } else {
        Error::Io(e)
    }
}

fn read_u32(r: &mut impl Read) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b).map_err(truncated)?;
    Ok(u32::from_le_bytes(b))
}

fn read_f64(r: &mut impl Read) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b).map_err(truncated)?;
    Ok(f64::from_le_bytes(b))
}

/// `(t, λ, value)` rows of a scalogram, for plotting.
pub fn write_triplets(rows: impl IntoIterator<Item = (f64, f64, f64)>, path: impl AsRef<Path>) -> Result<()> {
    let mut out = csv::Writer::from_path(path).map_err(csv_error)?;
    out.write_record(["time_s", "lambda_hz", "value"]).map_err(csv_error)?;
    for (t, l, v) in rows {
        out.write_record([t.to_string(), l.to_string(), v.to_string()]).map_err(csv_error)?;
    }
    out.flush()?;
    Ok(())
}
