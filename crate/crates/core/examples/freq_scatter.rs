//! Frequency scattering of a harmonic note and its transposition by a
//! quarter octave: averaging along log-frequency shrinks the distance.
//!
//!     cargo run --release --example freq_scatter [width_octaves]

use scattering::freq::{freq_scatter, profile_distance, FreqMode};
use scattering::normalization::{log_scattering, normalize, EpsilonPolicy, LogScattering};
use scattering::scattering::ScatterConfig;
use scattering::signal::RealSignal;
use scattering::synth::HarmonicClip;

fn main() -> scattering::Result<()> {
    let width = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(2.0);
    let rate = 22050.0;
    let cfg = ScatterConfig::new(0.19, 2);
    let clip = HarmonicClip::with_envelope(220.0, 40, |f| (-(f / 1200.0)).exp(), 4);
    let x = clip.render(1.5, rate)?;
    let y = clip.transposed(2f64.powf(0.25)).render(1.5, rate)?;
    let log = |s: &RealSignal| -> scattering::Result<LogScattering> {
        log_scattering(&normalize(&cfg.transform(s)?, s, EpsilonPolicy::Auto, None)?, None)
    };
    let (lx, ly) = (log(&x)?, log(&y)?);
    let first = cfg.banks(rate, x.len())?.remove(0);
    let raw = profile_distance(&lx, &ly)?;
    println!("log-scattering distance {raw:.3}");
    for mode in [FreqMode::U, FreqMode::S] {
        let (fx, fy) = (freq_scatter(&lx, &first, mode, width)?, freq_scatter(&ly, &first, mode, width)?);
        let d = fx.distance(&fy)?;
        println!(
            "mode {mode:?}, width {width} octaves: {} slots, {} quefrencies, distance {d:.3} ({:.2} of raw)",
            fx.slots.len(),
            fx.quefrencies.len(),
            d / raw
        );
    }
    Ok(())
}
