//! Normalized second order of a tremolo note: the modulation profile at
//! one partial peaks at the tremolo rate whatever the loudness.
//!
//!     cargo run --release --example normalize

use std::f64::consts::PI;

use scattering::normalization::{log_scattering, normalize, EpsilonPolicy};
use scattering::scattering::{scatter, ScatterConfig};
use scattering::signal::RealSignal;
use scattering::synth::{
    gen_source_filter, interior_frames, nearest_wavelet, second_order_profile, Envelope, Excitation, SourceFilterModel,
};

fn main() -> scattering::Result<()> {
    let rate = 22050.0;
    let (t, dur) = (0.37, 4.0);
    let m = SourceFilterModel {
        excitation: Excitation::PulseTrain { pitch_hz: 150.0 },
        h: RealSignal::new(vec![1.0, 0.5, 0.25], rate)?,
        envelope: Envelope::Tremolo { mean: 1.0, depth: 0.5, freq_hz: 5.0 },
    };
    let x = gen_source_filter(&m, dur, rate)?;
    let cfg = ScatterConfig::new(t, 2);
    let banks = cfg.banks(rate, x.len())?;
    let (j, w) = nearest_wavelet(&banks[0], 2.0 * PI * 300.0)?;

    for gain in [1.0, 0.01] {
        let y = RealSignal::new(x.samples().iter().map(|v| v * gain).collect(), rate)?;
        let st = scatter(&y, &banks, 2, cfg.options)?.0;
        let ns = normalize(&st, &y, EpsilonPolicy::Auto, None)?;
        let frames = interior_frames(&ns.frame_times, t, dur);
        let prof = second_order_profile(&ns, j, frames.clone());
        let (l2, peak) = prof.iter().cloned().fold((0.0, 0.0), |b, p| if p.1 > b.1 { p } else { b });
        let log = log_scattering(&ns, None)?;
        let p = ns.find(&[j]).expect("first-order path");
        let mean_log = log.coefficients[p][frames.clone()].iter().sum::<f64>() / frames.len() as f64;
        println!(
            "gain {gain:>5}: at {:.0} Hz, S̃2 peaks at {:.2} Hz ({peak:.4}); mean log S̃1 {mean_log:.4}",
            w.center / (2.0 * PI),
            l2 / (2.0 * PI)
        );
    }
    Ok(())
}
