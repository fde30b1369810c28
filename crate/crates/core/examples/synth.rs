//! Figure data for the two-tone and tremolo models: measured normalized
//! second order against the closed-form predictions, as CSV on stdout.
//!
//!     cargo run --release --example synth > synth.csv

use std::f64::consts::PI;

use scattering::normalization::{normalize, EpsilonPolicy};
use scattering::scattering::{scatter, ScatterConfig};
use scattering::signal::RealSignal;
use scattering::synth::{
    gen_arpeggio, gen_source_filter, gen_two_tone, interior_frames, nearest_wavelet, predict_interference,
    predict_second_order_am, second_order_profile, Envelope, Excitation, SourceFilterModel,
};

fn main() -> scattering::Result<()> {
    let rate = 22050.0;
    let (t, dur) = (0.512, 4.0);
    let cfg = ScatterConfig::new(t, 2);
    let chord = gen_two_tone(600.0, 675.0, 1.0, 1.0, dur, rate)?;
    let arp = gen_arpeggio(600.0, 675.0, 1.0, 1.0, dur, rate, 0.05)?;
    let banks = cfg.banks(rate, chord.len())?;
    let (j, w) = nearest_wavelet(&banks[0], 2.0 * PI * 600.0)?;
    let pred = predict_interference(600.0, 675.0, 1.0, 1.0, w.center, &banks[0], &banks[1])?;
    let measure = |x: &RealSignal| -> scattering::Result<Vec<(f64, f64)>> {
        let ns = normalize(&scatter(x, &banks, 2, cfg.options)?.0, x, EpsilonPolicy::Auto, None)?;
        Ok(second_order_profile(&ns, j, interior_frames(&ns.frame_times, t, dur)))
    };
    let (c, a) = (measure(&chord)?, measure(&arp)?);
    println!("model,lambda2_hz,measured,predicted");
    for (k, ((l2, vc), (_, va))) in c.iter().zip(&a).enumerate() {
        println!("chord,{:.3},{vc:.6},{:.6}", l2 / (2.0 * PI), pred.profile[k]);
        println!("arpeggio,{:.3},{va:.6},", l2 / (2.0 * PI));
    }

    let envelope = Envelope::Tremolo { mean: 1.0, depth: 0.5, freq_hz: 4.0 };
    let m = SourceFilterModel {
        excitation: Excitation::PulseTrain { pitch_hz: 150.0 },
        h: RealSignal::new(vec![1.0], rate)?,
        envelope: envelope.clone(),
    };
    let x = gen_source_filter(&m, dur, rate)?;
    let (j, _) = nearest_wavelet(&banks[0], 2.0 * PI * 300.0)?;
    let ns = normalize(&scatter(&x, &banks, 2, cfg.options)?.0, &x, EpsilonPolicy::Auto, None)?;
    let frames = interior_frames(&ns.frame_times, t, dur);
    let a = RealSignal::new((0..x.len()).map(|i| envelope.value(i as f64 / rate, rate)).collect(), rate)?;
    let am = predict_second_order_am(&a, &banks[1])?.mean_over(frames.clone());
    for ((l2, v), p) in second_order_profile(&ns, j, frames).iter().zip(am) {
        println!("tremolo,{:.3},{v:.6},{p:.6}", l2 / (2.0 * PI));
    }
    Ok(())
}
