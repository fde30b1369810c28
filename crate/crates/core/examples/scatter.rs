//! Second-order scattering of a synthetic speech-like clip: path counts,
//! energy per order and the strongest first-order bands.
//!
//!     cargo run --release --example scatter [T_ms]

use std::f64::consts::PI;

use scattering::scattering::{energy_decomposition, scatter, ScatterConfig};
use scattering::synth::speech_like;

fn main() -> scattering::Result<()> {
    let t = std::env::args().nth(1).and_then(|a| a.parse::<f64>().ok()).unwrap_or(190.0) / 1e3;
    let rate = 22050.0;
    let x = speech_like(2.0, rate, 7)?;
    let cfg = ScatterConfig::new(t, 2).with_energy();
    let banks = cfg.banks(rate, x.len())?;
    let (st, _) = scatter(&x, &banks, 2, cfg.options)?;

    println!("T = {:.0} ms, {} frames, paths per order {:?}", t * 1e3, st.frame_count(), st.path_counts());
    let e = energy_decomposition(&st, &x)?;
    for (m, r) in e.order_ratios.iter().enumerate() {
        println!("  order {m}: {:6.2}% of the energy", 100.0 * r);
    }
    println!("  left in deeper layers {:.2}%, pruned {:.2}%", 100.0 * e.residual_ratio, 100.0 * e.pruned_ratio);

    let mut bands: Vec<(f64, f64)> = st
        .order_range(1)
        .map(|p| (st.paths[p].centers[0] / (2.0 * PI), st.coefficients[p].iter().map(|v| v * v).sum()))
        .collect();
    bands.sort_by(|a, b| b.1.total_cmp(&a.1));
    println!("strongest first-order bands:");
    for (hz, e) in bands.iter().take(5) {
        println!("  {hz:8.1} Hz  {e:.3e}");
    }
    Ok(())
}
