//! Builds the three reference Morlet banks and prints their frame bounds,
//! filter counts and decimation grants.
//!
//!     cargo run --release --example bank

use std::f64::consts::PI;

use scattering::filterbank::{build_morlet_bank, littlewood_paley};

fn main() -> scattering::Result<()> {
    let rate = 22050.0;
    for &(q, t) in &[(8u32, 0.190), (1, 0.032), (2, 0.740)] {
        let size = ((t * rate) as usize * 4).next_power_of_two();
        let bank = build_morlet_bank(q, t, rate, size)?;
        let grid = littlewood_paley(&bank);
        println!(
            "Q={q} T={:.0} ms: {} wavelets, alpha={:.4} (grid {:.4}), max A={:.9}, lowpass grant {}",
            t * 1e3,
            bank.len(),
            bank.alpha(),
            grid.alpha,
            bank.lp_max(),
            bank.lowpass().max_subsample,
        );
        for w in bank.wavelets().iter().step_by((bank.len() / 8).max(1)) {
            println!(
                "  {:9.1} Hz  bw {:8.1} Hz  subsample {:5}",
                w.center / (2.0 * PI),
                w.bandwidth / (2.0 * PI),
                w.max_subsample
            );
        }
    }
    Ok(())
}
