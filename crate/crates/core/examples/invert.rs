//! Reconstructs a clip from first- and second-order coefficients and
//! writes both to WAV files.
//!
//!     cargo run --release --example invert [out_dir]

use std::path::PathBuf;

use scattering::inversion::{inverse_scattering, scalogram_error, InversionOptions};
use scattering::io::write_wav;
use scattering::scattering::{scatter, ScatterConfig};
use scattering::synth::speech_like;

fn main() -> scattering::Result<()> {
    let out = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(std::env::temp_dir);
    let rate = 22050.0;
    let x = speech_like(1.0, rate, 5)?;
    let cfg = ScatterConfig::new(0.19, 2);
    let banks = cfg.banks(rate, x.len())?;
    let st = scatter(&x, &banks, 2, cfg.options)?.0;
    write_wav(&x, out.join("original.wav"))?;
    for order in [1, 2] {
        let r = inverse_scattering(&st, &banks, order, &InversionOptions::default())?;
        let path = out.join(format!("reconstruction_m{order}.wav"));
        write_wav(&r.signal, &path)?;
        println!(
            "order {order}: scalogram error {:.3}, phase recovery {:.3} -> {:.3}, wrote {}",
            scalogram_error(&x, &r.signal, &banks[0])?,
            r.first_layer_errors.0,
            r.first_layer_errors.1,
            path.display()
        );
    }
    Ok(())
}
