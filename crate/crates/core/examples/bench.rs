//! Cascade timings over doubling clip lengths, with the fitted exponent
//! of time against `n log n` and the path counts per frame.
//!
//!     cargo run --release --example bench [max_len]

use scattering::bench::{run_scaling, BenchOptions};
use scattering::scattering::ScatterConfig;

fn main() -> scattering::Result<()> {
    let max: usize = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(1 << 18);
    let lengths: Vec<usize> = (12..=max.ilog2()).map(|k| 1usize << k).collect();
    let cfg = ScatterConfig::default();
    let report = run_scaling(&cfg, &lengths, &BenchOptions { repetitions: 3, ..Default::default() })?;
    println!("{:>9} {:>10} {:>10} {:>7}  paths", "samples", "bank s", "scatter s", "spread");
    for r in &report.rows {
        println!(
            "{:>9} {:>10.4} {:>10.4} {:>7.3}  {:?}",
            r.len, r.bank_seconds, r.scatter_seconds, r.spread, r.path_counts
        );
    }
    println!(
        "exponent {:.3} (fit residual {:.3}); expected paths {:.1} / {:.1}",
        report.exponent, report.fit_residual, report.expected_first, report.expected_second
    );
    Ok(())
}
