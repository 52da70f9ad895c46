//! Sweeps the mixed second-order system over several levels and prints the records and
//! exponent fits.
//!
//! ```text
//! cargo run --release --example bernstein_sweep -- [T1|T2] [n_from] [n_to] [samples]
//! ```

use ornstein::certify::{sweep, SamplingConfig};
use ornstein::certsearch::{certify, Theorem, DEFAULT_BOX};
use ornstein::witness::{Mode, WitnessParams};
use ornstein::DerivativeSystem;

fn main() -> ornstein::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let variant = match args.first().map(String::as_str) {
        Some("T1") => Theorem::T1,
        _ => Theorem::T2,
    };
    let from: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(2);
    let to: usize = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(5);
    let samples: u64 = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(100_000);

    let sys = DerivativeSystem::mixed_second_order();
    let cert = certify(&sys, DEFAULT_BOX)?;
    let params = WitnessParams::new(sys, cert, from, variant, Mode::Native);
    let rep = sweep(&params, from..=to, SamplingConfig::new(samples, 2024)?)?;

    println!("{:>3} {:>12} {:>10} {:>10} {:>10} {:>10}", "n", "ln deg", "||D^b W||", "sum alpha", "ratio", "err");
    for r in &rep.records {
        println!(
            "{:>3} {:>12.3} {:>10.4} {:>10.4} {:>10.4} {:>10.4}",
            r.n,
            r.log_degree,
            r.norm_beta.mean,
            r.denominator(),
            r.ratio,
            r.ratio_err
        );
    }
    println!("theoretical exponent: {}", rep.theoretical_phi);
    if let Some(f) = &rep.fitted_exponent {
        println!("ratio exponent vs ln ln deg: {:.3} (R^2 {:.3}, CI {:?})", f.slope, f.r2, f.ci95);
    }
    if let Some(f) = &rep.numerator_exponent {
        println!("numerator exponent vs ln ln deg: {:.3} (R^2 {:.3})", f.slope, f.r2);
    }
    if let Some(f) = &rep.numerator_vs_n {
        println!("numerator vs n: slope {:.4}, R^2 {:.3}", f.slope, f.r2);
    }
    if let Some(f) = &rep.ratio_vs_n {
        println!("ratio vs n: slope {:.4}, R^2 {:.3}", f.slope, f.r2);
    }
    if let Some(s) = rep.denominator_spread {
        println!("denominator max/min: {s:.3}");
    }
    Ok(())
}
