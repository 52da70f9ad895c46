//! Empirical checks of the three inequalities the lower bounds are built from, printed
//! as JSON reports.
//!
//! ```text
//! cargo run --release --example imported_inequalities -- [n] [samples]
//! ```

use ornstein::certsearch::{certify, Theorem, DEFAULT_BOX};
use ornstein::experiments::{latala_check, linear_growth_check, meyer_transfer_check, riesz_lattice_weights};
use ornstein::witness::{Mode, WitnessFamily, WitnessParams};
use ornstein::DerivativeSystem;

fn main() -> ornstein::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let n: usize = args.first().and_then(|s| s.parse().ok()).unwrap_or(4);
    let samples: u64 = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(100_000);
    let sys = DerivativeSystem::mixed_second_order();
    let cert = certify(&sys, DEFAULT_BOX)?;
    let fam = WitnessFamily::build(WitnessParams::new(sys, cert, n, Theorem::T2, Mode::Native))?;
    let a = fam.a();

    let alternating: Vec<f64> = (0..=n).map(|k| if k % 2 == 0 { 1.0 } else { -1.0 }).collect();
    println!("{}", latala_check(a, &alternating, samples, 1).to_json());
    println!("{}", meyer_transfer_check(a, &riesz_lattice_weights(n), samples, 2).to_json());
    println!("{}", linear_growth_check(a, 2..=n, samples, 3).to_json());
    Ok(())
}
