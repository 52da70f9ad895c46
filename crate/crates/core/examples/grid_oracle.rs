//! The dyadic grid oracle: exact for trigonometric polynomials whose degree the grid
//! resolves, and a budget error with the last estimates once it cannot.
//!
//! ```text
//! cargo run --release --example grid_oracle
//! ```

use ornstein::normest::{grid_norm_poly, mc_norm};
use ornstein::trigpoly::{Frequency, TrigPoly};
use ornstein::Error;

fn main() -> ornstein::Result<()> {
    let small = TrigPoly::cos(&Frequency::from_i64(&[-81, 81]));
    let g = grid_norm_poly(&small, 1 << 24)?;
    println!("||cos(81(y - x))||_1: grid {:.6}, 2/pi = {:.6}", g.mean, std::f64::consts::FRAC_2_PI);

    let two = TrigPoly::riesz_factor(&Frequency::from_i64(&[4, -4]))
        .mul(&TrigPoly::riesz_factor(&Frequency::from_i64(&[64, 64])), 1 << 20)?;
    let g = grid_norm_poly(&two, 1 << 24)?;
    let m = mc_norm(&two.compile_auto(), 200_000, 9);
    println!("two-factor Riesz product: grid {:.5}, mc {:.5} +- {:.5}", g.mean, m.mean, m.stderr);

    let big = TrigPoly::cos(&Frequency::from_i64(&[6561 * 6561, 0]));
    match grid_norm_poly(&big, 1 << 20) {
        Err(Error::GridBudget { budget, last }) => println!("degree 3^16 over a budget of {budget} points; last estimates {last:?}"),
        other => println!("unexpected: {other:?}"),
    }
    Ok(())
}
