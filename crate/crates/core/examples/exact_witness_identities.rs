//! Builds `W_n` exactly for both variants and checks the algebraic identities term by term.
//!
//! ```text
//! cargo run --release --example exact_witness_identities -- [n]
//! ```

use ornstein::certsearch::{certify, Theorem, DEFAULT_BOX};
use ornstein::trigpoly::write_dump;
use ornstein::witness::{Mode, WitnessFamily, WitnessParams};
use ornstein::DerivativeSystem;

fn main() -> ornstein::Result<()> {
    let n: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(3);
    let sys = DerivativeSystem::mixed_second_order();
    let cert = certify(&sys, DEFAULT_BOX)?;

    for variant in [Theorem::T1, Theorem::T2] {
        let fam = WitnessFamily::build(WitnessParams::new(sys.clone(), cert.clone(), n, variant, Mode::Native))?;
        println!("== {variant}, n = {n}, alpha1 = {}", fam.alpha1());
        for (k, q) in fam.a().iter().enumerate() {
            println!("   a_{} = {:?}", k + 1, q.coords().iter().map(|c| c.to_string()).collect::<Vec<_>>());
        }
        let w = fam.w_poly()?;
        let r = fam.riesz_poly()?;
        println!("   W_n has {} terms, degree {}", w.len(), fam.degree());
        println!("   D^alpha1 W == R_n: {}", w.differentiate(fam.alpha1()) == r);
        println!("   W real-valued: {}", w.is_real());
        for mu in std::iter::once(&sys.beta).chain(&sys.alphas) {
            let (b, g) = fam.bg(mu)?;
            println!(
                "   mu = {}: B + G == D^mu W: {}, |B| <= {:.3e}",
                mu,
                b.add(&g) == w.differentiate(mu),
                fam.b_triangle_norm(mu)?.bound_f64()
            );
        }
        let d = fam.diagnostics();
        println!("   growth {}, tau <= 2 {}, unique by magnitude {}", d.growth_holds, d.tau_within_2, d.unique_by_magnitude);
        for v in &d.growth_violations {
            println!("     a_{}({}) / a_{}({}) is {:.3} of the required 3^(2(n-1))", v.k, v.j + 1, v.k - 1, v.j + 1, v.ratio_over_required);
        }
        if variant == Theorem::T2 {
            println!("   monomial identities: {}", fam.t2_identities_hold());
        }
        if n <= 2 {
            print!("{}", write_dump(&w));
        }
    }
    Ok(())
}
