//! L1 norms of the modified Riesz product and of `D^beta W_n` by Monte Carlo,
//! randomly shifted lattice rules and, where the degree allows, a dyadic grid.
//!
//! ```text
//! cargo run --release --example riesz_norms -- [n] [samples]
//! ```

use ornstein::certsearch::{certify, Theorem, DEFAULT_BOX};
use ornstein::normest::{grid_norm_poly, mc_norm, norm_bounds_report, qmc_norm, DEFAULT_GRID_BUDGET};
use ornstein::witness::{Mode, WitnessFamily, WitnessParams};
use ornstein::DerivativeSystem;

fn main() -> ornstein::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let n: usize = args.first().and_then(|s| s.parse().ok()).unwrap_or(3);
    let samples: u64 = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(200_000);
    let sys = DerivativeSystem::mixed_second_order();
    let cert = certify(&sys, DEFAULT_BOX)?;

    for mode in [Mode::Scaled { base: 4 }, Mode::Native] {
        let fam = WitnessFamily::build(WitnessParams::new(sys.clone(), cert.clone(), n, Theorem::T2, mode))?;
        println!("== {mode}, n = {n}, degree {}", fam.degree());
        let r = fam.riesz_eval();
        let mc = mc_norm(&r, samples, 1);
        let qmc = qmc_norm(&r, samples / 16, 16, 1);
        println!("   ||R_n||_1  mc {:.4} +- {:.4}   qmc {:.4} +- {:.4}", mc.mean, mc.stderr, qmc.mean, qmc.stderr);
        match grid_norm_poly(&fam.riesz_poly()?, DEFAULT_GRID_BUDGET) {
            Ok(g) => println!("   grid {:.4} (last refinement moved {:.1e})", g.mean, g.stderr),
            Err(e) => println!("   grid: {e}"),
        }
        let rep = norm_bounds_report(&fam, &sys.beta, samples, 2)?;
        println!(
            "   ||D^beta W||_1 = {:.4} +- {:.4}, within [{:.4}, {:.4}] from ||G|| = {:.4} and |B| <= {:.2e}",
            rep.direct.mean, rep.direct.stderr, rep.lower, rep.upper, rep.g.mean, rep.b_triangle
        );
    }
    Ok(())
}
