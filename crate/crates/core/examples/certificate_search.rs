//! Searches the certificate box for a few systems and prints what was found.
//!
//! ```text
//! cargo run --example certificate_search [path/to/system.json]
//! ```

use ornstein::certsearch::{certify, find_gamma, find_lambda, DEFAULT_BOX};
use ornstein::DerivativeSystem;

fn report(name: &str, sys: &DerivativeSystem) {
    let alphas: Vec<String> = sys.alphas.iter().map(|a| a.to_string()).collect();
    println!("== {name}: alphas {}, beta {}", alphas.join(" "), sys.beta);
    let lambdas = find_lambda(sys, DEFAULT_BOX);
    println!("   Lambda candidates in the box: {}", lambdas.len());
    match certify(sys, DEFAULT_BOX) {
        Ok(c) => {
            println!("   Lambda = {:?}, theorems {:?}", c.lambda, c.theorems);
            if let Some(g) = &c.t1 {
                println!("   Gamma = {:?}, sigma = {:?}, theta = {}, phi = {}", g.gamma, g.sigma, g.theta, g.phi);
            }
            if let Some(e) = &c.t2 {
                println!("   eps = {:?}, exponent {}", e.eps, e.exponent);
            }
            // runners-up, to show how the ranking breaks ties
            if let Ok(all) = find_gamma(sys, &c.lambda, DEFAULT_BOX) {
                for g in all.iter().take(3) {
                    println!("     candidate Gamma {:?} phi {}", g.gamma, g.phi);
                }
            }
        }
        Err(e) => println!("   no certificate: {e}"),
    }
}

fn main() -> ornstein::Result<()> {
    if let Some(path) = std::env::args().nth(1) {
        let text = std::fs::read_to_string(&path)?;
        let sys: DerivativeSystem = serde_json::from_str(&text)?;
        report(&path, &sys.validate()?);
        return Ok(());
    }
    report("mixed second order", &DerivativeSystem::mixed_second_order());
    report(
        "pure fourth against (2,1)",
        &DerivativeSystem::new(2, vec![vec![4, 0], vec![0, 2]], vec![2, 1]),
    );
    report(
        "pure thirds on T^3",
        &DerivativeSystem::new(3, vec![vec![3, 0, 0], vec![0, 3, 0], vec![0, 0, 3]], vec![1, 1, 1]),
    );
    report("beta outside the hull", &DerivativeSystem::new(2, vec![vec![2, 0]], vec![1, 0]));
    Ok(())
}
