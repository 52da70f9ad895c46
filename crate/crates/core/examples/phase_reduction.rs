//! Why phases are reduced exactly: for frequencies of a few hundred bits a double
//! cannot represent `<q, x>` at all, while the fixed-point route agrees with big integers.
//!
//! ```text
//! cargo run --example phase_reduction
//! ```

use num_bigint::BigInt;
use ornstein::normest::Sampler;
use ornstein::trigpoly::phase::phase_bigint;
use ornstein::trigpoly::{phase_bits_for, FreqResidue};

fn main() {
    for e in [10u32, 40, 120, 400] {
        let q = vec![BigInt::from(3).pow(e), -BigInt::from(3).pow(e)];
        let qbits = q[0].bits();
        let bits = phase_bits_for(qbits);
        let res = FreqResidue::new(&q, bits);
        let sampler = Sampler::new(7, 2, bits);
        let mut worst = 0.0f64;
        let mut naive_worst = 0.0f64;
        for i in 0..1000 {
            let x = sampler.point(i);
            let exact = phase_bigint(&q, &x);
            let fast = res.phase(&x);
            let d = (exact - fast).abs();
            worst = worst.max(d.min(1.0 - d));
            let xs = x.coords_f64();
            let naive: f64 = q.iter().zip(&xs).map(|(a, b)| a.to_string().parse::<f64>().unwrap() * b).sum();
            let nd = (exact - naive.rem_euclid(1.0)).abs();
            naive_worst = naive_worst.max(nd.min(1.0 - nd));
        }
        println!(
            "3^{e:<3} ({qbits:>3} bits, P = {bits:>4}): fixed point off by {worst:.1e}, double arithmetic off by {naive_worst:.3}"
        );
    }
}
