use num_bigint::BigInt;
use num_traits::Zero;
use proptest::prelude::*;

use ornstein::certify::{certify_one, SamplingConfig};
use ornstein::certsearch::{certify, verify_certificate, Theorem};
use ornstein::trigpoly::{parse_dump, write_dump};
use ornstein::witness::{Mode, WitnessFamily, WitnessParams};
use ornstein::DerivativeSystem;

#[test]
fn json_params_to_dump_and_back() {
    let json = r#"{"sys":{"d":2,"alphas":[[2,0],[0,2]],"beta":[1,1]},"n":3,"variant":"T1"}"#;
    let p = WitnessParams::from_json(json).unwrap();
    let fam = WitnessFamily::build(p).unwrap();
    let w = fam.w_poly().unwrap();
    assert_eq!(parse_dump(&write_dump(&w), 2).unwrap(), w);
    assert!(w.is_real());
}

#[test]
fn record_is_reproducible() {
    let sys = DerivativeSystem::mixed_second_order();
    let cert = certify(&sys, 8).unwrap();
    let p = WitnessParams::new(sys, cert, 3, Theorem::T2, Mode::Native);
    let cfg = SamplingConfig::new(5000, 77).unwrap();
    let a = certify_one(&p, cfg).unwrap();
    let b = certify_one(&p, cfg).unwrap();
    assert_eq!(a, b);
    assert!(a.ratio > 0.0 && a.lower_bound() < a.ratio);
    assert_eq!(a.degree, "387952659");
}

#[test]
fn three_alpha_system() {
    // beta = (1,1,1) against three pure third derivatives on T^3.
    let sys = DerivativeSystem::new(3, vec![vec![3, 0, 0], vec![0, 3, 0], vec![0, 0, 3]], vec![1, 1, 1]);
    let cert = certify(&sys, 8).unwrap();
    assert!(verify_certificate(&sys, &cert));
    let variant = if cert.t2.is_some() { Theorem::T2 } else { Theorem::T1 };
    let fam = WitnessFamily::build(WitnessParams::new(sys.clone(), cert, 2, variant, Mode::Native)).unwrap();
    let w = fam.w_poly().unwrap();
    for mu in std::iter::once(&sys.beta).chain(&sys.alphas) {
        let (b, g) = fam.bg(mu).unwrap();
        assert_eq!(b.add(&g), w.differentiate(mu));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    // (m,0), (0,m) against a mixed beta of the same order always has Lambda = (1,1).
    #[test]
    fn split_identity_for_any_certified_system(m in 2u32..5, split in 1u32..4, n in 1usize..4) {
        prop_assume!(split < m);
        let sys = DerivativeSystem::new(2, vec![vec![m, 0], vec![0, m]], vec![split, m - split]);
        prop_assert!(sys.violations().is_empty());
        let cert = certify(&sys, 6).unwrap();
        prop_assert!(verify_certificate(&sys, &cert));
        for variant in cert.theorems.clone() {
            let fam = WitnessFamily::build(WitnessParams::new(sys.clone(), cert.clone(), n, variant, Mode::Native)).unwrap();
            // every frequency is nonzero in every coordinate, so q^alpha1 never vanishes
            prop_assert!(fam.a().iter().all(|q| q.coords().iter().all(|c| !c.is_zero())));
            let w = fam.w_poly().unwrap();
            prop_assert_eq!(w.differentiate(fam.alpha1()), fam.riesz_poly().unwrap());
            let (b, g) = fam.bg(&sys.beta).unwrap();
            prop_assert_eq!(b.add(&g), w.differentiate(&sys.beta));
        }
    }

    #[test]
    fn degree_is_largest_coordinate_sum(n in 1usize..5) {
        let sys = DerivativeSystem::mixed_second_order();
        let cert = certify(&sys, 8).unwrap();
        let fam = WitnessFamily::build(WitnessParams::new(sys, cert, n, Theorem::T1, Mode::Native)).unwrap();
        let w = fam.w_poly().unwrap();
        prop_assert_eq!(BigInt::from(w.degree().unwrap()), BigInt::from(fam.degree()));
    }
}
