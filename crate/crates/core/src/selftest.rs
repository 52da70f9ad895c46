//! Invariant suite at fixed small parameters, run by `ornstein selftest`.

use serde::{Deserialize, Serialize};

use crate::certsearch::{certify, Rational, Theorem, DEFAULT_BOX};
use crate::error::Result;
use crate::index::DerivativeSystem;
use crate::normest::{grid_norm_poly, mc_mean, mc_norm, DEFAULT_GRID_BUDGET};
use crate::trigpoly::{parse_dump, Frequency, TrigPoly};
use crate::witness::{all_combinations_distinct, Mode, WitnessFamily, WitnessParams};

/// Dump of `W_2` for the mixed second-order system, eps variant.
pub const W2_FIXTURE: &str = include_str!("../fixtures/w2_t2.poly");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelftestReport {
    pub checks: Vec<CheckResult>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

fn family(variant: Theorem, n: usize, mode: Mode) -> Result<WitnessFamily> {
    let sys = DerivativeSystem::mixed_second_order();
    let cert = certify(&sys, DEFAULT_BOX)?;
    WitnessFamily::build(WitnessParams::new(sys, cert, n, variant, mode))
}

struct Suite(Vec<CheckResult>);

impl Suite {
    fn check(&mut self, name: &str, f: impl FnOnce() -> Result<(bool, String)>) {
        let (pass, detail) = match f() {
            Ok(v) => v,
            Err(e) => (false, format!("error: {e}")),
        };
        self.0.push(CheckResult { name: name.into(), pass, detail });
    }
}

/// Runs every check. `fixture` replaces the embedded `W_2` dump.
pub fn run(fixture: Option<&str>) -> SelftestReport {
    let mut s = Suite(Vec::new());
    let fixture = fixture.unwrap_or(W2_FIXTURE);

    s.check("certificate of the mixed second-order system", || {
        let c = certify(&DerivativeSystem::mixed_second_order(), DEFAULT_BOX)?;
        Ok((c.best_exponent() == Some(Rational::new(1, 2)), format!("lambda {:?}", c.lambda)))
    });

    s.check("differentiate(W, alpha1) == R", || {
        let fam = family(Theorem::T2, 2, Mode::Native)?;
        let w = parse_dump(fixture, 2)?;
        let ok = w.differentiate(fam.alpha1()) == fam.riesz_poly()?;
        Ok((ok, format!("{} fixture terms", w.len())))
    });

    s.check("fixture equals constructed W_2", || {
        let fam = family(Theorem::T2, 2, Mode::Native)?;
        Ok((parse_dump(fixture, 2)? == fam.w_poly()?, String::new()))
    });

    s.check("B + G == D^mu W", || {
        let mut ok = true;
        for v in [Theorem::T1, Theorem::T2] {
            let fam = family(v, 3, Mode::Native)?;
            let w = fam.w_poly()?;
            let sys = fam.params().sys.clone();
            for mu in std::iter::once(&sys.beta).chain(sys.alphas.iter()) {
                let (b, g) = fam.bg(mu)?;
                ok &= b.add(&g) == w.differentiate(mu);
            }
        }
        Ok((ok, "n=3, both variants".into()))
    });

    s.check("W is real-valued", || Ok((family(Theorem::T2, 3, Mode::Native)?.w_poly()?.is_real(), String::new())));

    s.check("A_k sizes, distinct combinations, zero constant term of R_n", || {
        let mut ok = true;
        for n in 1..=5 {
            let fam = family(Theorem::T2, n, Mode::Native)?;
            ok &= (1..=n).all(|k| fam.enumerate_ak(k).len() == 3usize.pow(k as u32 - 1));
            ok &= all_combinations_distinct(fam.a());
            ok &= fam.riesz_poly()?.constant_term() == TrigPoly::zero(2).constant_term();
        }
        Ok((ok, "n=1..5".into()))
    });

    s.check("tau <= 2 and growth in native mode", || {
        let mut ok = true;
        for n in 1..=6 {
            let d = family(Theorem::T2, n, Mode::Native)?.diagnostics();
            ok &= d.tau_within_2 && d.growth_holds && d.unique_by_magnitude;
        }
        Ok((ok, "T2, n=1..6".into()))
    });

    s.check("T2 monomial identities", || Ok((family(Theorem::T2, 5, Mode::Native)?.t2_identities_hold(), String::new())));

    s.check("||psi_k||_1 = 1 and mean(R_n) = 0", || {
        let fam = family(Theorem::T2, 4, Mode::Native)?;
        let mut ok = true;
        let mut detail = String::new();
        for k in 1..=5 {
            let e = mc_norm(&fam.psi_eval(k), 50_000, 1);
            ok &= (e.mean - 1.0).abs() <= 3.0 * e.stderr + 1e-12;
            detail += &format!("psi_{k}={:.4} ", e.mean);
        }
        let r = mc_mean(&fam.riesz_eval(), 50_000, 2);
        ok &= r.mean.abs() <= 3.0 * r.stderr;
        Ok((ok, detail))
    });

    s.check("||cos||_1 = 2/pi", || {
        let c = TrigPoly::cos(&Frequency::from_i64(&[-81, 81])).compile(128);
        let e = mc_norm(&c, 100_000, 3);
        let ok = (e.mean - std::f64::consts::FRAC_2_PI).abs() <= 3.0 * e.stderr;
        Ok((ok, format!("{:.5} +- {:.5}", e.mean, e.stderr)))
    });

    s.check("grid and MC agree in scaled mode", || {
        let fam = family(Theorem::T2, 2, Mode::Scaled { base: 4 })?;
        let g = grid_norm_poly(&fam.riesz_poly()?, DEFAULT_GRID_BUDGET)?;
        let m = mc_norm(&fam.riesz_eval(), 100_000, 4);
        let ok = (g.mean - m.mean).abs() <= (1e-2f64).max(3.0 * m.stderr);
        Ok((ok, format!("grid {:.4}, mc {:.4}", g.mean, m.mean)))
    });

    s.check("MC is independent of the thread count", || {
        let fam = family(Theorem::T1, 3, Mode::Native)?;
        let f = fam.riesz_eval();
        let pool = |t| rayon::ThreadPoolBuilder::new().num_threads(t).build().expect("thread pool");
        let a = pool(1).install(|| mc_norm(&f, 20_000, 5));
        let b = pool(3).install(|| mc_norm(&f, 20_000, 5));
        Ok((a == b, String::new()))
    });

    SelftestReport { checks: s.0 }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedded_fixture_passes() {
        let rep = run(None);
        assert!(rep.passed(), "{:?}", rep.failures().collect::<Vec<_>>());
    }

    #[test]
    fn tampered_fixture_names_the_invariant() {
        let mut lines: Vec<String> = W2_FIXTURE.lines().map(String::from).collect();
        let i = lines.iter().position(|l| !l.starts_with('#') && !l.is_empty()).unwrap();
        let mut toks: Vec<String> = lines[i].split_whitespace().map(String::from).collect();
        toks[2] = "1/3".into();
        lines[i] = toks.join(" ");
        let rep = run(Some(&lines.join("\n")));
        assert!(!rep.passed());
        assert!(rep.failures().any(|c| c.name == "differentiate(W, alpha1) == R"));
    }
}
