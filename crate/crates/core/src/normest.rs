//! L1 norms on the torus (normalized Haar measure).
//!
//! Monte Carlo draws sample `i` from its own ChaCha stream derived from `(seed, i)`,
//! processes samples in fixed blocks and merges block statistics in block order, so a
//! result depends only on `(seed, samples)` and never on the number of threads.

use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::ToPrimitive;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::index::MultiIndex;
use crate::trigpoly::{TorusFunction, TorusPoint, TrigPoly};
use crate::witness::WitnessFamily;

const BLOCK: u64 = 2048;

/// Default point budget for [`grid_norm`].
pub const DEFAULT_GRID_BUDGET: u64 = 1 << 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EstimateMode {
    MC,
    QMC,
    #[serde(rename = "grid")]
    Grid,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormEstimate {
    pub mean: f64,
    /// Sample standard deviation over `sqrt(samples)` for MC, spread of the replicate
    /// means for QMC, and the last refinement change for grids.
    pub stderr: f64,
    pub samples: u64,
    pub mode: EstimateMode,
    pub seed: u64,
}

/// Running mean and sum of squared deviations.
#[derive(Clone, Copy, Debug, Default)]
struct Moments {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, v: f64) {
        self.n += 1;
        let delta = v - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (v - self.mean);
    }

    fn merge(self, o: Moments) -> Moments {
        if self.n == 0 {
            return o;
        }
        if o.n == 0 {
            return self;
        }
        let n = self.n + o.n;
        let delta = o.mean - self.mean;
        Moments {
            n,
            mean: self.mean + delta * o.n as f64 / n as f64,
            m2: self.m2 + o.m2 + delta * delta * (self.n as f64 * o.n as f64) / n as f64,
        }
    }

    fn stderr(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        (self.m2.max(0.0) / (self.n - 1) as f64 / self.n as f64).sqrt()
    }
}

/// Deterministic sampler: point `i` is drawn from stream `i` of a ChaCha8 generator
/// keyed by `seed`.
#[derive(Clone, Debug)]
pub struct Sampler {
    base: ChaCha8Rng,
    d: usize,
    bits: u32,
}

impl Sampler {
    pub fn new(seed: u64, d: usize, bits: u32) -> Self {
        Sampler { base: ChaCha8Rng::seed_from_u64(seed), d, bits }
    }

    pub fn point(&self, i: u64) -> TorusPoint {
        let mut rng = self.base.clone();
        rng.set_stream(i);
        TorusPoint::random(&mut rng, self.d, self.bits)
    }
}

/// What is averaged over the sample points.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Statistic {
    /// `|f(x)|`: the L1 norm.
    Abs,
    /// `Re f(x)`: the mean, i.e. the constant term.
    Re,
}

fn apply(stat: Statistic, v: Complex64) -> f64 {
    match stat {
        Statistic::Abs => v.norm(),
        Statistic::Re => v.re,
    }
}

fn check_shared(fs: &[&dyn TorusFunction]) -> (usize, u32) {
    let d = fs[0].dim();
    let bits = fs[0].phase_bits();
    for f in fs {
        assert_eq!(f.dim(), d, "functions sampled together must share the dimension");
        assert_eq!(f.phase_bits(), bits, "functions sampled together must share phase precision");
    }
    (d, bits)
}

/// Averages `stat(f_j(x_i))` for several functions over one shared set of points.
pub fn mc_stats(fs: &[&dyn TorusFunction], samples: u64, seed: u64, stat: Statistic) -> Vec<NormEstimate> {
    assert!(!fs.is_empty());
    assert!(samples >= 2, "need at least two samples");
    let (d, bits) = check_shared(fs);
    let sampler = Sampler::new(seed, d, bits);
    let blocks = samples.div_ceil(BLOCK);
    let per_block: Vec<Vec<Moments>> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut m = vec![Moments::default(); fs.len()];
            for i in b * BLOCK..((b + 1) * BLOCK).min(samples) {
                let x = sampler.point(i);
                for (mj, f) in m.iter_mut().zip(fs) {
                    mj.push(apply(stat, f.eval(&x)));
                }
            }
            m
        })
        .collect();
    let mut total = vec![Moments::default(); fs.len()];
    for m in per_block {
        for (t, mj) in total.iter_mut().zip(m) {
            *t = t.merge(mj);
        }
    }
    total
        .into_iter()
        .map(|m| NormEstimate {
            mean: m.mean,
            stderr: m.stderr(),
            samples,
            mode: EstimateMode::MC,
            seed,
        })
        .collect()
}

/// Monte Carlo estimate of `||f||_1`.
pub fn mc_norm(f: &dyn TorusFunction, samples: u64, seed: u64) -> NormEstimate {
    mc_stats(&[f], samples, seed, Statistic::Abs).remove(0)
}

/// L1 norms of several functions on shared sample points.
pub fn mc_norms(fs: &[&dyn TorusFunction], samples: u64, seed: u64) -> Vec<NormEstimate> {
    mc_stats(fs, samples, seed, Statistic::Abs)
}

/// Monte Carlo estimate of the mean of `Re f`.
pub fn mc_mean(f: &dyn TorusFunction, samples: u64, seed: u64) -> NormEstimate {
    mc_stats(&[f], samples, seed, Statistic::Re).remove(0)
}

/// Generator of the Kronecker sequence: fractional parts of `sqrt(p_j)` for the first
/// primes, truncated to `bits` bits.
fn kronecker_generator(d: usize, bits: u32) -> Vec<BigUint> {
    let mut primes = Vec::with_capacity(d);
    let mut c = 2u64;
    while primes.len() < d {
        if (2..c).take_while(|p| p * p <= c).all(|p| !c.is_multiple_of(p)) {
            primes.push(c);
        }
        c += 1;
    }
    let modulus = BigUint::from(1u8) << bits as usize;
    primes
        .into_iter()
        .map(|p| (BigUint::from(p) << (2 * bits as usize)).sqrt() % &modulus)
        .collect()
}

/// Randomly shifted Kronecker lattice rule: `replicates` independent shifts of the same
/// `per_replicate` points `i * g mod 1`, evaluated in exact fixed point. The standard
/// error is the spread of the replicate means.
pub fn qmc_norm(f: &dyn TorusFunction, per_replicate: u64, replicates: u32, seed: u64) -> NormEstimate {
    assert!(replicates >= 2, "need at least two replicates");
    let d = f.dim();
    let bits = f.phase_bits();
    let gen = kronecker_generator(d, bits);
    let modulus = BigUint::from(1u8) << bits as usize;
    let sampler = Sampler::new(seed, d, bits);
    let means: Vec<f64> = (0..replicates)
        .map(|r| {
            let shift = sampler.point(r as u64);
            let shift: Vec<BigUint> = (0..d).map(|j| shift.numerator(j)).collect();
            let blocks = per_replicate.div_ceil(BLOCK);
            let parts: Vec<Moments> = (0..blocks)
                .into_par_iter()
                .map(|b| {
                    let mut m = Moments::default();
                    for i in b * BLOCK..((b + 1) * BLOCK).min(per_replicate) {
                        let nums: Vec<BigUint> = (0..d)
                            .map(|j| (&shift[j] + &gen[j] * i) % &modulus)
                            .collect();
                        let x = TorusPoint::from_numerators(bits, &nums).expect("reduced mod 2^bits");
                        m.push(f.eval(&x).norm());
                    }
                    m
                })
                .collect();
            parts.into_iter().fold(Moments::default(), Moments::merge).mean
        })
        .collect();
    let mut m = Moments::default();
    for v in &means {
        m.push(*v);
    }
    NormEstimate {
        mean: m.mean,
        stderr: m.stderr(),
        samples: per_replicate * replicates as u64,
        mode: EstimateMode::QMC,
        seed,
    }
}

/// Riemann average of `|f|` on the grid `(Z/N)^d` with `N = 2^log2_n`.
pub fn grid_average(f: &dyn TorusFunction, log2_n: u32) -> f64 {
    let d = f.dim();
    let bits = f.phase_bits();
    assert!(log2_n <= 32 && log2_n <= bits);
    let n = 1u64 << log2_n;
    let total = n.checked_pow(d as u32).expect("grid size overflows");
    let blocks = total.div_ceil(BLOCK);
    let sums: Vec<f64> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut s = 0.0;
            let mut coords = vec![(0u64, log2_n); d];
            for idx in b * BLOCK..((b + 1) * BLOCK).min(total) {
                let mut rest = idx;
                for c in coords.iter_mut() {
                    c.0 = rest % n;
                    rest /= n;
                }
                let x = TorusPoint::from_dyadic(bits, &coords).expect("dyadic grid point");
                s += f.eval(&x).norm();
            }
            s
        })
        .collect();
    sums.iter().sum::<f64>() / total as f64
}

/// Grid oracle: starts at the smallest power of two `N >= 2 degree + 2` and doubles `N`
/// until two successive averages differ by less than `1e-3` relative, or the next grid
/// would exceed `budget` points.
pub fn grid_norm(f: &dyn TorusFunction, degree: u64, budget: u64) -> Result<NormEstimate> {
    let d = f.dim() as u32;
    let mut log2_n = (2 * degree + 2).next_power_of_two().trailing_zeros();
    let size = |l: u32| (1u128 << l).checked_pow(d).unwrap_or(u128::MAX);
    let mut last: Vec<f64> = Vec::new();
    loop {
        if size(log2_n) > budget as u128 || log2_n > 32 {
            let tail = last.len().saturating_sub(2);
            return Err(Error::GridBudget { budget, last: last[tail..].to_vec() });
        }
        let v = grid_average(f, log2_n);
        if let Some(&prev) = last.last() {
            let delta = (v - prev).abs();
            let scale = v.abs().max(prev.abs());
            if delta <= 1e-3 * scale || scale == 0.0 {
                return Ok(NormEstimate {
                    mean: v,
                    stderr: delta,
                    samples: size(log2_n) as u64,
                    mode: EstimateMode::Grid,
                    seed: 0,
                });
            }
        }
        last.push(v);
        log2_n += 1;
    }
}

/// [`grid_norm`] for an exact polynomial, using its own degree.
pub fn grid_norm_poly(p: &TrigPoly, budget: u64) -> Result<NormEstimate> {
    let degree = match p.degree() {
        Ok(deg) => deg.to_u64().ok_or_else(|| Error::Params("degree too large for a grid".into()))?,
        Err(_) => 0,
    };
    grid_norm(&p.compile(crate::trigpoly::phase_bits_for(64)), degree, budget)
}

/// Direct and structured estimates of `||D^mu W_n||_1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormBoundsReport {
    pub direct: NormEstimate,
    pub g: NormEstimate,
    /// `sum |re| + |im|` over the coefficients of `B_{mu,n}`.
    pub b_triangle: f64,
    /// `||G|| - triangle(B)`.
    pub lower: f64,
    /// `||G|| + triangle(B)`.
    pub upper: f64,
}

pub fn norm_bounds_report(fam: &WitnessFamily, mu: &MultiIndex, samples: u64, seed: u64) -> Result<NormBoundsReport> {
    let direct = fam.derivative_eval(mu)?;
    let g = fam.g_eval(mu)?;
    let b = fam.b_triangle_norm(mu)?.bound_f64();
    let mut est = mc_norms(&[&direct, &g], samples, seed);
    let g_est = est.pop().expect("two estimates");
    let direct = est.pop().expect("two estimates");
    Ok(NormBoundsReport {
        lower: g_est.mean - b,
        upper: g_est.mean + b,
        direct,
        g: g_est,
        b_triangle: b,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certsearch::{certify, Theorem, DEFAULT_BOX};
    use crate::index::DerivativeSystem;
    use crate::trigpoly::{gr_real, Frequency};
    use crate::witness::{Mode, WitnessParams};
    use num_rational::BigRational;
    use std::f64::consts::FRAC_2_PI;

    fn family(variant: Theorem, n: usize, mode: Mode) -> WitnessFamily {
        let sys = DerivativeSystem::mixed_second_order();
        let cert = certify(&sys, DEFAULT_BOX).unwrap();
        WitnessFamily::build(WitnessParams::new(sys, cert, n, variant, mode)).unwrap()
    }

    struct Const(f64);
    impl TorusFunction for Const {
        fn dim(&self) -> usize {
            2
        }
        fn phase_bits(&self) -> u32 {
            128
        }
        fn eval(&self, _: &TorusPoint) -> Complex64 {
            Complex64::new(self.0, 0.0)
        }
    }

    #[test]
    fn constant_has_zero_error() {
        let e = mc_norm(&Const(5.0), 1000, 3);
        assert_eq!(e.mean, 5.0);
        assert_eq!(e.stderr, 0.0);
        assert_eq!(e.mode, EstimateMode::MC);
    }

    #[test]
    fn cosine_norm_is_two_over_pi() {
        let c = TrigPoly::cos(&Frequency::from_i64(&[7, -3])).compile(128);
        let e = mc_norm(&c, 40_000, 9);
        assert!((e.mean - FRAC_2_PI).abs() < 3.0 * e.stderr, "{e:?}");
        let q = qmc_norm(&c, 4096, 8, 9);
        assert!((q.mean - FRAC_2_PI).abs() < 1e-2, "{q:?}");
    }

    #[test]
    fn riesz_products_have_unit_norm() {
        let fam = family(Theorem::T2, 4, Mode::Native);
        for k in 1..=5 {
            let e = mc_norm(&fam.psi_eval(k), 100_000, 17);
            assert!((e.mean - 1.0).abs() < 3.0 * e.stderr.max(1e-12), "k={k} {e:?}");
        }
        let r = mc_mean(&fam.riesz_eval(), 100_000, 19);
        assert!(r.mean.abs() < 3.0 * r.stderr, "{r:?}");
    }

    #[test]
    fn deterministic_across_thread_counts() {
        let fam = family(Theorem::T1, 3, Mode::Native);
        let f = fam.riesz_eval();
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = one.install(|| mc_norm(&f, 10_000, 42));
        let b = four.install(|| mc_norm(&f, 10_000, 42));
        assert_eq!(a.mean.to_bits(), b.mean.to_bits());
        assert_eq!(a.stderr.to_bits(), b.stderr.to_bits());
        assert_ne!(mc_norm(&f, 10_000, 43).mean, a.mean);
    }

    #[test]
    fn shared_points_match_individual_runs() {
        let fam = family(Theorem::T2, 3, Mode::Native);
        let (r, p) = (fam.riesz_eval(), fam.psi_eval(3));
        let both = mc_norms(&[&r, &p], 5000, 1);
        assert_eq!(both[0], mc_norm(&r, 5000, 1));
        assert_eq!(both[1], mc_norm(&p, 5000, 1));
    }

    #[test]
    fn grid_oracle_cosine_and_zero() {
        let c = TrigPoly::cos(&Frequency::from_i64(&[1, 0]));
        let e = grid_norm_poly(&c, DEFAULT_GRID_BUDGET).unwrap();
        assert!((e.mean - FRAC_2_PI).abs() < 1e-3, "{e:?}");
        let avg = grid_average(&c.compile(128), 6);
        assert!((avg - FRAC_2_PI).abs() < 1e-3);
        let z = grid_norm_poly(&TrigPoly::zero(2), DEFAULT_GRID_BUDGET).unwrap();
        assert_eq!(z.mean, 0.0);
    }

    #[test]
    fn grid_budget_error_carries_estimates() {
        let c = TrigPoly::cos(&Frequency::from_i64(&[1000, 999]));
        match grid_norm_poly(&c, 1 << 12) {
            Err(Error::GridBudget { budget, last }) => {
                assert_eq!(budget, 1 << 12);
                assert!(last.len() <= 2);
            }
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn grid_and_mc_agree_in_scaled_mode() {
        let fam = family(Theorem::T2, 2, Mode::Scaled { base: 4 });
        let r = fam.riesz_poly().unwrap();
        let g = grid_norm_poly(&r, DEFAULT_GRID_BUDGET).unwrap();
        let m = mc_norm(&fam.riesz_eval(), 200_000, 5);
        assert!((g.mean - m.mean).abs() < (1e-2f64).max(3.0 * m.stderr), "{g:?} {m:?}");
    }

    #[test]
    fn bounds_report_consistency() {
        let fam = family(Theorem::T2, 4, Mode::Native);
        let sys = fam.params().sys.clone();
        let rep = norm_bounds_report(&fam, &sys.beta, 50_000, 7).unwrap();
        assert!(rep.lower >= 0.8 * rep.direct.mean, "{rep:?}");
        let a1 = norm_bounds_report(&fam, fam.alpha1(), 50_000, 7).unwrap();
        assert!(a1.direct.mean <= 2.0 + 3.0 * a1.direct.stderr);
    }

    #[test]
    fn single_level_g_is_scaled_cosine() {
        let fam = family(Theorem::T2, 1, Mode::Native);
        let beta = fam.params().sys.beta.clone();
        let g = fam.g_eval(&beta).unwrap();
        // a_1^beta / a_1^alpha1 = -1, delta = 0: G = -cos<a_1,x>.
        let e = mc_norm(&g, 40_000, 3);
        assert!((e.mean - FRAC_2_PI).abs() < 3.0 * e.stderr);
        let (_, gp) = fam.bg(&beta).unwrap();
        assert_eq!(gp.coeff(&fam.a()[0]), Some(&gr_real(BigRational::new((-1).into(), 2.into()))));
    }

    #[test]
    fn triangle_inequality_sanity() {
        let p = TrigPoly::cos(&Frequency::from_i64(&[3, 1]));
        let q = TrigPoly::sin(&Frequency::from_i64(&[-2, 5]));
        let s = p.add(&q);
        let (cp, cq, cs) = (p.compile(128), q.compile(128), s.compile(128));
        let e = mc_norms(&[&cp, &cq, &cs], 20_000, 8);
        let comb = (e[0].stderr.powi(2) + e[1].stderr.powi(2) + e[2].stderr.powi(2)).sqrt();
        assert!(e[2].mean <= e[0].mean + e[1].mean + 6.0 * comb);
    }

    #[test]
    fn sampler_streams_differ() {
        let s = Sampler::new(1, 2, 128);
        assert_ne!(s.point(0), s.point(1));
        assert_eq!(s.point(5), Sampler::new(1, 2, 128).point(5));
    }
}
