//! Witness families: the sequences `b_k`, `a_k`, the sets `A_k` with weights `r(q)`,
//! the Riesz products `psi_k`, `R_n`, the polynomial `W_n` and the split
//! `D^mu W_n = B_{mu,n} + G_{mu,n}`.
//!
//! Exact expansions are available for small `n`; every object also has a structured
//! evaluator in [`eval`] whose cost per point does not depend on the frequencies.

pub mod eval;

use std::collections::HashSet;

use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::certsearch::{certify, verify_certificate, Certificate, Theorem, DEFAULT_BOX};
use crate::error::{Error, Result};
use crate::index::{DerivativeSystem, MultiIndex};
use crate::trigpoly::{
    gr_real, i_pow, phase_bits_for, product_expand, to_complex64, Frequency, GaussianRational,
    TriangleNorm, TrigPoly, DEFAULT_CAP,
};

pub use eval::{
    lattice_index, DecoupledLattice, ExpPsiSum, GProduct, LatticePoly, PsiCombination,
    RieszProduct, Sequence,
};

/// How the fast-growing factor of `a_k` is formed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// `3^{lambda_j * 2kn}`.
    Native,
    /// `base^{lambda_j * k}`; small degrees, used for grid cross-checks.
    Scaled { base: u32 },
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Mode::Native => write!(f, "native"),
            Mode::Scaled { base } => write!(f, "scaled{base}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessParams {
    pub sys: DerivativeSystem,
    pub cert: Certificate,
    pub n: usize,
    pub variant: Theorem,
    pub mode: Mode,
}

#[derive(Deserialize)]
struct ParamsFile {
    sys: DerivativeSystem,
    #[serde(default)]
    cert: Option<Certificate>,
    n: usize,
    variant: Theorem,
    #[serde(default = "native")]
    mode: Mode,
}

fn native() -> Mode {
    Mode::Native
}

impl WitnessParams {
    pub fn new(sys: DerivativeSystem, cert: Certificate, n: usize, variant: Theorem, mode: Mode) -> Self {
        WitnessParams { sys, cert, n, variant, mode }
    }

    /// Parses parameters from JSON. `cert` may be omitted, in which case it is searched
    /// for with the default box; `mode` defaults to native.
    pub fn from_json(text: &str) -> Result<Self> {
        let f: ParamsFile = serde_json::from_str(text)?;
        let sys = f.sys.validate()?;
        let cert = match f.cert {
            Some(c) => c,
            None => certify(&sys, DEFAULT_BOX)?,
        };
        let p = WitnessParams::new(sys, cert, f.n, f.variant, f.mode);
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.sys.violations().is_empty() {
            return Err(Error::InvalidSystem(self.sys.violations()));
        }
        if self.n < 1 {
            return Err(Error::Params("n must be at least 1".into()));
        }
        if let Mode::Scaled { base } = self.mode {
            if base < 2 {
                return Err(Error::Params(format!("scaled mode needs base >= 2, got {base}")));
            }
        }
        match self.variant {
            Theorem::T1 if self.cert.t1.is_none() => {
                return Err(Error::Params("variant T1 needs a Gamma certificate".into()))
            }
            Theorem::T2 if self.cert.t2.is_none() => {
                return Err(Error::Params("variant T2 needs an eps certificate".into()))
            }
            _ => {}
        }
        if !verify_certificate(&self.sys, &self.cert) {
            return Err(Error::Params("certificate does not verify for this system".into()));
        }
        Ok(())
    }

    /// Index (input order) of the designated `alpha_1`: the Gamma-maximal alpha for T1,
    /// the first alpha for T2.
    pub fn alpha1_index(&self) -> usize {
        match self.variant {
            Theorem::T1 => self.cert.t1.as_ref().map(|g| g.sigma[0]).unwrap_or(0),
            Theorem::T2 => 0,
        }
    }
}

/// `b_k = 2 + (-1)^k` when `|alpha_1| - |beta|` is even, otherwise all ones.
pub fn build_b(sys: &DerivativeSystem, alpha1: usize, n: usize) -> Vec<i64> {
    let even = (sys.alphas[alpha1].total_order() as i64 - sys.beta.total_order() as i64) % 2 == 0;
    (1..=n as i64)
        .map(|k| if even { 2 + if k % 2 == 0 { 1 } else { -1 } } else { 1 })
        .collect()
}

fn fast_factor(mode: Mode, lambda: i64, k: usize, n: usize) -> BigInt {
    match mode {
        Mode::Native => num_traits::pow(BigInt::from(3), (lambda as usize) * 2 * k * n),
        Mode::Scaled { base } => num_traits::pow(BigInt::from(base), lambda as usize * k),
    }
}

/// The frequencies `a_1, ..., a_n` (exact).
pub fn build_a(params: &WitnessParams) -> Result<Vec<Frequency>> {
    params.validate()?;
    let n = params.n;
    let lambda = &params.cert.lambda;
    let d = params.sys.d;
    match params.variant {
        Theorem::T1 => {
            let g = params.cert.t1.as_ref().expect("validated");
            let b = build_b(&params.sys, g.sigma[0], n);
            // theta = 1/gap, so floor(n^{theta gamma_j}) = floor(gap-th root of n^{gamma_j}).
            let gap = (*g.theta.0.denom() / *g.theta.0.numer()) as u32;
            assert_eq!(*g.theta.0.numer(), 1, "theta is a unit fraction");
            let roots: Vec<BigInt> = g
                .gamma
                .iter()
                .map(|&gj| {
                    let p = num_traits::pow(BigUint::from(n), gj as usize);
                    BigInt::from(p.nth_root(gap))
                })
                .collect();
            Ok((1..=n)
                .map(|k| {
                    Frequency(
                        (0..d)
                            .map(|j| {
                                fast_factor(params.mode, lambda[j], k, n)
                                    * num_traits::pow(BigInt::from(b[k - 1]), g.gamma[j] as usize)
                                    * &roots[j]
                            })
                            .collect(),
                    )
                })
                .collect())
        }
        Theorem::T2 => {
            let e = params.cert.t2.as_ref().expect("validated");
            Ok((1..=n)
                .map(|k| {
                    Frequency(
                        (0..d)
                            .map(|j| {
                                let f = fast_factor(params.mode, lambda[j], k, n);
                                if e.eps[j] == 1 && k % 2 == 1 {
                                    -f
                                } else {
                                    f
                                }
                            })
                            .collect(),
                    )
                })
                .collect())
        }
    }
}

/// One element of `A_k` (or of `-A_k`), with its coefficient vector over the sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeTerm {
    /// Level `k` (1-based).
    pub k: usize,
    /// `+1` for `A_k`, `-1` for `-A_k`.
    pub sign: i8,
    /// `q = sum_l xi_l a_l`, length `n`.
    pub xi: Vec<i8>,
    pub r: u32,
    pub q: Frequency,
}

/// Calls `f(q, r(q))` for every `q = a_k + sum_{j<k} xi_j a_j`, in lexicographic order
/// of `(xi_1, ..., xi_{k-1})`.
pub fn for_each_in_ak(a: &[Frequency], k: usize, mut f: impl FnMut(&[i8], &Frequency, u32)) {
    assert!(k >= 1 && k <= a.len(), "level k={k} outside 1..={}", a.len());
    let mut xi = vec![-1i8; k - 1];
    loop {
        let mut q = a[k - 1].clone();
        for (j, &x) in xi.iter().enumerate() {
            q = match x {
                1 => &q + &a[j],
                -1 => &q - &a[j],
                _ => q,
            };
        }
        let r = 1 + xi.iter().filter(|&&x| x != 0).count() as u32;
        f(&xi, &q, r);
        // odometer with the last coordinate fastest
        let mut i = xi.len();
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if xi[i] < 1 {
                xi[i] += 1;
                for x in &mut xi[i + 1..] {
                    *x = -1;
                }
                break;
            }
        }
    }
}

/// `A_k` with weights `r(q)`.
pub fn enumerate_ak(a: &[Frequency], k: usize) -> Vec<(Frequency, u32)> {
    let mut out = Vec::with_capacity(3usize.pow(k as u32 - 1));
    for_each_in_ak(a, k, |_, q, r| out.push((q.clone(), r)));
    out
}

/// Every `sum_l xi_l a_l` with `xi in {-1,0,1}^n` is distinct (brute force, `3^n` sums).
pub fn all_combinations_distinct(a: &[Frequency]) -> bool {
    let n = a.len();
    let d = a.first().map(Frequency::dim).unwrap_or(0);
    let mut seen = HashSet::with_capacity(3usize.pow(n as u32));
    let mut xi = vec![-1i8; n];
    loop {
        let mut q = Frequency::zero(d);
        for (l, &x) in xi.iter().enumerate() {
            q = match x {
                1 => &q + &a[l],
                -1 => &q - &a[l],
                _ => q,
            };
        }
        if !seen.insert(q) {
            return false;
        }
        let mut i = n;
        loop {
            if i == 0 {
                return true;
            }
            i -= 1;
            if xi[i] < 1 {
                xi[i] += 1;
                for x in &mut xi[i + 1..] {
                    *x = -1;
                }
                break;
            }
        }
    }
}

/// Sufficient magnitude test for distinct representations: for every `k` some
/// coordinate has `|a_k(j)| > 2 sum_{l<k} |a_l(j)|`.
pub fn uniqueness_by_magnitude(a: &[Frequency]) -> bool {
    let d = a.first().map(Frequency::dim).unwrap_or(0);
    (0..a.len()).all(|k| {
        (0..d).any(|j| {
            let lower: BigInt = a[..k].iter().map(|v| v.0[j].abs()).sum();
            a[k].0[j].abs() > lower * 2
        })
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthViolation {
    /// Level `k` (1-based, at least 2).
    pub k: usize,
    /// Coordinate (0-based).
    pub j: usize,
    /// `|a_k(j)| / |a_{k-1}(j)|` divided by `3^{2(n-1)}`; at most 1 means violated.
    pub ratio_over_required: f64,
}

/// Which structural invariants a family satisfies.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessDiagnostics {
    pub n: usize,
    pub set_sizes: Vec<usize>,
    pub unique_by_magnitude: bool,
    /// Coordinatewise `|a_k(j)| > 3^{2(n-1)} |a_{k-1}(j)|`.
    pub growth_holds: bool,
    pub growth_violations: Vec<GrowthViolation>,
    /// `||a_k||^2 > 3^{4(n-1)} ||a_{k-1}||^2`.
    pub l2_growth_holds: bool,
    pub tau_observed: f64,
    pub tau_within_2: bool,
    /// `max ||v - 1||_2 * 3^{2n}` over `q in A_k`, with `v_j = q(j)/a_k(j)`.
    pub v_deviation_scaled: f64,
    pub degree: String,
}

/// An immutable witness family.
#[derive(Clone, Debug)]
pub struct WitnessFamily {
    params: WitnessParams,
    alpha1: usize,
    a: Vec<Frequency>,
    b: Vec<i64>,
    cap: u64,
}

impl WitnessFamily {
    pub fn build(params: WitnessParams) -> Result<Self> {
        let a = build_a(&params)?;
        let alpha1 = params.alpha1_index();
        let b = match params.variant {
            Theorem::T1 => build_b(&params.sys, alpha1, params.n),
            Theorem::T2 => vec![1; params.n],
        };
        Ok(WitnessFamily { params, alpha1, a, b, cap: DEFAULT_CAP })
    }

    /// Expansion cap for exact polynomials (raw term count).
    pub fn with_cap(mut self, cap: u64) -> Self {
        self.cap = cap;
        self
    }

    pub fn cap(&self) -> u64 {
        self.cap
    }

    pub fn params(&self) -> &WitnessParams {
        &self.params
    }

    pub fn n(&self) -> usize {
        self.params.n
    }

    pub fn d(&self) -> usize {
        self.params.sys.d
    }

    pub fn a(&self) -> &[Frequency] {
        &self.a
    }

    pub fn b(&self) -> &[i64] {
        &self.b
    }

    pub fn alpha1_index(&self) -> usize {
        self.alpha1
    }

    pub fn alpha1(&self) -> &MultiIndex {
        &self.params.sys.alphas[self.alpha1]
    }

    /// The alphas other than `alpha_1`, in input order, as (index, multi-index).
    pub fn other_alphas(&self) -> Vec<(usize, &MultiIndex)> {
        self.params
            .sys
            .alphas
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != self.alpha1)
            .collect()
    }

    pub fn enumerate_ak(&self, k: usize) -> Vec<(Frequency, u32)> {
        enumerate_ak(&self.a, k)
    }

    /// `l_inf` degree of `W_n`: `max_j sum_k |a_k(j)|`.
    pub fn degree(&self) -> BigUint {
        (0..self.d())
            .map(|j| {
                self.a
                    .iter()
                    .map(|v| v.0[j].magnitude().clone())
                    .sum::<BigUint>()
            })
            .max()
            .unwrap_or_default()
    }

    /// Phase precision for sampling anything built from this family.
    pub fn phase_bits(&self) -> u32 {
        phase_bits_for(self.degree().bits())
    }

    pub fn sequence(&self) -> Sequence {
        Sequence::new(&self.a, self.phase_bits())
    }

    /// Total number of lattice terms `2 (3^n - 1)/2 = 3^n - 1` in `W_n`.
    fn lattice_terms(&self) -> u128 {
        3u128.pow(self.n() as u32) - 1
    }

    fn check_cap(&self, what: &str) -> Result<()> {
        let needed = self.lattice_terms();
        if needed > self.cap as u128 {
            return Err(Error::CapExceeded { what: what.into(), needed, cap: self.cap });
        }
        Ok(())
    }

    /// Visits every term of `A_k` and `-A_k` for all `k`.
    pub fn for_each_term(&self, mut f: impl FnMut(&LatticeTerm)) {
        let n = self.n();
        for k in 1..=n {
            for_each_in_ak(&self.a, k, |xi, q, r| {
                for sign in [1i8, -1] {
                    let mut full = vec![0i8; n];
                    for (l, &x) in xi.iter().enumerate() {
                        full[l] = sign * x;
                    }
                    full[k - 1] = sign;
                    let q = if sign == 1 { q.clone() } else { -q };
                    f(&LatticeTerm { k, sign, xi: full, r, q });
                }
            });
        }
    }

    fn power_of_two(r: u32) -> BigRational {
        BigRational::from_integer(BigInt::one() << r as usize)
    }

    fn ratio(&self, q: &Frequency, mu: &MultiIndex) -> Result<BigRational> {
        let den = q.monomial(self.alpha1());
        if den.is_zero() {
            return Err(Error::ZeroMonomial(q.to_string()));
        }
        Ok(BigRational::new(q.monomial(mu), den))
    }

    fn delta(&self, mu: &MultiIndex) -> i64 {
        mu.total_order() as i64 - self.alpha1().total_order() as i64
    }

    /// Coefficient of `D^mu W_n` at a lattice term: `i^delta q^mu / (q^alpha1 2^r)`.
    pub fn derivative_coeff(&self, t: &LatticeTerm, mu: &MultiIndex) -> Result<GaussianRational> {
        let v = self.ratio(&t.q, mu)? / Self::power_of_two(t.r);
        Ok(i_pow(self.delta(mu)) * gr_real(v))
    }

    /// Coefficient of `G_{mu,n}` at a lattice term: `i^delta s^delta a_k^mu / (a_k^alpha1 2^r)`.
    pub fn g_coeff(&self, t: &LatticeTerm, mu: &MultiIndex) -> Result<GaussianRational> {
        let ak = &self.a[t.k - 1];
        let mut v = self.ratio(ak, mu)? / Self::power_of_two(t.r);
        if t.sign < 0 && self.delta(mu).rem_euclid(2) == 1 {
            v = -v;
        }
        Ok(i_pow(self.delta(mu)) * gr_real(v))
    }

    /// Coefficient of `B_{mu,n}`: the difference of the two above.
    pub fn b_coeff(&self, t: &LatticeTerm, mu: &MultiIndex) -> Result<GaussianRational> {
        Ok(self.derivative_coeff(t, mu)? - self.g_coeff(t, mu)?)
    }

    /// Exact `R_n = prod (1 + cos<x,a_k>) - 1`, by multiplying out the factors.
    pub fn riesz_poly(&self) -> Result<TrigPoly> {
        self.check_cap("R_n")?;
        let factors: Vec<TrigPoly> = self.a.iter().map(TrigPoly::riesz_factor).collect();
        let p = product_expand(self.d(), &factors, self.cap)?;
        Ok(p.sub(&TrigPoly::one(self.d())))
    }

    /// Exact `W_n`.
    pub fn w_poly(&self) -> Result<TrigPoly> {
        self.derivative_poly(&MultiIndex::new(vec![0; self.d()]))
    }

    /// Exact `D^mu W_n`, term by term from the closed-form coefficients.
    pub fn derivative_poly(&self, mu: &MultiIndex) -> Result<TrigPoly> {
        self.lattice_poly_exact("D^mu W_n", |t| self.derivative_coeff(t, mu))
    }

    /// Exact `(B_{mu,n}, G_{mu,n})`.
    pub fn bg(&self, mu: &MultiIndex) -> Result<(TrigPoly, TrigPoly)> {
        let b = self.lattice_poly_exact("B_mu,n", |t| self.b_coeff(t, mu))?;
        let g = self.lattice_poly_exact("G_mu,n", |t| self.g_coeff(t, mu))?;
        Ok((b, g))
    }

    fn lattice_poly_exact(
        &self,
        what: &str,
        coeff: impl Fn(&LatticeTerm) -> Result<GaussianRational>,
    ) -> Result<TrigPoly> {
        self.check_cap(what)?;
        let mut p = TrigPoly::zero(self.d());
        let mut err = None;
        self.for_each_term(|t| {
            if err.is_some() {
                return;
            }
            match coeff(t) {
                Ok(c) => p.add_term(t.q.clone(), c),
                Err(e) => err = Some(e),
            }
        });
        match err {
            Some(e) => Err(e),
            None => Ok(p),
        }
    }

    /// Absolute coefficient sum of `B_{mu,n}`, streamed over the `A_k` without
    /// materializing the polynomial.
    pub fn b_triangle_norm(&self, mu: &MultiIndex) -> Result<TriangleNorm> {
        let mut acc = TriangleNorm::zero();
        let mut err = None;
        self.for_each_term(|t| {
            if err.is_some() {
                return;
            }
            match self.b_coeff(t, mu) {
                Ok(c) => acc.add_coeff(&c),
                Err(e) => err = Some(e),
            }
        });
        match err {
            Some(e) => Err(e),
            None => Ok(acc),
        }
    }

    fn lattice_table(
        &self,
        coeff: impl Fn(&LatticeTerm) -> Result<GaussianRational>,
    ) -> Result<Vec<Complex64>> {
        self.check_cap("lattice table")?;
        let mut table = vec![Complex64::new(0.0, 0.0); 3usize.pow(self.n() as u32)];
        let mut err = None;
        self.for_each_term(|t| {
            if err.is_some() {
                return;
            }
            match coeff(t) {
                Ok(c) => table[lattice_index(&t.xi)] = to_complex64(&c),
                Err(e) => err = Some(e),
            }
        });
        match err {
            Some(e) => Err(e),
            None => Ok(table),
        }
    }

    /// `R_n` in product form; asserts the product is nonnegative at every point.
    pub fn riesz_eval(&self) -> RieszProduct {
        RieszProduct::new(self.sequence(), true)
    }

    /// `psi_k` for `k = 1..=n+1` (`psi_1 = 1`).
    pub fn psi_eval(&self, k: usize) -> RieszProduct {
        assert!(k >= 1 && k <= self.n() + 1);
        RieszProduct::new(self.sequence().prefix(k - 1), false)
    }

    /// `G_{mu,n}` in factored form.
    pub fn g_eval(&self, mu: &MultiIndex) -> Result<GProduct> {
        let delta = self.delta(mu);
        let unit = to_complex64(&i_pow(delta));
        let coef = self
            .a
            .iter()
            .map(|ak| Ok(unit * self.ratio(ak, mu)?.to_f64().unwrap_or(f64::NAN)))
            .collect::<Result<Vec<_>>>()?;
        let sign = if delta.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        Ok(GProduct::new(self.sequence(), coef, sign))
    }

    /// `D^mu W_n` on the coefficient lattice (`3^n` table, contracted per point).
    pub fn derivative_eval(&self, mu: &MultiIndex) -> Result<LatticePoly> {
        Ok(LatticePoly::new(self.sequence(), self.lattice_table(|t| self.derivative_coeff(t, mu))?))
    }

    pub fn w_eval(&self) -> Result<LatticePoly> {
        self.derivative_eval(&MultiIndex::new(vec![0; self.d()]))
    }

    /// `B_{mu,n}` on the coefficient lattice.
    pub fn b_eval(&self, mu: &MultiIndex) -> Result<LatticePoly> {
        Ok(LatticePoly::new(self.sequence(), self.lattice_table(|t| self.b_coeff(t, mu))?))
    }

    /// T2 identities `a_k^{alpha_j} = a_k^{alpha_1}` and `a_k^beta = (-1)^k a_k^{alpha_1}`.
    pub fn t2_identities_hold(&self) -> bool {
        let sys = &self.params.sys;
        self.a.iter().enumerate().all(|(i, ak)| {
            let m1 = ak.monomial(self.alpha1());
            let k = i + 1;
            let mb = ak.monomial(&sys.beta);
            let expect_b = if k % 2 == 0 { m1.clone() } else { -m1.clone() };
            mb == expect_b && sys.alphas.iter().all(|al| ak.monomial(al) == m1)
        })
    }

    pub fn diagnostics(&self) -> WitnessDiagnostics {
        let n = self.n();
        let d = self.d();
        let required = num_traits::pow(BigInt::from(3), 2 * (n - 1));
        let mut violations = Vec::new();
        for k in 1..n {
            for j in 0..d {
                let hi = self.a[k].0[j].abs();
                let lo = self.a[k - 1].0[j].abs();
                if hi <= &lo * &required {
                    let r = BigRational::new(hi, lo * &required);
                    violations.push(GrowthViolation {
                        k: k + 1,
                        j,
                        ratio_over_required: r.to_f64().unwrap_or(f64::NAN),
                    });
                }
            }
        }
        let req2 = &required * &required;
        let norm2 = |v: &Frequency| v.0.iter().map(|c| c * c).sum::<BigInt>();
        let l2 = (1..n).all(|k| norm2(&self.a[k]) > norm2(&self.a[k - 1]) * &req2);

        let mut tau = 1.0f64;
        let mut tau_ok = true;
        let mut dev: f64 = 0.0;
        let scale = 9f64.powi(n as i32);
        for k in 1..=n {
            let ak = &self.a[k - 1];
            for_each_in_ak(&self.a, k, |_, q, _| {
                let mut s = 0.0;
                for j in 0..d {
                    let (qa, aa) = (q.0[j].abs(), ak.0[j].abs());
                    if qa > &aa * 2 || &qa * 2 < aa || qa.is_zero() {
                        tau_ok = false;
                    }
                    if !qa.is_zero() {
                        let r = BigRational::new(qa.clone(), aa.clone()).to_f64().unwrap_or(f64::INFINITY);
                        tau = tau.max(r).max(1.0 / r);
                    } else {
                        tau = f64::INFINITY;
                    }
                    let v = BigRational::new(q.0[j].clone(), ak.0[j].clone()).to_f64().unwrap_or(f64::NAN);
                    s += (v - 1.0) * (v - 1.0);
                }
                dev = dev.max(s.sqrt() * scale);
            });
        }
        WitnessDiagnostics {
            n,
            set_sizes: (1..=n).map(|k| 3usize.pow(k as u32 - 1)).collect(),
            unique_by_magnitude: uniqueness_by_magnitude(&self.a),
            growth_holds: violations.is_empty(),
            growth_violations: violations,
            l2_growth_holds: l2,
            tau_observed: tau,
            tau_within_2: tau_ok,
            v_deviation_scaled: dev,
            degree: self.degree().to_string(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certsearch::certify;
    use crate::trigpoly::{TorusFunction, TorusPoint};
    use proptest::prelude::*;
    use rand::SeedableRng;

    fn cor1() -> (DerivativeSystem, Certificate) {
        let sys = DerivativeSystem::mixed_second_order();
        let cert = certify(&sys, DEFAULT_BOX).unwrap();
        (sys, cert)
    }

    fn family(variant: Theorem, n: usize, mode: Mode) -> WitnessFamily {
        let (sys, cert) = cor1();
        WitnessFamily::build(WitnessParams::new(sys, cert, n, variant, mode)).unwrap()
    }

    fn f(v: &[i64]) -> Frequency {
        Frequency::from_i64(v)
    }

    #[test]
    fn b_sequences() {
        let sys = DerivativeSystem::mixed_second_order();
        assert_eq!(build_b(&sys, 0, 4), vec![1, 3, 1, 3]);
        assert_eq!(build_b(&sys, 0, 1), vec![1]);
        let odd = DerivativeSystem::new(2, vec![vec![4, 0], vec![0, 2]], vec![2, 1]);
        assert_eq!(build_b(&odd, 0, 3), vec![1, 1, 1]);
    }

    #[test]
    fn a_sequences_match_hand_values() {
        let t1 = family(Theorem::T1, 2, Mode::Native);
        assert_eq!(t1.a(), &[f(&[162, 81]), f(&[118098, 19683])]);
        let t2 = family(Theorem::T2, 2, Mode::Native);
        assert_eq!(t2.a(), &[f(&[-81, 81]), f(&[6561, 6561])]);
        let sc = family(Theorem::T2, 2, Mode::Scaled { base: 4 });
        assert_eq!(sc.a(), &[f(&[-4, 4]), f(&[16, 16])]);
        assert_eq!(t1.degree(), BigUint::from(118260u32));
    }

    #[test]
    fn floor_root_is_exact_near_integers() {
        // n = 4, theta gamma = 1/2: floor(sqrt(4)) must be exactly 2, floor(sqrt(4^2)) = 4.
        let t1 = family(Theorem::T1, 4, Mode::Scaled { base: 3 });
        // a_1(1) = 3^1 * b_1^2 * floor(4^{2/2}) = 3 * 1 * 4; a_1(2) = 3 * 1 * floor(4^{1/2}) = 6
        assert_eq!(t1.a()[0], f(&[12, 6]));
    }

    #[test]
    fn ak_enumeration() {
        let a = vec![f(&[1, 0]), f(&[10, 3]), f(&[100, 7]), f(&[1000, 1])];
        assert_eq!(enumerate_ak(&a, 1), vec![(a[0].clone(), 1)]);
        assert_eq!(
            enumerate_ak(&a, 2),
            vec![(&a[1] - &a[0], 2), (a[1].clone(), 1), (&a[1] + &a[0], 2)]
        );
        assert_eq!(enumerate_ak(&a, 4).len(), 27);
    }

    #[test]
    fn riesz_expansion_structure() {
        for n in 1..=6 {
            let fam = family(Theorem::T2, n, Mode::Native);
            let r = fam.riesz_poly().unwrap();
            assert!(r.constant_term().is_zero(), "n={n}");
            assert_eq!(r.len() as u128, 3u128.pow(n as u32) - 1);
            for k in 1..=n {
                for (q, rq) in fam.enumerate_ak(k) {
                    let want = gr_real(BigRational::new(BigInt::one(), BigInt::one() << rq as usize));
                    assert_eq!(r.coeff(&q), Some(&want));
                    assert_eq!(r.coeff(&-&q), Some(&want));
                }
            }
            let x = TorusPoint::zero(2, fam.phase_bits());
            assert!((fam.riesz_eval().eval(&x).re - (2f64.powi(n as i32) - 1.0)).abs() < 1e-9);
        }
        let r1 = family(Theorem::T2, 1, Mode::Native).riesz_poly().unwrap();
        assert_eq!(r1.triangle_norm().bound_f64(), 1.0);
    }

    #[test]
    fn w_identities() {
        let fam = family(Theorem::T2, 3, Mode::Native);
        let w = fam.w_poly().unwrap();
        assert!(w.is_real());
        assert_eq!(w.differentiate(fam.alpha1()), fam.riesz_poly().unwrap());
        let w = family(Theorem::T2, 2, Mode::Native).w_poly().unwrap();
        let c = w.coeff(&f(&[-81, 81])).unwrap();
        assert_eq!(c, &gr_real(BigRational::new((-1).into(), 13122.into())));
    }

    #[test]
    fn split_is_exact() {
        for variant in [Theorem::T1, Theorem::T2] {
            let fam = family(variant, 3, Mode::Native);
            let w = fam.w_poly().unwrap();
            let sys = fam.params().sys.clone();
            for mu in std::iter::once(&sys.beta).chain(sys.alphas.iter()) {
                let (b, g) = fam.bg(mu).unwrap();
                assert_eq!(b.add(&g), w.differentiate(mu), "{variant} mu={mu}");
            }
        }
    }

    #[test]
    fn g_telescopes_in_t2() {
        let fam = family(Theorem::T2, 4, Mode::Native);
        assert!(fam.t2_identities_hold());
        // G_beta,n coefficients at +-a_k are (-1)^k i^{|beta|-|alpha1|} / 2.
        let (_, g) = fam.bg(&fam.params().sys.beta).unwrap();
        for (k, ak) in fam.a().iter().enumerate() {
            let s = if (k + 1) % 2 == 0 { 1 } else { -1 };
            let want = gr_real(BigRational::new(s.into(), 2.into()));
            assert_eq!(g.coeff(ak), Some(&want));
        }
    }

    #[test]
    fn b_triangle_norm_regression() {
        let fam = family(Theorem::T2, 2, Mode::Native);
        let beta = fam.params().sys.beta.clone();
        let streamed = fam.b_triangle_norm(&beta).unwrap();
        let (b, _) = fam.bg(&beta).unwrap();
        assert_eq!(streamed, b.triangle_norm());
        // B at a_2 +- a_1 = (6480, 6642), (6642, 6480) and negatives:
        // |q1 q2 / q1^2 - a_2^beta / a_2^alpha1| / 4 = |q2/q1 - 1| / 4, each twice.
        let r = |a: i64, b: i64| BigRational::new((b - a).abs().into(), (4 * a).into());
        let want = (r(6480, 6642) + r(6642, 6480)) * BigRational::from_integer(2.into());
        assert_eq!(streamed.re, want);
        assert!(streamed.im.is_zero());
    }

    #[test]
    fn zero_monomial_is_reported() {
        // alpha_1 = (1,1) as the Gamma-maximal alpha would vanish where q has a zero
        // coordinate; force one with a hand-built family.
        let (sys, cert) = cor1();
        let mut fam = WitnessFamily::build(WitnessParams::new(sys, cert, 2, Theorem::T2, Mode::Scaled { base: 2 })).unwrap();
        fam.a = vec![f(&[1, 1]), f(&[1, 3])];
        let err = fam.w_poly().unwrap_err();
        assert!(matches!(err, Error::ZeroMonomial(ref q) if q.contains('0')), "{err}");
    }

    #[test]
    fn cap_is_enforced() {
        let fam = family(Theorem::T2, 4, Mode::Native).with_cap(20);
        assert!(matches!(fam.w_poly(), Err(Error::CapExceeded { .. })));
        assert!(matches!(fam.riesz_poly(), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn native_invariants() {
        for n in 1..=5 {
            let fam = family(Theorem::T2, n, Mode::Native);
            let diag = fam.diagnostics();
            assert!(diag.unique_by_magnitude && diag.growth_holds && diag.tau_within_2, "{diag:?}");
            assert!(all_combinations_distinct(fam.a()));
        }
    }

    #[test]
    fn t1_even_growth_equality_is_reported() {
        // With b_k alternating 1,3 and gamma = (2,1) the first coordinate grows by exactly
        // 3^{2(n-1)} * 9 / 9 on odd steps.
        let fam = family(Theorem::T1, 3, Mode::Native);
        let diag = fam.diagnostics();
        assert!(!diag.growth_holds);
        assert!(diag.growth_violations.iter().all(|v| v.ratio_over_required <= 1.0));
        let scaled = WitnessFamily::build(WitnessParams::new(
            fam.params().sys.clone(),
            fam.params().cert.with_lambda_scaled(2),
            3,
            Theorem::T1,
            Mode::Native,
        ))
        .unwrap();
        assert!(scaled.diagnostics().growth_holds);
    }

    #[test]
    fn scaled_small_base_reports_growth_failure() {
        let fam = family(Theorem::T2, 3, Mode::Scaled { base: 4 });
        let diag = fam.diagnostics();
        assert!(!diag.growth_holds);
        assert!(diag.unique_by_magnitude);
    }

    #[test]
    fn params_json() {
        let json = r#"{"sys":{"d":2,"alphas":[[2,0],[0,2]],"beta":[1,1]},"n":2,"variant":"T2","mode":{"scaled":{"base":4}}}"#;
        let p = WitnessParams::from_json(json).unwrap();
        assert_eq!(p.mode, Mode::Scaled { base: 4 });
        let back: WitnessParams = serde_json::from_str(&serde_json::to_string(&p).unwrap()).unwrap();
        assert_eq!(back, p);
        let bad = r#"{"sys":{"d":2,"alphas":[[2,0],[0,2]],"beta":[1,1]},"n":0,"variant":"T2"}"#;
        assert!(WitnessParams::from_json(bad).is_err());
    }

    #[test]
    fn fast_evaluators_match_exact_polynomials() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for variant in [Theorem::T1, Theorem::T2] {
            let fam = family(variant, 3, Mode::Native);
            let bits = fam.phase_bits();
            let beta = fam.params().sys.beta.clone();
            let (b, g) = fam.bg(&beta).unwrap();
            let dw = fam.w_poly().unwrap().differentiate(&beta);
            let r = fam.riesz_poly().unwrap();
            let (fb, fg, fd, fr) = (
                fam.b_eval(&beta).unwrap(),
                fam.g_eval(&beta).unwrap(),
                fam.derivative_eval(&beta).unwrap(),
                fam.riesz_eval(),
            );
            let scale = dw.triangle_norm().bound_f64().max(1.0);
            for _ in 0..20 {
                let x = TorusPoint::random(&mut rng, 2, bits);
                assert!((fb.eval(&x) - b.eval(&x)).norm() < 1e-9 * scale);
                assert!((fg.eval(&x) - g.eval(&x)).norm() < 1e-9 * scale);
                assert!((fd.eval(&x) - dw.eval(&x)).norm() < 1e-9 * scale);
                assert!((fr.eval(&x) - r.eval(&x)).norm() < 1e-9);
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn split_sums_pointwise(seed in any::<u64>(), n in 1usize..4) {
            let fam = family(Theorem::T2, n, Mode::Native);
            let beta = fam.params().sys.beta.clone();
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let x = TorusPoint::random(&mut rng, 2, fam.phase_bits());
            let lhs = fam.b_eval(&beta).unwrap().eval(&x) + fam.g_eval(&beta).unwrap().eval(&x);
            let rhs = fam.derivative_eval(&beta).unwrap().eval(&x);
            prop_assert!((lhs - rhs).norm() < 1e-9 * 3f64.powi(n as i32));
        }

        #[test]
        fn riesz_product_nonnegative(seed in any::<u64>(), n in 1usize..7) {
            let fam = family(Theorem::T1, n, Mode::Native);
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let x = TorusPoint::random(&mut rng, 2, fam.phase_bits());
            prop_assert!(fam.riesz_eval().eval(&x).re >= -1.0);
        }
    }
}
