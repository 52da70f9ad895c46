//! Sparse trigonometric polynomials `sum_q c_q e^{i<q,x>}` with big-integer
//! frequencies and exact Gaussian-rational coefficients.

mod dump;
pub mod phase;

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub use dump::{parse_dump, write_dump};
pub use phase::{phase_bits_for, FreqResidue, TorusFunction, TorusPoint};

use crate::error::{Error, Result};
use crate::index::MultiIndex;

/// Default bound on the number of terms an expansion may produce.
pub const DEFAULT_CAP: u64 = 10_000_000;

/// Environment variable that overrides [`DEFAULT_CAP`].
pub const CAP_ENV: &str = "ORNSTEIN_CAP";

pub fn cap_from_env() -> u64 {
    std::env::var(CAP_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_CAP)
}

/// A lattice point `q in Z^d`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Frequency(pub Vec<BigInt>);

impl Frequency {
    pub fn zero(d: usize) -> Self {
        Frequency(vec![BigInt::zero(); d])
    }

    pub fn from_i64(v: &[i64]) -> Self {
        Frequency(v.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[BigInt] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    /// `q^mu = prod_j q_j^mu(j)`.
    pub fn monomial(&self, mu: &MultiIndex) -> BigInt {
        self.0
            .iter()
            .zip(mu.entries())
            .fold(BigInt::one(), |acc, (q, &e)| acc * num_traits::pow(q.clone(), e as usize))
    }

    /// `max_j |q_j|`
    pub fn linf(&self) -> BigUint {
        self.0
            .iter()
            .map(|c| c.magnitude().clone())
            .max()
            .unwrap_or_default()
    }

    pub fn max_bits(&self) -> u64 {
        self.0.iter().map(|c| c.bits()).max().unwrap_or(0)
    }
}

impl std::ops::Neg for &Frequency {
    type Output = Frequency;
    fn neg(self) -> Frequency {
        Frequency(self.0.iter().map(|c| -c).collect())
    }
}

impl std::ops::Add for &Frequency {
    type Output = Frequency;
    fn add(self, o: &Frequency) -> Frequency {
        Frequency(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }
}

impl std::ops::Sub for &Frequency {
    type Output = Frequency;
    fn sub(self, o: &Frequency) -> Frequency {
        Frequency(self.0.iter().zip(&o.0).map(|(a, b)| a - b).collect())
    }
}

impl fmt::Display for Frequency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

pub type GaussianRational = Complex<BigRational>;

pub fn gr(re: BigRational, im: BigRational) -> GaussianRational {
    Complex::new(re, im)
}

pub fn gr_real(re: BigRational) -> GaussianRational {
    Complex::new(re, BigRational::zero())
}

/// `i^k` as an exact Gaussian integer.
pub fn i_pow(k: i64) -> GaussianRational {
    let (re, im) = match k.rem_euclid(4) {
        0 => (1, 0),
        1 => (0, 1),
        2 => (-1, 0),
        _ => (0, -1),
    };
    gr(
        BigRational::from_integer(re.into()),
        BigRational::from_integer(im.into()),
    )
}

pub fn to_complex64(c: &GaussianRational) -> Complex64 {
    Complex64::new(
        c.re.to_f64().unwrap_or(0.0),
        c.im.to_f64().unwrap_or(0.0),
    )
}

/// `(sum |re|, sum |im|, sum (|re| + |im|))` over the coefficients: the last entry
/// bounds the sup norm and hence the L1 norm.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TriangleNorm {
    pub re: BigRational,
    pub im: BigRational,
    pub bound: BigRational,
}

impl TriangleNorm {
    pub fn zero() -> Self {
        TriangleNorm {
            re: BigRational::zero(),
            im: BigRational::zero(),
            bound: BigRational::zero(),
        }
    }

    pub fn add_coeff(&mut self, c: &GaussianRational) {
        let (r, i) = (c.re.abs(), c.im.abs());
        self.bound += &r + &i;
        self.re += r;
        self.im += i;
    }

    pub fn bound_f64(&self) -> f64 {
        self.bound.to_f64().unwrap_or(f64::INFINITY)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrigPoly {
    d: usize,
    terms: BTreeMap<Frequency, GaussianRational>,
}

impl TrigPoly {
    pub fn zero(d: usize) -> Self {
        TrigPoly {
            d,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(d: usize, c: GaussianRational) -> Self {
        let mut p = Self::zero(d);
        p.add_term(Frequency::zero(d), c);
        p
    }

    pub fn one(d: usize) -> Self {
        Self::constant(d, gr_real(BigRational::one()))
    }

    /// `e^{i<q,x>}`
    pub fn exp(q: Frequency) -> Self {
        let mut p = Self::zero(q.dim());
        p.add_term(q, gr_real(BigRational::one()));
        p
    }

    /// `cos<q,x> = (e^{i<q,x>} + e^{-i<q,x>}) / 2`
    pub fn cos(q: &Frequency) -> Self {
        let half = gr_real(BigRational::new(1.into(), 2.into()));
        let mut p = Self::zero(q.dim());
        p.add_term(q.clone(), half.clone());
        p.add_term(-q, half);
        p
    }

    /// `sin<q,x> = (e^{i<q,x>} - e^{-i<q,x>}) / 2i`
    pub fn sin(q: &Frequency) -> Self {
        let h = BigRational::new(1.into(), 2.into());
        let mut p = Self::zero(q.dim());
        p.add_term(q.clone(), gr(BigRational::zero(), -h.clone()));
        p.add_term(-q, gr(BigRational::zero(), h));
        p
    }

    /// `1 + cos<q,x>`
    pub fn riesz_factor(q: &Frequency) -> Self {
        let mut p = Self::cos(q);
        p.add_term(Frequency::zero(q.dim()), gr_real(BigRational::one()));
        p
    }

    pub fn from_terms(d: usize, terms: impl IntoIterator<Item = (Frequency, GaussianRational)>) -> Result<Self> {
        let mut p = Self::zero(d);
        for (q, c) in terms {
            if q.dim() != d {
                return Err(Error::Dimension { expected: d, got: q.dim() });
            }
            p.add_term(q, c);
        }
        Ok(p)
    }

    /// Adds `c e^{i<q,x>}`, merging with an existing term and dropping zeros.
    pub fn add_term(&mut self, q: Frequency, c: GaussianRational) {
        debug_assert_eq!(q.dim(), self.d);
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(q) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in lexicographic frequency order.
    pub fn terms(&self) -> impl Iterator<Item = (&Frequency, &GaussianRational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, q: &Frequency) -> Option<&GaussianRational> {
        self.terms.get(q)
    }

    pub fn coeff_mut(&mut self, q: &Frequency) -> Option<&mut GaussianRational> {
        self.terms.get_mut(q)
    }

    pub fn constant_term(&self) -> GaussianRational {
        self.terms
            .get(&Frequency::zero(self.d))
            .cloned()
            .unwrap_or_else(GaussianRational::zero)
    }

    pub fn add(&self, o: &TrigPoly) -> TrigPoly {
        let mut out = self.clone();
        for (q, c) in &o.terms {
            out.add_term(q.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, o: &TrigPoly) -> TrigPoly {
        let mut out = self.clone();
        for (q, c) in &o.terms {
            out.add_term(q.clone(), -c.clone());
        }
        out
    }

    pub fn scale(&self, s: &GaussianRational) -> TrigPoly {
        let mut out = Self::zero(self.d);
        for (q, c) in &self.terms {
            out.add_term(q.clone(), c * s);
        }
        out
    }

    /// Exact distributive product; fails if it would form more than `cap` raw terms.
    pub fn mul(&self, o: &TrigPoly, cap: u64) -> Result<TrigPoly> {
        let needed = self.len() as u128 * o.len() as u128;
        if needed > cap as u128 {
            return Err(Error::CapExceeded {
                what: "polynomial product".into(),
                needed,
                cap,
            });
        }
        let mut out = Self::zero(self.d);
        for (p, a) in &self.terms {
            for (q, b) in &o.terms {
                out.add_term(p + q, a * b);
            }
        }
        Ok(out)
    }

    /// `D^mu`: each coefficient is multiplied by `(i q)^mu = i^|mu| q^mu`.
    pub fn differentiate(&self, mu: &MultiIndex) -> TrigPoly {
        let unit = i_pow(mu.total_order() as i64);
        let mut out = Self::zero(self.d);
        for (q, c) in &self.terms {
            let m = q.monomial(mu);
            if m.is_zero() {
                continue;
            }
            let f = &unit * gr_real(BigRational::from_integer(m));
            out.add_term(q.clone(), c * f);
        }
        out
    }

    /// `l_inf` degree: the largest `|q_j|` over stored frequencies.
    pub fn degree(&self) -> Result<BigUint> {
        self.terms
            .keys()
            .map(Frequency::linf)
            .max()
            .ok_or(Error::UndefinedDegree)
    }

    pub fn max_freq_bits(&self) -> u64 {
        self.terms.keys().map(Frequency::max_bits).max().unwrap_or(0)
    }

    /// Real-valued iff `c_{-q} = conj(c_q)` for all `q`.
    pub fn is_real(&self) -> bool {
        self.terms.iter().all(|(q, c)| {
            self.terms
                .get(&-q)
                .is_some_and(|c2| *c2 == c.conj())
        })
    }

    pub fn triangle_norm(&self) -> TriangleNorm {
        let mut t = TriangleNorm::zero();
        for c in self.terms.values() {
            t.add_coeff(c);
        }
        t
    }

    /// Reference evaluation: every phase is reduced with arbitrary-precision integers.
    pub fn eval(&self, x: &TorusPoint) -> Complex64 {
        self.terms
            .iter()
            .map(|(q, c)| to_complex64(c) * phase::cis(phase::phase_bigint(&q.0, x)))
            .sum()
    }

    /// Precomputes residues and double coefficients for fast repeated evaluation.
    pub fn compile(&self, bits: u32) -> CompiledPoly {
        CompiledPoly {
            d: self.d,
            bits,
            terms: self
                .terms
                .iter()
                .map(|(q, c)| (FreqResidue::new(&q.0, bits), to_complex64(c)))
                .collect(),
        }
    }

    /// Compiled with the phase precision [`phase_bits_for`] picks for this polynomial.
    pub fn compile_auto(&self) -> CompiledPoly {
        self.compile(phase_bits_for(self.max_freq_bits()))
    }
}

/// Exact product of `factors`, refusing when an intermediate product would form more
/// than `cap` raw terms. The empty product is the constant 1.
pub fn product_expand(d: usize, factors: &[TrigPoly], cap: u64) -> Result<TrigPoly> {
    let mut acc = TrigPoly::one(d);
    for f in factors {
        acc = acc.mul(f, cap)?;
    }
    Ok(acc)
}

/// A polynomial with residues precomputed; the fast route for sampling.
#[derive(Clone, Debug)]
pub struct CompiledPoly {
    d: usize,
    bits: u32,
    terms: Vec<(FreqResidue, Complex64)>,
}

impl CompiledPoly {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

impl TorusFunction for CompiledPoly {
    fn dim(&self) -> usize {
        self.d
    }

    fn phase_bits(&self) -> u32 {
        self.bits
    }

    fn eval(&self, x: &TorusPoint) -> Complex64 {
        self.terms.iter().map(|(r, c)| c * r.cis(x)).sum()
    }
}
