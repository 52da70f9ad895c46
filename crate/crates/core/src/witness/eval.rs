//! Pointwise evaluators built on a compiled frequency sequence `a_1, ..., a_n`.
//!
//! Each evaluator computes `z_k = e^{i<a_k,x>}` with exact phase reduction once per
//! point and then works with products of unit complex numbers, so the cost is
//! independent of how large the frequencies are.

use num_complex::Complex64;

use crate::trigpoly::{FreqResidue, Frequency, TorusFunction, TorusPoint};

/// A frequency sequence reduced for phase evaluation at a fixed precision.
#[derive(Clone, Debug)]
pub struct Sequence {
    d: usize,
    bits: u32,
    res: Vec<FreqResidue>,
}

impl Sequence {
    pub fn new(a: &[Frequency], bits: u32) -> Self {
        let d = a.first().map(Frequency::dim).unwrap_or(0);
        Sequence {
            d,
            bits,
            res: a.iter().map(|q| FreqResidue::new(q.coords(), bits)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.res.len()
    }

    pub fn is_empty(&self) -> bool {
        self.res.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    #[inline]
    pub fn cis(&self, k: usize, x: &TorusPoint) -> Complex64 {
        self.res[k].cis(x)
    }

    /// The first `len` sequence elements.
    pub fn prefix(&self, len: usize) -> Sequence {
        Sequence {
            d: self.d,
            bits: self.bits,
            res: self.res[..len].to_vec(),
        }
    }
}

/// `prod_{k<len} (1 + cos<a_k,x>)`, optionally minus one (the modified product `R_n`).
///
/// `len = k - 1` gives `psi_k`; `len = n` with `minus_one` gives `R_n`.
#[derive(Clone, Debug)]
pub struct RieszProduct {
    seq: Sequence,
    minus_one: bool,
}

impl RieszProduct {
    pub fn new(seq: Sequence, minus_one: bool) -> Self {
        RieszProduct { seq, minus_one }
    }

    /// The nonnegative product itself.
    pub fn product(&self, x: &TorusPoint) -> f64 {
        let mut p = 1.0;
        for k in 0..self.seq.len() {
            p *= 1.0 + self.seq.cis(k, x).re;
        }
        assert!(p >= 0.0, "Riesz product negative at a sample point: {p}");
        p
    }
}

impl TorusFunction for RieszProduct {
    fn dim(&self) -> usize {
        self.seq.dim()
    }

    fn phase_bits(&self) -> u32 {
        self.seq.bits()
    }

    fn eval(&self, x: &TorusPoint) -> Complex64 {
        let p = self.product(x);
        Complex64::new(if self.minus_one { p - 1.0 } else { p }, 0.0)
    }
}

/// `sum_k c_k * (z_k + s conj(z_k)) / 2 * psi_k(x)` with cumulative `psi_k`.
///
/// With `c_k = i^delta a_k^mu / a_k^alpha1` and `s = (-1)^delta` this is the main term
/// `G_{mu,n}` of the split `D^mu W_n = B + G`.
#[derive(Clone, Debug)]
pub struct GProduct {
    seq: Sequence,
    coef: Vec<Complex64>,
    sign: f64,
}

impl GProduct {
    pub fn new(seq: Sequence, coef: Vec<Complex64>, sign: f64) -> Self {
        assert_eq!(seq.len(), coef.len());
        GProduct { seq, coef, sign }
    }
}

impl TorusFunction for GProduct {
    fn dim(&self) -> usize {
        self.seq.dim()
    }

    fn phase_bits(&self) -> u32 {
        self.seq.bits()
    }

    fn eval(&self, x: &TorusPoint) -> Complex64 {
        let mut psi = 1.0;
        let mut sum = Complex64::new(0.0, 0.0);
        for (k, c) in self.coef.iter().enumerate() {
            let z = self.seq.cis(k, x);
            sum += c * 0.5 * (z + self.sign * z.conj()) * psi;
            psi *= 1.0 + z.re;
        }
        sum
    }
}

/// `sum_{k=1}^{L} c_k psi_k(x)` where `psi_1 = 1` and `psi_k` uses `a_1..a_{k-1}`.
#[derive(Clone, Debug)]
pub struct PsiCombination {
    seq: Sequence,
    coeffs: Vec<f64>,
}

impl PsiCombination {
    /// Needs `coeffs.len() <= seq.len() + 1`.
    pub fn new(seq: Sequence, coeffs: Vec<f64>) -> Self {
        assert!(coeffs.len() <= seq.len() + 1, "psi_k needs a_1..a_(k-1)");
        PsiCombination { seq, coeffs }
    }
}

impl TorusFunction for PsiCombination {
    fn dim(&self) -> usize {
        self.seq.dim()
    }

    fn phase_bits(&self) -> u32 {
        self.seq.bits()
    }

    fn eval(&self, x: &TorusPoint) -> Complex64 {
        let mut psi = 1.0;
        let mut sum = 0.0;
        for (k, c) in self.coeffs.iter().enumerate() {
            sum += c * psi;
            if k + 1 < self.coeffs.len() {
                psi *= 1.0 + self.seq.cis(k, x).re;
                assert!(psi >= 0.0);
            }
        }
        Complex64::new(sum, 0.0)
    }
}

/// `sum_{k=1}^{n} e^{i<a_k,x>} psi_k(x)`.
#[derive(Clone, Debug)]
pub struct ExpPsiSum {
    seq: Sequence,
}

impl ExpPsiSum {
    pub fn new(seq: Sequence) -> Self {
        ExpPsiSum { seq }
    }
}

impl TorusFunction for ExpPsiSum {
    fn dim(&self) -> usize {
        self.seq.dim()
    }

    fn phase_bits(&self) -> u32 {
        self.seq.bits()
    }

    fn eval(&self, x: &TorusPoint) -> Complex64 {
        let mut psi = 1.0;
        let mut sum = Complex64::new(0.0, 0.0);
        for k in 0..self.seq.len() {
            let z = self.seq.cis(k, x);
            sum += z * psi;
            psi *= 1.0 + z.re;
        }
        sum
    }
}

/// Index of `xi in {-1,0,1}^n` in a lattice coefficient table: digit `xi_k + 1` at `3^k`.
pub fn lattice_index(xi: &[i8]) -> usize {
    xi.iter()
        .rev()
        .fold(0usize, |acc, &x| acc * 3 + (x + 1) as usize)
}

/// Contracts `sum_xi c(xi) prod_k z_k^{xi_k}` one level at a time.
fn contract(coeffs: &[Complex64], z: &[Complex64], scratch: &mut Vec<Complex64>) -> Complex64 {
    scratch.clear();
    scratch.extend_from_slice(coeffs);
    let mut len = scratch.len();
    for zk in z {
        let zi = zk.conj();
        let next = len / 3;
        for j in 0..next {
            let v = scratch[3 * j] * zi + scratch[3 * j + 1] + scratch[3 * j + 2] * zk;
            scratch[j] = v;
        }
        len = next;
    }
    debug_assert_eq!(len, 1);
    scratch[0]
}

/// A polynomial supported on the lattice `{sum_k xi_k a_k : xi in {-1,0,1}^n}`,
/// stored as a dense table of `3^n` coefficients.
#[derive(Clone, Debug)]
pub struct LatticePoly {
    seq: Sequence,
    coeffs: Vec<Complex64>,
}

impl LatticePoly {
    pub fn new(seq: Sequence, coeffs: Vec<Complex64>) -> Self {
        assert_eq!(coeffs.len(), 3usize.pow(seq.len() as u32));
        LatticePoly { seq, coeffs }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn sequence(&self) -> &Sequence {
        &self.seq
    }
}

impl TorusFunction for LatticePoly {
    fn dim(&self) -> usize {
        self.seq.dim()
    }

    fn phase_bits(&self) -> u32 {
        self.seq.bits()
    }

    fn eval(&self, x: &TorusPoint) -> Complex64 {
        let z: Vec<Complex64> = (0..self.seq.len()).map(|k| self.seq.cis(k, x)).collect();
        let mut scratch = Vec::with_capacity(self.coeffs.len());
        contract(&self.coeffs, &z, &mut scratch)
    }
}

/// The same lattice polynomial with the phases decoupled: `z_k = e^{i<a_k, t_k>}` where
/// `t_1, ..., t_n` are independent points of `T^d`. Lives on `T^{nd}`.
#[derive(Clone, Debug)]
pub struct DecoupledLattice {
    inner: LatticePoly,
}

impl DecoupledLattice {
    pub fn new(inner: LatticePoly) -> Self {
        DecoupledLattice { inner }
    }
}

impl TorusFunction for DecoupledLattice {
    fn dim(&self) -> usize {
        self.inner.seq.dim() * self.inner.seq.len()
    }

    fn phase_bits(&self) -> u32 {
        self.inner.seq.bits()
    }

    fn eval(&self, x: &TorusPoint) -> Complex64 {
        let d = self.inner.seq.dim();
        let z: Vec<Complex64> = (0..self.inner.seq.len())
            .map(|k| self.inner.seq.cis(k, &x.block(k * d, d)))
            .collect();
        let mut scratch = Vec::with_capacity(self.inner.coeffs.len());
        contract(&self.inner.coeffs, &z, &mut scratch)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn lattice_index_order() {
        assert_eq!(lattice_index(&[-1, -1]), 0);
        assert_eq!(lattice_index(&[0, 0]), 4);
        assert_eq!(lattice_index(&[1, 0]), 5);
        assert_eq!(lattice_index(&[0, 1]), 7);
    }

    #[test]
    fn psi_one_is_identically_one() {
        let a = vec![Frequency::from_i64(&[3, 5])];
        let seq = Sequence::new(&a, 128);
        let f = PsiCombination::new(seq.clone(), vec![2.5]);
        let g = RieszProduct::new(seq.prefix(0), false);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10 {
            let x = TorusPoint::random(&mut rng, 2, 128);
            assert_eq!(f.eval(&x).re, 2.5);
            assert_eq!(g.eval(&x).re, 1.0);
        }
    }

    #[test]
    fn lattice_contraction_matches_direct_sum() {
        let a = vec![Frequency::from_i64(&[1, 2]), Frequency::from_i64(&[-7, 11])];
        let seq = Sequence::new(&a, 128);
        let coeffs: Vec<Complex64> = (0..9).map(|i| Complex64::new(i as f64, 1.0 / (i + 1) as f64)).collect();
        let lp = LatticePoly::new(seq.clone(), coeffs.clone());
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let x = TorusPoint::random(&mut rng, 2, 128);
            let mut direct = Complex64::new(0.0, 0.0);
            for x1 in -1i8..=1 {
                for x2 in -1i8..=1 {
                    let z = seq.cis(0, &x).powi(x1 as i32) * seq.cis(1, &x).powi(x2 as i32);
                    direct += coeffs[lattice_index(&[x1, x2])] * z;
                }
            }
            assert!((lp.eval(&x) - direct).norm() < 1e-12);
        }
    }
}
