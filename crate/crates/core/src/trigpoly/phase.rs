//! Exact phase reduction on the torus.
//!
//! A point `x = 2 pi u` is stored as `d` fixed-point fractions `u_j = num_j / 2^P`.
//! For an integer frequency `q` the phase `<q, u> mod 1` is then
//! `(sum_j q_j num_j mod 2^P) / 2^P`, which only needs `q mod 2^P`. Frequencies are
//! reduced once into little-endian limbs; evaluation is a truncated multiply-add.

use std::f64::consts::TAU;

use num_bigint::{BigInt, BigUint, Sign};
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::RngCore;

use crate::error::{Error, Result};

pub const DEFAULT_PHASE_BITS: u32 = 128;

/// Phase precision needed to sample a polynomial whose largest frequency has
/// `max_freq_bits` bits: at least 64 spare bits, never below [`DEFAULT_PHASE_BITS`].
pub fn phase_bits_for(max_freq_bits: u64) -> u32 {
    let need = max_freq_bits + 64;
    let rounded = need.div_ceil(64) * 64;
    (rounded as u32).max(DEFAULT_PHASE_BITS)
}

/// A point of the torus with coordinates `num_j / 2^bits`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorusPoint {
    bits: u32,
    limbs: Vec<u64>,
}

impl TorusPoint {
    fn limbs_per_coord(bits: u32) -> usize {
        assert!(bits >= 64 && bits.is_multiple_of(64), "phase bits must be a positive multiple of 64");
        (bits / 64) as usize
    }

    pub fn zero(d: usize, bits: u32) -> Self {
        TorusPoint {
            bits,
            limbs: vec![0; d * Self::limbs_per_coord(bits)],
        }
    }

    pub fn from_numerators(bits: u32, nums: &[BigUint]) -> Result<Self> {
        let l = Self::limbs_per_coord(bits);
        let mut limbs = Vec::with_capacity(nums.len() * l);
        for n in nums {
            if n.bits() > bits as u64 {
                return Err(Error::Params(format!("numerator {n} exceeds 2^{bits}")));
            }
            let mut digits = n.to_u64_digits();
            digits.resize(l, 0);
            limbs.extend(digits);
        }
        Ok(TorusPoint { bits, limbs })
    }

    /// Coordinates given as `num / 2^log2_den` with `log2_den <= bits`.
    pub fn from_dyadic(bits: u32, coords: &[(u64, u32)]) -> Result<Self> {
        let nums: Vec<BigUint> = coords
            .iter()
            .map(|&(num, log2_den)| {
                if log2_den > bits {
                    return Err(Error::Params(format!("denominator 2^{log2_den} exceeds 2^{bits}")));
                }
                let n = BigUint::from(num);
                if n.bits() > log2_den as u64 {
                    return Err(Error::Params(format!("{num}/2^{log2_den} is not in [0,1)")));
                }
                Ok(n << (bits - log2_den) as usize)
            })
            .collect::<Result<_>>()?;
        Self::from_numerators(bits, &nums)
    }

    /// Uniform random point; consumes exactly `d * bits / 64` words from `rng`.
    pub fn random<R: RngCore + ?Sized>(rng: &mut R, d: usize, bits: u32) -> Self {
        let l = Self::limbs_per_coord(bits);
        let limbs = (0..d * l).map(|_| rng.next_u64()).collect();
        TorusPoint { bits, limbs }
    }

    pub fn dim(&self) -> usize {
        self.limbs.len() / Self::limbs_per_coord(self.bits)
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn coord_limbs(&self, j: usize) -> &[u64] {
        let l = Self::limbs_per_coord(self.bits);
        &self.limbs[j * l..(j + 1) * l]
    }

    pub fn numerator(&self, j: usize) -> BigUint {
        BigUint::from_slice(
            &self
                .coord_limbs(j)
                .iter()
                .flat_map(|&w| [w as u32, (w >> 32) as u32])
                .collect::<Vec<_>>(),
        )
    }

    /// `u_j` rounded to double precision.
    pub fn coords_f64(&self) -> Vec<f64> {
        (0..self.dim()).map(|j| top_fraction(self.coord_limbs(j))).collect()
    }

    /// The sub-point made of coordinates `start..start+len`.
    pub fn block(&self, start: usize, len: usize) -> TorusPoint {
        let l = Self::limbs_per_coord(self.bits);
        TorusPoint {
            bits: self.bits,
            limbs: self.limbs[start * l..(start + len) * l].to_vec(),
        }
    }
}

/// Fraction in `[0,1)` given by the top 53 bits of a little-endian fixed-point word.
fn top_fraction(limbs: &[u64]) -> f64 {
    let hi = *limbs.last().expect("non-empty");
    (hi >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// `acc += a * b  (mod 2^(64 * acc.len()))`.
#[inline]
fn mul_acc_trunc(acc: &mut [u64], a: &[u64], b: &[u64]) {
    let l = acc.len();
    for i in 0..l {
        let ai = a[i] as u128;
        if ai == 0 {
            continue;
        }
        let mut carry: u128 = 0;
        for j in 0..l - i {
            let t = acc[i + j] as u128 + ai * b[j] as u128 + carry;
            acc[i + j] = t as u64;
            carry = t >> 64;
        }
    }
}

/// `q mod 2^bits` as little-endian limbs (two's complement for negative `q`).
pub fn residue_limbs(q: &BigInt, bits: u32) -> Vec<u64> {
    let modulus = BigInt::one() << bits as usize;
    let r = q.mod_floor(&modulus);
    let (_, mut digits) = r.to_u64_digits();
    digits.resize((bits / 64) as usize, 0);
    digits
}

/// A frequency reduced modulo `2^bits`, ready for repeated phase evaluation.
#[derive(Clone, Debug)]
pub struct FreqResidue {
    bits: u32,
    limbs: Vec<u64>,
}

impl FreqResidue {
    pub fn new(q: &[BigInt], bits: u32) -> Self {
        let limbs = q.iter().flat_map(|c| residue_limbs(c, bits)).collect();
        FreqResidue { bits, limbs }
    }

    pub fn dim(&self) -> usize {
        self.limbs.len() / (self.bits / 64) as usize
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// `<q, u> mod 1` as a double in `[0,1)`.
    #[inline]
    pub fn phase(&self, x: &TorusPoint) -> f64 {
        debug_assert_eq!(x.bits, self.bits, "phase precision mismatch");
        let l = (self.bits / 64) as usize;
        let mut acc = [0u64; 16];
        assert!(l <= acc.len(), "phase precision above 1024 bits");
        let acc = &mut acc[..l];
        for j in 0..self.dim() {
            mul_acc_trunc(acc, &self.limbs[j * l..(j + 1) * l], x.coord_limbs(j));
        }
        top_fraction(acc)
    }

    /// `e^{i <q, x>}`.
    #[inline]
    pub fn cis(&self, x: &TorusPoint) -> Complex64 {
        cis(self.phase(x))
    }
}

/// `e^{2 pi i t}`.
#[inline]
pub fn cis(t: f64) -> Complex64 {
    let (s, c) = (TAU * t).sin_cos();
    Complex64::new(c, s)
}

/// Reference route: `sum_j q_j num_j mod 2^bits` with arbitrary-precision integers.
pub fn phase_bigint(q: &[BigInt], x: &TorusPoint) -> f64 {
    let bits = x.bits() as usize;
    let mut s = BigInt::zero();
    for (j, qj) in q.iter().enumerate() {
        s += qj * BigInt::from_biguint(Sign::Plus, x.numerator(j));
    }
    let r = s.mod_floor(&(BigInt::one() << bits));
    let top: BigUint = r.magnitude() >> (bits - 53);
    let top = top.to_u64_digits().first().copied().unwrap_or(0);
    top as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Anything that can be evaluated pointwise on the torus.
pub trait TorusFunction: Sync {
    fn dim(&self) -> usize;

    /// Phase precision the sample points must carry.
    fn phase_bits(&self) -> u32;

    fn eval(&self, x: &TorusPoint) -> Complex64;
}
