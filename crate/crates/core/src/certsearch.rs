//! Search for the certificate vectors `Lambda`, `Gamma` and `eps` of a derivative
//! system, and the exponents they imply.
//!
//! All searches are exhaustive over a box `{1, ..., B}^d` (or `{0,1}^d` for `eps`)
//! and use exact integer arithmetic, so every returned vector re-checks exactly.

use std::fmt;

use num_rational::Ratio;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::index::{DerivativeSystem, MultiIndex};

pub const DEFAULT_BOX: u32 = 8;

/// An exact rational, serialized as `{"num": .., "den": ..}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(pub Ratio<i64>);

impl Rational {
    pub fn new(num: i64, den: i64) -> Self {
        Rational(Ratio::new(num, den))
    }

    pub fn to_f64(self) -> f64 {
        *self.0.numer() as f64 / *self.0.denom() as f64
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

#[derive(Serialize, Deserialize)]
struct RationalRepr {
    num: i64,
    den: i64,
}

impl Serialize for Rational {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RationalRepr {
            num: *self.0.numer(),
            den: *self.0.denom(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = RationalRepr::deserialize(d)?;
        if r.den == 0 {
            return Err(serde::de::Error::custom("zero denominator"));
        }
        Ok(Rational::new(r.num, r.den))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Theorem {
    T1,
    T2,
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Theorem::T1 => write!(f, "T1"),
            Theorem::T2 => write!(f, "T2"),
        }
    }
}

/// An accepted `Gamma` together with the permutation of the alphas it induces.
///
/// `sigma[0]` is the index (in input order) of the Gamma-maximal alpha, `sigma[1]`
/// the runner-up, and so on.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GammaCertificate {
    pub gamma: Vec<i64>,
    pub sigma: Vec<usize>,
    pub theta: Rational,
    pub phi: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EpsCertificate {
    pub eps: Vec<u8>,
    pub exponent: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub lambda: Vec<i64>,
    pub t1: Option<GammaCertificate>,
    pub t2: Option<EpsCertificate>,
    pub theorems: Vec<Theorem>,
}

impl Certificate {
    pub fn applies(&self) -> bool {
        !self.theorems.is_empty()
    }

    /// The strongest exponent available: 1/2 from T2, otherwise phi from T1.
    pub fn best_exponent(&self) -> Option<Rational> {
        match (&self.t1, &self.t2) {
            (_, Some(e)) => Some(e.exponent),
            (Some(g), None) => Some(g.phi),
            _ => None,
        }
    }

    /// Same certificate with `Lambda` multiplied by `c`.
    pub fn with_lambda_scaled(&self, c: i64) -> Certificate {
        Certificate {
            lambda: self.lambda.iter().map(|l| l * c).collect(),
            ..self.clone()
        }
    }
}

fn pair(mu: &MultiIndex, v: &[i64]) -> i128 {
    mu.inner(v).expect("dimension checked by validation")
}

/// `<alpha_j, Lambda> = <beta, Lambda>` for all j, with every entry of `Lambda >= 1`.
pub fn check_lambda(sys: &DerivativeSystem, lambda: &[i64]) -> bool {
    if lambda.len() != sys.d || lambda.iter().any(|&l| l < 1) {
        return false;
    }
    let b = pair(&sys.beta, lambda);
    sys.alphas.iter().all(|a| pair(a, lambda) == b)
}

/// The chain `<a_s(1),G> > <beta,G> > <a_s(2),G> >= ... >= <a_s(m),G>`.
pub fn check_gamma(sys: &DerivativeSystem, gamma: &[i64], sigma: &[usize]) -> bool {
    let m = sys.m();
    if m < 2 || gamma.len() != sys.d || gamma.iter().any(|&g| g < 1) || sigma.len() != m {
        return false;
    }
    let mut seen = vec![false; m];
    for &s in sigma {
        if s >= m || seen[s] {
            return false;
        }
        seen[s] = true;
    }
    let p: Vec<i128> = sigma.iter().map(|&s| pair(&sys.alphas[s], gamma)).collect();
    let b = pair(&sys.beta, gamma);
    p[0] > b && b > p[1] && p.windows(2).skip(1).all(|w| w[0] >= w[1])
}

/// `<beta,eps> != <alpha_1,eps> (mod 2)` and all `<alpha_j,eps>` share a parity.
pub fn check_eps(sys: &DerivativeSystem, eps: &[u8]) -> bool {
    if eps.len() != sys.d || eps.iter().any(|&e| e > 1) || sys.alphas.is_empty() {
        return false;
    }
    let v: Vec<i64> = eps.iter().map(|&e| e as i64).collect();
    let a1 = pair(&sys.alphas[0], &v).rem_euclid(2);
    let b = pair(&sys.beta, &v).rem_euclid(2);
    b != a1 && sys.alphas.iter().all(|a| pair(a, &v).rem_euclid(2) == a1)
}

/// Reduced row echelon form over the rationals; returns pivot columns.
fn rref(rows: &mut [Vec<Ratio<i128>>], cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].recip();
        for x in rows[r].iter_mut() {
            *x *= inv;
        }
        let pivot = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c];
                for (x, p) in row.iter_mut().zip(&pivot) {
                    *x -= *p * f;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    pivots
}

/// Calls `f` on every point of `{1..=bound}^len` in lexicographic order.
fn for_each_in_box(len: usize, bound: u32, mut f: impl FnMut(&[i64])) {
    let bound = bound as i64;
    if bound < 1 {
        return;
    }
    let mut cur = vec![1i64; len];
    loop {
        f(&cur);
        let mut i = len;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if cur[i] < bound {
                cur[i] += 1;
                for x in cur[i + 1..].iter_mut() {
                    *x = 1;
                }
                break;
            }
        }
    }
}

/// All `Lambda in {1..B}^d` with equal pairings, sorted lexicographically.
///
/// The linear system `(alpha_j - beta) . Lambda = 0` is eliminated exactly first,
/// so only the free coordinates are enumerated.
pub fn find_lambda(sys: &DerivativeSystem, box_bound: u32) -> Vec<Vec<i64>> {
    let d = sys.d;
    let mut rows: Vec<Vec<Ratio<i128>>> = sys
        .alphas
        .iter()
        .map(|a| {
            a.diff(&sys.beta)
                .into_iter()
                .map(|x| Ratio::from_integer(x as i128))
                .collect()
        })
        .collect();
    let pivots = rref(&mut rows, d);
    let free: Vec<usize> = (0..d).filter(|c| !pivots.contains(c)).collect();
    let mut out = Vec::new();
    if free.is_empty() {
        return out;
    }
    let bound = box_bound as i128;
    for_each_in_box(free.len(), box_bound, |vals| {
        let mut lambda = vec![0i64; d];
        for (&c, &v) in free.iter().zip(vals) {
            lambda[c] = v;
        }
        for (row, &pc) in pivots.iter().enumerate() {
            let mut s = Ratio::<i128>::zero();
            for (&c, &v) in free.iter().zip(vals) {
                s -= rows[row][c] * Ratio::from_integer(v as i128);
            }
            if !s.is_integer() {
                return;
            }
            let v = s.to_integer();
            if v < 1 || v > bound {
                return;
            }
            lambda[pc] = v as i64;
        }
        debug_assert!(check_lambda(sys, &lambda));
        out.push(lambda);
    });
    out.sort();
    out
}

/// Every accepted `Gamma` in the box with its permutation, theta and phi, ranked by
/// phi descending, then by permutation (input order first), then by Gamma.
pub fn find_gamma(
    sys: &DerivativeSystem,
    lambda: &[i64],
    box_bound: u32,
) -> Result<Vec<GammaCertificate>> {
    let m = sys.m();
    if m < 2 {
        return Err(Error::TooFewAlphas(m));
    }
    if !check_lambda(sys, lambda) {
        return Err(Error::Params(format!(
            "Lambda {lambda:?} does not satisfy the equal-pairing condition"
        )));
    }
    let mut out = Vec::new();
    for_each_in_box(sys.d, box_bound, |gamma| {
        let p: Vec<i128> = sys.alphas.iter().map(|a| pair(a, gamma)).collect();
        let mut sigma: Vec<usize> = (0..m).collect();
        sigma.sort_by(|&i, &j| p[j].cmp(&p[i]));
        let b = pair(&sys.beta, gamma);
        let (top, second) = (p[sigma[0]], p[sigma[1]]);
        if !(top > b && b > second) {
            return;
        }
        let gap = (top - second) as i64;
        let lead = (top - b) as i64;
        let theta = Rational::new(1, gap);
        let phi = Rational(
            (Ratio::one() - Ratio::new(lead, gap)) / Ratio::from_integer(2),
        );
        debug_assert!(check_gamma(sys, gamma, &sigma));
        out.push(GammaCertificate {
            gamma: gamma.to_vec(),
            sigma,
            theta,
            phi,
        });
    });
    out.sort_by(|a, b| {
        b.phi
            .cmp(&a.phi)
            .then_with(|| a.sigma.cmp(&b.sigma))
            .then_with(|| a.gamma.cmp(&b.gamma))
    });
    Ok(out)
}

/// All qualifying `eps in {0,1}^d`, ordered by the integer `sum_j eps_j 2^j`.
pub fn find_eps(sys: &DerivativeSystem) -> Vec<Vec<u8>> {
    let d = sys.d;
    assert!(d < 63, "eps search is exhaustive over 2^d");
    (0u64..1 << d)
        .map(|mask| (0..d).map(|j| ((mask >> j) & 1) as u8).collect::<Vec<u8>>())
        .filter(|e| check_eps(sys, e))
        .collect()
}

/// Composes the three searches: smallest Lambda, phi-maximal Gamma, first eps.
pub fn certify(sys: &DerivativeSystem, box_bound: u32) -> Result<Certificate> {
    let sys = sys.clone().validate()?;
    let lambda = find_lambda(&sys, box_bound)
        .into_iter()
        .next()
        .ok_or(Error::NotCertified { box_bound })?;
    let t1 = if sys.m() >= 2 {
        find_gamma(&sys, &lambda, box_bound)?.into_iter().next()
    } else {
        None
    };
    let t2 = find_eps(&sys).into_iter().next().map(|eps| EpsCertificate {
        eps,
        exponent: Rational::new(1, 2),
    });
    let mut theorems = Vec::new();
    if t1.is_some() {
        theorems.push(Theorem::T1);
    }
    if t2.is_some() {
        theorems.push(Theorem::T2);
    }
    Ok(Certificate {
        lambda,
        t1,
        t2,
        theorems,
    })
}

/// Re-checks every part of a certificate against the system, independently of the search.
pub fn verify_certificate(sys: &DerivativeSystem, cert: &Certificate) -> bool {
    if !check_lambda(sys, &cert.lambda) {
        return false;
    }
    if let Some(g) = &cert.t1 {
        if !check_gamma(sys, &g.gamma, &g.sigma) {
            return false;
        }
        let top = &sys.alphas[g.sigma[0]];
        let second = &sys.alphas[g.sigma[1]];
        let gap = pair(top, &g.gamma) - pair(second, &g.gamma);
        let lead = pair(top, &g.gamma) - pair(&sys.beta, &g.gamma);
        if g.theta.0 != Ratio::new(1, gap as i64) {
            return false;
        }
        let phi = (Ratio::one() - Ratio::new(lead as i64, gap as i64)) / Ratio::from_integer(2);
        if g.phi.0 != phi || !(phi.is_positive() && phi < Ratio::new(1, 2)) {
            return false;
        }
    }
    if let Some(e) = &cert.t2 {
        if !check_eps(sys, &e.eps) {
            return false;
        }
    }
    let expect: Vec<Theorem> = [
        cert.t1.as_ref().map(|_| Theorem::T1),
        cert.t2.as_ref().map(|_| Theorem::T2),
    ]
    .into_iter()
    .flatten()
    .collect();
    expect == cert.theorems
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cor1() -> DerivativeSystem {
        DerivativeSystem::mixed_second_order()
    }

    /// Plain enumeration of the whole box.
    fn brute_lambda(sys: &DerivativeSystem, b: u32) -> Vec<Vec<i64>> {
        let mut out = Vec::new();
        for_each_in_box(sys.d, b, |l| {
            if check_lambda(sys, l) {
                out.push(l.to_vec());
            }
        });
        out
    }

    #[test]
    fn lambda_examples() {
        let l = find_lambda(&cor1(), 3);
        assert!(l.contains(&vec![1, 1]));
        assert_eq!(l, vec![vec![1, 1], vec![2, 2], vec![3, 3]]);

        let odd = DerivativeSystem::new(2, vec![vec![1, 0]], vec![0, 2]);
        assert_eq!(find_lambda(&odd, 10), vec![vec![2, 1], vec![4, 2], vec![6, 3], vec![8, 4], vec![10, 5]]);

        let none = DerivativeSystem::new(2, vec![vec![1, 0]], vec![2, 0]);
        assert!(find_lambda(&none, 10).is_empty());
    }

    #[test]
    fn lambda_matches_brute_force() {
        let systems = [
            cor1(),
            DerivativeSystem::new(2, vec![vec![4, 0], vec![0, 2]], vec![2, 1]),
            DerivativeSystem::new(3, vec![vec![2, 0, 0], vec![0, 1, 0]], vec![0, 0, 1]),
            DerivativeSystem::new(3, vec![vec![1, 1, 0]], vec![0, 0, 2]),
            DerivativeSystem::new(2, vec![vec![2, 0], vec![0, 1]], vec![1, 0]),
        ];
        for sys in &systems {
            assert_eq!(find_lambda(sys, 6), brute_lambda(sys, 6), "{sys:?}");
        }
    }

    #[test]
    fn gamma_examples() {
        let sys = cor1();
        let all = find_gamma(&sys, &[1, 1], 4).unwrap();
        let g21 = all.iter().find(|g| g.gamma == vec![2, 1]).unwrap();
        assert_eq!(g21.sigma, vec![0, 1]);
        assert_eq!(g21.theta, Rational::new(1, 2));
        assert_eq!(g21.phi, Rational::new(1, 4));

        let g31 = all.iter().find(|g| g.gamma == vec![3, 1]).unwrap();
        assert_eq!(g31.phi, Rational::new(1, 4));
        assert_eq!(g31.theta, Rational::new(1, 4));

        assert!(all.iter().all(|g| g.gamma != vec![1, 1]));
        assert!(!check_gamma(&sys, &[1, 1], &[0, 1]));

        assert_eq!(all[0].gamma, vec![2, 1]);
    }

    #[test]
    fn gamma_requires_two_alphas() {
        let sys = DerivativeSystem::new(2, vec![vec![2, 0]], vec![0, 2]);
        assert!(matches!(
            find_gamma(&sys, &[1, 1], 4),
            Err(Error::TooFewAlphas(1))
        ));
    }

    #[test]
    fn phi_independent_of_gamma_in_2d() {
        let systems = [
            cor1(),
            DerivativeSystem::new(2, vec![vec![4, 0], vec![0, 2]], vec![2, 1]),
            DerivativeSystem::new(2, vec![vec![3, 0], vec![0, 3], vec![2, 1]], vec![1, 2]),
        ];
        for sys in &systems {
            let lambda = find_lambda(sys, 8).into_iter().next().unwrap();
            let all = find_gamma(sys, &lambda, 8).unwrap();
            assert!(!all.is_empty());
            for top in 0..sys.m() {
                let phis: Vec<_> = all.iter().filter(|g| g.sigma[0] == top).map(|g| g.phi).collect();
                assert!(phis.windows(2).all(|w| w[0] == w[1]), "{sys:?}: {phis:?}");
            }
        }
    }

    #[test]
    fn eps_examples() {
        let e = find_eps(&cor1());
        assert!(e.contains(&vec![1, 0]));
        assert!(e.contains(&vec![0, 1]));
        assert!(!e.contains(&vec![1, 1]));
        assert_eq!(e[0], vec![1, 0]);

        for d in 2..5 {
            let mut a1 = vec![0; d];
            a1[0] = 2;
            let mut a2 = vec![0; d];
            a2[1] = 2;
            let sys = DerivativeSystem::new(d, vec![a1, a2], vec![0; d]);
            assert!(!check_eps(&sys, &vec![0; d]));
        }
    }

    #[test]
    fn certify_examples() {
        let cert = certify(&cor1(), 4).unwrap();
        assert_eq!(cert.lambda, vec![1, 1]);
        assert_eq!(cert.t2.as_ref().unwrap().eps, vec![1, 0]);
        assert_eq!(cert.t2.as_ref().unwrap().exponent, Rational::new(1, 2));
        let t1 = cert.t1.as_ref().unwrap();
        assert_eq!(t1.gamma, vec![2, 1]);
        assert_eq!(t1.phi, Rational::new(1, 4));
        assert_eq!(cert.theorems, vec![Theorem::T1, Theorem::T2]);
        assert!(verify_certificate(&cor1(), &cert));

        let single = DerivativeSystem::new(2, vec![vec![2, 0]], vec![0, 2]);
        let cert = certify(&single, 4).unwrap();
        assert_eq!(cert.lambda, vec![1, 1]);
        assert!(cert.t1.is_none() && cert.t2.is_none());
        assert!(!cert.applies());

        let none = DerivativeSystem::new(2, vec![vec![1, 0]], vec![2, 0]);
        let err = certify(&none, 8).unwrap_err();
        assert!(err.to_string().contains("anisotropic hypothesis not certified"));
    }

    #[test]
    fn certificate_json() {
        let cert = certify(&cor1(), 4).unwrap();
        let s = serde_json::to_string(&cert).unwrap();
        assert!(s.contains(r#""phi":{"num":1,"den":4}"#), "{s}");
        let back: Certificate = serde_json::from_str(&s).unwrap();
        assert_eq!(back, cert);
    }

    #[test]
    fn scaled_lambda_still_certifies() {
        let sys = cor1();
        for l in find_lambda(&sys, 8) {
            let scaled: Vec<i64> = l.iter().map(|x| 2 * x).collect();
            assert!(check_lambda(&sys, &scaled));
        }
    }

    proptest! {
        #[test]
        fn searches_recheck(
            a1 in prop::collection::vec(0u32..4, 3),
            a2 in prop::collection::vec(0u32..4, 3),
            b in prop::collection::vec(0u32..4, 3),
        ) {
            let sys = DerivativeSystem::new(3, vec![a1, a2], b);
            prop_assume!(sys.violations().is_empty());
            let lambdas = find_lambda(&sys, 4);
            prop_assert_eq!(&lambdas, &brute_lambda(&sys, 4));
            for e in find_eps(&sys) {
                prop_assert!(check_eps(&sys, &e));
            }
            if let Some(l) = lambdas.first() {
                for g in find_gamma(&sys, l, 4).unwrap() {
                    prop_assert!(check_gamma(&sys, &g.gamma, &g.sigma));
                    prop_assert!(g.phi.0 > Ratio::zero() && g.phi.0 < Ratio::new(1, 2));
                }
                let cert = certify(&sys, 4).unwrap();
                prop_assert!(verify_certificate(&sys, &cert));
            }
        }
    }
}
