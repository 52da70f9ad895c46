//! Multi-indices and derivative systems `{alpha_1, ..., alpha_m; beta}`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Orders of differentiation per coordinate, `D^mu = d^mu(1)/dx_1 ... d^mu(d)/dx_d`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(Vec<u32>);

/// Entries are bounded by this value by contract.
pub const MAX_ENTRY: u32 = 1 << 31;

impl MultiIndex {
    pub fn new(entries: Vec<u32>) -> Self {
        MultiIndex(entries)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    /// `|mu|`
    pub fn total_order(&self) -> u64 {
        self.0.iter().map(|&e| e as u64).sum()
    }

    /// Exact pairing `<mu, v>`.
    pub fn inner(&self, v: &[i64]) -> Result<i128> {
        if v.len() != self.0.len() {
            return Err(Error::Dimension {
                expected: self.0.len(),
                got: v.len(),
            });
        }
        Ok(self
            .0
            .iter()
            .zip(v)
            .map(|(&m, &x)| m as i128 * x as i128)
            .sum())
    }

    /// Componentwise difference `self - other` as signed integers.
    pub fn diff(&self, other: &MultiIndex) -> Vec<i64> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(&a, &b)| a as i64 - b as i64)
            .collect()
    }
}

impl From<Vec<u32>> for MultiIndex {
    fn from(v: Vec<u32>) -> Self {
        MultiIndex(v)
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

/// `sum_j mu(j) * v(j)` for a signed vector `v`; convenience wrapper around [`MultiIndex::inner`].
pub fn inner(mu: &MultiIndex, v: &[i64]) -> Result<i128> {
    mu.inner(v)
}

pub fn total_order(mu: &MultiIndex) -> u64 {
    mu.total_order()
}

/// The data `{alpha_1, ..., alpha_m; beta}` of the inequality
/// `||D^beta f|| <= K sum_j ||D^alpha_j f||`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerivativeSystem {
    pub d: usize,
    pub alphas: Vec<MultiIndex>,
    pub beta: MultiIndex,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    ZeroDimension,
    NoAlphas,
    Dimension { which: String, len: usize, d: usize },
    EntryTooLarge { which: String },
    BetaInAlphas { index: usize },
    DuplicateAlphas { first: usize, second: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::ZeroDimension => write!(f, "dimension d must be at least 1"),
            Violation::NoAlphas => write!(f, "at least one alpha is required"),
            Violation::Dimension { which, len, d } => {
                write!(f, "{which} has length {len}, expected d={d}")
            }
            Violation::EntryTooLarge { which } => {
                write!(f, "{which} has an entry above 2^31")
            }
            Violation::BetaInAlphas { index } => {
                write!(f, "beta in alphas (equals alpha[{index}])")
            }
            Violation::DuplicateAlphas { first, second } => {
                write!(f, "duplicate alphas at positions {first} and {second}")
            }
        }
    }
}

impl DerivativeSystem {
    pub fn new(d: usize, alphas: Vec<Vec<u32>>, beta: Vec<u32>) -> Self {
        DerivativeSystem {
            d,
            alphas: alphas.into_iter().map(MultiIndex).collect(),
            beta: MultiIndex(beta),
        }
    }

    /// `{(2,0),(0,2); (1,1)}`: pure second derivatives against the mixed one on the 2-torus.
    pub fn mixed_second_order() -> Self {
        Self::new(2, vec![vec![2, 0], vec![0, 2]], vec![1, 1])
    }

    pub fn m(&self) -> usize {
        self.alphas.len()
    }

    /// All violated invariants, in a fixed order. Empty means valid.
    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.d == 0 {
            out.push(Violation::ZeroDimension);
        }
        if self.alphas.is_empty() {
            out.push(Violation::NoAlphas);
        }
        let named = self
            .alphas
            .iter()
            .enumerate()
            .map(|(i, a)| (format!("alpha[{i}]"), a))
            .chain(std::iter::once(("beta".to_string(), &self.beta)));
        for (which, mi) in named {
            if mi.dim() != self.d {
                out.push(Violation::Dimension {
                    which: which.clone(),
                    len: mi.dim(),
                    d: self.d,
                });
            }
            if mi.entries().iter().any(|&e| e > MAX_ENTRY) {
                out.push(Violation::EntryTooLarge { which });
            }
        }
        if let Some(index) = self.alphas.iter().position(|a| *a == self.beta) {
            out.push(Violation::BetaInAlphas { index });
        }
        for i in 0..self.alphas.len() {
            for j in i + 1..self.alphas.len() {
                if self.alphas[i] == self.alphas[j] {
                    out.push(Violation::DuplicateAlphas { first: i, second: j });
                }
            }
        }
        out
    }

    pub fn validate(self) -> Result<Self> {
        let v = self.violations();
        if v.is_empty() {
            Ok(self)
        } else {
            Err(Error::InvalidSystem(v))
        }
    }
}

pub fn validate_system(sys: DerivativeSystem) -> Result<DerivativeSystem> {
    sys.validate()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn inner_examples() {
        let mu = MultiIndex::new(vec![2, 0]);
        assert_eq!(mu.inner(&[1, 1]).unwrap(), 2);
        assert_eq!(MultiIndex::new(vec![1, 1]).inner(&[2, 1]).unwrap(), 3);
        assert_eq!(MultiIndex::new(vec![0, 0, 0]).inner(&[5, 7, 9]).unwrap(), 0);
    }

    #[test]
    fn inner_length_mismatch() {
        let err = MultiIndex::new(vec![1, 2]).inner(&[1]).unwrap_err();
        assert!(matches!(err, Error::Dimension { expected: 2, got: 1 }));
    }

    #[test]
    fn total_orders() {
        assert_eq!(total_order(&vec![2, 0].into()), 2);
        assert_eq!(total_order(&vec![1, 1].into()), 2);
        assert_eq!(total_order(&vec![0, 3, 2].into()), 5);
    }

    #[test]
    fn validation() {
        assert!(DerivativeSystem::mixed_second_order().validate().is_ok());

        let sys = DerivativeSystem::new(2, vec![vec![1, 1]], vec![1, 1]);
        let v = sys.violations();
        assert_eq!(v, vec![Violation::BetaInAlphas { index: 0 }]);

        let sys = DerivativeSystem::new(2, vec![vec![2, 0], vec![2, 0]], vec![1, 1]);
        assert_eq!(
            sys.violations(),
            vec![Violation::DuplicateAlphas { first: 0, second: 1 }]
        );

        let sys = DerivativeSystem::new(2, vec![vec![2, 0, 1]], vec![1, 1]);
        assert!(matches!(sys.violations()[0], Violation::Dimension { .. }));
    }

    #[test]
    fn json_schema() {
        let sys: DerivativeSystem =
            serde_json::from_str(r#"{"d": 2, "alphas": [[2,0],[0,2]], "beta": [1,1]}"#).unwrap();
        assert_eq!(sys, DerivativeSystem::mixed_second_order());
        let back = serde_json::to_string(&sys).unwrap();
        assert_eq!(back, r#"{"d":2,"alphas":[[2,0],[0,2]],"beta":[1,1]}"#);
    }

    proptest! {
        #[test]
        fn inner_is_bilinear(
            mu in prop::collection::vec(0u32..1000, 3),
            v in prop::collection::vec(-1000i64..1000, 3),
            w in prop::collection::vec(-1000i64..1000, 3),
        ) {
            let mu = MultiIndex::new(mu);
            let vw: Vec<i64> = v.iter().zip(&w).map(|(a, b)| a + b).collect();
            prop_assert_eq!(mu.inner(&vw).unwrap(), mu.inner(&v).unwrap() + mu.inner(&w).unwrap());
        }

        #[test]
        fn inner_matches_loop(
            mu in prop::collection::vec(0u32..MAX_ENTRY, 4),
            v in prop::collection::vec(any::<i64>(), 4),
        ) {
            let mut acc = num_bigint::BigInt::from(0);
            for i in 0..4 {
                acc += num_bigint::BigInt::from(mu[i]) * num_bigint::BigInt::from(v[i]);
            }
            let got = MultiIndex::new(mu).inner(&v).unwrap();
            prop_assert_eq!(num_bigint::BigInt::from(got), acc);
        }
    }
}
