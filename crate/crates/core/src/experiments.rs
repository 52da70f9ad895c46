//! Empirical checks of three inequalities the lower-bound argument imports:
//! a lower bound for sums of weighted Riesz products, transference from coupled to
//! independent phases, and linear growth of `||sum_k e^{i<a_k,x>} psi_k||_1`.
//!
//! Each check returns a [`CheckReport`] that serializes to JSON.

use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::normest::{mc_norm, NormEstimate};
use crate::stats::linear_fit;
use crate::trigpoly::{phase_bits_for, Frequency};
use crate::witness::{
    for_each_in_ak, lattice_index, DecoupledLattice, ExpPsiSum, LatticePoly, PsiCombination,
    Sequence,
};

/// Lower threshold for the weighted Riesz-product ratio (regression constant).
pub const LATALA_THRESHOLD: f64 = 0.2;
/// Accepted band for the coupled/decoupled norm ratio.
pub const MEYER_BAND: (f64, f64) = (0.5, 2.0);
/// Minimal R^2 of the linear fit in [`linear_growth_check`].
pub const LINEAR_GROWTH_R2: f64 = 0.9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesPoint {
    pub x: f64,
    pub value: f64,
    pub stderr: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check: String,
    pub statistic: f64,
    pub samples: u64,
    pub stderr: f64,
    pub threshold: f64,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub series: Vec<SeriesPoint>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub details: BTreeMap<String, f64>,
}

impl CheckReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Violations of `|a_k(j)| > 3^{2(n-1)} |a_{k-1}(j)|` with `n = a.len()`.
pub fn growth_warnings(a: &[Frequency]) -> Vec<String> {
    let n = a.len();
    if n < 2 {
        return Vec::new();
    }
    let required = num_traits::pow(BigInt::from(3), 2 * (n - 1));
    let mut out = Vec::new();
    for k in 1..n {
        for j in 0..a[k].dim() {
            if a[k].0[j].abs() <= a[k - 1].0[j].abs() * &required {
                out.push(format!(
                    "growth condition fails at k={}, coordinate {}: |a_k| <= 3^{} |a_(k-1)|",
                    k + 1,
                    j + 1,
                    2 * (n - 1)
                ));
            }
        }
    }
    out
}

/// `sum_k |a_k(j) / a_{k+1}(j)|` per coordinate.
pub fn meyer_sums(a: &[Frequency]) -> Vec<f64> {
    let d = a.first().map(Frequency::dim).unwrap_or(0);
    (0..d)
        .map(|j| {
            a.windows(2)
                .map(|w| {
                    if w[1].0[j].is_zero() {
                        f64::INFINITY
                    } else {
                        BigRational::new(w[0].0[j].abs(), w[1].0[j].abs())
                            .to_f64()
                            .unwrap_or(f64::NAN)
                    }
                })
                .sum()
        })
        .collect()
}

fn bits_for(a: &[Frequency]) -> u32 {
    let total: BigInt = a
        .iter()
        .map(|v| v.0.iter().map(|c| c.abs()).max().unwrap_or_default())
        .sum();
    phase_bits_for(total.bits())
}

/// Ratio `||sum_k c_k psi_k||_1 / sum_k |c_k|` with `psi_1 = 1`; `coeffs` may have up
/// to `a.len() + 1` entries. All-zero coefficients give ratio 1.
pub fn latala_check(a: &[Frequency], coeffs: &[f64], samples: u64, seed: u64) -> CheckReport {
    let warnings = growth_warnings(a);
    let denom: f64 = coeffs.iter().map(|c| c.abs()).sum();
    let (statistic, stderr, est) = if denom == 0.0 {
        (1.0, 0.0, None)
    } else {
        let f = PsiCombination::new(Sequence::new(a, bits_for(a)), coeffs.to_vec());
        let e = mc_norm(&f, samples, seed);
        (e.mean / denom, e.stderr / denom, Some(e))
    };
    let mut details = BTreeMap::new();
    details.insert("coeff_abs_sum".into(), denom);
    if let Some(e) = est {
        details.insert("norm".into(), e.mean);
    }
    CheckReport {
        check: "latala".into(),
        statistic,
        samples,
        stderr,
        threshold: LATALA_THRESHOLD,
        pass: statistic >= LATALA_THRESHOLD,
        warnings,
        series: Vec::new(),
        details,
    }
}

/// Coefficient table of `R_n` on the lattice: `2^{-r}` at every nonzero `xi`.
pub fn riesz_lattice_weights(n: usize) -> Vec<Complex64> {
    let mut w = vec![Complex64::new(0.0, 0.0); 3usize.pow(n as u32)];
    let dummy: Vec<Frequency> = (0..n).map(|_| Frequency::zero(1)).collect();
    for k in 1..=n {
        for_each_in_ak(&dummy, k, |xi, _, r| {
            for s in [1i8, -1] {
                let mut full = vec![0i8; n];
                for (l, &x) in xi.iter().enumerate() {
                    full[l] = s * x;
                }
                full[k - 1] = s;
                w[lattice_index(&full)] = Complex64::new(0.5f64.powi(r as i32), 0.0);
            }
        });
    }
    w
}

/// Ratio of `||sum_xi w(xi) e^{i sum_k xi_k <a_k,x>}||` on `T^d` to the same sum with
/// independent phases `t_1, ..., t_n` on `T^{nd}`. `weights` is a `3^n` lattice table.
pub fn meyer_transfer_check(a: &[Frequency], weights: &[Complex64], samples: u64, seed: u64) -> CheckReport {
    let seq = Sequence::new(a, bits_for(a));
    let coupled = LatticePoly::new(seq, weights.to_vec());
    let decoupled = DecoupledLattice::new(coupled.clone());
    let c = mc_norm(&coupled, samples, seed);
    let u = mc_norm(&decoupled, samples, seed);
    let statistic = c.mean / u.mean;
    let stderr = statistic * ((c.stderr / c.mean).powi(2) + (u.stderr / u.mean).powi(2)).sqrt();
    let mut details = BTreeMap::new();
    details.insert("coupled".into(), c.mean);
    details.insert("decoupled".into(), u.mean);
    for (j, s) in meyer_sums(a).into_iter().enumerate() {
        details.insert(format!("ratio_sum_{}", j + 1), s);
    }
    CheckReport {
        check: "meyer".into(),
        statistic,
        samples,
        stderr,
        threshold: MEYER_BAND.0,
        pass: statistic >= MEYER_BAND.0 && statistic <= MEYER_BAND.1,
        warnings: growth_warnings(a),
        series: Vec::new(),
        details,
    }
}

/// `s_n = ||sum_{k<=n} e^{i<a_k,x>} psi_k||_1` for each `n` in range (prefixes of `a`,
/// `s_0 = 0`), with a least-squares line through `(n, s_n)`. Passes when the slope is
/// positive and `R^2 >= 0.9`.
pub fn linear_growth_check(a: &[Frequency], n_range: RangeInclusive<usize>, samples: u64, seed: u64) -> CheckReport {
    assert!(*n_range.end() <= a.len(), "range exceeds the sequence length");
    let bits = bits_for(a);
    let mut series = Vec::new();
    for n in n_range {
        let e = if n == 0 {
            NormEstimate { mean: 0.0, stderr: 0.0, samples, mode: crate::normest::EstimateMode::MC, seed }
        } else {
            mc_norm(&ExpPsiSum::new(Sequence::new(&a[..n], bits)), samples, seed)
        };
        series.push(SeriesPoint { x: n as f64, value: e.mean, stderr: e.stderr });
    }
    let xs: Vec<f64> = series.iter().map(|p| p.x).collect();
    let ys: Vec<f64> = series.iter().map(|p| p.value).collect();
    let fit = linear_fit(&xs, &ys);
    let (slope, stderr, r2) = fit
        .as_ref()
        .map(|f| (f.slope, f.slope_stderr, f.r2))
        .unwrap_or((0.0, f64::NAN, 0.0));
    let mut details = BTreeMap::new();
    details.insert("r2".into(), r2);
    if let Some(f) = &fit {
        details.insert("intercept".into(), f.intercept);
    }
    CheckReport {
        check: "linear_growth".into(),
        statistic: slope,
        samples,
        stderr,
        threshold: LINEAR_GROWTH_R2,
        pass: slope > 0.0 && r2 >= LINEAR_GROWTH_R2,
        warnings: growth_warnings(a),
        series,
        details,
    }
}
