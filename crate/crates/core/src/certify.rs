//! End-to-end pipeline: build `W_n`, estimate `||D^beta W_n||_1` and every
//! `||D^alpha_j W_n||_1` on shared sample points, and turn the ratio into a statistical
//! lower bound for the Bernstein-type constant at degree `deg W_n`.

use std::io::Write;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::certsearch::{Certificate, Rational, Theorem};
use crate::error::{Error, Result};
use crate::normest::{mc_norms, NormEstimate};
use crate::stats::{linear_fit, LinearFit};
use crate::trigpoly::TorusFunction;
use crate::witness::{Mode, WitnessFamily, WitnessParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplingConfig {
    pub samples: u64,
    pub seed: u64,
}

impl SamplingConfig {
    pub fn new(samples: u64, seed: u64) -> Result<Self> {
        if samples < 2 {
            return Err(Error::Params(format!("samples must be at least 2, got {samples}")));
        }
        Ok(SamplingConfig { samples, seed })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateRecord {
    pub n: usize,
    pub variant: Theorem,
    pub mode: Mode,
    /// Decimal string; degrees exceed every machine integer.
    pub degree: String,
    pub log_degree: f64,
    pub norm_beta: NormEstimate,
    /// In input order of the alphas.
    pub norm_alphas: Vec<NormEstimate>,
    pub ratio: f64,
    pub ratio_err: f64,
    pub seed: u64,
}

impl CertificateRecord {
    pub fn denominator(&self) -> f64 {
        self.norm_alphas.iter().map(|e| e.mean).sum()
    }

    /// `ratio - 3 ratio_err`: the constant that the witness refutes.
    pub fn lower_bound(&self) -> f64 {
        self.ratio - 3.0 * self.ratio_err
    }
}

/// Natural logarithm of a big unsigned integer.
pub fn ln_biguint(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_string().parse::<f64>().map(f64::ln).unwrap_or(f64::NAN);
    }
    let shift = bits - 64;
    let top: BigUint = x >> shift as usize;
    let top = top.to_u64_digits()[0] as f64;
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// One record: all `m + 1` norms on one shared set of sample points.
pub fn certify_one(params: &WitnessParams, cfg: SamplingConfig) -> Result<CertificateRecord> {
    certify_one_with_cap(params, cfg, crate::trigpoly::cap_from_env())
}

pub fn certify_one_with_cap(params: &WitnessParams, cfg: SamplingConfig, cap: u64) -> Result<CertificateRecord> {
    let n = params.n;
    let fam = WitnessFamily::build(params.clone())?.with_cap(cap);
    let sys = &params.sys;
    let with_context = |e: Error| match e {
        Error::CapExceeded { what, needed, cap } => Error::CapExceeded {
            what: format!("{what} at n={n}"),
            needed,
            cap,
        },
        other => other,
    };
    let beta = fam.derivative_eval(&sys.beta).map_err(with_context)?;
    let alphas = sys
        .alphas
        .iter()
        .map(|a| fam.derivative_eval(a))
        .collect::<Result<Vec<_>>>()
        .map_err(with_context)?;
    let mut fs: Vec<&dyn TorusFunction> = vec![&beta];
    fs.extend(alphas.iter().map(|f| f as &dyn TorusFunction));
    let mut est = mc_norms(&fs, cfg.samples, cfg.seed);
    let norm_beta = est.remove(0);
    let denom: f64 = est.iter().map(|e| e.mean).sum();
    let denom_err = est.iter().map(|e| e.stderr.powi(2)).sum::<f64>().sqrt();
    let ratio = norm_beta.mean / denom;
    let ratio_err = ratio * ((norm_beta.stderr / norm_beta.mean).powi(2) + (denom_err / denom).powi(2)).sqrt();
    let degree = fam.degree();
    Ok(CertificateRecord {
        n,
        variant: params.variant,
        mode: params.mode,
        log_degree: ln_biguint(&degree),
        degree: degree.to_string(),
        norm_beta,
        norm_alphas: est,
        ratio,
        ratio_err,
        seed: cfg.seed,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub certificate: Certificate,
    pub variant: Theorem,
    pub mode: Mode,
    pub records: Vec<CertificateRecord>,
    /// Levels that could not be built, with the reason.
    pub failures: Vec<(usize, String)>,
    pub theoretical_phi: Rational,
    /// Slope of `ln ratio` against `ln ln degree`; `None` below three records.
    pub fitted_exponent: Option<LinearFit>,
    /// Slope of `ln ||D^beta W_n||` against `ln ln degree`.
    pub numerator_exponent: Option<LinearFit>,
    /// `ratio` against `n`; T2 native only.
    pub ratio_vs_n: Option<LinearFit>,
    /// `||D^beta W_n||` against `n`.
    pub numerator_vs_n: Option<LinearFit>,
    /// `ln degree` against `n^2`.
    pub log_degree_vs_n2: Option<LinearFit>,
    /// `max / min` of `sum_j ||D^alpha_j W_n||` across the records.
    pub denominator_spread: Option<f64>,
}

impl SweepReport {
    pub fn fit_available(&self) -> bool {
        self.fitted_exponent.is_some()
    }
}

fn fit_if_enough(records: &[CertificateRecord], x: impl Fn(&CertificateRecord) -> f64, y: impl Fn(&CertificateRecord) -> f64) -> Option<LinearFit> {
    if records.len() < 3 {
        return None;
    }
    let xs: Vec<f64> = records.iter().map(&x).collect();
    let ys: Vec<f64> = records.iter().map(&y).collect();
    linear_fit(&xs, &ys)
}

/// Records for every `n` in range (in order) plus the fits.
///
/// Cap and vanishing-monomial errors at a level are recorded in `failures` and the sweep
/// continues; if no level succeeds the first such error is returned.
pub fn sweep(base: &WitnessParams, ns: impl IntoIterator<Item = usize>, cfg: SamplingConfig) -> Result<SweepReport> {
    sweep_with_cap(base, ns, cfg, crate::trigpoly::cap_from_env())
}

pub fn sweep_with_cap(base: &WitnessParams, ns: impl IntoIterator<Item = usize>, cfg: SamplingConfig, cap: u64) -> Result<SweepReport> {
    let mut records = Vec::new();
    let mut failures = Vec::new();
    let mut first_err = None;
    for n in ns {
        let mut p = base.clone();
        p.n = n;
        p.validate()?;
        match certify_one_with_cap(&p, cfg, cap) {
            Ok(r) => records.push(r),
            Err(e @ Error::CapExceeded { .. }) | Err(e @ Error::ZeroMonomial(_)) => {
                failures.push((n, e.to_string()));
                first_err.get_or_insert(e);
            }
            Err(e) => return Err(e),
        }
    }
    if records.is_empty() {
        if let Some(e) = first_err {
            return Err(e);
        }
    }
    let theoretical_phi = match base.variant {
        Theorem::T1 => base.cert.t1.as_ref().map(|g| g.phi),
        Theorem::T2 => base.cert.t2.as_ref().map(|e| e.exponent),
    }
    .expect("validated certificate");
    let lnln = |r: &CertificateRecord| r.log_degree.ln();
    let nn = |r: &CertificateRecord| r.n as f64;
    let denoms: Vec<f64> = records.iter().map(CertificateRecord::denominator).collect();
    let denominator_spread = if denoms.is_empty() {
        None
    } else {
        let max = denoms.iter().cloned().fold(f64::MIN, f64::max);
        let min = denoms.iter().cloned().fold(f64::MAX, f64::min);
        Some(max / min)
    };
    Ok(SweepReport {
        certificate: base.cert.clone(),
        variant: base.variant,
        mode: base.mode,
        fitted_exponent: fit_if_enough(&records, lnln, |r| r.ratio.ln()),
        numerator_exponent: fit_if_enough(&records, lnln, |r| r.norm_beta.mean.ln()),
        ratio_vs_n: if base.variant == Theorem::T2 && base.mode == Mode::Native {
            fit_if_enough(&records, nn, |r| r.ratio)
        } else {
            None
        },
        numerator_vs_n: fit_if_enough(&records, nn, |r| r.norm_beta.mean),
        log_degree_vs_n2: fit_if_enough(&records, |r| (r.n * r.n) as f64, |r| r.log_degree),
        denominator_spread,
        theoretical_phi,
        records,
        failures,
    })
}

/// Writes the records as CSV with columns `n, variant, mode, degree, log_degree,
/// norm_beta, norm_beta_err, norm_alpha_1..m, err_1..m, ratio, ratio_err, seed`.
pub fn write_csv<W: Write>(records: &[CertificateRecord], out: W) -> Result<()> {
    let m = records.first().map(|r| r.norm_alphas.len()).unwrap_or(0);
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = ["n", "variant", "mode", "degree", "log_degree", "norm_beta", "norm_beta_err"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    header.extend((1..=m).map(|j| format!("norm_alpha_{j}")));
    header.extend((1..=m).map(|j| format!("err_{j}")));
    header.extend(["ratio", "ratio_err", "seed"].iter().map(|s| s.to_string()));
    w.write_record(&header)?;
    for r in records {
        let mut row = vec![
            r.n.to_string(),
            r.variant.to_string(),
            r.mode.to_string(),
            r.degree.clone(),
            r.log_degree.to_string(),
            r.norm_beta.mean.to_string(),
            r.norm_beta.stderr.to_string(),
        ];
        row.extend(r.norm_alphas.iter().map(|e| e.mean.to_string()));
        row.extend(r.norm_alphas.iter().map(|e| e.stderr.to_string()));
        row.extend([r.ratio.to_string(), r.ratio_err.to_string(), r.seed.to_string()]);
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn to_csv_string(records: &[CertificateRecord]) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(records, &mut buf)?;
    Ok(String::from_utf8(buf).expect("csv is utf-8"))
}
