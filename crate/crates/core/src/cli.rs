//! The `ornstein` command line: `cert`, `build`, `sweep`, `selftest`.
//!
//! Exit codes: 0 success, 1 input error, 2 no certificate, 3 resource cap.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::certify::{sweep, to_csv_string, SamplingConfig};
use crate::certsearch::{certify, Certificate, Theorem, DEFAULT_BOX};
use crate::error::{Error, Result};
use crate::index::DerivativeSystem;
use crate::trigpoly::{cap_from_env, write_dump};
use crate::witness::{Mode, WitnessFamily, WitnessParams};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_NO_CERTIFICATE: i32 = 2;
pub const EXIT_CAP: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "ornstein", version, about = "Witness polynomials for Ornstein-type non-inequalities")]
struct Cli {
    /// Worker threads (results do not depend on it).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum VariantArg {
    T1,
    T2,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Native,
    Scaled,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ObjectArg {
    /// The witness W_n.
    W,
    /// The modified Riesz product R_n.
    R,
    /// D^beta W_n.
    Dbeta,
    /// B_{beta,n}.
    B,
    /// G_{beta,n}.
    G,
}

#[derive(clap::Args, Debug)]
struct WitnessArgs {
    /// Variant; defaults to T2 when available, otherwise T1.
    #[arg(long, value_enum)]
    variant: Option<VariantArg>,
    #[arg(long, value_enum, default_value = "native")]
    mode: ModeArg,
    /// Base of the scaled mode.
    #[arg(long = "baseM", alias = "base-m", default_value_t = 4)]
    base_m: u32,
    /// Multiply Lambda by this factor.
    #[arg(long, default_value_t = 1)]
    lambda_scale: i64,
    /// Search box for the certificate.
    #[arg(long = "box", default_value_t = DEFAULT_BOX)]
    box_bound: u32,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Search for Lambda, Gamma and eps certificates.
    Cert {
        system: PathBuf,
        #[arg(long = "box", default_value_t = DEFAULT_BOX)]
        box_bound: u32,
        /// Also write the certificate JSON here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Expand a witness object exactly and write its canonical dump.
    Build {
        system: PathBuf,
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        w: WitnessArgs,
        #[arg(long, value_enum, default_value = "w")]
        object: ObjectArg,
        /// Output file; stdout when absent.
        #[arg(long)]
        dump: Option<PathBuf>,
    },
    /// Certificate records and exponent fits over a range of levels.
    Sweep {
        system: PathBuf,
        #[arg(long)]
        n_from: usize,
        #[arg(long)]
        n_to: usize,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        w: WitnessArgs,
        /// CSV output; the JSON mirror goes next to it with a `.json` extension.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the invariant suite.
    Selftest {
        /// Replacement for the embedded W_2 fixture dump.
        #[arg(long)]
        fixture: Option<PathBuf>,
    },
}

/// Exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NotCertified { .. } | Error::TooFewAlphas(_) => EXIT_NO_CERTIFICATE,
        Error::CapExceeded { .. } | Error::GridBudget { .. } => EXIT_CAP,
        _ => EXIT_INPUT,
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))
}

fn load_system(path: &Path) -> Result<DerivativeSystem> {
    let text = read(path)?;
    let sys: DerivativeSystem = serde_json::from_str(&text).map_err(|e| {
        Error::Parse(format!("{}: line {}, column {}: {e}", path.display(), e.line(), e.column()))
    })?;
    sys.validate()
}

fn witness_params(sys: DerivativeSystem, n: usize, w: &WitnessArgs) -> Result<WitnessParams> {
    let cert: Certificate = certify(&sys, w.box_bound)?;
    if w.lambda_scale < 1 {
        return Err(Error::Params("--lambda-scale must be positive".into()));
    }
    let cert = cert.with_lambda_scaled(w.lambda_scale);
    let variant = match w.variant {
        Some(VariantArg::T1) => Theorem::T1,
        Some(VariantArg::T2) => Theorem::T2,
        None if cert.t2.is_some() => Theorem::T2,
        None => Theorem::T1,
    };
    let mode = match w.mode {
        ModeArg::Native => Mode::Native,
        ModeArg::Scaled => Mode::Scaled { base: w.base_m },
    };
    let p = WitnessParams::new(sys, cert, n, variant, mode);
    p.validate()?;
    Ok(p)
}

fn cmd_cert(system: &Path, box_bound: u32, out_path: Option<&Path>, out: &mut dyn Write) -> Result<()> {
    let sys = load_system(system)?;
    let cert = certify(&sys, box_bound)?;
    let json = serde_json::to_string_pretty(&cert)?;
    writeln!(out, "{json}")?;
    if let Some(p) = out_path {
        std::fs::write(p, json + "\n")?;
    }
    Ok(())
}

fn cmd_build(system: &Path, n: usize, w: &WitnessArgs, object: ObjectArg, dump: Option<&Path>, out: &mut dyn Write) -> Result<()> {
    let p = witness_params(load_system(system)?, n, w)?;
    let fam = WitnessFamily::build(p)?.with_cap(cap_from_env());
    let beta = fam.params().sys.beta.clone();
    let poly = match object {
        ObjectArg::W => fam.w_poly()?,
        ObjectArg::R => fam.riesz_poly()?,
        ObjectArg::Dbeta => fam.derivative_poly(&beta)?,
        ObjectArg::B => fam.bg(&beta)?.0,
        ObjectArg::G => fam.bg(&beta)?.1,
    };
    let text = write_dump(&poly);
    match dump {
        Some(path) => std::fs::write(path, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_sweep(system: &Path, from: usize, to: usize, samples: u64, seed: u64, w: &WitnessArgs, csv_path: &Path, out: &mut dyn Write) -> Result<()> {
    if from < 1 || to < from {
        return Err(Error::Params(format!("bad level range {from}..={to}")));
    }
    let cfg = SamplingConfig::new(samples, seed)?;
    let p = witness_params(load_system(system)?, from, w)?;
    let rep = sweep(&p, from..=to, cfg)?;
    std::fs::write(csv_path, to_csv_string(&rep.records)?)?;
    std::fs::write(csv_path.with_extension("json"), serde_json::to_string_pretty(&rep)? + "\n")?;
    for (n, why) in &rep.failures {
        writeln!(out, "n={n}: skipped ({why})")?;
    }
    writeln!(out, "records: {}", rep.records.len())?;
    writeln!(out, "theoretical exponent: {}", rep.theoretical_phi)?;
    match (&rep.fitted_exponent, &rep.numerator_exponent) {
        (Some(f), Some(g)) => {
            writeln!(out, "fitted exponent (ratio vs ln ln N): {:.4}, 95% CI {:?}, R^2 {:.3}", f.slope, f.ci95, f.r2)?;
            writeln!(out, "fitted exponent (numerator vs ln ln N): {:.4}, R^2 {:.3}", g.slope, g.r2)?;
        }
        _ => writeln!(out, "fitted exponent: unavailable (fewer than 3 records)")?,
    }
    Ok(())
}

fn cmd_selftest(fixture: Option<&Path>, out: &mut dyn Write) -> Result<bool> {
    let text = fixture.map(read).transpose()?;
    let rep = crate::selftest::run(text.as_deref());
    for c in &rep.checks {
        writeln!(out, "{} {}{}", if c.pass { "PASS" } else { "FAIL" }, c.name, if c.detail.is_empty() { String::new() } else { format!(" ({})", c.detail) })?;
    }
    Ok(rep.passed())
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> Result<i32> {
    match cli.cmd {
        Cmd::Cert { system, box_bound, out: o } => cmd_cert(&system, box_bound, o.as_deref(), out).map(|_| EXIT_OK),
        Cmd::Build { system, n, w, object, dump } => cmd_build(&system, n, &w, object, dump.as_deref(), out).map(|_| EXIT_OK),
        Cmd::Sweep { system, n_from, n_to, samples, seed, w, out: csv } => {
            cmd_sweep(&system, n_from, n_to, samples, seed, &w, &csv, out).map(|_| EXIT_OK)
        }
        Cmd::Selftest { fixture } => cmd_selftest(fixture.as_deref(), out).map(|ok| if ok { EXIT_OK } else { EXIT_INPUT }),
    }
}

/// Parses `args` (including the program name), runs the command and returns the exit code.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{e}");
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    let result = match cli.threads {
        Some(t) => match rayon::ThreadPoolBuilder::new().num_threads(t.max(1)).build() {
            Ok(pool) => {
                let (r, buf) = pool.install(|| {
                    let mut buf = Vec::new();
                    (dispatch(cli, &mut buf), buf)
                });
                let _ = out.write_all(&buf);
                r
            }
            Err(e) => Err(Error::Params(format!("thread pool: {e}"))),
        },
        None => dispatch(cli, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

/// Entry point used by the binary.
pub fn run() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}
