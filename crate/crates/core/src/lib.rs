//! Explicit witness polynomials for quantitative Ornstein non-inequalities.
//!
//! For a system of multi-indices `{alpha_1, ..., alpha_m; beta}` on the torus `T^d`
//! the crate finds the integer certificates (`Lambda`, `Gamma`, `eps`) under which the
//! Bernstein-type constant `K_N` in
//!
//! ```text
//! ||D^beta f||_1 <= K_N sum_j ||D^alpha_j f||_1,   deg f <= N,
//! ```
//!
//! must grow like a power of `ln N`, builds the Riesz-product witnesses `W_n` with exact
//! big-integer frequencies, checks the algebraic identities they satisfy, and estimates
//! their L1 norms by Monte Carlo with exact phase reduction.
//!
//! The modules follow the pipeline:
//!
//! - [`index`]: multi-indices and derivative systems
//! - [`certsearch`]: `Lambda`, `Gamma`, `eps` and the exponents `theta`, `phi`
//! - [`trigpoly`]: exact sparse trigonometric polynomials and phase reduction
//! - [`witness`]: the sequences `a_k`, Riesz products, `W_n` and the `B + G` split
//! - [`normest`]: Monte Carlo, quasi-Monte Carlo and grid L1 norms
//! - [`experiments`]: empirical checks of the imported inequalities
//! - [`certify`]: per-level certificate records and exponent sweeps
//! - [`cli`]: the `ornstein` command-line front end

pub mod certify;
pub mod certsearch;
pub mod cli;
pub mod error;
pub mod experiments;
pub mod index;
pub mod normest;
pub mod selftest;
pub mod stats;
pub mod trigpoly;
pub mod witness;

pub use error::{Error, Result};
pub use index::{DerivativeSystem, MultiIndex};
