//! Pathwise stochastic numerics for delay equations driven by fractional
//! Brownian motion.
//!
//! The crate provides, bottom up:
//!
//! * exact-law fBm sampling on uniform grids and the Wiener shift
//!   ([`fbm`]);
//! * Hölder norms, windowed seminorms, a little-Hölder diagnostic, the
//!   exponentially weighted norm and path concatenation ([`holder`]);
//! * Weyl-type fractional derivatives, the pathwise Young integral in a
//!   fractional-calculus form and as Riemann-Stieltjes sums, and the
//!   associated norm estimates ([`frac`]);
//! * a Picard fixed-point solver for stochastic delay differential
//!   equations with declared coefficient classes ([`sdde`]);
//! * evaluation and verification of the induced cocycle: the cocycle
//!   identity, a time-continuity modulus estimate, and the rough-history
//!   counterexample ([`cocycle`]).
//!
//! All randomness is seeded; identical inputs give bitwise-identical
//! outputs. With the default `parallel` feature the heavy scans run on
//! rayon; disabling it selects sequential fallbacks with identical results.

pub mod chol;
pub mod cocycle;
pub mod error;
pub mod exec;
pub mod fbm;
pub mod frac;
pub mod grid;
pub mod holder;
pub mod sdde;

pub use error::{Error, Result};
pub use fbm::{covariance, sample_fbm, wiener_shift, FbmSampler, Hurst, SamplePath};
pub use frac::{FractionalOrder, IntegralMethod, PairScanPolicy};
pub use grid::{Grid, GridFunction};
pub use holder::HolderExponent;
pub use sdde::{CoefficientFunctional, DelaySystem, Segment, Solution, SolverConfig};
