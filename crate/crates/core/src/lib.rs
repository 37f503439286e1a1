//! Computable content of the generalised Thue–Morse (gTM) family of
//! substitution sequences.
//!
//! For a pair of positive integers `(k, ℓ)` with substitution length
//! `L = k + ℓ`, the gTM substitution is `1 ↦ 1^k 1̄^ℓ`, `1̄ ↦ 1̄^k 1^ℓ`.
//! This crate implements, end to end:
//!
//! * the fixed points and words of the substitution, together with the
//!   generalised period-doubling (gpd) factor system and the 2-block
//!   factor map φ ([`substitution`]);
//! * the exact autocorrelation coefficients η(m) as arbitrary-precision
//!   rationals, the brute-force averaging oracle, Wiener sums with the
//!   growth bound, and the Ψ sequence iteration ([`autocorrelation`]);
//! * the singular continuous diffraction distribution function F on [0,1]
//!   by two independent numerical schemes — a Fourier series with exact
//!   coefficients and a Riesz-product/Volterra iteration — plus the
//!   integration kernel ϑ and the Cantor staircase comparator
//!   ([`diffraction`]);
//! * the Anderson–Putnam cohomology action matrices with their eigen-data,
//!   the first-cohomology group descriptors, dynamical zeta functions and
//!   periodic-orbit counts ([`topology`]);
//! * a cross-module verification suite ([`verify`]).
//!
//! All exact arithmetic uses [`num_rational::BigRational`]; all sampled
//! curves use `f64`. Grid evaluations are parallelised deterministically
//! (the thread count never changes any output bit); the worker count is
//! capped by the `GTM_THREADS` environment variable.

pub mod autocorrelation;
pub mod diffraction;
mod error;
pub mod parallel;
mod params;
pub mod substitution;
pub mod topology;
pub mod verify;

pub use error::{Error, Result};
pub use params::Params;
