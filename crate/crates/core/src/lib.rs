//! Numerical core for N-level quantum systems driven by time-dependent
//! non-Hermitian perturbations H(t) = H0 + f(t) H1.
//!
//! The crate is `no_std` (it needs `alloc`). File formats, parallel runners
//! and the command-line interface live in the `nhpt` crate.

#![no_std]
// Negated comparisons reject NaN; index loops mirror the formulas.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;

pub mod dynamics;
pub mod error;
pub mod fft;
pub mod ode;
pub mod operators;
pub mod perturbation;
pub mod pulses;
pub mod scenarios;
pub mod special;
pub mod spectrum;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64;
