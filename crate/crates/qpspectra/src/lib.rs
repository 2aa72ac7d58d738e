//! Numerical toolkit for quasi-parabolic composition operators on weighted
//! Bergman spaces.
//!
//! The crate builds finite grid representations of composition operators
//! `f -> f(pz + psi(z))` on the weighted Bergman space of the upper
//! half-plane, expands them in a norm-convergent operator series with a
//! certified truncation bound, evaluates the closed-form essential spectrum
//! `{exp(izt) : t >= 0, z in the local essential range of psi at infinity}
//! union {0}`, and runs the numerical diagnostics (residual certificates,
//! essential-normality decay, mean-oscillation profiles) that back the
//! formula at desk scale.
//!
//! See the `book/` guide at the repository root for a narrative walkthrough;
//! its code snippets are compiled as doc-tests of this crate.

// Validations use `!(x > bound)` on purpose: the negation rejects NaN,
// which `x <= bound` would let through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod numerics;
pub mod spaces;
pub mod symbols;
pub mod operators;
pub mod approximation;
pub mod spectra;
pub mod validate;
pub mod book;

pub use error::{Error, Result};
