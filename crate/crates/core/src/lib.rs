//! Values of inhomogeneous quadratic forms at integer points and their
//! dynamical counterparts.
//!
//! The crate is organised around four kernels:
//!
//! * [`forms`]: quadratic forms with shifts, signatures, the binary
//!   decomposition `Q_ξ(y) = λ·Q₀((g,v)·y)` and the signature exponent table.
//! * [`lattices`]: affine unimodular planar lattices, the diagonal flow
//!   `b_t = diag(eᵗ, e⁻ᵗ)`, the submanifolds `M_v` and transversality checks.
//! * [`counting`]: exact enumeration engines (interval counts, congruence
//!   counts, shrinking targets, dyadic min-search, four-term counts).
//! * [`games`]: a referee and strategy engine for Schmidt's game, the
//!   hyperplane absolute game and the hyperplane percentage game.

// `!(x > 0.0)` style tests are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod counting;
pub mod error;
pub mod forms;
pub mod games;
pub mod lattices;
pub mod linalg;
pub mod presets;

pub use error::{Error, Result};

/// Largest number of integer points any enumeration kernel will visit.
pub const ENUMERATION_BUDGET: f64 = 1e9;
