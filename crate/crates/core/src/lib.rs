//! Direct and inverse scattering for the Zakharov-Shabat system with a real,
//! decaying potential, using spectral parameter power series (SPPS).
//!
//! The Jost solutions are power series in the Möbius-mapped spectral
//! parameter `z = (1/2 + iρ)/(1/2 - iρ)`, whose coefficients `a_n(x)`,
//! `b_n(x)` come out of a recurrent integration seeded by a single
//! Schrödinger solve at `ρ = i/2`.
//!
//! Pipeline:
//! - [`potential`] samples `q`, `q'` and the Schrödinger potentials `q1`, `q2`.
//! - [`basis`] solves for `e(i/2, x)`, `g(i/2, x)` and the companions `η`, `ξ`.
//! - [`coeffs`] runs the recurrence and picks the truncation order.
//! - [`jost`] evaluates the truncated series at any `ρ` in the upper half-plane.
//! - [`direct`] assembles `a(ρ)`, `b(ρ)`, eigenvalues and norming constants.
//! - [`inverse`] recovers `q` from scattering data through per-node least squares.

pub mod basis;
pub mod coeffs;
pub mod direct;
pub mod error;
pub mod inverse;
pub mod jost;
pub mod json;
pub mod numerics;
pub mod potential;

pub use error::{Error, Result};
pub use num_complex::Complex64;
