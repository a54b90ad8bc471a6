//! Special symmetric period-2 solutions of the distributed delay equation
//!
//! ```text
//! x'(t) = -∫₀¹ f(x(t - s)) ds
//! ```
//!
//! for `f(x) = r sin x` and `f(x) = r (eˣ - 1)`. Solutions are built in closed
//! form from Jacobi elliptic functions ([`solutions`]) and checked against
//! independent routes: the planar Hamiltonian reduction ([`hamiltonian`]),
//! quadrature residuals and a method-of-steps simulator ([`dde`]).

pub mod dde;
pub mod elliptic;
pub mod error;
pub mod hamiltonian;
pub mod quadrature;
pub mod solutions;

pub use error::{Error, Result};

/// Existence threshold `π²/2` shared by both models.
pub const THRESHOLD: f64 = std::f64::consts::PI * std::f64::consts::PI / 2.0;
