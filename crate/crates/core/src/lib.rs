//! Convexity certificates and Hadamard-type bounds for products of convex
//! functions of one real variable.
//!
//! The crate is organised bottom-up:
//!
//! - [`expr`]: parsing, evaluation, symbolic derivatives and interval
//!   enclosures of expressions in `x`.
//! - [`convexity`]: three-valued certificates (proved, disproved with a
//!   replayable witness, unknown) for convexity and nonnegativity.
//! - [`quadrature`]: adaptive Gauss–Kronrod integration.
//! - [`hadamard`]: the endpoint, midpoint and Cauchy–Schwarz bounds for a
//!   pair `(u, v)` and the report tying them together.
//! - [`explorer`]: seeded generators of nonnegative convex functions and the
//!   stress and counterexample campaigns built on them.
//!
//! Campaigns and sampling loops run on rayon when the `parallel` feature is
//! enabled (the default); see [`Execution`].

pub mod convexity;
mod exec;
pub mod explorer;
pub mod expr;
pub mod hadamard;
pub mod quadrature;
pub mod structured;

pub use exec::Execution;
pub use expr::{parse, Expr, Interval, IntervalValue};

/// Relative slack used for every inequality comparison:
/// `1e-9 * max(1, magnitude)`.
pub fn tolerance(magnitude: f64) -> f64 {
    1e-9 * magnitude.abs().max(1.0)
}
