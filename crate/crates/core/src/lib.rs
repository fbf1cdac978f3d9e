//! Numerical certification and refutation of matrix monotonicity and matrix
//! convexity of fixed order for scalar functions on real intervals.
//!
//! Three independent routes are implemented and cross-checked:
//!
//! * differential Hankel-matrix criteria on derivative jets ([`criteria`]),
//! * the definitional matrix-order tests via Hermitian functional calculus
//!   and seeded counterexample search ([`hermitian`]),
//! * divided-difference matrices ([`divided`]).
//!
//! [`polylab`] constructs strictly n-monotone/n-concave (or convex)
//! polynomials of prescribed degree and searches for polynomials lying
//! between consecutive matrix-convexity orders.

pub mod criteria;
pub mod divided;
pub mod error;
pub mod expr;
pub mod hermitian;
pub mod interval;
pub mod jet;
pub mod linalg;
pub mod parse;
pub mod polylab;
pub mod selftest;

pub use error::{Error, Result};
pub use expr::{Expr, FunctionSpec};
pub use interval::Interval;
pub use parse::parse;
