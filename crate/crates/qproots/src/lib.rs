//! Exact feasibility of sparse univariate polynomials over the p-adic
//! rationals.
//!
//! The crate decides whether an integer polynomial has a root in Q_p, and
//! backs every "feasible" answer with a checkable object: an exact rational
//! root or a Hensel certificate that pins an approximate root to a precision
//! at which Newton iteration provably converges. Around that core sit the
//! supporting casts: Newton polygons over Q_p, fast dedicated deciders for
//! binomials and trinomials, a CNF-to-polynomial-system reduction showing the
//! general problem is NP-hard, and a random search for primes in arithmetic
//! progressions used to pick the prime for that reduction.

pub mod arith;
pub mod binomial;
pub mod certify;
pub mod decide;
pub mod density;
pub mod hardness;
pub mod dense;
pub mod modpoly;
pub mod newton;
pub mod poly;
pub mod primegen;
pub mod trinomial;
pub mod error;

pub use error::{Error, Result};
