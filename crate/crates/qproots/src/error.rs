//! Library-wide error type.

use num_bigint::BigInt;
use thiserror::Error;

use crate::arith::Valuation;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A precondition on an input value was violated (zero polynomial where a
    /// nonzero one is required, wrong term count, out-of-range parameter, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Text or JSON input could not be parsed. `position` is a character
    /// offset into the input when one is known.
    #[error("cannot parse {what} at offset {}: {detail}", position.map(|n| n.to_string()).unwrap_or_else(|| "?".into()))]
    Parse {
        what: &'static str,
        detail: String,
        position: Option<usize>,
    },

    /// Modulus was zero/negative where a positive one is required.
    #[error("modulus must be at least {min}, got {got}")]
    BadModulus { min: u64, got: BigInt },

    /// Modular inverse of a non-unit was requested.
    #[error("{value} is not invertible modulo {modulus}")]
    NotInvertible { value: BigInt, modulus: BigInt },

    /// Exact polynomial division left a nonzero remainder; carries the
    /// exponent (degree) of the remainder's leading term.
    #[error("inexact division: nonzero remainder of degree {remainder_degree}")]
    InexactDivision { remainder_degree: BigInt },

    /// The Hensel precondition `ord_p f(z0) >= ell` and `2*ord_p f'(z0) < ell`
    /// does not hold at the starting precision.
    #[error("Hensel condition failed at ell={ell}: ord_p f(z0) = {val_f}, ord_p f'(z0) = {val_df}")]
    HenselCondition {
        val_f: Valuation,
        val_df: Valuation,
        ell: u64,
    },

    /// A configurable resource cap was exceeded (dense degree, enumeration
    /// range, unity degree, ...). The offending quantity and the cap are
    /// reported as decimal strings.
    #[error("{what} cap exceeded: needed {needed}, cap {cap}")]
    CapExceeded {
        what: &'static str,
        needed: String,
        cap: String,
    },

    /// An internal cross-check failed; indicates a bug, not bad input.
    #[error("inconsistency: {0}")]
    Inconsistency(String),

    /// A number that must be prime is composite; carries a witness or factor
    /// when one is available.
    #[error("{p} is not prime ({witness})")]
    NotPrime { p: BigInt, witness: String },
}
