//! Exact arithmetic substrate.
//!
//! Nothing in this crate uses floating point. Coefficients live in a
//! runtime-tagged [`Scalar`] whose carrier is described by a [`Ring`];
//! algebraic exponents of the extension groups live in [`QuadImaginary`].

mod linalg;
mod module;
mod quad;
mod ring;

pub use linalg::{rank, rational_kernel_basis, rref, span_contains};
pub use module::{enumerate_module, FiniteModule, ModuleElements, ModulePresentation};
pub use quad::QuadImaginary;
pub use ring::{Ring, Scalar};

use num_bigint::BigInt;
use num_rational::BigRational;

/// Errors raised by scalar and module operations.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScalarError {
    #[error("zero has no inverse")]
    ZeroInverse,
    #[error("{0} is not a field")]
    NotAField(Ring),
    #[error("the rational backend has an infinite carrier")]
    InfiniteCarrier,
    #[error("invalid ring or module: {0}")]
    Invalid(alloc::string::String),
}

/// Shorthand for an integer rational.
pub fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Shorthand for the rational `num/den`.
///
/// Panics if `den == 0`.
pub fn qq(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}
