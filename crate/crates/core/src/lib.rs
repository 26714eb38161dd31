//! Exact machinery for studying embeddings of rings, and in particular group
//! algebras of right-ordered groups, in division rings.
//!
//! The crate is `no_std` (it needs `alloc`). It provides:
//!
//! * [`scalars`]: exact coefficient rings (ℚ, ℤ, ℤ/m, 𝔽_p), the quadratic
//!   imaginary fields ℚ(√−1) and ℚ(√−3), finite modules, and rational kernels.
//! * [`ogroup`]: the c-scaled extension groups `y^h x^n` with their
//!   right-invariant order, the dual left order and conjugated local orders.
//! * [`galg`]: the group algebra kG.
//! * [`wqo`]: a Higman-style closure engine with ordered emission.
//! * [`series`]: lazy series in k((G)), the right kG-action, the ρ bijection,
//!   inversion of the action of nonzero elements of kG, and the pairing with
//!   k((G*)).
//! * [`matroid`]: closure operators on Rⁿ induced by modules, with auditors.
//! * [`matideal`]: the prime-matrix-ideal calculus and its auditors.
#![no_std]

extern crate alloc;

#[cfg(test)]
#[macro_use]
extern crate std;

pub mod galg;
pub mod grammar;
pub mod matideal;
pub mod matrix;
pub mod matroid;
pub mod ogroup;
pub mod report;
pub mod scalars;
pub mod series;
pub mod wqo;

pub use galg::AlgebraElement;
pub use ogroup::{Group, GroupElement, OrderTag};
pub use scalars::{QuadImaginary, Ring, Scalar};
