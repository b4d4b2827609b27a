//! Exact Weyl-algebra engine for the EPR state.
//!
//! The crate evaluates the EPR state of two canonical degrees of freedom as a
//! positive linear functional on finite combinations of Weyl operators, and
//! provides the machinery used to check its structure:
//!
//! * [`weyl`]: exact rational phase points, Weyl polynomials and their
//!   products under the Weyl relations.
//! * [`states`]: the EPR functional and a Gaussian reference state, kernel
//!   matrices, positivity and support structure, uniqueness and
//!   multiplicativity checks.
//! * [`gns`]: finite frames of GNS vectors, Gram matrices, compressions and
//!   norm lower bounds.
//! * [`bell`]: Bell operators built from certified contractions, their
//!   expectation values and a derivative-free lower-bound search.
//! * [`surrogate`]: a finite matrix factor carrying a trace vector, on which
//!   the maximal CHSH value and perfect-correlation doubles are realized
//!   exactly.
//! * [`linalg`]: small dense complex matrices and a Hermitian eigensolver.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
#![warn(missing_debug_implementations)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod bell;
pub mod error;
pub mod gns;
pub mod linalg;
pub mod states;
pub mod surrogate;
pub mod weyl;

pub use error::{Error, Result};
pub use linalg::{CMatrix, HermitianMatrix};
pub use states::{StateFunctional, StateKind};
pub use weyl::{PhasePoint, Rational, WeylPolynomial};

/// Complex scalar used for coefficients, phases and matrix entries.
pub type C64 = num_complex::Complex64;
