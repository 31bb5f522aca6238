//! Exact toric moment-polytope engine: half-space systems, chambers, exact
//! moments, the characteristic invariant of Hamiltonian circle actions and
//! mass linearity tests.

pub mod error;
pub mod exact;
pub mod families;
pub mod invariant;
pub mod io;
pub mod masslinear;
pub mod moments;
pub mod polytope;
pub mod verify;

pub use error::{Error, Result};
pub use exact::{RatVector, Rational};
