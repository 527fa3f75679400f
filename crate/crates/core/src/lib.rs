//! Remaining-operator calculus for Rarita–Schwinger type operators in Clifford analysis.

pub mod clifford;
pub mod conformal;
pub mod error;
pub mod integrate;
pub mod kernels;
pub mod linalg;
pub mod ops;
pub mod poly;
pub mod scalar;
pub mod spaces;
pub mod verify;

pub use clifford::{Involution, Multivector, PinElement};
pub use error::{Result, RsqError};
pub use scalar::{Rational, Scalar};
