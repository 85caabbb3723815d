//! Numerical Clifford analysis in the real Clifford algebra `R_n`.
//!
//! The crate is `no_std` (it needs `alloc`) and has no IO. It provides:
//!
//! * [`algebra`]: dense multivectors over `R_n` (generators square to `-1`),
//!   the geometric product, conjugation and the Euclidean inner product.
//! * [`fields`]: Clifford-valued fields, the Dirac operator `D = sum e_j d_j`,
//!   weights and their formal adjoint `du - (D phi) u`, bump test functions,
//!   monogenic polynomials and the Kelvin transform.
//! * [`quadrature`]: Gauss rules, sphere rules and weighted inner products.
//! * [`identity`]: term-by-term checks of weighted integral identities and
//!   coercive estimates.
//! * [`obstruction`]: the exterior-domain counterexample for `phi = n log|x|`.
//! * [`solver`]: a discrete weighted minimal-norm solver for `Du = f` and
//!   `Laplace u = f`, plus the cutoff sequence for the Gaussian constant.
#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod algebra;
pub mod fields;
pub mod identity;
pub mod obstruction;
pub mod quadrature;
pub mod rng;
pub mod solver;
pub mod special;

mod sum;

pub use algebra::{MultiIndex, Multivector};
pub use fields::{CliffordField, MultiplierChoice, Weight, WeightKind};
pub use identity::{IdentityReport, KappaK};
pub use quadrature::{Domain, IntegralValue, QuadratureSpec};

use alloc::string::String;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// Invalid static configuration (dimension out of range, bad rule size).
    #[error("configuration error: {0}")]
    Config(String),
    /// Operands that do not fit together (mismatched dimensions).
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    /// Evaluation at a point where a field or weight is singular.
    #[error("domain error: {0}")]
    Domain(String),
    /// A documented precondition does not hold (support leaks out of the domain, ...).
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// A parameter outside its admissible range.
    #[error("invalid parameter: {0}")]
    Parameter(String),
    /// Divergent integral or tail bound.
    #[error("not integrable: {0}")]
    NotIntegrable(String),
    /// Should not happen for valid input.
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = core::result::Result<T, Error>;
