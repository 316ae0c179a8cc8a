//! Paving of multi-affine real stable polynomials, interlacing families, the barrier
//! method, and kernel polynomials of strongly Rayleigh point processes.

pub mod hyperbolic;
pub mod instances;
pub mod matrix;
pub mod multiaffine;
pub mod paving;
pub mod process;
pub mod multidegree;
pub mod stability;
pub mod subset;
pub mod univariate;

use thiserror::Error;

pub use multiaffine::{MultiAffinePoly, PolyFile};
pub use multidegree::MultiDegreePoly;
pub use subset::SubsetMask;
pub use univariate::{RootError, RootVector, UniPoly};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PolyError {
    #[error("expected dimension {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("{n} variables exceed the maximum of {max}")]
    TooManyVariables { n: usize, max: usize },
    #[error("variable {var} out of range for {n} variables")]
    VariableOutOfRange { var: usize, n: usize },
    #[error("exponent {exponent} of variable {var} exceeds cap {cap}")]
    ExponentOverCap { var: usize, exponent: usize, cap: usize },
    #[error("scale of variable {var} is zero")]
    ZeroScale { var: usize },
    #[error("dense table would exceed {budget} entries")]
    BudgetExceeded { budget: usize },
    #[error("expected {expected} variables, got {got}")]
    WrongArity { expected: usize, got: usize },
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error(transparent)]
    Root(#[from] RootError),
}

/// Operations shared by the multi-affine and the bounded-degree representations.
pub trait Polynomial: Clone + Send + Sync {
    fn n(&self) -> usize;
    fn eval(&self, z: &[f64]) -> Result<f64, PolyError>;
    /// `t -> p(t v + alpha)`.
    fn section(&self, v: &[f64], alpha: &[f64]) -> Result<UniPoly, PolyError>;
    fn partial_var(&self, i: usize) -> Self;
}
