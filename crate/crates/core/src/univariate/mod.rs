//! Univariate real polynomials: roots, interlacing and majorization.

pub mod exact;
mod interlace;
mod poly;
mod roots;
pub mod sturm;

use thiserror::Error;

pub use interlace::{
    are_interlacing, common_interlacer_probe, interlaces, interlaces_tol, majorization_margin,
    majorizes, proper_position, proper_position_roots, wronskian_proper_position, proper_position_tol, wronskian, DEFAULT_TOL,
};
pub use poly::UniPoly;
pub use roots::{
    is_real_rooted, max_abs_root, maxroot, maxroot_opt, min_root, roots, roots_at_least,
    roots_at_most, roots_extended, roots_with, RootOptions, RootVector,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RootError {
    #[error("polynomial is identically zero")]
    ZeroPolynomial,
    #[error("polynomial is a nonzero constant and has no roots")]
    NoRoots,
    #[error("not real-rooted: no root in [{lo}, {hi}] (relative residual {residual:e})")]
    NotRealRooted { lo: f64, hi: f64, residual: f64 },
    #[error("degrees {left} and {right} differ by more than one")]
    DegreeMismatch { left: usize, right: usize },
    #[error("vectors have lengths {left} and {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("sums differ: {left} vs {right}")]
    SumMismatch { left: f64, right: f64 },
}
