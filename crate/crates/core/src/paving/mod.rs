//! Paving of multi-affine real stable polynomials.

pub mod barrier;
pub mod gr;
pub mod matrix;
pub mod partition;
pub mod tree;
pub mod two_stage;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::multiaffine::MultiAffinePoly;
use crate::subset::SubsetMask;
use crate::univariate::{roots, roots_at_least, roots_at_most, RootError, UniPoly};
use crate::PolyError;

pub use barrier::{
    barrier_phi, barrier_run, barrier_step, certified_bound_on_grid, certified_maxroot_bound,
    is_above_roots, BarrierReport, BarrierRun, BarrierState, LambdaMode,
};
pub use gr::{g_of_partition, g_r_bruteforce, g_r_differential, restricted_diagonal};
pub use matrix::{matrix_paving, MatrixPavingReport};
pub use partition::Partition;
pub use tree::{interlacing_descent, node_polynomial, DescentOutcome, DescentStep};
pub use two_stage::{two_stage_paving, zero_diag_hypotheses};

/// Tolerance for reading kernel hypotheses off computed coefficients and roots.
pub const HYPOTHESIS_TOL: f64 = 1e-9;
/// Slack allowed when comparing a computed root against a closed-form bound.
pub const BOUND_SLACK: f64 = 1e-8;
/// Largest number of set partitions the exhaustive search will visit.
pub const PARTITION_BUDGET: u128 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PavingError {
    #[error("hypothesis violated: {}", .0.join("; "))]
    HypothesisViolated(Vec<String>),
    #[error("parameter out of range: {0}")]
    ParamOutOfRange(String),
    #[error("{what}: {size} exceeds budget {budget}")]
    BudgetExceeded { what: &'static str, size: f64, budget: usize },
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("descent stuck at level {level}: parent maxroot {parent}, children {children:?}")]
    DescentStuck { level: usize, parent: f64, children: Vec<f64> },
    #[error("node polynomial at level {level} differs from the sum of its children by {gap:e}")]
    TreeInconsistent { level: usize, gap: f64 },
    #[error("point left the region above the roots at step {step}")]
    NotAboveRoots { step: usize },
    #[error("barrier in direction {direction} grew from {before} to {after} at step {step}")]
    MonotonicityViolated { step: usize, direction: usize, before: f64, after: f64 },
    #[error("polynomial vanishes at the evaluation point")]
    PoleAtPoint,
    #[error("operator norm {norm} and maxroot {maxroot} of part {part} disagree")]
    NormMismatch { part: usize, norm: f64, maxroot: f64 },
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Root(#[from] RootError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PavingMethod {
    Exhaustive,
    Descent,
    TwoStage,
}

/// `(sqrt(1/r - alpha/(r-1)) + sqrt(alpha))^2` for `r >= 2`, `0 < alpha <= (r-1)^2/r^2`.
pub fn lr_bound(r: usize, alpha: f64) -> Result<f64, PavingError> {
    if r < 2 {
        return Err(PavingError::ParamOutOfRange(format!("r = {r} < 2")));
    }
    let rf = r as f64;
    let cap = (rf - 1.0).powi(2) / (rf * rf);
    if !(alpha > 0.0 && alpha <= cap * (1.0 + 1e-12)) {
        return Err(PavingError::ParamOutOfRange(format!("alpha = {alpha} not in (0, {cap}]")));
    }
    let inner = (1.0 / rf - alpha / (rf - 1.0)).max(0.0);
    Ok((inner.sqrt() + alpha.sqrt()).powi(2))
}

/// `(sqrt(1/r) + sqrt(alpha))^2`, the earlier bound of the same shape without the correction term.
pub fn mss_bound(r: usize, alpha: f64) -> f64 {
    ((1.0 / r as f64).sqrt() + alpha.sqrt()).powi(2)
}

/// `((r-2)/(r(r-1)) + 2 sqrt((r-2)/(r(r-1)))) lambda` for `r >= 4`, `lambda > 0`.
pub fn zero_diag_bound(r: usize, lambda: f64) -> Result<f64, PavingError> {
    if r < 4 {
        return Err(PavingError::ParamOutOfRange(format!("r = {r} < 4")));
    }
    if lambda.is_nan() || lambda <= 0.0 {
        return Err(PavingError::ParamOutOfRange(format!("lambda = {lambda} must be positive")));
    }
    let rf = r as f64;
    let q = (rf - 2.0) / (rf * (rf - 1.0));
    Ok((q + 2.0 * q.sqrt()) * lambda)
}

/// Conditions under which the paving bound applies: kernel-style `a_{} = 1`,
/// `|a_{i}| <= alpha` and the roots of the diagonal in `[0, 1]`. Returns the violated ones.
pub fn kernel_hypotheses(g: &MultiAffinePoly, alpha: f64) -> Vec<String> {
    let mut bad = Vec::new();
    let top = g.top_coeff();
    if (top - 1.0).abs() > HYPOTHESIS_TOL {
        bad.push(format!("top coefficient is {top}, expected 1"));
    }
    for i in 0..g.n() {
        let a = g.kernel_coeff(SubsetMask::singleton(i));
        if a.abs() > alpha + HYPOTHESIS_TOL {
            bad.push(format!("|a_{{{i}}}| = {} exceeds alpha = {alpha}", a.abs()));
        }
    }
    bad.extend(root_interval_violation(&g.diagonalize(), 0.0, 1.0));
    bad
}

pub(crate) fn root_interval_violation(d: &UniPoly, lo: f64, hi: f64) -> Option<String> {
    if d.is_zero() {
        return Some("diagonal is identically zero".into());
    }
    if let Err(e) = roots(d) {
        return Some(format!("diagonal is not real-rooted ({e})"));
    }
    let slack = HYPOTHESIS_TOL * (1.0 + lo.abs().max(hi.abs()));
    if !roots_at_least(d, lo - slack, HYPOTHESIS_TOL) || !roots_at_most(d, hi + slack, HYPOTHESIS_TOL) {
        return Some(format!("diagonal has roots outside [{lo}, {hi}]"));
    }
    None
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PavingResult {
    pub partition: Partition,
    /// `maxroot(diag(d^{S_i^c} g))`, `None` for an empty part.
    pub per_part_maxroot: Vec<Option<f64>>,
    pub per_part_minroot: Vec<Option<f64>>,
    pub bound: f64,
    pub certified: bool,
    pub method: PavingMethod,
}

impl PavingResult {
    /// Recomputes the per-part roots from `g`. Two-stage results are certified against the
    /// largest absolute root, the others against the largest root.
    pub fn new(g: &MultiAffinePoly, partition: Partition, bound: f64, method: PavingMethod) -> Result<Self, PavingError> {
        let mut per_part_maxroot = Vec::with_capacity(partition.r());
        let mut per_part_minroot = Vec::with_capacity(partition.r());
        for &s in partition.parts() {
            if s.is_empty() {
                per_part_maxroot.push(None);
                per_part_minroot.push(None);
                continue;
            }
            let rv = roots(&restricted_diagonal(g, s))?;
            per_part_maxroot.push(rv.max());
            per_part_minroot.push(rv.min());
        }
        let mut res = Self { partition, per_part_maxroot, per_part_minroot, bound, certified: false, method };
        res.certified = res.worst() <= bound + BOUND_SLACK;
        Ok(res)
    }

    pub fn per_part_max_abs_root(&self) -> Vec<Option<f64>> {
        self.per_part_maxroot
            .iter()
            .zip(&self.per_part_minroot)
            .map(|(a, b)| Some(a.as_ref()?.abs().max(b.as_ref()?.abs())))
            .collect()
    }

    /// The quantity compared against `bound`.
    pub fn worst(&self) -> f64 {
        let vals = match self.method {
            PavingMethod::TwoStage => self.per_part_max_abs_root(),
            _ => self.per_part_maxroot.clone(),
        };
        vals.into_iter().flatten().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Best partition of `[n]` into `r` parts minimizing the largest part maxroot, with the
/// per-mask maxroots precomputed. Unordered set partitions with at most `r` blocks are
/// enough since empty parts contribute nothing.
pub(crate) fn min_max_partition(g: &MultiAffinePoly, r: usize) -> Result<(Partition, f64), PavingError> {
    let n = g.n();
    let count = partition::count_set_partitions(n, r);
    if count > PARTITION_BUDGET {
        return Err(PavingError::BudgetExceeded { what: "set partitions", size: count as f64, budget: PARTITION_BUDGET as usize });
    }
    let table: Vec<Option<f64>> = (0..1u32 << n)
        .into_par_iter()
        .map(|s| Ok(roots(&restricted_diagonal(g, SubsetMask(s)))?.max()))
        .collect::<Result<_, RootError>>()?;
    let rgs = partition::set_partitions(n, r);
    let score = |a: &Vec<usize>| {
        let mut masks = vec![0u32; r];
        for (i, &b) in a.iter().enumerate() {
            masks[b] |= 1 << i;
        }
        masks.iter().filter_map(|&m| table[m as usize]).fold(f64::NEG_INFINITY, f64::max)
    };
    let (idx, best) = rgs
        .par_iter()
        .enumerate()
        .map(|(k, a)| (k, score(a)))
        .reduce(|| (usize::MAX, f64::INFINITY), |x, y| {
            if y.1 < x.1 || (y.1 == x.1 && y.0 < x.0) {
                y
            } else {
                x
            }
        });
    let part = Partition::from_assignment(n, r, &rgs[idx])?;
    Ok((part, best))
}

/// Exhaustive search for the partition minimizing the largest part maxroot.
pub fn exhaustive_paving(g: &MultiAffinePoly, r: usize, alpha: f64) -> Result<PavingResult, PavingError> {
    let bound = lr_bound(r, alpha)?;
    let bad = kernel_hypotheses(g, alpha);
    if !bad.is_empty() {
        return Err(PavingError::HypothesisViolated(bad));
    }
    let (part, _) = min_max_partition(g, r)?;
    PavingResult::new(g, part, bound, PavingMethod::Exhaustive)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::char_poly_matrix;
    use nalgebra::DMatrix;

    #[test]
    fn closed_forms() {
        assert!((lr_bound(2, 0.25).unwrap() - 1.0).abs() < 1e-15);
        let want = ((5.0f64 / 18.0).sqrt() + 1.0 / 3.0).powi(2);
        assert!((lr_bound(3, 1.0 / 9.0).unwrap() - want).abs() < 1e-15);
        let q = 1.0f64 / 6.0;
        assert!((zero_diag_bound(4, 1.0).unwrap() - (q + 2.0 * q.sqrt())).abs() < 1e-15);
        assert!((mss_bound(2, 0.25) - (0.5f64.sqrt() + 0.5).powi(2)).abs() < 1e-15);
        assert!(lr_bound(2, 0.3).is_err());
        assert!(lr_bound(1, 0.1).is_err());
        assert!(zero_diag_bound(3, 1.0).is_err());
    }

    #[test]
    fn single_point() {
        let g = MultiAffinePoly::new(1, vec![-0.2, 1.0]).unwrap();
        let res = exhaustive_paving(&g, 2, 0.25).unwrap();
        assert!(res.certified);
        assert!((res.worst() - 0.2).abs() < 1e-15);
    }

    #[test]
    fn diagonal_matrix() {
        let k = DMatrix::from_diagonal_element(4, 4, 0.2);
        let res = exhaustive_paving(&char_poly_matrix(&k), 2, 0.2).unwrap();
        for m in res.per_part_maxroot.iter().flatten() {
            assert!((m - 0.2).abs() < 1e-12);
        }
    }

    #[test]
    fn projection_violates_small_alpha() {
        let g = MultiAffinePoly::new(2, vec![0.0, -0.5, -0.5, 1.0]).unwrap();
        match exhaustive_paving(&g, 2, 0.25) {
            Err(PavingError::HypothesisViolated(v)) => assert!(v.iter().any(|s| s.contains("exceeds alpha"))),
            other => panic!("unexpected {other:?}"),
        }
    }
}
