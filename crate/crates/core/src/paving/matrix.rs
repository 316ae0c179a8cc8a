use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::matrix::{char_poly_matrix, op_norm, principal_submatrix, validate_psd_contraction};

use super::{exhaustive_paving, PavingError, PavingResult, HYPOTHESIS_TOL};

/// Largest allowed gap between a part's operator norm and its diagonal maxroot.
pub const NORM_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixPavingReport {
    pub result: PavingResult,
    /// `||K_S||` per part, from the eigenvalues of the principal submatrix; 0 for empty parts.
    pub norms: Vec<f64>,
    pub max_norm_gap: f64,
}

/// Paves `chi[K]` for a PSD contraction `K` with diagonal at most `alpha`, and checks each
/// part's maxroot against the operator norm of `K_S`.
pub fn matrix_paving(k: &DMatrix<f64>, r: usize, alpha: f64) -> Result<MatrixPavingReport, PavingError> {
    let mut bad = Vec::new();
    if let Err(e) = validate_psd_contraction(k, HYPOTHESIS_TOL) {
        bad.push(e.to_string());
    }
    for i in 0..k.nrows().min(k.ncols()) {
        if k[(i, i)] > alpha + HYPOTHESIS_TOL {
            bad.push(format!("diagonal entry {i} is {} > alpha = {alpha}", k[(i, i)]));
        }
    }
    if !bad.is_empty() {
        return Err(PavingError::HypothesisViolated(bad));
    }
    let result = exhaustive_paving(&char_poly_matrix(k), r, alpha)?;
    let mut norms = Vec::with_capacity(result.partition.r());
    let mut max_norm_gap: f64 = 0.0;
    for (part, (&s, m)) in result.partition.parts().iter().zip(&result.per_part_maxroot).enumerate() {
        let norm = op_norm(&principal_submatrix(k, s));
        let maxroot = m.unwrap_or(0.0);
        let gap = (norm - maxroot).abs();
        if gap > NORM_TOL {
            return Err(PavingError::NormMismatch { part, norm, maxroot });
        }
        max_norm_gap = max_norm_gap.max(gap);
        norms.push(norm);
    }
    Ok(MatrixPavingReport { result, norms, max_norm_gap })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::paving::lr_bound;

    #[test]
    fn scalar_matrix() {
        let k = DMatrix::from_diagonal_element(3, 3, 0.2);
        let rep = matrix_paving(&k, 2, 0.2).unwrap();
        assert!(rep.norms.iter().filter(|&&x| x > 0.0).all(|x| (x - 0.2).abs() < 1e-12));
    }

    #[test]
    fn rank_one_pair() {
        let k = DMatrix::from_element(2, 2, 0.5);
        for r in [2, 3] {
            assert!(matches!(matrix_paving(&k, r, 0.5), Err(PavingError::ParamOutOfRange(_))));
        }
        let rep = matrix_paving(&k, 4, 0.5).unwrap();
        assert_eq!(rep.result.partition.to_index_lists(), vec![vec![0], vec![1]]);
        assert!(rep.norms.iter().all(|&x| x == 0.0 || (x - 0.5).abs() < 1e-12));
        assert!(0.5 <= lr_bound(4, 0.5).unwrap());
        assert!(rep.result.certified);
    }

    #[test]
    fn not_a_contraction() {
        let k = DMatrix::from_diagonal_element(2, 2, 1.5);
        assert!(matches!(matrix_paving(&k, 2, 0.25), Err(PavingError::HypothesisViolated(_))));
    }
}
