use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::matrix::{char_poly_matrix, principal_minors, principal_submatrix, validate_psd_contraction};
use crate::multiaffine::MAX_VARS;
use crate::subset::SubsetMask;

use super::{superset_mobius, PointProcess, ProcessError};

/// Tolerance for reading `K` as a PSD contraction.
pub const PSD_TOL: f64 = 1e-9;
/// Largest pmf deviation accepted by the mixture check.
pub const MIXTURE_TOL: f64 = 1e-8;
/// Largest `n` accepted by the mixture check.
pub const MIXTURE_MAX_N: usize = 8;

/// The process with `P(A in X) = det K_A`.
pub fn determinantal_process(k: &DMatrix<f64>) -> Result<PointProcess, ProcessError> {
    let n = k.nrows();
    if n > MAX_VARS {
        return Err(ProcessError::NotPsdContraction(format!("{n} points exceed the maximum of {MAX_VARS}")));
    }
    validate_psd_contraction(k, PSD_TOL).map_err(|e| ProcessError::NotPsdContraction(e.to_string()))?;
    let mut t = principal_minors(k);
    superset_mobius(&mut t, n);
    let scale = 1e-10;
    if let Some(&p) = t.iter().find(|&&p| p < -scale) {
        return Err(ProcessError::NotPsdContraction(format!("negative mass {p}")));
    }
    for p in &mut t {
        *p = p.max(0.0);
    }
    let x = PointProcess::new(n, t)?;
    let chi = char_poly_matrix(k);
    let gap = x.kernel_poly().coeffs().iter().zip(chi.coeffs()).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    if gap > 1e-8 {
        return Err(ProcessError::NotAValidKernel(format!("kernel differs from det(Z - K) by {gap:e}")));
    }
    Ok(x)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HkpvReport {
    pub eigenvalues: Vec<f64>,
    pub max_deviation: f64,
    pub holds: bool,
}

/// Rebuilds the law of the determinantal process of `K = sum_i lambda_i v_i v_i^T` as the
/// mixture over `I` of projection processes with kernel `sum_{i in I} v_i v_i^T`, weighted
/// by `prod_{i in I} lambda_i prod_{i not in I} (1 - lambda_i)`.
pub fn hkpv_mixture_check(k: &DMatrix<f64>) -> Result<HkpvReport, ProcessError> {
    let n = k.nrows();
    if n > MIXTURE_MAX_N {
        return Err(ProcessError::ParamOutOfRange(format!("n = {n} exceeds {MIXTURE_MAX_N}")));
    }
    let x = determinantal_process(k)?;
    let eig = SymmetricEigen::new(k.clone());
    let lambda: Vec<f64> = eig.eigenvalues.iter().map(|l| l.clamp(0.0, 1.0)).collect();
    let mut mix = vec![0.0; 1 << n];
    for i in 0..1u32 << n {
        let set = SubsetMask(i);
        let w: f64 = (0..n).map(|j| if set.contains(j) { lambda[j] } else { 1.0 - lambda[j] }).product();
        if w == 0.0 {
            continue;
        }
        let mut p = DMatrix::zeros(n, n);
        for j in set.iter() {
            let v = eig.eigenvectors.column(j);
            p += v * v.transpose();
        }
        for b in (0..1u32 << n).filter(|b| b.count_ones() == i.count_ones()) {
            let det = if b == 0 { 1.0 } else { principal_submatrix(&p, SubsetMask(b)).determinant() };
            mix[b as usize] += w * det;
        }
    }
    let max_deviation = mix.iter().zip(x.pmf()).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    Ok(HkpvReport { eigenvalues: lambda, max_deviation, holds: max_deviation <= MIXTURE_TOL })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn diagonal_kernel_is_independent() {
        let p = [0.2, 0.7, 0.4];
        let k = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&p));
        let x = determinantal_process(&k).unwrap();
        for a in 0..8usize {
            let want: f64 = p.iter().enumerate().map(|(i, &q)| if a >> i & 1 == 1 { q } else { 1.0 - q }).product();
            assert_abs_diff_eq!(x.pmf()[a], want, epsilon = 1e-14);
        }
        assert!(hkpv_mixture_check(&k).unwrap().holds);
    }

    #[test]
    fn identity_is_full_set() {
        let x = determinantal_process(&DMatrix::identity(3, 3)).unwrap();
        assert_abs_diff_eq!(x.pmf()[7], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn rank_one_projection() {
        let k = DMatrix::from_element(2, 2, 0.5);
        let x = determinantal_process(&k).unwrap();
        assert_abs_diff_eq!(x.pmf()[1], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(x.pmf()[2], 0.5, epsilon = 1e-15);
        assert!(x.pmf()[0].abs() < 1e-15 && x.pmf()[3].abs() < 1e-15);
        let rep = hkpv_mixture_check(&k).unwrap();
        assert!(rep.holds, "{rep:?}");
    }

    #[test]
    fn rejects_non_contractions() {
        let k = DMatrix::from_diagonal_element(2, 2, 1.2);
        assert!(matches!(determinantal_process(&k), Err(ProcessError::NotPsdContraction(_))));
        let k = DMatrix::from_row_slice(2, 2, &[0.5, 0.8, 0.8, 0.5]);
        assert!(matches!(determinantal_process(&k), Err(ProcessError::NotPsdContraction(_))));
    }
}
