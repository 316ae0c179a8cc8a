//! Real symmetric matrices: principal minors, characteristic polynomials and spectral checks.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::multiaffine::{MultiAffinePoly, MAX_VARS};
use crate::subset::SubsetMask;
use crate::PolyError;

/// `K_S`: the principal submatrix on the rows and columns in `s`.
pub fn principal_submatrix(k: &DMatrix<f64>, s: SubsetMask) -> DMatrix<f64> {
    let idx = s.indices();
    DMatrix::from_fn(idx.len(), idx.len(), |i, j| k[(idx[i], idx[j])])
}

/// `det(K_S)` for every subset `S`, indexed by bitmask; the empty minor is 1.
pub fn principal_minors(k: &DMatrix<f64>) -> Vec<f64> {
    let n = k.nrows();
    (0..1u32 << n)
        .map(|s| {
            if s == 0 {
                1.0
            } else {
                principal_submatrix(k, SubsetMask(s)).determinant()
            }
        })
        .collect()
}

/// `det(Z - K)` as a multi-affine polynomial: `[z^S] = (-1)^{n-|S|} det(K_{S^c})`.
pub fn char_poly_matrix(k: &DMatrix<f64>) -> MultiAffinePoly {
    let n = k.nrows();
    assert!(n <= MAX_VARS, "at most {MAX_VARS} variables");
    let minors = principal_minors(k);
    let full = (1usize << n) - 1;
    let coeffs = (0..1usize << n)
        .map(|s| {
            let m = minors[full ^ s];
            if (n - (s.count_ones() as usize)) % 2 == 1 {
                -m
            } else {
                m
            }
        })
        .collect();
    MultiAffinePoly::new(n, coeffs).expect("table has 2^n entries")
}

pub fn is_symmetric(k: &DMatrix<f64>, tol: f64) -> bool {
    k.is_square() && (0..k.nrows()).all(|i| (0..i).all(|j| (k[(i, j)] - k[(j, i)]).abs() <= tol))
}

pub fn eigenvalues(k: &DMatrix<f64>) -> Vec<f64> {
    let mut ev: Vec<f64> = SymmetricEigen::new(k.clone()).eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    ev
}

/// Operator norm of a symmetric matrix (zero for the empty matrix).
pub fn op_norm(k: &DMatrix<f64>) -> f64 {
    if k.nrows() == 0 {
        return 0.0;
    }
    eigenvalues(k).iter().fold(0.0, |m, e| m.max(e.abs()))
}

/// Symmetric, positive semidefinite and with spectrum in `[0, 1]`, up to `tol`.
pub fn validate_psd_contraction(k: &DMatrix<f64>, tol: f64) -> Result<(), PolyError> {
    if !is_symmetric(k, 1e-12) {
        return Err(PolyError::PreconditionViolated("matrix is not symmetric".into()));
    }
    let ev = eigenvalues(k);
    if let Some(&lo) = ev.last() {
        if lo < -tol {
            return Err(PolyError::PreconditionViolated(format!("smallest eigenvalue {lo} < 0")));
        }
    }
    if let Some(&hi) = ev.first() {
        if hi > 1.0 + tol {
            return Err(PolyError::PreconditionViolated(format!("largest eigenvalue {hi} > 1")));
        }
    }
    Ok(())
}

/// Serializable square matrix in row-major form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub n: usize,
    pub rows: Vec<Vec<f64>>,
}

impl MatrixFile {
    pub fn from_matrix(k: &DMatrix<f64>) -> Self {
        Self {
            n: k.nrows(),
            rows: (0..k.nrows()).map(|i| k.row(i).iter().copied().collect()).collect(),
        }
    }

    pub fn to_matrix(&self) -> Result<DMatrix<f64>, PolyError> {
        if self.rows.len() != self.n || self.rows.iter().any(|r| r.len() != self.n) {
            return Err(PolyError::DimensionMismatch { expected: self.n, got: self.rows.len() });
        }
        let k = DMatrix::from_fn(self.n, self.n, |i, j| self.rows[i][j]);
        if !is_symmetric(&k, 1e-12) {
            return Err(PolyError::PreconditionViolated("matrix is not symmetric".into()));
        }
        Ok(k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn char_poly_examples() {
        let z = char_poly_matrix(&DMatrix::zeros(3, 3));
        assert_eq!(z, MultiAffinePoly::monomial(3, SubsetMask::full(3), 1.0));
        let i = char_poly_matrix(&DMatrix::identity(3, 3));
        let want = MultiAffinePoly::product_of_linear(&[(1.0, -1.0); 3]);
        assert!(i.coeffs().iter().zip(want.coeffs()).all(|(a, b)| (a - b).abs() < 1e-14));
        let p = char_poly_matrix(&DMatrix::from_element(2, 2, 0.5));
        let want = [0.0, -0.5, -0.5, 1.0];
        assert!(p.coeffs().iter().zip(want).all(|(a, b)| (a - b).abs() < 1e-15));
    }

    #[test]
    fn evaluates_to_determinant() {
        let k = DMatrix::from_row_slice(3, 3, &[0.5, 0.2, 0.1, 0.2, 0.4, 0.0, 0.1, 0.0, 0.3]);
        let z = [0.7, -1.1, 2.0];
        let direct = (DMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(&z)) - &k).determinant();
        assert!((char_poly_matrix(&k).eval(&z).unwrap() - direct).abs() < 1e-13);
    }

    proptest! {
        #[test]
        fn kernel_coefficients_are_signed_minors(entries in prop::collection::vec(-1.0f64..1.0, 36)) {
            let a = DMatrix::from_row_slice(6, 6, &entries);
            let k = &a * a.transpose();
            let g = char_poly_matrix(&k);
            for s in 0..64u32 {
                let a = SubsetMask(s);
                // Leibniz expansion as an independent determinant
                let sub = principal_submatrix(&k, a);
                let det = leibniz(&sub);
                let sign = if a.len() % 2 == 1 { -1.0 } else { 1.0 };
                prop_assert!((g.kernel_coeff(a) - sign * det).abs() < 1e-9 * (1.0 + det.abs()));
            }
        }
    }

    fn leibniz(m: &DMatrix<f64>) -> f64 {
        let n = m.nrows();
        if n == 0 {
            return 1.0;
        }
        (0..n)
            .map(|j| {
                let minor = m.clone().remove_row(0).remove_column(j);
                let s = if j % 2 == 1 { -1.0 } else { 1.0 };
                s * m[(0, j)] * leibniz(&minor)
            })
            .sum()
    }
}
