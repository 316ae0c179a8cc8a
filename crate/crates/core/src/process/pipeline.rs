use serde::{Deserialize, Serialize};

use crate::multiaffine::MultiAffinePoly;
use crate::paving::{root_interval_violation, two_stage_paving, PavingResult, HYPOTHESIS_TOL};
use crate::subset::SubsetMask;

use super::entropy::{binary_entropy, entropy};
use super::{PointProcess, ProcessError};

/// `xi(z) = g(z + p)` with `p` the marginals: top coefficient 1, vanishing linear kernel
/// coefficients and diagonal roots in `[-1, 1]`.
pub fn centered_kernel(x: &PointProcess) -> Result<MultiAffinePoly, ProcessError> {
    let xi = x.kernel_poly().shift(&x.marginals())?;
    let top = xi.top_coeff();
    if (top - 1.0).abs() > HYPOTHESIS_TOL {
        return Err(ProcessError::CenteringFailed(format!("top coefficient is {top}")));
    }
    for i in 0..x.n() {
        let a = xi.kernel_coeff(SubsetMask::singleton(i));
        if a.abs() > HYPOTHESIS_TOL {
            return Err(ProcessError::CenteringFailed(format!("linear coefficient {i} is {a}")));
        }
    }
    if let Some(msg) = root_interval_violation(&xi.diagonalize(), -1.0, 1.0) {
        return Err(ProcessError::CenteringFailed(msg));
    }
    Ok(xi)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SrPavingReport {
    pub result: PavingResult,
    /// Largest absolute diagonal root of the centered kernel of each part; `None` when empty.
    pub per_part_rootnorm: Vec<Option<f64>>,
    /// `|H(X cap S)/|S| - sum_{j in S} h(p_j)/|S||` per part, 0 for empty parts.
    pub entropy_gaps: Vec<f64>,
}

impl SrPavingReport {
    pub fn max_gap(&self) -> f64 {
        self.entropy_gaps.iter().copied().fold(0.0, f64::max)
    }

    pub fn max_rootnorm(&self) -> f64 {
        self.per_part_rootnorm.iter().flatten().copied().fold(0.0, f64::max)
    }
}

/// Two-stage paving of the centered kernel with `lambda = 1`, and the entropy gap of
/// every part of the resulting partition of the ground set.
pub fn sr_paving(x: &PointProcess, r: usize) -> Result<SrPavingReport, ProcessError> {
    let xi = centered_kernel(x)?;
    let result = two_stage_paving(&xi, r, 1.0)?;
    let p = x.marginals();
    let entropy_gaps = result
        .partition
        .parts()
        .iter()
        .map(|&s| {
            if s.is_empty() {
                return 0.0;
            }
            let m = s.len() as f64;
            let h = entropy(&x.restrict(s)) / m;
            let hp: f64 = s.iter().map(|j| binary_entropy(p[j])).sum::<f64>() / m;
            (h - hp).abs()
        })
        .collect();
    let per_part_rootnorm = result.per_part_max_abs_root();
    Ok(SrPavingReport { result, per_part_rootnorm, entropy_gaps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::paving::zero_diag_bound;
    use crate::process::generators::independent;

    #[test]
    fn independent_centers_to_monomial() {
        let x = independent(&[0.2, 0.6, 0.9]).unwrap();
        let xi = centered_kernel(&x).unwrap();
        let mono = MultiAffinePoly::monomial(3, SubsetMask::full(3), 1.0);
        assert!(xi.coeffs().iter().zip(mono.coeffs()).all(|(a, b)| (a - b).abs() < 1e-15));
        let rep = sr_paving(&x, 4).unwrap();
        assert!(rep.max_gap() < 1e-12);
    }

    #[test]
    fn projection_pair() {
        let x = PointProcess::from_sets(2, &[(vec![0], 0.5), (vec![1], 0.5)]).unwrap();
        let xi = centered_kernel(&x).unwrap();
        // g = z1 z2 - (z1 + z2)/2 shifted by (1/2, 1/2)
        let want = MultiAffinePoly::new(2, vec![-0.25, 0.0, 0.0, 1.0]).unwrap();
        assert!(xi.coeffs().iter().zip(want.coeffs()).all(|(a, b)| (a - b).abs() < 1e-15));
        let rep = sr_paving(&x, 4).unwrap();
        assert!(rep.result.certified);
        assert_eq!(rep.result.partition.to_index_lists(), vec![vec![0], vec![1]]);
        assert!(rep.max_gap() < 1e-15);
        assert!(rep.max_rootnorm() <= zero_diag_bound(4, 1.0).unwrap());
    }

    #[test]
    fn part_rootnorms_match_restricted_centered_kernels() {
        let k = nalgebra::DMatrix::from_row_slice(3, 3, &[0.5, 0.2, 0.1, 0.2, 0.4, -0.1, 0.1, -0.1, 0.6]);
        let x = crate::process::determinantal_process(&k).unwrap();
        let rep = sr_paving(&x, 4).unwrap();
        for (&s, norm) in rep.result.partition.parts().iter().zip(&rep.per_part_rootnorm) {
            if s.is_empty() {
                continue;
            }
            let xi = centered_kernel(&x.restrict(s)).unwrap().diagonalize();
            let rv = crate::univariate::roots(&xi).unwrap();
            let m = rv.max_abs().unwrap_or(0.0);
            assert!((m - norm.unwrap_or(0.0)).abs() < 1e-9);
        }
    }
}
