use serde::{Deserialize, Serialize};

use crate::paving::zero_diag_bound;
use crate::subset::SubsetMask;
use crate::univariate::{majorization_margin, majorizes};

use super::{PointProcess, ProcessError};

/// Slack used when checking entropy inequalities.
pub const ENTROPY_TOL: f64 = 1e-9;

fn plog(p: f64) -> f64 {
    if p <= 0.0 {
        0.0
    } else {
        -p * p.log2()
    }
}

/// Shannon entropy in bits.
pub fn entropy(x: &PointProcess) -> f64 {
    x.pmf().iter().map(|&p| plog(p)).sum()
}

/// `h(p) = -p log2 p - (1-p) log2 (1-p)`, with inputs clamped to `[0, 1]`.
pub fn binary_entropy(p: f64) -> f64 {
    let p = p.clamp(0.0, 1.0);
    plog(p) + plog(1.0 - p)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyBoundReport {
    pub entropy: f64,
    /// `sum_i h(lambda_i)` over the kernel spectrum.
    pub spectral_bound: f64,
    pub holds: bool,
}

/// `H(X) >= sum_i h(lambda_i)`.
pub fn entropy_lower_bound_check(x: &PointProcess) -> Result<EntropyBoundReport, ProcessError> {
    let h = entropy(x);
    let bound: f64 = x.spectrum()?.iter().map(|&l| binary_entropy(l)).sum();
    Ok(EntropyBoundReport { entropy: h, spectral_bound: bound, holds: h >= bound - ENTROPY_TOL })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuxEntropyReport {
    pub entropy: f64,
    /// `(1/2) sum_i h(p_i)`.
    pub half_marginal_sum: f64,
    pub marginal_bound_holds: bool,
    /// `var(X_i) + sum_{j != i} cov(X_i, X_j)` per point.
    pub covariance_sums: Vec<f64>,
    pub covariance_holds: bool,
}

pub fn aux_entropy_checks(x: &PointProcess) -> AuxEntropyReport {
    let n = x.n();
    let p = x.marginals();
    let h = entropy(x);
    let half: f64 = 0.5 * p.iter().map(|&q| binary_entropy(q)).sum::<f64>();
    let covariance_sums: Vec<f64> = (0..n)
        .map(|i| {
            let var = p[i] * (1.0 - p[i]);
            let cov: f64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| x.inclusion_prob(SubsetMask::from_indices([i, j])) - p[i] * p[j])
                .sum();
            var + cov
        })
        .collect();
    let covariance_holds = covariance_sums.iter().all(|&c| c >= -ENTROPY_TOL);
    AuxEntropyReport { entropy: h, half_marginal_sum: half, marginal_bound_holds: half <= h + ENTROPY_TOL, covariance_sums, covariance_holds }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MajorizationReport {
    pub majorizes: bool,
    pub margin: f64,
}

/// Whether the product law `lambda^A (1 - lambda)^{A^c}` majorizes the pmf of `X`.
pub fn majorization_conjecture_check(x: &PointProcess) -> Result<MajorizationReport, ProcessError> {
    let lambda: Vec<f64> = x.spectrum()?.iter().map(|l| l.clamp(0.0, 1.0)).collect();
    let indep: Vec<f64> = (0..1usize << x.n())
        .map(|a| lambda.iter().enumerate().map(|(i, &l)| if a >> i & 1 == 1 { l } else { 1.0 - l }).product())
        .collect();
    Ok(MajorizationReport {
        majorizes: majorizes(&indep, x.pmf(), ENTROPY_TOL)?,
        margin: majorization_margin(&indep, x.pmf(), ENTROPY_TOL)?,
    })
}

/// Largest `eps <= 1/2` with `h(eps) <= delta`.
pub fn epsilon_for_delta(delta: f64) -> Result<f64, ProcessError> {
    if delta.is_nan() || delta <= 0.0 {
        return Err(ProcessError::ParamOutOfRange(format!("delta = {delta} must be positive")));
    }
    if delta >= 1.0 {
        return Ok(0.5);
    }
    let (mut lo, mut hi) = (0.0f64, 0.5f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if binary_entropy(mid) <= delta {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * hi {
            break;
        }
    }
    Ok(lo)
}

/// Smallest `r >= 4` with `zero_diag_bound(r, 1) <= epsilon_for_delta(delta)`.
pub fn r_for_delta(delta: f64) -> Result<usize, ProcessError> {
    let eps = epsilon_for_delta(delta)?;
    let ok = |r: usize| zero_diag_bound(r, 1.0).map(|b| b <= eps);
    let mut hi = 4;
    while !ok(hi)? {
        hi *= 2;
        if hi > 1 << 40 {
            return Err(ProcessError::ParamOutOfRange(format!("no r for delta = {delta}")));
        }
    }
    let mut lo = hi / 2;
    if hi == 4 {
        return Ok(4);
    }
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if ok(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn entropy_values() {
        let n = 3;
        let uni = PointProcess::new(n, vec![1.0 / 8.0; 8]).unwrap();
        assert_abs_diff_eq!(entropy(&uni), 3.0, epsilon = 1e-15);
        let det = PointProcess::from_sets(2, &[(vec![1], 1.0)]).unwrap();
        assert_eq!(entropy(&det), 0.0);
        assert_eq!(binary_entropy(0.5), 1.0);
        assert_eq!(binary_entropy(0.0), 0.0);
    }

    #[test]
    fn projection_pair() {
        let x = PointProcess::from_sets(2, &[(vec![0], 0.5), (vec![1], 0.5)]).unwrap();
        let rep = entropy_lower_bound_check(&x).unwrap();
        assert_abs_diff_eq!(rep.entropy, 1.0, epsilon = 1e-15);
        assert!(rep.spectral_bound.abs() < 1e-9);
        let aux = aux_entropy_checks(&x);
        assert!(aux.covariance_sums.iter().all(|c| c.abs() < 1e-15));
        let m = majorization_conjecture_check(&x).unwrap();
        assert!(m.majorizes);
        assert!(m.margin.abs() < 1e-9);
    }

    #[test]
    fn independent_equality() {
        let p = [0.2, 0.5, 0.9];
        let pmf: Vec<f64> = (0..8usize)
            .map(|a| p.iter().enumerate().map(|(i, &q)| if a >> i & 1 == 1 { q } else { 1.0 - q }).product())
            .collect();
        let x = PointProcess::new(3, pmf).unwrap();
        let rep = entropy_lower_bound_check(&x).unwrap();
        assert_abs_diff_eq!(rep.entropy, rep.spectral_bound, epsilon = 1e-9);
        let m = majorization_conjecture_check(&x).unwrap();
        assert!(m.majorizes && m.margin.abs() < 1e-9);
    }

    #[test]
    fn epsilon_examples() {
        assert_eq!(epsilon_for_delta(1.0).unwrap(), 0.5);
        let d = binary_entropy(0.1);
        assert_abs_diff_eq!(epsilon_for_delta(d).unwrap(), 0.1, epsilon = 1e-12);
        let mut last = 0.5;
        for k in 1..50 {
            let e = epsilon_for_delta(1.0 / k as f64).unwrap();
            assert!(e <= last);
            last = e;
        }
        assert!(epsilon_for_delta(0.0).is_err());
    }

    #[test]
    fn r_for_delta_is_minimal() {
        for delta in [0.5, 0.25, 0.9] {
            let r = r_for_delta(delta).unwrap();
            let eps = epsilon_for_delta(delta).unwrap();
            assert!(zero_diag_bound(r, 1.0).unwrap() <= eps);
            assert!(r == 4 || zero_diag_bound(r - 1, 1.0).unwrap() > eps);
        }
    }

    #[test]
    fn entropy_modulus_on_grid() {
        // |h(x) - h(y)| <= h(|x - y|) whenever |x - y| <= 1/2
        let k = 200;
        for i in 0..=k {
            for j in 0..=k {
                let (x, y) = (i as f64 / k as f64, j as f64 / k as f64);
                if (x - y).abs() <= 0.5 {
                    assert!((binary_entropy(x) - binary_entropy(y)).abs() <= binary_entropy((x - y).abs()) + 1e-12);
                }
            }
        }
    }
}
