//! Strongly Rayleigh processes built from closure-safe operations.

use nalgebra::{DMatrix, DVector};
use petgraph::unionfind::UnionFind;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::subset::SubsetMask;

use super::determinantal::determinantal_process;
use super::{PointProcess, ProcessError};

/// Independent Bernoulli points with marginals `p`.
pub fn independent(p: &[f64]) -> Result<PointProcess, ProcessError> {
    if let Some(q) = p.iter().find(|q| !(0.0..=1.0).contains(*q)) {
        return Err(ProcessError::InvalidPmf(format!("marginal {q} not in [0, 1]")));
    }
    let pmf = (0..1usize << p.len())
        .map(|a| p.iter().enumerate().map(|(i, &q)| if a >> i & 1 == 1 { q } else { 1.0 - q }).product())
        .collect();
    PointProcess::new(p.len(), pmf)
}

/// Alias of [`determinantal_process`].
pub fn determinantal(k: &DMatrix<f64>) -> Result<PointProcess, ProcessError> {
    determinantal_process(k)
}

/// `P(A) proportional to w^A P(X = A)` for positive weights `w`.
pub fn external_field(x: &PointProcess, w: &[f64]) -> Result<PointProcess, ProcessError> {
    if w.len() != x.n() {
        return Err(ProcessError::InvalidWeights(format!("expected {} weights, got {}", x.n(), w.len())));
    }
    if let Some(v) = w.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
        return Err(ProcessError::InvalidWeights(format!("weight {v} is not positive")));
    }
    let tilted: Vec<f64> = x
        .pmf()
        .iter()
        .enumerate()
        .map(|(a, &p)| p * SubsetMask(a as u32).iter().map(|i| w[i]).product::<f64>())
        .collect();
    let z: f64 = tilted.iter().sum();
    PointProcess::new(x.n(), tilted.into_iter().map(|p| p / z).collect())
}

/// `X intersected with S`, relabelled.
pub fn project(x: &PointProcess, s: SubsetMask) -> PointProcess {
    x.restrict(s)
}

/// Conditions on each `(point, present)` in turn; indices refer to the current process.
pub fn condition_chain(x: &PointProcess, steps: &[(usize, bool)]) -> Result<PointProcess, ProcessError> {
    steps.iter().try_fold(x.clone(), |acc, &(i, present)| acc.condition(i, present))
}

/// Edge sets of uniformly random spanning trees of the graph on `vertices` vertices.
pub fn ust_edges(vertices: usize, edges: &[(usize, usize)]) -> Result<PointProcess, ProcessError> {
    let m = edges.len();
    if let Some(&(a, b)) = edges.iter().find(|&&(a, b)| a >= vertices || b >= vertices) {
        return Err(ProcessError::InvalidPmf(format!("edge ({a}, {b}) out of range")));
    }
    if m > crate::multiaffine::MAX_VARS {
        return Err(ProcessError::InvalidPmf(format!("{m} edges exceed the maximum")));
    }
    let need = vertices.saturating_sub(1);
    let trees: Vec<usize> = (0..1usize << m)
        .filter(|s| s.count_ones() as usize == need)
        .filter(|&s| {
            let mut uf = UnionFind::<usize>::new(vertices);
            SubsetMask(s as u32).iter().all(|e| uf.union(edges[e].0, edges[e].1))
        })
        .collect();
    if trees.is_empty() {
        return Err(ProcessError::InvalidPmf("graph has no spanning tree".into()));
    }
    let mut pmf = vec![0.0; 1 << m];
    let w = 1.0 / trees.len() as f64;
    for t in trees {
        pmf[t] = w;
    }
    PointProcess::new(m, pmf)
}

fn random_orthogonal<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    g.qr().q()
}

/// `Q diag(lambda) Q^T` with Haar-like `Q` and eigenvalues uniform on `[0, 1]`.
pub fn random_psd_contraction<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DMatrix<f64> {
    let lambda: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
    kernel_with_spectrum(&lambda, rng)
}

/// `Q diag(lambda) Q^T` for a random orthogonal `Q`, symmetrized.
pub fn kernel_with_spectrum<R: Rng + ?Sized>(lambda: &[f64], rng: &mut R) -> DMatrix<f64> {
    let n = lambda.len();
    let q = random_orthogonal(n, rng);
    let k = &q * DMatrix::from_diagonal(&DVector::from_column_slice(lambda)) * q.transpose();
    (&k + k.transpose()) * 0.5
}

/// Random orthogonal projection of rank `rank`.
pub fn random_projection<R: Rng + ?Sized>(n: usize, rank: usize, rng: &mut R) -> DMatrix<f64> {
    let lambda: Vec<f64> = (0..n).map(|i| if i < rank { 1.0 } else { 0.0 }).collect();
    kernel_with_spectrum(&lambda, rng)
}

/// Random PSD contraction with every diagonal entry at most `alpha`, obtained by scaling.
pub fn random_contraction_with_diag<R: Rng + ?Sized>(n: usize, alpha: f64, rng: &mut R) -> DMatrix<f64> {
    let k = random_psd_contraction(n, rng);
    let d = (0..n).map(|i| k[(i, i)]).fold(0.0, f64::max);
    if d <= alpha {
        k
    } else {
        k * (alpha / d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{eigenvalues, is_symmetric};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn triangle_spanning_trees() {
        let x = ust_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let s = x.support();
        assert_eq!(s.len(), 3);
        assert!(s.iter().all(|(set, p)| set.len() == 2 && (p - 1.0 / 3.0).abs() < 1e-15));
        assert_eq!(x.size_distribution(), vec![0.0, 0.0, 1.0, 0.0]);
        assert!(ust_edges(3, &[(0, 1)]).is_err());
    }

    #[test]
    fn external_field_identity_and_errors() {
        let x = independent(&[0.3, 0.6]).unwrap();
        let y = external_field(&x, &[1.0, 1.0]).unwrap();
        assert!(x.pmf().iter().zip(y.pmf()).all(|(a, b)| (a - b).abs() < 1e-15));
        assert!(matches!(external_field(&x, &[1.0, 0.0]), Err(ProcessError::InvalidWeights(_))));
        let z = external_field(&x, &[3.0, 1.0]).unwrap();
        let odds = 3.0 * 0.3 / 0.7;
        assert!((z.marginals()[0] - odds / (1.0 + odds)).abs() < 1e-14);
    }

    #[test]
    fn projection_of_independent() {
        let x = independent(&[0.1, 0.5, 0.8]).unwrap();
        let y = project(&x, SubsetMask::from_indices([0, 2]));
        let want = independent(&[0.1, 0.8]).unwrap();
        assert!(y.pmf().iter().zip(want.pmf()).all(|(a, b)| (a - b).abs() < 1e-15));
        let c = condition_chain(&x, &[(1, true), (0, false)]).unwrap();
        assert!((c.marginals()[0] - 0.8).abs() < 1e-15);
    }

    #[test]
    fn random_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 1..6 {
            let k = random_psd_contraction(n, &mut rng);
            assert!(is_symmetric(&k, 1e-14));
            let ev = eigenvalues(&k);
            assert!(ev[0] <= 1.0 + 1e-12 && ev[n - 1] >= -1e-12);
            let p = random_projection(n, 1, &mut rng);
            assert!((p.trace() - 1.0).abs() < 1e-12);
            let c = random_contraction_with_diag(n, 0.2, &mut rng);
            assert!((0..n).all(|i| c[(i, i)] <= 0.2 + 1e-15));
        }
    }
}
