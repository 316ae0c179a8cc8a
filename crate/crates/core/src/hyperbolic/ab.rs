use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::paving::is_above_roots;
use crate::univariate::roots;
use crate::Polynomial;

use super::{cone_membership, HyperbolicError};

/// Points whose largest root along a ray is within this distance of zero are skipped
/// as numerically undecidable.
pub const DECISION_MARGIN: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct AbReport {
    pub tested: usize,
    pub passed: usize,
    pub skipped: usize,
}

impl AbReport {
    pub fn holds(&self) -> bool {
        self.tested == self.passed
    }
}

/// Largest root of `t -> p(x + t d)`, `-inf` for a nonzero constant section.
fn ray_maxroot<P: Polynomial>(p: &P, d: &[f64], x: &[f64]) -> Result<f64, HyperbolicError> {
    let sec = p.section(d, x)?;
    if sec.is_zero() {
        return Ok(f64::INFINITY);
    }
    Ok(roots(&sec)?.max().unwrap_or(f64::NEG_INFINITY))
}

/// A random point above the roots of `p`: a random base pushed up along `1`.
fn sample_above<P: Polynomial, R: Rng>(p: &P, rng: &mut R) -> Result<Vec<f64>, HyperbolicError> {
    let n = p.n();
    let base: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
    let m = ray_maxroot(p, &vec![1.0; n], &base)?;
    let lift = m.max(0.0) + rng.random_range(0.01..1.0);
    Ok(base.iter().map(|b| b + lift).collect())
}

/// If `u` is above the roots and `p(u - s v) != 0` for `s in [0, 1]` with `v >= 0`, then
/// `u - v` is above the roots.
pub fn ab_convexity_test<P: Polynomial>(p: &P, samples: usize, seed: u64) -> Result<AbReport, HyperbolicError> {
    let n = p.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = AbReport::default();
    for _ in 0..samples {
        let u = sample_above(p, &mut rng)?;
        let v: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..3.0)).collect();
        let neg_v: Vec<f64> = v.iter().map(|x| -x).collect();
        let sec = p.section(&neg_v, &u)?;
        if sec.is_zero() {
            rep.skipped += 1;
            continue;
        }
        let rv = roots(&sec)?;
        let hits = rv.iter().any(|&s| (-DECISION_MARGIN..=1.0 + DECISION_MARGIN).contains(&s));
        if hits {
            rep.skipped += 1;
            continue;
        }
        let w: Vec<f64> = u.iter().zip(&v).map(|(a, b)| a - b).collect();
        rep.tested += 1;
        if is_above_roots(p, &w)? {
            rep.passed += 1;
        }
    }
    Ok(rep)
}

/// A point of the closure of the region above the roots (read along `1`) where `p` does not
/// vanish lies above the roots, checked along random positive directions from the definition.
pub fn boundary_lemma_test<P: Polynomial>(p: &P, samples: usize, seed: u64) -> Result<AbReport, HyperbolicError> {
    let n = p.n();
    let ones = vec![1.0; n];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = AbReport::default();
    for _ in 0..samples {
        let y: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
        let m = ray_maxroot(p, &ones, &y)?;
        if !m.is_finite() {
            rep.skipped += 1;
            continue;
        }
        let eps = rng.random_range(1e-3..0.2);
        let x: Vec<f64> = y.iter().map(|v| v + m + rng.random_range(-eps..eps)).collect();
        let mx = ray_maxroot(p, &ones, &x)?;
        let pv = p.eval(&x)?.abs();
        if mx > 0.0 || mx.abs() < DECISION_MARGIN || pv < DECISION_MARGIN {
            rep.skipped += 1;
            continue;
        }
        rep.tested += 1;
        let mut ok = true;
        for _ in 0..8 {
            let d: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..2.0)).collect();
            if ray_maxroot(p, &d, &x)? >= 0.0 {
                ok = false;
                break;
            }
        }
        if ok {
            rep.passed += 1;
        }
    }
    Ok(rep)
}

/// Cone membership of random points agrees for pairs of random positive directions
/// (extended by `tail` zero coordinates, e.g. the homogenizing variable).
pub fn cone_direction_invariance<P: Polynomial>(p: &P, tail: usize, samples: usize, seed: u64) -> Result<AbReport, HyperbolicError> {
    let n = p.n();
    let head = n - tail;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = AbReport::default();
    let direction = |rng: &mut ChaCha8Rng| {
        let mut d: Vec<f64> = (0..head).map(|_| rng.random_range(0.05..2.0)).collect();
        d.resize(n, 0.0);
        d
    };
    for _ in 0..samples {
        let e1 = direction(&mut rng);
        let e2 = direction(&mut rng);
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..2.0)).collect();
        let m1 = ray_maxroot(p, &e1, &x)?;
        let m2 = ray_maxroot(p, &e2, &x)?;
        if m1.abs() < DECISION_MARGIN || m2.abs() < DECISION_MARGIN {
            rep.skipped += 1;
            continue;
        }
        rep.tested += 1;
        if cone_membership(p, &e1, &x)? == cone_membership(p, &e2, &x)? {
            rep.passed += 1;
        }
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyperbolic::homogenize_multiaffine;
    use crate::matrix::char_poly_matrix;
    use crate::multiaffine::MultiAffinePoly;
    use crate::process::generators::random_psd_contraction;
    use nalgebra::DMatrix;

    #[test]
    fn product_region_is_an_orthant_translate() {
        let a = [0.3, -0.2, 0.8];
        let p = MultiAffinePoly::product_of_linear(&a.map(|x| (1.0, -x)));
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let u: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..2.0)).collect();
            let want = u.iter().zip(&a).all(|(x, y)| x > y);
            assert_eq!(is_above_roots(&p, &u).unwrap(), want);
        }
        assert!(ab_convexity_test(&p, 200, 1).unwrap().holds());
        assert!(boundary_lemma_test(&p, 200, 2).unwrap().holds());
    }

    #[test]
    fn matrix_region_matches_cholesky() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 1..=5 {
            let k = random_psd_contraction(n, &mut rng);
            let g = char_poly_matrix(&k);
            for _ in 0..50 {
                let u: Vec<f64> = (0..n).map(|_| rng.random_range(-0.5..1.5)).collect();
                let m = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&u)) - &k;
                let min_ev = m.clone().symmetric_eigenvalues().min();
                if min_ev.abs() < 1e-6 {
                    continue;
                }
                assert_eq!(is_above_roots(&g, &u).unwrap(), m.cholesky().is_some());
            }
            assert!(ab_convexity_test(&g, 100, n as u64).unwrap().holds());
            assert!(boundary_lemma_test(&g, 100, n as u64).unwrap().holds());
            let h = homogenize_multiaffine(&g);
            assert!(cone_direction_invariance(&h, 1, 100, n as u64).unwrap().holds());
        }
    }
}
