//! Homogenization, hyperbolicity probing, hyperbolic root vectors and cone membership.

pub mod ab;
pub mod f_construction;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::multiaffine::MultiAffinePoly;
use crate::multidegree::MultiDegreePoly;
use crate::paving::PavingError;
use crate::process::ProcessError;
use crate::stability::Verdict;
use crate::univariate::{is_real_rooted, majorizes, roots, RootError, RootVector, UniPoly};
use crate::{PolyError, Polynomial};

pub use ab::{ab_convexity_test, boundary_lemma_test, cone_direction_invariance, AbReport};
pub use f_construction::{f_construction, f_specialization_check, FCheckReport};

/// Tolerance for majorization comparisons of hyperbolic root vectors.
pub const MAJORIZATION_TOL: f64 = 1e-8;
/// Strictness margin for cone membership.
pub const CONE_MARGIN: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HyperbolicError {
    #[error("term of degree {found} in a polynomial declared homogeneous of degree {degree}")]
    NotHomogeneous { degree: usize, found: usize },
    #[error("polynomial vanishes at the direction")]
    ZeroAtDirection,
    #[error("specialization {which} differs from its target by {gap:e}")]
    SpecializationMismatch { which: &'static str, gap: f64 },
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Root(#[from] RootError),
    #[error(transparent)]
    Paving(#[from] PavingError),
    #[error(transparent)]
    Process(#[from] ProcessError),
}

/// Homogeneous polynomial of a fixed degree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HomogeneousPoly {
    p: MultiDegreePoly,
    degree: usize,
}

impl HomogeneousPoly {
    pub fn new(p: MultiDegreePoly, degree: usize) -> Result<Self, HyperbolicError> {
        for (idx, &c) in p.coeffs().iter().enumerate() {
            let found: usize = p.exponents(idx).iter().sum();
            if c != 0.0 && found != degree {
                return Err(HyperbolicError::NotHomogeneous { degree, found });
            }
        }
        Ok(Self { p, degree })
    }

    pub fn poly(&self) -> &MultiDegreePoly {
        &self.p
    }

    pub fn degree(&self) -> usize {
        self.degree
    }
}

impl Polynomial for HomogeneousPoly {
    fn n(&self) -> usize {
        self.p.n()
    }

    fn eval(&self, z: &[f64]) -> Result<f64, PolyError> {
        self.p.eval(z)
    }

    fn section(&self, v: &[f64], alpha: &[f64]) -> Result<UniPoly, PolyError> {
        self.p.section(v, alpha)
    }

    fn partial_var(&self, i: usize) -> Self {
        Self { p: self.p.partial_var(i), degree: self.degree.saturating_sub(1) }
    }
}

/// `p_H(z, w) = w^d p(z / w)` with `d` the total degree; `w` is the last variable.
pub fn homogenize(p: &MultiDegreePoly) -> HomogeneousPoly {
    let d = p.total_degree();
    let mut caps = p.caps().to_vec();
    caps.push(d);
    let terms: Vec<(Vec<usize>, f64)> = p
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, &c)| c != 0.0)
        .map(|(idx, &c)| {
            let mut e = p.exponents(idx);
            let k: usize = e.iter().sum();
            e.push(d - k);
            (e, c)
        })
        .collect();
    let h = MultiDegreePoly::from_terms(caps, &terms).expect("exponents lie within the caps");
    HomogeneousPoly { p: h, degree: d }
}

pub fn homogenize_multiaffine(p: &MultiAffinePoly) -> HomogeneousPoly {
    homogenize(&MultiDegreePoly::from_multiaffine(p))
}

/// `p_H(z, 1)`.
pub fn dehomogenize(h: &HomogeneousPoly) -> MultiDegreePoly {
    let m = h.p.n() - 1;
    let caps = h.p.caps()[..m].to_vec();
    let terms: Vec<(Vec<usize>, f64)> = h
        .p
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, &c)| c != 0.0)
        .map(|(idx, &c)| {
            let mut e = h.p.exponents(idx);
            e.pop();
            (e, c)
        })
        .collect();
    MultiDegreePoly::from_terms(caps, &terms).expect("exponents lie within the caps")
}

/// Searches for a base point `alpha` with `t -> p(t e + alpha)` not real-rooted. A
/// non-positive `p(e)` is reported as a counterexample at `alpha = 0`.
pub fn hyperbolicity_probe<P: Polynomial>(p: &P, e: &[f64], trials: usize, seed: u64) -> Result<Verdict, HyperbolicError> {
    let n = p.n();
    let pe = p.eval(e)?;
    if pe.is_nan() || pe <= 0.0 {
        return Ok(Verdict::CounterexampleRay { v: e.to_vec(), alpha: vec![0.0; n] });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let alpha: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
        if !is_real_rooted(&p.section(e, &alpha)?) {
            return Ok(Verdict::CounterexampleRay { v: e.to_vec(), alpha });
        }
    }
    Ok(Verdict::NotFalsified)
}

/// Roots of `t -> p(t e + alpha)`, non-increasing.
pub fn lambda_at<P: Polynomial>(p: &P, e: &[f64], alpha: &[f64]) -> Result<RootVector, HyperbolicError> {
    let sec = p.section(e, alpha)?;
    if sec.is_zero() {
        return Err(HyperbolicError::ZeroAtDirection);
    }
    Ok(roots(&sec)?)
}

/// `x` lies in the open hyperbolicity cone: `t -> p(x + t e)` has no root `t >= 0`.
pub fn cone_membership<P: Polynomial>(p: &P, e: &[f64], x: &[f64]) -> Result<bool, HyperbolicError> {
    let sec = p.section(e, x)?;
    if sec.is_zero() {
        return Ok(false);
    }
    Ok(roots(&sec)?.max().is_none_or(|m| m < -CONE_MARGIN))
}

/// `lambda_{v+u}(p)` is majorized by `lambda_v(p) + lambda_u(p)`.
pub fn hyperbolic_majorization_check<P: Polynomial>(p: &P, e: &[f64], v: &[f64], u: &[f64]) -> Result<bool, HyperbolicError> {
    let lv = lambda_at(p, e, v)?;
    let lu = lambda_at(p, e, u)?;
    let vu: Vec<f64> = v.iter().zip(u).map(|(a, b)| a + b).collect();
    let lvu = lambda_at(p, e, &vu)?;
    if lv.len() != lu.len() || lv.len() != lvu.len() {
        return Err(RootError::LengthMismatch { left: lv.len(), right: lvu.len() }.into());
    }
    let scale = 1.0 + lv.max_abs().unwrap_or(0.0) + lu.max_abs().unwrap_or(0.0);
    Ok(majorizes((&lv + &lu).as_slice(), lvu.as_slice(), MAJORIZATION_TOL * scale)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::char_poly_matrix;
    use crate::process::generators::random_psd_contraction;
    use crate::subset::SubsetMask;
    use proptest::prelude::*;
    use rand::Rng;

    #[test]
    fn homogenize_examples() {
        let p = MultiAffinePoly::new(1, vec![-0.3, 1.0]).unwrap();
        let h = homogenize_multiaffine(&p);
        assert_eq!(h.degree(), 1);
        assert_eq!(h.poly().coeff(&[1, 0]), 1.0);
        assert_eq!(h.poly().coeff(&[0, 1]), -0.3);
        let q = MultiAffinePoly::new(2, vec![-1.0, 0.0, 0.0, 1.0]).unwrap();
        let hq = homogenize_multiaffine(&q);
        assert_eq!(hq.poly().coeff(&[0, 0, 2]), -1.0);
        assert_eq!(hq.poly().coeff(&[1, 1, 0]), 1.0);
        assert_eq!(dehomogenize(&hq), MultiDegreePoly::from_multiaffine(&q));
        assert!(HomogeneousPoly::new(MultiDegreePoly::from_multiaffine(&q), 2).is_err());
    }

    #[test]
    fn probe_examples() {
        let prod = HomogeneousPoly::new(MultiDegreePoly::from_multiaffine(&MultiAffinePoly::monomial(3, SubsetMask::full(3), 1.0)), 3).unwrap();
        assert!(!hyperbolicity_probe(&prod, &[1.0; 3], 200, 1).unwrap().is_falsified());
        let sq = HomogeneousPoly::new(MultiDegreePoly::from_terms(vec![2, 2], &[(vec![2, 0], 1.0), (vec![0, 2], 1.0)]).unwrap(), 2).unwrap();
        for e in [[1.0, 0.0], [0.3, 0.7], [1.0, -2.0]] {
            assert!(hyperbolicity_probe(&sq, &e, 200, 2).unwrap().is_falsified());
        }
    }

    #[test]
    fn lambda_examples() {
        let prod = MultiDegreePoly::from_multiaffine(&MultiAffinePoly::monomial(3, SubsetMask::full(3), 1.0));
        assert_eq!(lambda_at(&prod, &[1.0; 3], &[0.0; 3]).unwrap().as_slice(), &[0.0; 3]);
        // t -> prod (t + v_i) vanishes at -v
        let l = lambda_at(&prod, &[1.0; 3], &[0.2, -0.5, 0.9]).unwrap();
        assert!(l.iter().zip([0.5, -0.2, -0.9]).all(|(a, b)| (a - b).abs() < 1e-12));
    }

    #[test]
    fn cone_examples() {
        let prod = MultiDegreePoly::from_multiaffine(&MultiAffinePoly::monomial(2, SubsetMask::full(2), 1.0));
        let e = [1.0, 1.0];
        assert!(cone_membership(&prod, &e, &e).unwrap());
        assert!(!cone_membership(&prod, &e, &[0.0, 1.0]).unwrap());
        assert!(!cone_membership(&prod, &e, &[-0.1, 1.0]).unwrap());
    }

    #[test]
    fn product_majorization_is_classical() {
        let prod = MultiDegreePoly::from_multiaffine(&MultiAffinePoly::monomial(3, SubsetMask::full(3), 1.0));
        let v = [0.4, -1.0, 0.3];
        let u = [-0.2, 0.9, 0.5];
        assert!(hyperbolic_majorization_check(&prod, &[1.0; 3], &v, &u).unwrap());
        assert!(hyperbolic_majorization_check(&prod, &[1.0; 3], &[0.0; 3], &u).unwrap());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn dehomogenize_inverts(n in 1usize..=4, c in prop::collection::vec(-2.0f64..2.0, 16)) {
            let p = MultiDegreePoly::from_multiaffine(&MultiAffinePoly::new(n, c[..1 << n].to_vec()).unwrap());
            prop_assert_eq!(dehomogenize(&homogenize(&p)), p);
        }

        #[test]
        fn homogenized_kernels_are_hyperbolic(seed in 0u64..1000, n in 1usize..=4) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = char_poly_matrix(&random_psd_contraction(n, &mut rng));
            let h = homogenize_multiaffine(&g);
            let mut e = vec![1.0; n];
            e.push(0.0);
            prop_assert!(!hyperbolicity_probe(&h, &e, 50, seed).unwrap().is_falsified());
            let z: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
            let mut zw = z.clone();
            zw.push(1.0);
            prop_assert!((h.eval(&zw).unwrap() - g.eval(&z).unwrap()).abs() < 1e-12);
        }

        #[test]
        fn majorization_on_kernels(seed in 0u64..1000, n in 1usize..=4) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = MultiDegreePoly::from_multiaffine(&char_poly_matrix(&random_psd_contraction(n, &mut rng)));
            let e: Vec<f64> = (0..n).map(|_| rng.random_range(0.2..2.0)).collect();
            let v: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
            let u: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
            let h = homogenize(&g);
            let mut eh = e.clone();
            eh.push(0.0);
            let mut vh = v.clone();
            vh.push(rng.random_range(-1.0..1.0));
            let mut uh = u.clone();
            uh.push(rng.random_range(-1.0..1.0));
            prop_assert!(hyperbolic_majorization_check(&h, &eh, &vh, &uh).unwrap());
        }
    }
}
