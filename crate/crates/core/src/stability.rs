use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::multiaffine::MultiAffinePoly;
use crate::univariate::is_real_rooted;
use crate::{PolyError, Polynomial};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Verdict {
    NotFalsified,
    /// `t -> p(t v + alpha)` has a non-real root.
    CounterexampleRay { v: Vec<f64>, alpha: Vec<f64> },
}

impl Verdict {
    pub fn is_falsified(&self) -> bool {
        matches!(self, Verdict::CounterexampleRay { .. })
    }
}

/// Searches for a positive direction `v` and base point `alpha` along which `p` is not
/// real-rooted. The first trial is the diagonal `v = 1, alpha = 0`.
pub fn stability_falsifier<P: Polynomial>(p: &P, trials: usize, seed: u64) -> Result<Verdict, PolyError> {
    let n = p.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for k in 0..trials {
        let (v, alpha) = if k == 0 {
            (vec![1.0; n], vec![0.0; n])
        } else {
            let v: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..2.0)).collect();
            let a: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
            (v, a)
        };
        if !is_real_rooted(&p.section(&v, &alpha)?) {
            return Ok(Verdict::CounterexampleRay { v, alpha });
        }
    }
    Ok(Verdict::NotFalsified)
}

/// A bivariate multi-affine polynomial `a00 + a10 z1 + a01 z2 + a11 z1 z2` is real stable
/// iff `a11 a00 - a10 a01 <= 0`.
pub fn bivariate_stability_exact(p: &MultiAffinePoly) -> Result<bool, PolyError> {
    if p.n() != 2 {
        return Err(PolyError::WrongArity { expected: 2, got: p.n() });
    }
    let c = p.coeffs();
    Ok(c[3] * c[0] - c[1] * c[2] <= 0.0)
}
