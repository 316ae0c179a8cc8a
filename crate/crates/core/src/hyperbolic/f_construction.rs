use serde::{Deserialize, Serialize};

use crate::multiaffine::MultiAffinePoly;
use crate::multidegree::MultiDegreePoly;
use crate::process::{centered_kernel, PointProcess};
use crate::subset::{submasks, SubsetMask};
use crate::univariate::{majorization_margin, roots, RootVector};

use super::{lambda_at, HomogeneousPoly, HyperbolicError, MAJORIZATION_TOL};

/// Largest allowed gap between a specialization of `F` and its target root vector.
pub const SPECIALIZATION_TOL: f64 = 1e-8;

/// `F(z, u, w) = sum_A (sum_{B in A} b_B w^{|B|} u^{A \ B}) z^{A^c}` with
/// `b_B = [z^{B^c}] xi`, in variables `z_0..z_{n-1}, u_0..u_{n-1}, w`.
pub fn f_construction(xi: &MultiAffinePoly) -> Result<HomogeneousPoly, HyperbolicError> {
    let n = xi.n();
    let mut caps = vec![1; 2 * n];
    caps.push(n);
    let mut f = MultiDegreePoly::zero(caps)?;
    let full = SubsetMask::full(n);
    let mut terms = Vec::new();
    for a in 0..1usize << n {
        let ac = full.bits() ^ a;
        for b in submasks(a) {
            let c = xi.kernel_coeff(SubsetMask(b as u32));
            if c == 0.0 {
                continue;
            }
            let mut e = vec![0; 2 * n + 1];
            for i in 0..n {
                e[i] = ac >> i & 1;
                e[n + i] = (a & !b) >> i & 1;
            }
            e[2 * n] = b.count_ones() as usize;
            terms.push((e, c));
        }
    }
    f = f.add(&MultiDegreePoly::from_terms(f.caps().to_vec(), &terms)?)?;
    HomogeneousPoly::new(f, n)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FCheckReport {
    /// Roots of the diagonal of the kernel polynomial.
    pub lambda_g: Vec<f64>,
    /// Roots of the diagonal of the centered kernel.
    pub lambda_xi: Vec<f64>,
    /// Marginals sorted non-increasingly.
    pub p_sorted: Vec<f64>,
    pub max_specialization_gap: f64,
    pub majorization_margin: f64,
    pub majorizes: bool,
}

fn gap(a: &RootVector, b: &RootVector) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter().zip(b.iter()).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

/// Evaluates the three specializations of `F` along `e = (1, 0, 0)` against the root
/// vectors they should reproduce, then checks `lambda(g)` is majorized by `lambda(xi) + p`.
pub fn f_specialization_check(x: &PointProcess) -> Result<FCheckReport, HyperbolicError> {
    let n = x.n();
    let xi = centered_kernel(x)?;
    let f = f_construction(&xi)?;
    let p = x.marginals();
    let mut e = vec![0.0; 2 * n + 1];
    e[..n].fill(1.0);
    let point = |u: &[f64], w: f64| {
        let mut a = vec![0.0; 2 * n + 1];
        a[n..2 * n].copy_from_slice(u);
        a[2 * n] = w;
        a
    };
    let neg_p: Vec<f64> = p.iter().map(|v| -v).collect();
    let zeros = vec![0.0; n];

    let lambda_g = roots(&x.kernel_poly().diagonalize())?;
    let lambda_xi = roots(&xi.diagonalize())?;
    let p_sorted = RootVector::from_unsorted(p.clone());

    let checks = [
        ("(0, -p, 1)", lambda_at(&f, &e, &point(&neg_p, 1.0))?, &lambda_g),
        ("(0, 0, 1)", lambda_at(&f, &e, &point(&zeros, 1.0))?, &lambda_xi),
        ("(0, -p, 0)", lambda_at(&f, &e, &point(&neg_p, 0.0))?, &p_sorted),
    ];
    let mut worst = 0.0f64;
    for (which, got, want) in &checks {
        let g = gap(got, want);
        if g.is_nan() || g > SPECIALIZATION_TOL {
            return Err(HyperbolicError::SpecializationMismatch { which, gap: g });
        }
        worst = worst.max(g);
    }
    let sum = &lambda_xi + &p_sorted;
    let margin = majorization_margin(sum.as_slice(), lambda_g.as_slice(), MAJORIZATION_TOL)?;
    Ok(FCheckReport {
        lambda_g: lambda_g.into_vec(),
        lambda_xi: lambda_xi.into_vec(),
        p_sorted: p_sorted.into_vec(),
        max_specialization_gap: worst,
        majorization_margin: margin,
        majorizes: margin >= -MAJORIZATION_TOL,
    })
}
