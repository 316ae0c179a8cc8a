use crate::multiaffine::MultiAffinePoly;
use crate::multidegree::MultiDegreePoly;
use crate::subset::{submasks, SubsetMask};
use crate::univariate::UniPoly;

use super::partition::{ordered_assignments, Partition};
use super::PavingError;

pub const ENUMERATION_BUDGET: usize = 1_000_000;

/// `diag(d^{[n] \ S} g)` for a single part `S`.
pub fn restricted_diagonal(g: &MultiAffinePoly, s: SubsetMask) -> UniPoly {
    let comp = s.complement(g.n()).bits();
    let mut c = vec![0.0; s.len() + 1];
    for t in submasks(s.bits()) {
        c[t.count_ones() as usize] += g.coeffs()[t | comp];
    }
    UniPoly::new(c)
}

/// `restricted_diagonal(g, S)` for every `S`, indexed by bitmask.
pub fn restricted_diagonal_table(g: &MultiAffinePoly) -> Vec<UniPoly> {
    (0..1u32 << g.n()).map(|s| restricted_diagonal(g, SubsetMask(s))).collect()
}

/// `g_S = prod_i diag(d^{S_i^c} g)`.
pub fn g_of_partition(g: &MultiAffinePoly, s: &Partition) -> UniPoly {
    s.parts().iter().map(|&p| restricted_diagonal(g, p)).product()
}

/// Sum of `g_S` over all ordered `r`-part partitions.
pub fn g_r_bruteforce(g: &MultiAffinePoly, r: usize) -> Result<UniPoly, PavingError> {
    let n = g.n();
    let count = (r as f64).powi(n as i32);
    if r == 0 || count > ENUMERATION_BUDGET as f64 {
        return Err(PavingError::BudgetExceeded { what: "ordered partitions", size: count, budget: ENUMERATION_BUDGET });
    }
    let table = restricted_diagonal_table(g);
    let mut acc = UniPoly::zero();
    for a in ordered_assignments(n, r) {
        let p = Partition::from_assignment(n, r, &a)?;
        let term: UniPoly = p.parts().iter().map(|s| table[s.bits()].clone()).product();
        acc = &acc + &term;
    }
    Ok(acc)
}

/// `((r-1)!)^{-n} diag(prod_i d_i^{r-1} g^r)`.
pub fn g_r_differential(g: &MultiAffinePoly, r: usize) -> Result<UniPoly, PavingError> {
    if r == 0 {
        return Err(PavingError::ParamOutOfRange("r must be positive".into()));
    }
    let mut p = MultiDegreePoly::from_multiaffine(g).power(r)?;
    for i in 0..g.n() {
        p = p.partial_var_k(i, r - 1);
    }
    let fact: f64 = (1..r).map(|k| k as f64).product();
    Ok(p.diagonalize().scale(fact.powi(-(g.n() as i32))))
}
