use crate::multiaffine::MultiAffinePoly;
use crate::subset::{deposit, SubsetMask};

use super::partition::Partition;
use super::{min_max_partition, root_interval_violation, zero_diag_bound, PavingError, PavingMethod, PavingResult, HYPOTHESIS_TOL};

/// Conditions for the zero-diagonal paving: `a_{} = 1`, `a_{i} = 0` and the roots of the
/// diagonal in `[-lambda, lambda]`. Returns the violated ones.
pub fn zero_diag_hypotheses(g: &MultiAffinePoly, lambda: f64) -> Vec<String> {
    let mut bad = Vec::new();
    let top = g.top_coeff();
    if (top - 1.0).abs() > HYPOTHESIS_TOL {
        bad.push(format!("top coefficient is {top}, expected 1"));
    }
    for i in 0..g.n() {
        let a = g.kernel_coeff(SubsetMask::singleton(i));
        if a.abs() > HYPOTHESIS_TOL {
            bad.push(format!("a_{{{i}}} = {a} is not zero"));
        }
    }
    bad.extend(root_interval_violation(&g.diagonalize(), -lambda, lambda));
    bad
}

/// Paves `h` by pulling its roots from `[-lambda, lambda]` into `[0, 1]` via
/// `(2 lambda)^{-m} h(2 lambda z - lambda 1)` and searching all `r`-part partitions.
fn shifted_stage(h: &MultiAffinePoly, r: usize, lambda: f64) -> Result<Partition, PavingError> {
    let m = h.n();
    if m == 0 {
        return Partition::new(0, vec![SubsetMask::EMPTY; r]);
    }
    let f = h
        .affine_sub(&vec![2.0 * lambda; m], &vec![-lambda; m])?
        .scale((2.0 * lambda).powi(-(m as i32)));
    Ok(min_max_partition(&f, r)?.0)
}

/// Two rounds of `r`-part paving giving `r^2` parts whose restricted diagonals have all
/// roots in `[-c, c]`, `c = zero_diag_bound(r, lambda)`. The first round bounds the roots
/// from above; each part is then reflected and paved again to bound them from below.
/// Part `(i, j)` is stored at index `i r + j`.
pub fn two_stage_paving(g: &MultiAffinePoly, r: usize, lambda: f64) -> Result<PavingResult, PavingError> {
    let bound = zero_diag_bound(r, lambda)?;
    let bad = zero_diag_hypotheses(g, lambda);
    if !bad.is_empty() {
        return Err(PavingError::HypothesisViolated(bad));
    }
    let n = g.n();
    let outer = shifted_stage(g, r, lambda)?;
    let mut parts = Vec::with_capacity(r * r);
    for &s in outer.parts() {
        let fi = g.partial(s.complement(n)).compress(s).reflect();
        let inner = shifted_stage(&fi, r, lambda)?;
        parts.extend(inner.parts().iter().map(|t| SubsetMask(deposit(t.bits(), s.bits()) as u32)));
    }
    let partition = Partition::new(n, parts)?;
    PavingResult::new(g, partition, bound, PavingMethod::TwoStage)
}
