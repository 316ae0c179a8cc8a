use serde::{Deserialize, Serialize};

use crate::multiaffine::{MultiAffinePoly, MAX_VARS};
use crate::subset::SubsetMask;
use crate::univariate::{maxroot, UniPoly};

use super::partition::Partition;
use super::{kernel_hypotheses, lr_bound, PavingError, PavingMethod, PavingResult};

/// Node of the interlacing family at depth `k = assignment.len()`: points `0..k` are
/// placed in the given parts, the rest are summed over all placements. Computed from the
/// `r`-fold product `g(z_1) ... g(z_r)` by differentiating copy `j` in every assigned
/// variable outside part `j`, applying `sum_j prod_{l != j} d_{z_l, i}` to every
/// unassigned variable `i`, and diagonalizing.
pub fn node_polynomial(g: &MultiAffinePoly, assignment: &[usize], r: usize) -> Result<UniPoly, PavingError> {
    let n = g.n();
    if assignment.len() > n || assignment.iter().any(|&j| j >= r) {
        return Err(PavingError::InvalidPartition("assignment out of range".into()));
    }
    if r == 0 || r * n > MAX_VARS {
        return Err(PavingError::BudgetExceeded { what: "node polynomial variables", size: (r * n) as f64, budget: MAX_VARS });
    }
    let mut t = g.clone();
    for _ in 1..r {
        t = t.tensor(g)?;
    }
    let var = |copy: usize, i: usize| copy * n + i;
    let mut assigned = 0u32;
    for (i, &part) in assignment.iter().enumerate() {
        for copy in (0..r).filter(|&c| c != part) {
            assigned |= 1 << var(copy, i);
        }
    }
    t = t.partial(SubsetMask(assigned));
    for i in assignment.len()..n {
        let mut acc = MultiAffinePoly::zero(t.n());
        for part in 0..r {
            let others = SubsetMask::from_indices((0..r).filter(|&c| c != part).map(|c| var(c, i)));
            acc = acc.add(&t.partial(others))?;
        }
        t = acc;
    }
    Ok(t.diagonalize())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DescentStep {
    pub level: usize,
    pub parent_maxroot: f64,
    pub children_maxroot: Vec<f64>,
    /// Relative coefficient gap between the parent and the sum of its children.
    pub sum_gap: f64,
    pub chosen: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DescentOutcome {
    pub result: PavingResult,
    pub root_maxroot: f64,
    pub trace: Vec<DescentStep>,
}

/// Walks the interlacing family from the root to a leaf, always moving to a child whose
/// largest root does not exceed the current node's, preferring the smallest.
pub fn interlacing_descent(g: &MultiAffinePoly, r: usize, alpha: f64, tol: f64) -> Result<DescentOutcome, PavingError> {
    let bound = lr_bound(r, alpha)?;
    let bad = kernel_hypotheses(g, alpha);
    if !bad.is_empty() {
        return Err(PavingError::HypothesisViolated(bad));
    }
    let n = g.n();
    let mut assignment = Vec::with_capacity(n);
    let mut node = node_polynomial(g, &assignment, r)?;
    let root_maxroot = maxroot(&node)?;
    let mut current = root_maxroot;
    let mut trace = Vec::with_capacity(n);
    for level in 0..n {
        let children: Vec<UniPoly> = (0..r)
            .map(|j| {
                let mut a = assignment.clone();
                a.push(j);
                node_polynomial(g, &a, r)
            })
            .collect::<Result<_, _>>()?;
        let sum: UniPoly = children.iter().cloned().sum();
        let sum_gap = sum.rel_distance(&node);
        if sum_gap > 1e-9 {
            return Err(PavingError::TreeInconsistent { level, gap: sum_gap });
        }
        let roots: Vec<f64> = children.iter().map(maxroot).collect::<Result<_, _>>()?;
        let chosen = roots
            .iter()
            .enumerate()
            .filter(|(_, &m)| m <= current + tol)
            .min_by(|a, b| a.1.total_cmp(b.1))
            .map(|(j, _)| j)
            .ok_or_else(|| PavingError::DescentStuck { level, parent: current, children: roots.clone() })?;
        trace.push(DescentStep { level, parent_maxroot: current, children_maxroot: roots.clone(), sum_gap, chosen });
        assignment.push(chosen);
        current = roots[chosen];
        node = children.into_iter().nth(chosen).expect("chosen child exists");
    }
    let partition = Partition::from_assignment(n, r, &assignment)?;
    let result = PavingResult::new(g, partition, bound, PavingMethod::Descent)?;
    Ok(DescentOutcome { result, root_maxroot, trace })
}
