use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::multiaffine::MultiAffinePoly;
use crate::multidegree::MultiDegreePoly;
use crate::univariate::roots;
use crate::Polynomial;

use super::{kernel_hypotheses, lr_bound, PavingError};

/// Strictness margin for the largest root of `t -> p(u + t 1)`.
pub const ABOVE_ROOTS_MARGIN: f64 = 1e-10;
/// Relative slack allowed when checking that a barrier value did not increase.
pub const MONOTONE_TOL: f64 = 1e-9;

/// `u` lies above the roots of `p`: `t -> p(u + t 1)` has no root `t >= 0`.
pub fn is_above_roots<P: Polynomial>(p: &P, u: &[f64]) -> Result<bool, PavingError> {
    let sec = p.section(&vec![1.0; p.n()], u)?;
    if sec.is_zero() {
        return Ok(false);
    }
    Ok(match roots(&sec)?.max() {
        None => true,
        Some(m) => m < -ABOVE_ROOTS_MARGIN,
    })
}

/// `d_i p(u) / p(u)`.
pub fn barrier_phi<P: Polynomial>(p: &P, i: usize, u: &[f64]) -> Result<f64, PavingError> {
    let pu = p.eval(u)?;
    if pu == 0.0 || !pu.is_finite() {
        return Err(PavingError::PoleAtPoint);
    }
    Ok(p.partial_var(i).eval(u)? / pu)
}

fn all_phis<P: Polynomial>(p: &P, u: &[f64]) -> Result<Vec<f64>, PavingError> {
    (0..p.n()).map(|i| barrier_phi(p, i, u)).collect()
}

/// How the smallest root `lambda_r` of the section in the step direction enters the step size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LambdaMode {
    /// `lambda_r = 0`, valid for powers of kernels whose diagonal roots are non-negative.
    Zero,
    /// Smallest root of `t -> p(u_1, .., t, .., u_n)` computed directly.
    Exact,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BarrierState {
    pub p: MultiDegreePoly,
    pub u: Vec<f64>,
    /// `(direction, delta)` per completed step.
    pub history: Vec<(usize, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub direction: usize,
    pub delta: f64,
    pub phi_before: Vec<f64>,
    pub phi_after: Vec<f64>,
}

impl BarrierState {
    pub fn new(p: MultiDegreePoly, u: Vec<f64>) -> Result<Self, PavingError> {
        if !is_above_roots(&p, &u)? {
            return Err(PavingError::NotAboveRoots { step: 0 });
        }
        Ok(Self { p, u, history: Vec::new() })
    }
}

/// One step `p <- d_j^{r-1} p`, `u <- u - delta e_j` with
/// `delta = ((r-1)^2 / r) / (Phi^j(u) - 1/(u_j - lambda_r))`.
pub fn barrier_step(state: &BarrierState, j: usize, r: usize, mode: LambdaMode) -> Result<(BarrierState, StepRecord), PavingError> {
    let step = state.history.len() + 1;
    let n = state.p.n();
    if j >= n || r < 2 {
        return Err(PavingError::ParamOutOfRange(format!("direction {j} or r = {r} out of range")));
    }
    let u = &state.u;
    let phi_before = all_phis(&state.p, u)?;
    let lambda_term = match mode {
        LambdaMode::Zero => 1.0 / u[j],
        LambdaMode::Exact => {
            let mut dir = vec![0.0; n];
            dir[j] = 1.0;
            let mut base = u.clone();
            base[j] = 0.0;
            let rv = roots(&state.p.section(&dir, &base)?)?;
            match rv.min() {
                Some(lr) if rv.len() == r => 1.0 / (u[j] - lr),
                _ => 0.0,
            }
        }
    };
    let denom = phi_before[j] - lambda_term;
    if denom.is_nan() || denom <= 0.0 {
        return Err(PavingError::ParamOutOfRange(format!("barrier denominator {denom} is not positive")));
    }
    let rf = r as f64;
    let delta = (rf - 1.0).powi(2) / rf / denom;
    let p = state.p.partial_var_k(j, r - 1);
    let mut next_u = u.clone();
    next_u[j] -= delta;
    if !is_above_roots(&p, &next_u)? {
        return Err(PavingError::NotAboveRoots { step });
    }
    let phi_after = all_phis(&p, &next_u)?;
    for (i, (&b, &a)) in phi_before.iter().zip(&phi_after).enumerate() {
        if a > b + MONOTONE_TOL * b.abs().max(1.0) {
            return Err(PavingError::MonotonicityViolated { step, direction: i, before: b, after: a });
        }
    }
    let mut history = state.history.clone();
    history.push((j, delta));
    Ok((
        BarrierState { p, u: next_u, history },
        StepRecord { direction: j, delta, phi_before, phi_after },
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BarrierRun {
    pub b: f64,
    pub steps: Vec<StepRecord>,
    pub final_point: Vec<f64>,
    /// Largest coordinate of the final point; bounds the largest root of the final diagonal.
    pub certified: f64,
    /// `b - delta(b)` from the uniform step bound.
    pub analytic: f64,
}

/// `b - ((r-1)^2/r) / (r (alpha/(b-1) + (1-alpha)/b) - 1/b)`.
pub fn analytic_value(r: usize, alpha: f64, b: f64) -> f64 {
    let rf = r as f64;
    let phi = rf * (alpha / (b - 1.0) + (1.0 - alpha) / b);
    b - (rf - 1.0).powi(2) / rf / (phi - 1.0 / b)
}

/// The `n`-step iteration on `g^r` from `b 1`, differentiating in order `0, 1, .., n-1`.
pub fn barrier_run(g: &MultiAffinePoly, r: usize, alpha: f64, b: f64, mode: LambdaMode) -> Result<BarrierRun, PavingError> {
    let p0 = MultiDegreePoly::from_multiaffine(g).power(r)?;
    let mut state = BarrierState::new(p0, vec![b; g.n()])?;
    let mut steps = Vec::with_capacity(g.n());
    for j in 0..g.n() {
        let (next, rec) = barrier_step(&state, j, r, mode)?;
        state = next;
        steps.push(rec);
    }
    let certified = state.u.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(BarrierRun { b, steps, final_point: state.u, certified, analytic: analytic_value(r, alpha, b) })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BarrierReport {
    /// Smallest certified value over all `b` tried.
    pub bound: f64,
    pub best_b: f64,
    /// Smallest analytic value over all `b` tried.
    pub analytic_bound: f64,
    pub lr_bound: f64,
    pub runs: Vec<BarrierRun>,
}

/// Runs the iteration for every `b` in `bs` (each `> 1`) and keeps the best.
pub fn certified_bound_on_grid(g: &MultiAffinePoly, r: usize, alpha: f64, bs: &[f64]) -> Result<BarrierReport, PavingError> {
    let lr = lr_bound(r, alpha)?;
    let bad = kernel_hypotheses(g, alpha);
    if !bad.is_empty() {
        return Err(PavingError::HypothesisViolated(bad));
    }
    if bs.is_empty() || bs.iter().any(|&b| b.is_nan() || b <= 1.0) {
        return Err(PavingError::ParamOutOfRange("grid must be nonempty with every b > 1".into()));
    }
    let runs: Vec<BarrierRun> = bs
        .par_iter()
        .map(|&b| barrier_run(g, r, alpha, b, LambdaMode::Zero))
        .collect::<Result<_, _>>()?;
    Ok(summarize(runs, lr))
}

fn summarize(runs: Vec<BarrierRun>, lr: f64) -> BarrierReport {
    let best = runs
        .iter()
        .min_by(|a, b| a.certified.total_cmp(&b.certified))
        .expect("at least one run");
    let (bound, best_b) = (best.certified, best.b);
    let analytic_bound = runs.iter().map(|r| r.analytic).fold(f64::INFINITY, f64::min);
    BarrierReport { bound, best_b, analytic_bound, lr_bound: lr, runs }
}

/// `points` values of `b` with `b - 1` log-spaced over `[1e-4, 3]`, then golden-section
/// refinement of the certified value around the best grid point.
pub fn certified_maxroot_bound(g: &MultiAffinePoly, r: usize, alpha: f64, points: usize) -> Result<BarrierReport, PavingError> {
    let points = points.max(3);
    let (lo, hi) = (1e-4f64.ln(), 3.0f64.ln());
    let grid: Vec<f64> = (0..points)
        .map(|k| 1.0 + (lo + (hi - lo) * k as f64 / (points - 1) as f64).exp())
        .collect();
    let mut report = certified_bound_on_grid(g, r, alpha, &grid)?;
    let k = grid.iter().position(|&b| b == report.best_b).expect("best b is on the grid");
    let (mut a, mut c) = (grid[k.saturating_sub(1)], grid[(k + 1).min(points - 1)]);
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let eval = |b: f64| barrier_run(g, r, alpha, b, LambdaMode::Zero);
    let mut x1 = c - phi * (c - a);
    let mut x2 = a + phi * (c - a);
    let mut f1 = eval(x1)?;
    let mut f2 = eval(x2)?;
    let mut extra = Vec::new();
    for _ in 0..40 {
        if f1.certified <= f2.certified {
            c = x2;
            x2 = x1;
            extra.push(std::mem::replace(&mut f2, f1.clone()));
            x1 = c - phi * (c - a);
            f1 = eval(x1)?;
        } else {
            a = x1;
            x1 = x2;
            extra.push(std::mem::replace(&mut f1, f2.clone()));
            x2 = a + phi * (c - a);
            f2 = eval(x2)?;
        }
    }
    extra.push(f1);
    extra.push(f2);
    let mut runs = std::mem::take(&mut report.runs);
    runs.extend(extra);
    Ok(summarize(runs, report.lr_bound))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subset::SubsetMask;

    #[test]
    fn above_roots_examples() {
        let p = MultiDegreePoly::from_multiaffine(&MultiAffinePoly::product_of_linear(&[(1.0, -1.0), (1.0, -1.0)]));
        assert!(is_above_roots(&p, &[2.0, 2.0]).unwrap());
        assert!(!is_above_roots(&p, &[1.0, 1.0]).unwrap());
        assert!(!is_above_roots(&p, &[0.5, 3.0]).unwrap());
    }

    #[test]
    fn phi_examples() {
        let p = MultiAffinePoly::monomial(2, SubsetMask::full(2), 1.0);
        assert_eq!(barrier_phi(&p, 0, &[1.0, 2.0]).unwrap(), 1.0);
        assert!(matches!(barrier_phi(&p, 0, &[0.0, 2.0]), Err(PavingError::PoleAtPoint)));
    }

    #[test]
    fn univariate_step() {
        let (a, b) = (0.3, 1.5);
        let g = MultiAffinePoly::new(1, vec![-a, 1.0]).unwrap();
        let run = barrier_run(&g, 2, 0.3, b, LambdaMode::Zero).unwrap();
        let phi = 2.0 / (b - a);
        let delta = 0.5 / (phi - 1.0 / b);
        assert!((run.steps[0].delta - delta).abs() < 1e-14);
        assert!((run.certified - (b - delta)).abs() < 1e-14);
    }

    #[test]
    fn exact_mode_with_zero_root_matches_zero_mode() {
        let g = MultiAffinePoly::product_of_linear(&[(1.0, 0.0), (1.0, -0.2)]);
        let z = barrier_run(&g, 2, 0.2, 1.4, LambdaMode::Zero).unwrap();
        let e = barrier_run(&g, 2, 0.2, 1.4, LambdaMode::Exact).unwrap();
        assert!((z.steps[0].delta - e.steps[0].delta).abs() < 1e-12);
    }

    #[test]
    fn diagonal_case_meets_closed_form() {
        let alpha = 0.2;
        let g = MultiAffinePoly::product_of_linear(&[(1.0, -alpha); 3]);
        let rep = certified_maxroot_bound(&g, 2, alpha, 200).unwrap();
        assert!(rep.bound <= lr_bound(2, alpha).unwrap() + 1e-3);
        assert!(rep.bound >= alpha - 1e-12);
    }

    #[test]
    fn one_variable_infimum() {
        let a = 0.25;
        let g = MultiAffinePoly::new(1, vec![-a, 1.0]).unwrap();
        let rep = certified_maxroot_bound(&g, 2, a, 200).unwrap();
        let value = |b: f64| b - 0.5 / (2.0 / (b - a) - 1.0 / b);
        let fine = (1..30000).map(|k| value(1.0 + k as f64 * 1e-4)).fold(f64::INFINITY, f64::min);
        assert!((rep.bound - fine).abs() < 1e-6, "{} vs {fine}", rep.bound);
        assert!(rep.bound >= a);
    }

    #[test]
    fn refining_the_grid_never_hurts() {
        let g = MultiAffinePoly::product_of_linear(&[(1.0, -0.1), (1.0, -0.2)]);
        let coarse: Vec<f64> = (1..=10).map(|k| 1.0 + 0.3 * k as f64).collect();
        let fine: Vec<f64> = (1..=60).map(|k| 1.0 + 0.05 * k as f64).collect();
        let a = certified_bound_on_grid(&g, 2, 0.2, &coarse).unwrap();
        let b = certified_bound_on_grid(&g, 2, 0.2, &fine).unwrap();
        assert!(b.bound <= a.bound + 1e-15);
    }
}
