use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};

use super::poly::UniPoly;
use super::roots::{is_real_rooted, roots, RootVector};
use super::RootError;

pub const DEFAULT_TOL: f64 = 1e-9;

/// `q` interlaces `p`: with `deg q = deg p - 1` the roots satisfy
/// `b1 >= a1 >= b2 >= ... >= a_{d-1} >= b_d`; for equal degrees the roots alternate in
/// either order. The zero polynomial interlaces and is interlaced by everything.
pub fn interlaces(q: &UniPoly, p: &UniPoly) -> Result<bool, RootError> {
    interlaces_tol(q, p, DEFAULT_TOL)
}

pub fn interlaces_tol(q: &UniPoly, p: &UniPoly, tol: f64) -> Result<bool, RootError> {
    if q.is_zero() || p.is_zero() {
        return Ok(true);
    }
    let (dq, dp) = (q.degree(), p.degree());
    if dq.abs_diff(dp) > 1 {
        return Err(RootError::DegreeMismatch { left: dq, right: dp });
    }
    if dq > dp {
        return Ok(false);
    }
    let a = roots(q)?;
    let b = roots(p)?;
    if dq + 1 == dp {
        Ok(alternates(b.as_slice(), a.as_slice(), tol))
    } else {
        Ok(alternates(a.as_slice(), b.as_slice(), tol) || alternates(b.as_slice(), a.as_slice(), tol))
    }
}

/// `first[0] >= second[0] >= first[1] >= second[1] >= ...`, both non-increasing.
fn alternates(first: &[f64], second: &[f64], tol: f64) -> bool {
    let mut merged = Vec::with_capacity(first.len() + second.len());
    for i in 0..first.len().max(second.len()) {
        if let Some(&x) = first.get(i) {
            merged.push(x);
        }
        if let Some(&y) = second.get(i) {
            merged.push(y);
        }
    }
    merged.windows(2).all(|w| w[0] >= w[1] - tol)
}

/// Roots of `p` and `q` alternate, in whichever order their degrees allow.
pub fn are_interlacing(q: &UniPoly, p: &UniPoly, tol: f64) -> Result<bool, RootError> {
    if q.is_zero() || p.is_zero() {
        return Ok(true);
    }
    if q.degree().abs_diff(p.degree()) > 1 {
        return Ok(false);
    }
    if q.degree() > p.degree() {
        interlaces_tol(p, q, tol)
    } else {
        interlaces_tol(q, p, tol)
    }
}

/// Wronskian `p q' - p' q`.
pub fn wronskian(p: &UniPoly, q: &UniPoly) -> UniPoly {
    &(p * &q.derivative()) - &(&p.derivative() * q)
}

/// Proper position `q << p`: the roots interlace and `p q' - p' q <= 0` everywhere.
pub fn proper_position(q: &UniPoly, p: &UniPoly) -> Result<bool, RootError> {
    proper_position_tol(q, p, DEFAULT_TOL)
}

pub fn proper_position_tol(q: &UniPoly, p: &UniPoly, tol: f64) -> Result<bool, RootError> {
    if q.is_zero() || p.is_zero() {
        return Ok(true);
    }
    if q.degree().abs_diff(p.degree()) > 1 {
        return Ok(false);
    }
    let rq = roots(q)?;
    let rp = roots(p)?;
    Ok(proper_position_roots(&rq, q.leading(), &rp, p.leading(), tol))
}

/// Proper position of `lead_q prod (x - rq)` and `lead_p prod (x - rp)` given their roots.
pub fn proper_position_roots(rq: &RootVector, lead_q: f64, rp: &RootVector, lead_p: f64, tol: f64) -> bool {
    let (dq, dp) = (rq.len(), rp.len());
    let interlaced = match dp.checked_sub(dq) {
        Some(1) => alternates(rp.as_slice(), rq.as_slice(), tol),
        Some(0) => alternates(rq.as_slice(), rp.as_slice(), tol) || alternates(rp.as_slice(), rq.as_slice(), tol),
        None if dq == dp + 1 => alternates(rq.as_slice(), rp.as_slice(), tol),
        _ => false,
    };
    interlaced && wronskian_proper_position(rq, lead_q, rp, lead_p, tol)
}

/// Proper position decided by the Wronskian alone: `p q' - p' q <= tol * scale` on a grid
/// spanning the roots and at every root, with degrees differing by at most one. For
/// real-rooted `p` and `q` this is `q << p` up to a relative perturbation of the
/// coefficients.
pub fn wronskian_proper_position(rq: &RootVector, lead_q: f64, rp: &RootVector, lead_p: f64, tol: f64) -> bool {
    if rq.len().abs_diff(rp.len()) > 1 {
        return false;
    }
    let p = UniPoly::from_roots(lead_p, rp.as_slice());
    let q = UniPoly::from_roots(lead_q, rq.as_slice());
    let all: Vec<f64> = rp.iter().chain(rq.iter()).copied().collect();
    let lo = all.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = all.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (lo, hi) = if all.is_empty() { (-1.0, 1.0) } else { (lo - 1.0, hi + 1.0) };
    let w = wronskian(&p, &q);
    let steps = 256;
    let grid = (0..=steps).map(|k| lo + (hi - lo) * k as f64 / steps as f64);
    grid.chain(all.iter().copied()).all(|x| {
        let (v, s) = w.eval_with_scale(x);
        v <= tol * s.max(1.0)
    })
}

/// Samples random convex combinations of `ps` and reports `false` as soon as one is not
/// real-rooted. `true` only means that no combination tried failed.
pub fn common_interlacer_probe(ps: &[UniPoly], trials: usize, seed: u64) -> Result<bool, RootError> {
    if ps.len() <= 1 {
        return Ok(true);
    }
    let d = ps[0].degree();
    if let Some(bad) = ps.iter().find(|p| p.degree() != d) {
        return Err(RootError::DegreeMismatch { left: d, right: bad.degree() });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let w: Vec<f64> = ps.iter().map(|_| Exp1.sample(&mut rng)).collect();
        let total: f64 = w.iter().sum();
        let combo: UniPoly = ps.iter().zip(&w).map(|(p, wi)| p.scale(wi / total)).sum();
        if !is_real_rooted(&combo) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `a` majorizes `b`: after sorting both non-increasingly, every prefix sum of `a`
/// dominates that of `b`, and the totals agree.
pub fn majorizes(a: &[f64], b: &[f64], tol: f64) -> Result<bool, RootError> {
    Ok(majorization_margin(a, b, tol)? >= -tol)
}

/// Smallest prefix-sum gap `sum_{i<=k} a_i - sum_{i<=k} b_i` over proper prefixes
/// (0 when the vectors have a single entry).
pub fn majorization_margin(a: &[f64], b: &[f64], tol: f64) -> Result<f64, RootError> {
    if a.len() != b.len() {
        return Err(RootError::LengthMismatch { left: a.len(), right: b.len() });
    }
    let sa: f64 = a.iter().sum();
    let sb: f64 = b.iter().sum();
    let scale = 1.0_f64.max(sa.abs()).max(sb.abs());
    if (sa - sb).abs() > tol * scale {
        return Err(RootError::SumMismatch { left: sa, right: sb });
    }
    let a = RootVector::from_unsorted(a.to_vec());
    let b = RootVector::from_unsorted(b.to_vec());
    let mut margin = 0.0_f64;
    let (mut pa, mut pb) = (0.0, 0.0);
    for k in 0..a.len().saturating_sub(1) {
        pa += a[k];
        pb += b[k];
        margin = if k == 0 { pa - pb } else { margin.min(pa - pb) };
    }
    Ok(margin)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn lin(root: f64) -> UniPoly {
        UniPoly::from_roots(1.0, &[root])
    }

    #[test]
    fn wronskian_test_sees_through_unresolved_clusters() {
        let rv = |r: &[f64]| RootVector::from_unsorted(r.to_vec());
        let p = rv(&[0.9, 0.5, 0.5 - 1e-9, 0.1]);
        let q = rv(&[0.7, 0.5 + 1e-9, 0.3]);
        assert!(wronskian_proper_position(&q, 1.0, &p, 1.0, 1e-8));
        assert!(!wronskian_proper_position(&rv(&[0.95, 0.8, 0.7]), 1.0, &p, 1.0, 1e-8));
        assert!(!wronskian_proper_position(&rv(&[0.3, 0.2, 0.05]), 1.0, &p, 1.0, 1e-8));
        assert!(!wronskian_proper_position(&rv(&[0.5]), 1.0, &p, 1.0, 1e-8));
    }

    #[test]
    fn interlacing_examples() {
        let p = UniPoly::from_roots(1.0, &[0.0, 1.0]);
        assert!(interlaces(&lin(0.5), &p).unwrap());
        assert!(!interlaces(&lin(2.0), &p).unwrap());
        assert!(interlaces(&UniPoly::zero(), &p).unwrap());
        assert!(interlaces(&p, &UniPoly::zero()).unwrap());
        let cubic = UniPoly::from_roots(1.0, &[0.0, 1.0, 2.0]);
        assert!(matches!(interlaces(&lin(0.5), &cubic), Err(RootError::DegreeMismatch { .. })));
    }

    #[test]
    fn proper_position_examples() {
        let p = UniPoly::from_roots(1.0, &[0.0, 1.0]);
        assert!(proper_position(&p.derivative(), &p).unwrap());
        // x << x - 1 since W = (x-1) - x = -1, while the reverse has W = +1
        assert!(proper_position(&lin(0.0), &lin(1.0)).unwrap());
        assert!(!proper_position(&lin(1.0), &lin(0.0)).unwrap());
        // s = x - 1/2, r = -x/2 from g = z1 z2 - (z1 + z2)/2 split along z2
        let s = UniPoly::new(vec![-0.5, 1.0]);
        let r = UniPoly::new(vec![0.0, -0.5]);
        assert!(proper_position(&s, &r).unwrap());
    }

    #[test]
    fn common_interlacer_examples() {
        let a = UniPoly::from_roots(1.0, &[0.0, 0.0]);
        let b = UniPoly::from_roots(1.0, &[1.0, 1.0]);
        assert!(!common_interlacer_probe(&[a, b], 50, 1).unwrap());
        let a = UniPoly::from_roots(1.0, &[0.0, 1.0]);
        let b = UniPoly::from_roots(1.0, &[0.1, 0.9]);
        assert!(common_interlacer_probe(&[a.clone(), b], 200, 1).unwrap());
        assert!(common_interlacer_probe(&[a], 10, 1).unwrap());
    }

    #[test]
    fn majorization_examples() {
        assert!(majorizes(&[1.0, 0.0], &[0.5, 0.5], 1e-12).unwrap());
        assert!(!majorizes(&[0.5, 0.5], &[1.0, 0.0], 1e-12).unwrap());
        assert!(majorizes(&[1.0, 0.0, 0.0, 0.0], &[0.5, 0.5, 0.0, 0.0], 1e-12).unwrap());
        assert!(matches!(majorizes(&[1.0], &[1.0, 0.0], 1e-12), Err(RootError::LengthMismatch { .. })));
        assert!(matches!(majorizes(&[1.0, 1.0], &[1.0, 0.0], 1e-12), Err(RootError::SumMismatch { .. })));
    }

    fn roots_strategy() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-3.0f64..3.0, 2..=8)
    }

    proptest! {
        #[test]
        fn derivative_in_proper_position(rs in roots_strategy(), lead in prop_oneof![0.2f64..3.0, -3.0f64..-0.2]) {
            let p = UniPoly::from_roots(lead, &rs);
            prop_assert!(proper_position(&p.derivative(), &p).unwrap());
        }

        #[test]
        fn interlacing_not_symmetric(rs in prop::collection::vec(-3.0f64..3.0, 3..=6)) {
            let p = UniPoly::from_roots(1.0, &rs);
            let q = p.derivative();
            prop_assert!(interlaces(&q, &p).unwrap());
            prop_assert!(!interlaces(&p, &q).unwrap());
        }

        #[test]
        fn majorization_is_a_preorder(
            a in prop::collection::vec(0.0f64..1.0, 4),
            m1 in prop::collection::vec(prop::collection::vec(0.0f64..1.0, 4), 4),
            m2 in prop::collection::vec(prop::collection::vec(0.0f64..1.0, 4), 4),
        ) {
            // doubly stochastic images (Sinkhorn-normalized) are majorized by the original
            let ds = |m: &Vec<Vec<f64>>| {
                let mut m: Vec<Vec<f64>> = m.iter().map(|r| r.iter().map(|x| x + 0.05).collect()).collect();
                for _ in 0..500 {
                    for r in m.iter_mut() { let s: f64 = r.iter().sum(); r.iter_mut().for_each(|x| *x /= s); }
                    for j in 0..4 { let s: f64 = m.iter().map(|r| r[j]).sum(); m.iter_mut().for_each(|r| r[j] /= s); }
                }
                m
            };
            let apply = |m: &Vec<Vec<f64>>, v: &[f64]| -> Vec<f64> { m.iter().map(|r| r.iter().zip(v).map(|(x, y)| x * y).sum()).collect() };
            let b = apply(&ds(&m1), &a);
            let c = apply(&ds(&m2), &b);
            prop_assert!(majorizes(&a, &a, 1e-9).unwrap());
            prop_assert!(majorizes(&a, &b, 1e-9).unwrap());
            prop_assert!(majorizes(&b, &c, 1e-9).unwrap());
            prop_assert!(majorizes(&a, &c, 1e-9).unwrap());
        }
    }
}
