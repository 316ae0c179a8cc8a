//! Floating-point Sturm sequences, used to cross-check the root finder.

use super::poly::UniPoly;

/// Sturm chain `p, p', -rem(p, p'), ...`; remainders below `rel_tol` of the running
/// coefficient scale are treated as zero.
pub fn sturm_sequence(p: &UniPoly, rel_tol: f64) -> Vec<UniPoly> {
    let mut seq = vec![p.clone()];
    if p.is_zero() {
        return seq;
    }
    let mut prev = p.clone();
    let mut cur = p.derivative();
    let scale = p.max_abs_coeff();
    while !cur.is_zero() && cur.max_abs_coeff() > rel_tol * scale {
        seq.push(cur.clone());
        let (_, r) = prev.div_rem(&cur);
        prev = cur;
        cur = -&r;
    }
    seq
}

pub fn sign_changes_at(seq: &[UniPoly], x: f64) -> usize {
    count_changes(seq.iter().map(|p| p.eval(x)))
}

/// Sign changes at `+inf` (or `-inf`) read off the leading coefficients.
pub fn sign_changes_at_infinity(seq: &[UniPoly], positive: bool) -> usize {
    count_changes(seq.iter().map(|p| {
        let odd = p.degree() % 2 == 1;
        if positive || !odd {
            p.leading()
        } else {
            -p.leading()
        }
    }))
}

fn count_changes(vals: impl Iterator<Item = f64>) -> usize {
    let mut last = 0.0_f64;
    let mut n = 0;
    for v in vals.filter(|v| *v != 0.0) {
        if last != 0.0 && (v < 0.0) != (last < 0.0) {
            n += 1;
        }
        last = v;
    }
    n
}

/// Number of distinct real roots of `p`.
pub fn count_distinct_real_roots(p: &UniPoly, rel_tol: f64) -> usize {
    let seq = sturm_sequence(p, rel_tol);
    sign_changes_at_infinity(&seq, false) - sign_changes_at_infinity(&seq, true)
}

/// Number of distinct roots in `(a, b]`.
pub fn count_roots_in(p: &UniPoly, a: f64, b: f64, rel_tol: f64) -> usize {
    let seq = sturm_sequence(p, rel_tol);
    sign_changes_at(&seq, a).saturating_sub(sign_changes_at(&seq, b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_distinct_roots() {
        let p = UniPoly::from_roots(1.0, &[-1.0, 0.5, 2.0]);
        assert_eq!(count_distinct_real_roots(&p, 1e-12), 3);
        assert_eq!(count_roots_in(&p, 0.0, 1.0, 1e-12), 1);
        let q = UniPoly::new(vec![1.0, 0.0, 1.0]);
        assert_eq!(count_distinct_real_roots(&q, 1e-12), 0);
    }
}
