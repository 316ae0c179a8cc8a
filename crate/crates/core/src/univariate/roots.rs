use std::ops::{Add, Index};

use serde::{Deserialize, Serialize};

use super::poly::{compensated_horner, UniPoly};
use super::RootError;

/// Tolerances used when extracting roots of a polynomial believed to be real-rooted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootOptions {
    /// A value is treated as an exact zero when `|p(x)| <= zero_rel * sum |c_k||x|^k`.
    pub zero_rel: f64,
    /// Looser threshold accepting a touching (double) root that rounding pushed off the axis,
    /// relative to `sum_k |c_k| max(1, |x|)^k`. Anything beyond it is reported as non-real roots.
    pub realness_rel: f64,
    /// Roots closer than this are merged into a cluster at their mean.
    pub cluster: f64,
    /// Relative radius within which nearby roots are tested as a single multiple root.
    pub multiplicity_radius: f64,
    /// Largest relative residual of the lower derivatives accepted at a multiple root.
    pub multiplicity_rel: f64,
    /// Absolute bisection width.
    pub width: f64,
}

impl Default for RootOptions {
    fn default() -> Self {
        Self {
            zero_rel: 1e-14,
            realness_rel: 1e-9,
            cluster: 1e-9,
            multiplicity_radius: 5e-2,
            multiplicity_rel: 1e-15,
            width: 1e-12,
        }
    }
}

/// Roots of a real-rooted polynomial, non-increasing, repeated by multiplicity.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RootVector(Vec<f64>);

impl RootVector {
    pub fn from_unsorted(mut v: Vec<f64>) -> Self {
        v.sort_by(|a, b| b.total_cmp(a));
        Self(v)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn max(&self) -> Option<f64> {
        self.0.first().copied()
    }

    pub fn min(&self) -> Option<f64> {
        self.0.last().copied()
    }

    pub fn max_abs(&self) -> Option<f64> {
        match (self.max(), self.min()) {
            (Some(a), Some(b)) => Some(a.abs().max(b.abs())),
            _ => None,
        }
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.0.iter()
    }
}

impl Index<usize> for RootVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// Componentwise sum of two sorted vectors, which is again non-increasing.
impl Add for &RootVector {
    type Output = RootVector;
    fn add(self, rhs: &RootVector) -> RootVector {
        assert_eq!(self.len(), rhs.len(), "root vectors of different lengths");
        RootVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

pub fn roots(p: &UniPoly) -> Result<RootVector, RootError> {
    roots_with(p, &RootOptions::default())
}

/// All roots of a real-rooted polynomial.
///
/// Roots of `p^(k)` are located from the roots of `p^(k+1)`: between two consecutive
/// critical points `p^(k)` is monotone, so it holds at most one root there, and by Rolle
/// a real-rooted `p^(k)` holds exactly one root per such interval. An interval without
/// a sign change or a vanishing endpoint is a certificate of non-real roots.
pub fn roots_with(p: &UniPoly, opts: &RootOptions) -> Result<RootVector, RootError> {
    split_roots(Split::new(p.coeffs().to_vec(), vec![0.0; p.coeffs().len()]), opts)
}

/// Roots of the polynomial with coefficients `hi[k] + lo[k]`, where `lo` holds the rounding
/// error of `hi`.
pub fn roots_extended(hi: &[f64], lo: &[f64]) -> Result<RootVector, RootError> {
    let n = hi.len().max(lo.len());
    let mut h = hi.to_vec();
    let mut l = lo.to_vec();
    h.resize(n, 0.0);
    l.resize(n, 0.0);
    split_roots(Split::new(h, l), &RootOptions::extended())
}

impl RootOptions {
    /// Thresholds for double-double coefficients.
    pub fn extended() -> Self {
        Self { zero_rel: 1e-26, multiplicity_rel: 1e-14, ..Self::default() }
    }
}

fn split_roots(p: Split, opts: &RootOptions) -> Result<RootVector, RootError> {
    if p.degree().is_none() {
        return Err(RootError::ZeroPolynomial);
    }
    let zeros = p.hi.iter().zip(&p.lo).take_while(|(h, l)| **h == 0.0 && **l == 0.0).count();
    let q = Split::new(p.hi[zeros..].to_vec(), p.lo[zeros..].to_vec());
    let mut found = ascending_roots(&q, opts)?;
    found.sort_by(f64::total_cmp);
    let mut found = snap_multiple(&q, &found, opts);
    found.extend(std::iter::repeat_n(0.0, zeros));
    found.sort_by(f64::total_cmp);
    Ok(RootVector::from_unsorted(cluster(found, opts.cluster)))
}

/// Coefficients `hi + lo`, trailing zeros trimmed.
#[derive(Debug, Clone)]
struct Split {
    hi: Vec<f64>,
    lo: Vec<f64>,
}

impl Split {
    fn new(mut hi: Vec<f64>, mut lo: Vec<f64>) -> Self {
        while hi.last().is_some_and(|&h| h == 0.0) && lo.last().is_some_and(|&l| l == 0.0) {
            hi.pop();
            lo.pop();
        }
        Self { hi, lo }
    }

    fn degree(&self) -> Option<usize> {
        self.hi.len().checked_sub(1)
    }

    fn coeff(&self, k: usize) -> f64 {
        self.hi[k] + self.lo[k]
    }

    fn eval(&self, x: f64) -> f64 {
        compensated_horner(&self.hi, x) + self.lo.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    fn eval_with_scale(&self, x: f64) -> (f64, f64) {
        let ax = x.abs();
        let s = self.hi.iter().rev().fold(0.0, |acc, c| acc * ax + c.abs());
        (self.eval(x), s)
    }

    /// `sum_k |c_k| max(1, |x|)^k`.
    fn coeff_scale(&self, x: f64) -> f64 {
        let t = x.abs().max(1.0);
        self.hi.iter().rev().fold(0.0, |acc, c| acc * t + c.abs()).max(f64::MIN_POSITIVE)
    }

    fn derivative(&self) -> Self {
        let mut hi = Vec::with_capacity(self.hi.len().saturating_sub(1));
        let mut lo = Vec::with_capacity(hi.capacity());
        for k in 1..self.hi.len() {
            let kf = k as f64;
            let p = kf * self.hi[k];
            hi.push(p);
            lo.push(kf.mul_add(self.hi[k], -p) + kf * self.lo[k]);
        }
        Self::new(hi, lo)
    }
}

fn ascending_roots(q: &Split, opts: &RootOptions) -> Result<Vec<f64>, RootError> {
    let d = match q.degree() {
        Some(d) if d > 0 => d,
        _ => return Ok(Vec::new()),
    };
    let lead = q.coeff(d);
    let bound = 1.0 + (0..d).fold(0.0_f64, |m, k| m.max((q.coeff(k) / lead).abs()));
    let mut ders = vec![q.clone()];
    for _ in 1..d {
        let next = ders.last().unwrap().derivative();
        ders.push(next);
    }
    let lin = &ders[d - 1];
    let mut prev = vec![-lin.coeff(0) / lin.coeff(1)];
    for level in (0..d - 1).rev() {
        let f = &ders[level];
        let mut ends = Vec::with_capacity(prev.len() + 2);
        ends.push(-bound);
        ends.extend(prev.iter().copied());
        ends.push(bound);
        let mut next = Vec::with_capacity(ends.len() - 1);
        for w in ends.windows(2) {
            next.push(root_in(f, w[0], w[1], opts)?);
        }
        prev = next;
    }
    Ok(prev)
}

fn root_in(f: &Split, a: f64, b: f64, opts: &RootOptions) -> Result<f64, RootError> {
    let (fa, sa) = f.eval_with_scale(a);
    let (fb, sb) = f.eval_with_scale(b);
    let ra = fa.abs() / sa.max(f64::MIN_POSITIVE);
    let rb = fb.abs() / sb.max(f64::MIN_POSITIVE);
    if ra <= opts.zero_rel && ra <= rb {
        return Ok(a);
    }
    if rb <= opts.zero_rel {
        return Ok(b);
    }
    if (fa < 0.0) != (fb < 0.0) {
        return Ok(bisect(f, a, b, fa, opts.width));
    }
    let ca = fa.abs() / f.coeff_scale(a);
    let cb = fb.abs() / f.coeff_scale(b);
    if ca.min(cb) <= opts.realness_rel {
        return Ok(if ca <= cb { a } else { b });
    }
    Err(RootError::NotRealRooted {
        lo: a,
        hi: b,
        residual: ca.min(cb),
    })
}

fn bisect(f: &Split, mut lo: f64, mut hi: f64, flo: f64, width: f64) -> f64 {
    let neg_lo = flo < 0.0;
    for _ in 0..200 {
        let tol = width.max(4.0 * f64::EPSILON * lo.abs().max(hi.abs()));
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let fm = f.eval(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == neg_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let df = f.derivative();
    let mut x = 0.5 * (lo + hi);
    let mut fx = f.eval(x).abs();
    for _ in 0..3 {
        let d = df.eval(x);
        if d == 0.0 {
            break;
        }
        let y = x - f.eval(x) / d;
        let fy = f.eval(y).abs();
        if !(lo..=hi).contains(&y) || fy >= fx {
            break;
        }
        x = y;
        fx = fy;
    }
    x
}

/// Replaces groups of nearby roots by a multiple root where the polynomial admits one.
/// A group whose members are separated by strict sign changes is kept as it is. Otherwise
/// a group of size `m` collapses to the root `c` of `q^(m-1)` next to it when `q^(j)(c)`
/// vanishes to within `multiplicity_rel` for every `j < m - 1`, and failing that it is
/// split at its widest gap and both halves are tried again.
fn snap_multiple(q: &Split, sorted: &[f64], opts: &RootOptions) -> Vec<f64> {
    let mut ders = vec![q.clone()];
    while ders.len() <= sorted.len() {
        let next = ders.last().unwrap().derivative();
        ders.push(next);
    }
    let radius = |x: f64| opts.multiplicity_radius * x.abs().max(1.0);
    let mut out = Vec::with_capacity(sorted.len());
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i + 1;
        while j < sorted.len() && sorted[j] - sorted[j - 1] <= radius(sorted[j]) {
            j += 1;
        }
        let margin = 0.5 * radius(sorted[i]).min(radius(sorted[j - 1]));
        snap_group(&ders, &sorted[i..j], margin, opts, &mut out);
        i = j;
    }
    out
}

fn snap_group(ders: &[Split], group: &[f64], margin: f64, opts: &RootOptions, out: &mut Vec<f64>) {
    let m = group.len();
    if m == 1 || separated(&ders[0], group, margin) {
        out.extend_from_slice(group);
        return;
    }
    if let Some(c) = multiple_root(ders, group, opts) {
        out.extend(std::iter::repeat_n(c, m));
        return;
    }
    let split = (1..m)
        .max_by(|&a, &b| (group[a] - group[a - 1]).total_cmp(&(group[b] - group[b - 1])))
        .expect("group has a gap");
    let margin = margin.min(0.5 * (group[split] - group[split - 1]));
    snap_group(ders, &group[..split], margin, opts, out);
    snap_group(ders, &group[split..], margin, opts, out);
}

/// `q` takes strictly alternating signs just outside the group and between consecutive
/// members, so every member is a simple root.
fn separated(q: &Split, group: &[f64], margin: f64) -> bool {
    let m = group.len();
    let mut points = Vec::with_capacity(m + 1);
    points.push(group[0] - margin);
    points.extend(group.windows(2).map(|w| 0.5 * (w[0] + w[1])));
    points.push(group[m - 1] + margin);
    let values: Vec<f64> = points.iter().map(|&x| q.eval(x)).collect();
    values.iter().all(|&v| v != 0.0) && values.windows(2).all(|w| (w[0] < 0.0) != (w[1] < 0.0))
}

fn multiple_root(ders: &[Split], group: &[f64], opts: &RootOptions) -> Option<f64> {
    let m = group.len();
    let f = &ders[m - 1];
    let df = &ders[m];
    let (lo, hi) = (group[0], group[m - 1]);
    let pad = (hi - lo).max(opts.width);
    let mut c = group.iter().sum::<f64>() / m as f64;
    for _ in 0..60 {
        let d = df.eval(c);
        if d == 0.0 {
            break;
        }
        let step = f.eval(c) / d;
        c -= step;
        if step.abs() <= f64::EPSILON * c.abs().max(1.0) {
            break;
        }
    }
    if !(c >= lo - pad && c <= hi + pad) {
        return None;
    }
    let ok = ders[..m - 1].iter().all(|p| p.eval(c).abs() / p.coeff_scale(c) <= opts.multiplicity_rel);
    ok.then_some(c)
}

fn cluster(sorted: Vec<f64>, tol: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(sorted.len());
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i + 1;
        while j < sorted.len() && sorted[j] - sorted[j - 1] <= tol {
            j += 1;
        }
        let mean = sorted[i..j].iter().sum::<f64>() / (j - i) as f64;
        out.extend(std::iter::repeat_n(mean, j - i));
        i = j;
    }
    out
}

pub fn is_real_rooted(p: &UniPoly) -> bool {
    p.is_zero() || roots(p).is_ok()
}

pub fn maxroot(p: &UniPoly) -> Result<f64, RootError> {
    roots(p)?.max().ok_or(RootError::NoRoots)
}

pub fn min_root(p: &UniPoly) -> Result<f64, RootError> {
    roots(p)?.min().ok_or(RootError::NoRoots)
}

pub fn max_abs_root(p: &UniPoly) -> Result<f64, RootError> {
    roots(p)?.max_abs().ok_or(RootError::NoRoots)
}

/// Largest root, or `None` for a nonzero constant.
pub fn maxroot_opt(p: &UniPoly) -> Result<Option<f64>, RootError> {
    Ok(roots(p)?.max())
}

/// All roots `>= lo`, assuming `p` real-rooted: the shifted polynomial `p(x + lo)` then has
/// coefficients of alternating sign. Robust to root multiplicity.
pub fn roots_at_least(p: &UniPoly, lo: f64, rel_tol: f64) -> bool {
    let q = p.taylor_shift(lo);
    sign_pattern(&q, rel_tol, |k, d| (d - k) % 2 == 0)
}

/// All roots `<= hi`, assuming `p` real-rooted: `p(x + hi)` has coefficients of one sign.
pub fn roots_at_most(p: &UniPoly, hi: f64, rel_tol: f64) -> bool {
    let q = p.taylor_shift(hi);
    sign_pattern(&q, rel_tol, |_, _| true)
}

fn sign_pattern(q: &UniPoly, rel_tol: f64, same_as_lead: impl Fn(usize, usize) -> bool) -> bool {
    if q.is_zero() {
        return true;
    }
    let d = q.degree();
    let lead = q.leading().signum();
    let scale = q.max_abs_coeff();
    q.coeffs().iter().enumerate().all(|(k, &c)| {
        let want = if same_as_lead(k, d) { lead } else { -lead };
        c * want >= -rel_tol * scale
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn simple_factorizations() {
        let r = roots(&UniPoly::new(vec![-1.0, 0.0, 1.0])).unwrap();
        assert!(close(r.as_slice(), &[1.0, -1.0], 1e-12));
        let r = roots(&UniPoly::from_roots(1.0, &[0.3, 0.7])).unwrap();
        assert!(close(r.as_slice(), &[0.7, 0.3], 1e-12));
    }

    #[test]
    fn projection_kernel_diagonal() {
        // z1 z2 - (z1 + z2)/2 on the diagonal: x^2 - x
        let r = roots(&UniPoly::new(vec![0.0, -1.0, 1.0])).unwrap();
        assert_eq!(r.as_slice(), &[1.0, 0.0]);
        assert_eq!(max_abs_root(&UniPoly::new(vec![0.0, -1.0, 1.0])).unwrap(), 1.0);
    }

    #[test]
    fn multiple_roots_are_kept() {
        let p = UniPoly::from_roots(2.0, &[0.5, 0.5, 0.5, -1.0, 1.0, 1.0]);
        let r = roots(&p).unwrap();
        assert!(close(r.as_slice(), &[1.0, 1.0, 0.5, 0.5, 0.5, -1.0], 1e-6));
        assert_eq!(r.len(), 6);
    }

    #[test]
    fn detects_complex_pair() {
        let p = UniPoly::new(vec![1.0, 0.0, 1.0]);
        assert!(matches!(roots(&p), Err(RootError::NotRealRooted { .. })));
        let p = UniPoly::new(vec![1.0, -2.0, 1.0 + 1e-6]);
        assert!(!is_real_rooted(&p));
    }

    #[test]
    fn constant_has_no_roots() {
        assert!(roots(&UniPoly::constant(3.0)).unwrap().is_empty());
        assert!(matches!(maxroot(&UniPoly::constant(3.0)), Err(RootError::NoRoots)));
        assert!(matches!(roots(&UniPoly::zero()), Err(RootError::ZeroPolynomial)));
    }

    #[test]
    fn interval_sign_tests() {
        let p = UniPoly::from_roots(1.0, &[0.0, 0.0, 1.0, 0.4]);
        assert!(roots_at_least(&p, 0.0, 1e-9));
        assert!(roots_at_most(&p, 1.0, 1e-9));
        assert!(!roots_at_least(&p, 0.1, 1e-9));
        assert!(!roots_at_most(&p, 0.9, 1e-9));
        assert!(roots_at_most(&p.scale(-3.0), 1.0, 1e-9));
    }

    proptest! {
        #[test]
        fn reproduces_random_roots(mut rs in prop::collection::vec(-5.0f64..5.0, 1..=10), lead in 0.1f64..4.0) {
            let p = UniPoly::from_roots(lead, &rs);
            let got = roots(&p).unwrap();
            rs.sort_by(|a, b| b.total_cmp(a));
            // nearly coincident roots lose half their digits
            let crowded = rs.windows(2).any(|w| (w[0] - w[1]).abs() < 1e-3);
            let ok = close(got.as_slice(), &rs, 1e-6) || (crowded && close(got.as_slice(), &rs, 1e-4));
            prop_assert!(ok, "{:?} vs {:?}", got, rs);
        }

        #[test]
        fn grid_roots_with_multiplicity(ks in prop::collection::vec(0usize..5, 1..=8)) {
            let rs: Vec<f64> = ks.iter().map(|&k| k as f64 * 0.25).collect();
            let p = UniPoly::from_roots(1.0, &rs);
            let got = roots(&p).unwrap();
            let mut want = rs.clone();
            want.sort_by(|a, b| b.total_cmp(a));
            prop_assert!(close(got.as_slice(), &want, 1e-3));
        }
    }
}
