use serde::{Deserialize, Serialize};

use crate::subset::{deposit, full_mask, SubsetMask};
use crate::univariate::{roots, roots_at_least, UniPoly};
use crate::{PolyError, Polynomial};

pub const MAX_VARS: usize = 16;

/// Multi-affine polynomial `sum_S c_S z^S` stored as a dense table indexed by bitmask.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiAffinePoly {
    n: usize,
    coeffs: Vec<f64>,
}

impl MultiAffinePoly {
    pub fn new(n: usize, coeffs: Vec<f64>) -> Result<Self, PolyError> {
        if n > MAX_VARS {
            return Err(PolyError::TooManyVariables { n, max: MAX_VARS });
        }
        if coeffs.len() != 1 << n {
            return Err(PolyError::DimensionMismatch { expected: 1 << n, got: coeffs.len() });
        }
        Ok(Self { n, coeffs })
    }

    pub fn zero(n: usize) -> Self {
        assert!(n <= MAX_VARS, "at most {MAX_VARS} variables");
        Self { n, coeffs: vec![0.0; 1 << n] }
    }

    pub fn constant(n: usize, c: f64) -> Self {
        Self::monomial(n, SubsetMask::EMPTY, c)
    }

    pub fn monomial(n: usize, s: SubsetMask, c: f64) -> Self {
        let mut p = Self::zero(n);
        p.coeffs[s.bits()] = c;
        p
    }

    pub fn from_terms(n: usize, terms: &[(SubsetMask, f64)]) -> Result<Self, PolyError> {
        let mut p = Self::zero(n);
        for &(s, c) in terms {
            if !s.is_subset_of(SubsetMask::full(n)) {
                return Err(PolyError::VariableOutOfRange { var: 31 - s.0.leading_zeros() as usize, n });
            }
            p.coeffs[s.bits()] += c;
        }
        Ok(p)
    }

    /// `prod_i (a_i z_i + b_i)`.
    pub fn product_of_linear(factors: &[(f64, f64)]) -> Self {
        let n = factors.len();
        let mut coeffs = vec![1.0];
        for &(a, b) in factors {
            let mut next = Vec::with_capacity(coeffs.len() * 2);
            next.extend(coeffs.iter().map(|c| c * b));
            next.extend(coeffs.iter().map(|c| c * a));
            coeffs = next;
        }
        Self { n, coeffs }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, s: SubsetMask) -> f64 {
        self.coeffs[s.bits()]
    }

    pub fn set_coeff(&mut self, s: SubsetMask, c: f64) {
        self.coeffs[s.bits()] = c;
    }

    fn full(&self) -> usize {
        full_mask(self.n) as usize
    }

    /// Coefficient `[z^{[n] \ a}]`.
    pub fn kernel_coeff(&self, a: SubsetMask) -> f64 {
        self.coeffs[self.full() ^ a.bits()]
    }

    pub fn top_coeff(&self) -> f64 {
        self.coeffs[self.full()]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn eval(&self, z: &[f64]) -> Result<f64, PolyError> {
        self.check_dim(z.len())?;
        let mut t = self.coeffs.clone();
        for i in (0..self.n).rev() {
            let half = 1 << i;
            for s in 0..half {
                t[s] += z[i] * t[s + half];
            }
            t.truncate(half);
        }
        Ok(t[0])
    }

    fn check_dim(&self, len: usize) -> Result<(), PolyError> {
        if len != self.n {
            return Err(PolyError::DimensionMismatch { expected: self.n, got: len });
        }
        Ok(())
    }

    pub fn partial(&self, a: SubsetMask) -> Self {
        let a = a.bits();
        let mut coeffs = vec![0.0; self.coeffs.len()];
        for (t, c) in coeffs.iter_mut().enumerate() {
            if t & a == 0 {
                *c = self.coeffs[t | a];
            }
        }
        Self { n: self.n, coeffs }
    }

    pub fn restrict_var(&self, i: usize, beta: f64) -> Self {
        let bit = 1 << i;
        let mut coeffs = vec![0.0; self.coeffs.len()];
        for (t, c) in coeffs.iter_mut().enumerate() {
            if t & bit == 0 {
                *c = self.coeffs[t] + beta * self.coeffs[t | bit];
            }
        }
        Self { n: self.n, coeffs }
    }

    pub fn diagonalize(&self) -> UniPoly {
        let mut c = vec![0.0; self.n + 1];
        for (s, &v) in self.coeffs.iter().enumerate() {
            c[s.count_ones() as usize] += v;
        }
        UniPoly::new(c)
    }

    /// `z_1 ... z_n p(1/z_1, ..., 1/z_n)`.
    pub fn inversion(&self) -> Self {
        let full = self.full();
        let coeffs = (0..self.coeffs.len()).map(|s| self.coeffs[full ^ s]).collect();
        Self { n: self.n, coeffs }
    }

    /// `p(scale * z + shift)` componentwise.
    pub fn affine_sub(&self, scale: &[f64], shift: &[f64]) -> Result<Self, PolyError> {
        self.check_dim(scale.len())?;
        self.check_dim(shift.len())?;
        if let Some(i) = scale.iter().position(|&s| s == 0.0) {
            return Err(PolyError::ZeroScale { var: i });
        }
        let mut c = self.coeffs.clone();
        for i in 0..self.n {
            let bit = 1 << i;
            for t in 0..c.len() {
                if t & bit == 0 {
                    let hi = c[t | bit];
                    c[t] += shift[i] * hi;
                    c[t | bit] = scale[i] * hi;
                }
            }
        }
        Ok(Self { n: self.n, coeffs: c })
    }

    /// `p(z + shift)`.
    pub fn shift(&self, shift: &[f64]) -> Result<Self, PolyError> {
        self.affine_sub(&vec![1.0; self.n], shift)
    }

    /// `(-1)^n p(-z)`.
    pub fn reflect(&self) -> Self {
        let n = self.n as u32;
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(s, &c)| if (n + (s as u32).count_ones()) % 2 == 1 { -c } else { c })
            .collect();
        Self { n: self.n, coeffs }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { n: self.n, coeffs: self.coeffs.iter().map(|c| c * s).collect() }
    }

    pub fn add(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_dim(other.n)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Ok(Self { n: self.n, coeffs })
    }

    /// `p(z) q(y)` in `n + m` variables, `y` placed after `z`.
    pub fn tensor(&self, other: &Self) -> Result<Self, PolyError> {
        let n = self.n + other.n;
        if n > MAX_VARS {
            return Err(PolyError::TooManyVariables { n, max: MAX_VARS });
        }
        let mut coeffs = Vec::with_capacity(1 << n);
        for &b in &other.coeffs {
            coeffs.extend(self.coeffs.iter().map(|a| a * b));
        }
        Ok(Self { n, coeffs })
    }

    /// Polynomial in the `|mask|` variables of `mask`, relabelled in increasing order.
    /// Terms involving variables outside `mask` are dropped.
    pub fn compress(&self, mask: SubsetMask) -> Self {
        let m = mask.len();
        let coeffs = (0..1usize << m).map(|c| self.coeffs[deposit(c, mask.bits())]).collect();
        Self { n: m, coeffs }
    }

    /// Inverse of `compress`: place the variables of `self` at the positions of `mask` in `[n]`.
    pub fn embed(&self, n: usize, mask: SubsetMask) -> Result<Self, PolyError> {
        if mask.len() != self.n || !mask.is_subset_of(SubsetMask::full(n)) {
            return Err(PolyError::DimensionMismatch { expected: self.n, got: mask.len() });
        }
        let mut out = Self::zero(n);
        for (c, &v) in self.coeffs.iter().enumerate() {
            out.coeffs[deposit(c, mask.bits())] = v;
        }
        Ok(out)
    }

    /// Whether the polynomial depends only on variables in `mask`.
    pub fn depends_only_on(&self, mask: SubsetMask) -> bool {
        let m = mask.bits();
        self.coeffs.iter().enumerate().all(|(s, &c)| c == 0.0 || s & !m == 0)
    }

    /// Subsets whose coefficient exceeds `tol` in absolute value.
    pub fn support(&self, tol: f64) -> Vec<SubsetMask> {
        (0..self.coeffs.len())
            .filter(|&s| self.coeffs[s].abs() > tol)
            .map(|s| SubsetMask(s as u32))
            .collect()
    }

    /// For every `A <= C <= B` with `A, B` in the support, `C` is in the support.
    pub fn support_convexity_check(&self, tol: f64) -> bool {
        let len = self.coeffs.len();
        let inside: Vec<bool> = self.coeffs.iter().map(|c| c.abs() > tol).collect();
        let mut down = inside.clone();
        let mut up = inside.clone();
        for i in 0..self.n {
            let bit = 1 << i;
            for s in 0..len {
                if s & bit != 0 {
                    down[s] |= down[s ^ bit];
                } else {
                    up[s] |= up[s | bit];
                }
            }
        }
        (0..len).all(|s| inside[s] || !(down[s] && up[s]))
    }

    /// Sign pattern forced on a stable polynomial with positive top coefficient whose
    /// diagonal has only non-negative roots: `(-1)^{n-|S|} [z^S] p >= 0` for every `S`.
    pub fn coefficient_sign_check(&self, tol: f64) -> Result<bool, PolyError> {
        if self.top_coeff() <= 0.0 {
            return Err(PolyError::PreconditionViolated("top coefficient must be positive".into()));
        }
        let d = self.diagonalize();
        if roots(&d).is_err() || !roots_at_least(&d, 0.0, 1e-9) {
            return Err(PolyError::PreconditionViolated(
                "diagonal must have only non-negative real roots".into(),
            ));
        }
        let scale = self.max_abs_coeff();
        Ok(self.coeffs.iter().enumerate().all(|(s, &c)| {
            let odd = (self.n + (s as u32).count_ones() as usize) % 2 == 1;
            let signed = if odd { -c } else { c };
            signed >= -tol * scale
        }))
    }
}

impl Polynomial for MultiAffinePoly {
    fn n(&self) -> usize {
        self.n
    }

    fn eval(&self, z: &[f64]) -> Result<f64, PolyError> {
        MultiAffinePoly::eval(self, z)
    }

    fn section(&self, v: &[f64], alpha: &[f64]) -> Result<UniPoly, PolyError> {
        self.check_dim(v.len())?;
        self.check_dim(alpha.len())?;
        let mut t: Vec<UniPoly> = self.coeffs.iter().map(|&c| UniPoly::constant(c)).collect();
        for i in (0..self.n).rev() {
            let half = 1 << i;
            let lin = UniPoly::new(vec![alpha[i], v[i]]);
            let hi = t.split_off(half);
            for (lo, h) in t.iter_mut().zip(&hi) {
                *lo = &*lo + &(&lin * h);
            }
        }
        Ok(t.pop().unwrap_or_default())
    }

    fn partial_var(&self, i: usize) -> Self {
        self.partial(SubsetMask::singleton(i))
    }
}

/// One monomial of a [`PolyFile`], given by its variable set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermEntry {
    pub vars: Vec<usize>,
    pub coeff: f64,
}

/// Sparse JSON form of a multi-affine polynomial. Repeated monomials are summed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyFile {
    pub n: usize,
    pub terms: Vec<TermEntry>,
}

impl PolyFile {
    pub fn from_poly(p: &MultiAffinePoly) -> Self {
        let terms = p
            .coeffs()
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0.0)
            .map(|(s, &coeff)| TermEntry { vars: SubsetMask(s as u32).indices(), coeff })
            .collect();
        Self { n: p.n(), terms }
    }

    pub fn to_poly(&self) -> Result<MultiAffinePoly, PolyError> {
        if self.n > MAX_VARS {
            return Err(PolyError::TooManyVariables { n: self.n, max: MAX_VARS });
        }
        let mut terms = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            if let Some(&var) = t.vars.iter().find(|&&v| v >= self.n) {
                return Err(PolyError::VariableOutOfRange { var, n: self.n });
            }
            let s = SubsetMask::from_indices(t.vars.iter().copied());
            if s.len() != t.vars.len() {
                return Err(PolyError::PreconditionViolated(format!("repeated variable in {:?}", t.vars)));
            }
            terms.push((s, t.coeff));
        }
        MultiAffinePoly::from_terms(self.n, &terms)
    }
}
