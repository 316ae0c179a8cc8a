use serde::{Deserialize, Serialize};

use crate::multiaffine::MultiAffinePoly;
use crate::univariate::UniPoly;
use crate::{PolyError, Polynomial};

pub const DEFAULT_BUDGET: usize = 1 << 20;

/// Dense multivariate polynomial with a degree cap per variable.
///
/// Exponent vectors are stored in mixed radix with variable 0 varying fastest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiDegreePoly {
    caps: Vec<usize>,
    strides: Vec<usize>,
    coeffs: Vec<f64>,
}

fn table_size(caps: &[usize], budget: usize) -> Result<usize, PolyError> {
    caps.iter().try_fold(1usize, |acc, &d| {
        acc.checked_mul(d + 1)
            .filter(|&s| s <= budget)
            .ok_or(PolyError::BudgetExceeded { budget })
    })
}

impl MultiDegreePoly {
    pub fn zero(caps: Vec<usize>) -> Result<Self, PolyError> {
        Self::zero_with_budget(caps, DEFAULT_BUDGET)
    }

    pub fn zero_with_budget(caps: Vec<usize>, budget: usize) -> Result<Self, PolyError> {
        let size = table_size(&caps, budget)?;
        let mut strides = Vec::with_capacity(caps.len());
        let mut s = 1;
        for &d in &caps {
            strides.push(s);
            s *= d + 1;
        }
        Ok(Self { caps, strides, coeffs: vec![0.0; size] })
    }

    pub fn constant(n: usize, c: f64) -> Self {
        let mut p = Self::zero(vec![0; n]).expect("constant fits any budget");
        p.coeffs[0] = c;
        p
    }

    pub fn from_terms(caps: Vec<usize>, terms: &[(Vec<usize>, f64)]) -> Result<Self, PolyError> {
        let mut p = Self::zero(caps)?;
        for (e, c) in terms {
            let idx = p.index_of(e)?;
            p.coeffs[idx] += c;
        }
        Ok(p)
    }

    pub fn from_multiaffine(p: &MultiAffinePoly) -> Self {
        Self {
            caps: vec![1; p.n()],
            strides: (0..p.n()).map(|i| 1 << i).collect(),
            coeffs: p.coeffs().to_vec(),
        }
    }

    /// Back to a multi-affine table when every cap is at most one.
    pub fn to_multiaffine(&self) -> Result<MultiAffinePoly, PolyError> {
        let n = self.n();
        let mut out = MultiAffinePoly::zero(n);
        for (idx, &c) in self.coeffs.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            let e = self.exponents(idx);
            if e.iter().any(|&k| k > 1) {
                return Err(PolyError::PreconditionViolated("polynomial is not multi-affine".into()));
            }
            let s = e.iter().enumerate().fold(0u32, |m, (i, &k)| m | ((k as u32) << i));
            out.set_coeff(s.into(), c);
        }
        Ok(out)
    }

    pub fn n(&self) -> usize {
        self.caps.len()
    }

    pub fn caps(&self) -> &[usize] {
        &self.caps
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn index_of(&self, e: &[usize]) -> Result<usize, PolyError> {
        if e.len() != self.n() {
            return Err(PolyError::DimensionMismatch { expected: self.n(), got: e.len() });
        }
        let mut idx = 0;
        for (i, &k) in e.iter().enumerate() {
            if k > self.caps[i] {
                return Err(PolyError::ExponentOverCap { var: i, exponent: k, cap: self.caps[i] });
            }
            idx += k * self.strides[i];
        }
        Ok(idx)
    }

    pub fn exponents(&self, mut idx: usize) -> Vec<usize> {
        self.caps
            .iter()
            .map(|&d| {
                let k = idx % (d + 1);
                idx /= d + 1;
                k
            })
            .collect()
    }

    pub fn coeff(&self, e: &[usize]) -> f64 {
        self.index_of(e).map(|i| self.coeffs[i]).unwrap_or(0.0)
    }

    pub fn total_degree(&self) -> usize {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0.0)
            .map(|(i, _)| self.exponents(i).iter().sum())
            .max()
            .unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { coeffs: self.coeffs.iter().map(|c| c * s).collect(), ..self.clone() }
    }

    /// Same polynomial with larger caps.
    pub fn widen(&self, caps: Vec<usize>) -> Result<Self, PolyError> {
        if caps.len() != self.n() || caps.iter().zip(&self.caps).any(|(a, b)| a < b) {
            return Err(PolyError::DimensionMismatch { expected: self.n(), got: caps.len() });
        }
        let mut out = Self::zero(caps)?;
        for (idx, &c) in self.coeffs.iter().enumerate() {
            if c != 0.0 {
                let j = out.index_of(&self.exponents(idx))?;
                out.coeffs[j] = c;
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self, PolyError> {
        if other.n() != self.n() {
            return Err(PolyError::DimensionMismatch { expected: self.n(), got: other.n() });
        }
        let caps: Vec<usize> = self.caps.iter().zip(&other.caps).map(|(a, b)| *a.max(b)).collect();
        let mut out = self.widen(caps.clone())?;
        let b = other.widen(caps)?;
        out.coeffs.iter_mut().zip(&b.coeffs).for_each(|(x, y)| *x += y);
        Ok(out)
    }

    pub fn multiply(&self, other: &Self) -> Result<Self, PolyError> {
        if other.n() != self.n() {
            return Err(PolyError::DimensionMismatch { expected: self.n(), got: other.n() });
        }
        let caps = self.caps.iter().zip(&other.caps).map(|(a, b)| a + b).collect();
        let mut out = Self::zero(caps)?;
        let a_terms: Vec<(Vec<usize>, f64)> = self.terms();
        let b_terms: Vec<(Vec<usize>, f64)> = other.terms();
        for (ea, ca) in &a_terms {
            let base: usize = ea.iter().zip(&out.strides).map(|(k, s)| k * s).sum();
            for (eb, cb) in &b_terms {
                let off: usize = eb.iter().zip(&out.strides).map(|(k, s)| k * s).sum();
                out.coeffs[base + off] += ca * cb;
            }
        }
        Ok(out)
    }

    pub fn power(&self, r: usize) -> Result<Self, PolyError> {
        let mut acc = Self::constant(self.n(), 1.0);
        for _ in 0..r {
            acc = acc.multiply(self)?;
        }
        Ok(acc)
    }

    fn terms(&self) -> Vec<(Vec<usize>, f64)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0.0)
            .map(|(i, &c)| (self.exponents(i), c))
            .collect()
    }

    /// `k`-th derivative in variable `i`; the cap of `i` drops by `k`.
    pub fn partial_var_k(&self, i: usize, k: usize) -> Self {
        let mut caps = self.caps.clone();
        caps[i] = caps[i].saturating_sub(k);
        let mut out = Self::zero(caps).expect("smaller than the source table");
        for (idx, &c) in self.coeffs.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            let mut e = self.exponents(idx);
            if e[i] < k {
                continue;
            }
            let falling: f64 = (0..k).map(|j| (e[i] - j) as f64).product();
            e[i] -= k;
            let j = out.index_of(&e).expect("exponent within reduced cap");
            out.coeffs[j] += falling * c;
        }
        out
    }

    /// `p(scale * z + shift)` componentwise.
    pub fn affine_sub(&self, scale: &[f64], shift: &[f64]) -> Result<Self, PolyError> {
        let n = self.n();
        for len in [scale.len(), shift.len()] {
            if len != n {
                return Err(PolyError::DimensionMismatch { expected: n, got: len });
            }
        }
        if let Some(i) = scale.iter().position(|&s| s == 0.0) {
            return Err(PolyError::ZeroScale { var: i });
        }
        let mut c = self.coeffs.clone();
        for i in 0..n {
            let d = self.caps[i];
            let stride = self.strides[i];
            let block = stride * (d + 1);
            // binomial table for (s z + t)^k
            let mut pw = vec![vec![0.0; d + 1]; d + 1];
            pw[0][0] = 1.0;
            for k in 1..=d {
                for j in 0..=k {
                    let from_t = if j < k { shift[i] * pw[k - 1][j] } else { 0.0 };
                    let from_s = if j > 0 { scale[i] * pw[k - 1][j - 1] } else { 0.0 };
                    pw[k][j] = from_t + from_s;
                }
            }
            for base in (0..c.len()).step_by(block) {
                for off in 0..stride {
                    let fiber: Vec<f64> = (0..=d).map(|k| c[base + off + k * stride]).collect();
                    for j in 0..=d {
                        c[base + off + j * stride] = (j..=d).map(|k| fiber[k] * pw[k][j]).sum();
                    }
                }
            }
        }
        Ok(Self { coeffs: c, ..self.clone() })
    }

    pub fn shift(&self, shift: &[f64]) -> Result<Self, PolyError> {
        self.affine_sub(&vec![1.0; self.n()], shift)
    }

    pub fn diagonalize(&self) -> UniPoly {
        let mut c = vec![0.0; self.caps.iter().sum::<usize>() + 1];
        for (idx, &v) in self.coeffs.iter().enumerate() {
            if v != 0.0 {
                c[self.exponents(idx).iter().sum::<usize>()] += v;
            }
        }
        UniPoly::new(c)
    }

    pub fn eval(&self, z: &[f64]) -> Result<f64, PolyError> {
        if z.len() != self.n() {
            return Err(PolyError::DimensionMismatch { expected: self.n(), got: z.len() });
        }
        let mut t = self.coeffs.clone();
        for i in (0..self.n()).rev() {
            let d = self.caps[i];
            let stride = self.strides[i];
            let mut next = vec![0.0; stride];
            for (j, out) in next.iter_mut().enumerate() {
                *out = (0..=d).rev().fold(0.0, |acc, k| acc * z[i] + t[j + k * stride]);
            }
            t = next;
        }
        Ok(t[0])
    }
}

impl Polynomial for MultiDegreePoly {
    fn n(&self) -> usize {
        self.caps.len()
    }

    fn eval(&self, z: &[f64]) -> Result<f64, PolyError> {
        MultiDegreePoly::eval(self, z)
    }

    fn section(&self, v: &[f64], alpha: &[f64]) -> Result<UniPoly, PolyError> {
        let n = self.n();
        for len in [v.len(), alpha.len()] {
            if len != n {
                return Err(PolyError::DimensionMismatch { expected: n, got: len });
            }
        }
        let mut t: Vec<UniPoly> = self.coeffs.iter().map(|&c| UniPoly::constant(c)).collect();
        for i in (0..n).rev() {
            let d = self.caps[i];
            let stride = self.strides[i];
            let lin = UniPoly::new(vec![alpha[i], v[i]]);
            let next = (0..stride)
                .map(|j| {
                    (0..=d)
                        .rev()
                        .fold(UniPoly::zero(), |acc, k| &(&acc * &lin) + &t[j + k * stride])
                })
                .collect();
            t = next;
        }
        Ok(t.pop().unwrap_or_default())
    }

    fn partial_var(&self, i: usize) -> Self {
        self.partial_var_k(i, 1)
    }
}
