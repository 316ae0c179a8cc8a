//! Finite point processes on `[n]` stored as a `2^n` probability table, with their
//! generating and kernel polynomials.

pub mod determinantal;
pub mod entropy;
pub mod generators;
pub mod pipeline;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::multiaffine::{MultiAffinePoly, MAX_VARS};
use crate::paving::{root_interval_violation, PavingError, HYPOTHESIS_TOL};
use crate::subset::{deposit, full_mask, SubsetMask};
use crate::univariate::{roots_extended, wronskian_proper_position, RootError, RootVector, UniPoly};
use crate::PolyError;

pub use determinantal::{determinantal_process, hkpv_mixture_check, HkpvReport};
pub use entropy::{
    aux_entropy_checks, binary_entropy, entropy, entropy_lower_bound_check, epsilon_for_delta,
    majorization_conjecture_check, r_for_delta, AuxEntropyReport, EntropyBoundReport, MajorizationReport,
};
pub use pipeline::{centered_kernel, sr_paving, SrPavingReport};

/// Entries this far below zero are clamped; anything lower is an error.
pub const NEGATIVE_MASS_TOL: f64 = 1e-12;
/// Allowed deviation of the total mass from 1.
pub const MASS_SUM_TOL: f64 = 1e-10;
/// Allowed negative mass when reconstructing a process from a kernel.
pub const KERNEL_MASS_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProcessError {
    #[error("invalid pmf: {0}")]
    InvalidPmf(String),
    #[error("not a valid kernel: {0}")]
    NotAValidKernel(String),
    #[error("conditioning on point {point} being {} has probability zero", if *.present { "present" } else { "absent" })]
    ZeroProbabilityEvent { point: usize, present: bool },
    #[error("centering failed: {0}")]
    CenteringFailed(String),
    #[error("not a PSD contraction: {0}")]
    NotPsdContraction(String),
    #[error("invalid weights: {0}")]
    InvalidWeights(String),
    #[error("parameter out of range: {0}")]
    ParamOutOfRange(String),
    #[error(transparent)]
    Paving(#[from] PavingError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Root(#[from] RootError),
}

/// Probability distribution on subsets of `[n]`, indexed by bitmask.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PmfFile", into = "PmfFile")]
pub struct PointProcess {
    n: usize,
    pmf: Vec<f64>,
}

impl PointProcess {
    pub fn new(n: usize, mut pmf: Vec<f64>) -> Result<Self, ProcessError> {
        if n > MAX_VARS {
            return Err(ProcessError::InvalidPmf(format!("{n} points exceed the maximum of {MAX_VARS}")));
        }
        if pmf.len() != 1 << n {
            return Err(ProcessError::InvalidPmf(format!("expected {} entries, got {}", 1usize << n, pmf.len())));
        }
        for (s, p) in pmf.iter_mut().enumerate() {
            if !p.is_finite() || *p < -NEGATIVE_MASS_TOL {
                return Err(ProcessError::InvalidPmf(format!("mass {p} at {}", SubsetMask(s as u32))));
            }
            *p = p.max(0.0);
        }
        let total: f64 = pmf.iter().sum();
        if (total - 1.0).abs() > MASS_SUM_TOL {
            return Err(ProcessError::InvalidPmf(format!("total mass {total}")));
        }
        Ok(Self { n, pmf })
    }

    /// Builds the table from `(set, probability)` pairs; missing sets get 0.
    pub fn from_sets(n: usize, sets: &[(Vec<usize>, f64)]) -> Result<Self, ProcessError> {
        let mut pmf = vec![0.0; 1usize.checked_shl(n as u32).unwrap_or(0).max(1)];
        for (set, p) in sets {
            if let Some(&i) = set.iter().find(|&&i| i >= n) {
                return Err(ProcessError::InvalidPmf(format!("point {i} out of range for n = {n}")));
            }
            pmf[SubsetMask::from_indices(set.iter().copied()).bits()] += p;
        }
        Self::new(n, pmf)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn pmf(&self) -> &[f64] {
        &self.pmf
    }

    pub fn prob(&self, a: SubsetMask) -> f64 {
        self.pmf[a.bits()]
    }

    /// `(set, probability)` for every set of positive mass.
    pub fn support(&self) -> Vec<(Vec<usize>, f64)> {
        self.pmf
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > 0.0)
            .map(|(s, &p)| (SubsetMask(s as u32).indices(), p))
            .collect()
    }

    /// `P(A in X)` for every `A`.
    pub fn inclusion_table(&self) -> Vec<f64> {
        let mut t = self.pmf.clone();
        superset_zeta(&mut t, self.n);
        t
    }

    pub fn inclusion_prob(&self, a: SubsetMask) -> f64 {
        self.pmf.iter().enumerate().filter(|(s, _)| s & a.bits() == a.bits()).map(|(_, p)| p).sum()
    }

    /// `p_i = P(i in X)`.
    pub fn marginals(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.inclusion_prob(SubsetMask::singleton(i))).collect()
    }

    /// `f(z) = sum_A P(X = A) z^A`.
    pub fn generating_poly(&self) -> MultiAffinePoly {
        MultiAffinePoly::new(self.n, self.pmf.clone()).expect("table has 2^n entries")
    }

    /// `g(z) = sum_A (-1)^{|A|} P(A in X) z^{A^c}`.
    pub fn kernel_poly(&self) -> MultiAffinePoly {
        let inc = self.inclusion_table();
        let full = full_mask(self.n) as usize;
        let coeffs = (0..inc.len())
            .map(|s| {
                let a = full ^ s;
                if a.count_ones() % 2 == 1 {
                    -inc[a]
                } else {
                    inc[a]
                }
            })
            .collect();
        MultiAffinePoly::new(self.n, coeffs).expect("table has 2^n entries")
    }

    /// Roots of the diagonal of the kernel polynomial, non-increasing.
    ///
    /// The diagonal equals `sum_k P(|X| = k) x^{n-k} (x - 1)^k`, so its roots are
    /// `1 / (1 - t)` over the roots `t` of `sum_k P(|X| = k) t^k`, with a root at zero for
    /// each missing degree.
    pub fn spectrum(&self) -> Result<RootVector, ProcessError> {
        let (hi, lo) = self.size_distribution_extended();
        let t = roots_extended(&hi, &lo)?;
        let mut lambda: Vec<f64> = t.iter().map(|&t| 1.0 / (1.0 - t)).collect();
        lambda.resize(self.n, 0.0);
        Ok(RootVector::from_unsorted(lambda))
    }

    /// Law of `X intersected with S`, on the points of `S` relabelled in increasing order.
    pub fn restrict(&self, s: SubsetMask) -> Self {
        let m = s.len();
        let mut pmf = vec![0.0; 1 << m];
        for (a, &p) in self.pmf.iter().enumerate() {
            pmf[crate::subset::extract(a, s.bits())] += p;
        }
        Self { n: m, pmf }
    }

    /// Law of the remaining `n - 1` points given that `i` is present or absent.
    pub fn condition(&self, i: usize, present: bool) -> Result<Self, ProcessError> {
        if i >= self.n {
            return Err(ProcessError::ParamOutOfRange(format!("point {i} out of range for n = {}", self.n)));
        }
        let bit = 1usize << i;
        let q: f64 = self.pmf.iter().enumerate().filter(|(s, _)| (s & bit != 0) == present).map(|(_, p)| p).sum();
        if q <= 0.0 {
            return Err(ProcessError::ZeroProbabilityEvent { point: i, present });
        }
        let rest = full_mask(self.n) as usize & !bit;
        let extra = if present { bit } else { 0 };
        let pmf: Vec<f64> = (0..1usize << (self.n - 1)).map(|c| self.pmf[deposit(c, rest) | extra] / q).collect();
        Self::new(self.n - 1, pmf)
    }

    /// Law of `|X|` on `0..=n`.
    pub fn size_distribution(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.n + 1];
        for (s, &p) in self.pmf.iter().enumerate() {
            out[s.count_ones() as usize] += p;
        }
        out
    }

    /// Size law summed without rounding error, as `hi + lo` per entry.
    fn size_distribution_extended(&self) -> (Vec<f64>, Vec<f64>) {
        let mut hi = vec![0.0; self.n + 1];
        let mut lo = vec![0.0; self.n + 1];
        for (s, &p) in self.pmf.iter().enumerate() {
            let k = s.count_ones() as usize;
            let sum = hi[k] + p;
            let z = sum - hi[k];
            lo[k] += (hi[k] - (sum - z)) + (p - z);
            hi[k] = sum;
        }
        for k in 0..=self.n {
            let sum = hi[k] + lo[k];
            lo[k] -= sum - hi[k];
            hi[k] = sum;
        }
        (hi, lo)
    }
}

#[derive(Serialize, Deserialize)]
struct PmfEntry {
    set: Vec<usize>,
    p: f64,
}

#[derive(Serialize, Deserialize)]
struct PmfFile {
    n: usize,
    pmf: Vec<PmfEntry>,
}

impl TryFrom<PmfFile> for PointProcess {
    type Error = ProcessError;

    fn try_from(f: PmfFile) -> Result<Self, ProcessError> {
        let sets: Vec<_> = f.pmf.into_iter().map(|e| (e.set, e.p)).collect();
        Self::from_sets(f.n, &sets)
    }
}

impl From<PointProcess> for PmfFile {
    fn from(x: PointProcess) -> Self {
        let pmf = x.support().into_iter().map(|(set, p)| PmfEntry { set, p }).collect();
        PmfFile { n: x.n, pmf }
    }
}

/// `t[A] <- sum_{B >= A} t[B]`.
pub(crate) fn superset_zeta(t: &mut [f64], n: usize) {
    for i in 0..n {
        let bit = 1 << i;
        for s in 0..t.len() {
            if s & bit == 0 {
                t[s] += t[s | bit];
            }
        }
    }
}

/// Inverse of `superset_zeta`: `t[A] <- sum_{B >= A} (-1)^{|B \ A|} t[B]`.
pub(crate) fn superset_mobius(t: &mut [f64], n: usize) {
    for i in 0..n {
        let bit = 1 << i;
        for s in 0..t.len() {
            if s & bit == 0 {
                t[s] -= t[s | bit];
            }
        }
    }
}

/// Multi-affine polynomial satisfying the kernel conditions: top coefficient 1 and
/// diagonal roots in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelPoly(MultiAffinePoly);

impl KernelPoly {
    pub fn new(g: MultiAffinePoly) -> Result<Self, ProcessError> {
        let top = g.top_coeff();
        if (top - 1.0).abs() > HYPOTHESIS_TOL {
            return Err(ProcessError::NotAValidKernel(format!("top coefficient is {top}, expected 1")));
        }
        if let Some(msg) = root_interval_violation(&g.diagonalize(), 0.0, 1.0) {
            return Err(ProcessError::NotAValidKernel(msg));
        }
        Ok(Self(g))
    }

    pub fn poly(&self) -> &MultiAffinePoly {
        &self.0
    }

    pub fn into_inner(self) -> MultiAffinePoly {
        self.0
    }
}

/// Recovers the pmf from `P(A in X) = (-1)^{|A|} [z^{A^c}] g` by Mobius inversion.
pub fn process_from_kernel(g: &MultiAffinePoly) -> Result<PointProcess, ProcessError> {
    let n = g.n();
    let top = g.top_coeff();
    if (top - 1.0).abs() > HYPOTHESIS_TOL {
        return Err(ProcessError::NotAValidKernel(format!("top coefficient is {top}, expected 1")));
    }
    let mut t: Vec<f64> = (0..1usize << n)
        .map(|a| {
            let c = g.kernel_coeff(SubsetMask(a as u32));
            if a.count_ones() % 2 == 1 {
                -c
            } else {
                c
            }
        })
        .collect();
    superset_mobius(&mut t, n);
    if let Some((s, &p)) = t.iter().enumerate().find(|(_, &p)| p < -KERNEL_MASS_TOL) {
        return Err(ProcessError::NotAValidKernel(format!("reconstructed mass {p} at {}", SubsetMask(s as u32))));
    }
    for p in &mut t {
        *p = p.max(0.0);
    }
    PointProcess::new(n, t)
}

/// Accepts `g` as the kernel polynomial of a point process iff it has top coefficient 1,
/// diagonal roots in `[0, 1]` and a non-negative reconstructed pmf.
pub fn classify_kernel(g: &MultiAffinePoly) -> Result<PointProcess, ProcessError> {
    KernelPoly::new(g.clone())?;
    process_from_kernel(g)
}

/// `d^A g` on the variables of `A^c`, the kernel of `X` restricted to `A^c`.
pub fn restriction_kernel(g: &MultiAffinePoly, a: SubsetMask) -> MultiAffinePoly {
    g.partial(a).compress(a.complement(g.n()))
}

/// Law of `I_1 + ... + I_n` for independent `I_i ~ Bernoulli(lambda_i)`.
pub fn bernoulli_convolution(lambda: &[f64]) -> Vec<f64> {
    let mut out = vec![1.0];
    for &l in lambda {
        let mut next = vec![0.0; out.len() + 1];
        for (k, &p) in out.iter().enumerate() {
            next[k] += (1.0 - l) * p;
            next[k + 1] += l * p;
        }
        out = next;
    }
    out
}

/// `prod_i (lambda_i x + 1 - lambda_i)`.
pub fn lambda_factorization(lambda: &[f64]) -> UniPoly {
    lambda.iter().map(|&l| UniPoly::new(vec![1.0 - l, l])).product()
}

/// Whether the diagonals of the kernels of `X | i present` and `X | i absent` are each in
/// proper position with respect to the diagonal of the kernel of `X`.
pub fn conditioning_interlacing_check(x: &PointProcess, i: usize, tol: f64) -> Result<(bool, bool), ProcessError> {
    let g = x.spectrum()?;
    let check = |present| -> Result<bool, ProcessError> {
        let c = x.condition(i, present)?.spectrum()?;
        Ok(wronskian_proper_position(&c, 1.0, &g, 1.0, tol))
    };
    Ok((check(true)?, check(false)?))
}
