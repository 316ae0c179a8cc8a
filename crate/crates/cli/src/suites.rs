//! Registry of `verify` suites. Each suite checks one statement on random instances and
//! reports every violation under an invariant identifier `suite/invariant`.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use stablepave::hyperbolic::{
    ab_convexity_test, boundary_lemma_test, cone_direction_invariance, f_specialization_check, homogenize_multiaffine,
};
use stablepave::instances::{random_kernel_matrix, random_process, InstanceKind};
use stablepave::matrix::{char_poly_matrix, op_norm, principal_submatrix};
use stablepave::paving::{
    certified_maxroot_bound, exhaustive_paving, g_r_bruteforce, g_r_differential, interlacing_descent, matrix_paving,
    two_stage_paving,
};
use stablepave::process::generators::random_psd_contraction;
use stablepave::process::{
    aux_entropy_checks, bernoulli_convolution, centered_kernel, classify_kernel, conditioning_interlacing_check,
    entropy_lower_bound_check, epsilon_for_delta, hkpv_mixture_check, majorization_conjecture_check,
    process_from_kernel, r_for_delta, sr_paving, PointProcess,
};
use stablepave::univariate::roots;
use stablepave::{MultiAffinePoly, SubsetMask};

const SIZE_LAW_TOL: f64 = 1e-9;
const ENTROPY_TOL: f64 = 1e-9;
const PRODUCT_TOL: f64 = 1e-12;
const ROUND_TRIP_TOL: f64 = 1e-10;
const BARRIER_MONOTONE_TOL: f64 = 1e-9;
const BARRIER_GRID_SLACK: f64 = 2e-3;
const BARRIER_GRID_POINTS: usize = 200;
const MARGINAL_WINDOW: (f64, f64) = (0.01, 0.99);
const AB_SAMPLES: usize = 10;

#[derive(Debug, Clone)]
pub struct SuiteParams {
    pub n: Option<usize>,
    pub kind: Option<InstanceKind>,
    pub r: Option<usize>,
    pub alpha: f64,
    pub delta: f64,
    pub tol: f64,
    pub seed: u64,
}

/// Per-instance inputs: a seeded generator, the ground-set size and the generator kind.
pub struct Instance<'a> {
    pub index: usize,
    pub seed: u64,
    pub n: usize,
    pub kind: InstanceKind,
    pub rng: ChaCha8Rng,
    pub params: &'a SuiteParams,
}

impl Instance<'_> {
    fn process(&mut self) -> Result<PointProcess, String> {
        random_process(self.kind, self.n, &mut self.rng).map_err(|e| e.to_string())
    }

    fn r(&self, default: usize) -> usize {
        self.params.r.unwrap_or(default)
    }

    /// A PSD contraction with diagonal at most `alpha`, its polynomial and its largest
    /// diagonal entry.
    fn kernel_matrix(&mut self) -> (DMatrix<f64>, MultiAffinePoly, f64) {
        let (k, g) = random_kernel_matrix(self.n, self.params.alpha, &mut self.rng);
        let alpha = k.diagonal().iter().copied().fold(0.0, f64::max).max(1e-6);
        (k, g, alpha)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Failure {
    pub invariant: &'static str,
    pub detail: String,
}

#[derive(Debug, Default)]
pub struct Check {
    metric: f64,
    source: Option<&'static str>,
    failures: Vec<Failure>,
    notes: Vec<String>,
}

impl Check {
    fn require(&mut self, invariant: &'static str, ok: bool, detail: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(Failure { invariant, detail: detail() });
        }
    }
}

pub struct Suite {
    pub name: &'static str,
    pub statement: &'static str,
    /// Largest ground set the suite accepts.
    pub max_n: usize,
    run: fn(&mut Instance, &mut Check) -> Result<(), String>,
}

pub const SUITES: &[Suite] = &[
    Suite { name: "gr-identity", statement: "g_r by enumeration of partitions equals g_r by differential operators", max_n: 5, run: gr_identity },
    Suite { name: "paving-bound", statement: "exhaustive paving meets the (sqrt(1/r - alpha/(r-1)) + sqrt(alpha))^2 bound", max_n: 6, run: paving_bound },
    Suite { name: "descent", statement: "interlacing-family descent ends at a leaf no worse than the root", max_n: 6, run: descent },
    Suite { name: "barrier-soundness", statement: "barrier iteration stays above the roots with non-increasing barriers", max_n: 4, run: barrier_soundness },
    Suite { name: "two-stage", statement: "two-stage paving of a zero-diagonal kernel meets the two-sided bound", max_n: 8, run: two_stage },
    Suite { name: "matrix-paving", statement: "part maxroots of chi[K] equal operator norms of principal submatrices", max_n: 8, run: matrix_paving_suite },
    Suite { name: "kernel-coeffs", statement: "kernel coefficients are signed inclusion probabilities", max_n: 8, run: kernel_coeffs },
    Suite { name: "kernel-classification", statement: "valid kernels are accepted and perturbed ones rejected", max_n: 6, run: kernel_classification },
    Suite { name: "size-law", statement: "|X| is a sum of independent Bernoulli(lambda_i)", max_n: 10, run: size_law },
    Suite { name: "entropy-bound", statement: "H(X) >= sum h(lambda_i), with equality exactly for product measures", max_n: 10, run: entropy_bound },
    Suite { name: "conditioning-interlacing", statement: "conditional kernel diagonals are in proper position", max_n: 10, run: conditioning_interlacing },
    Suite { name: "majorization-search", statement: "product law of the spectrum majorizes the pmf; determinantal instances must pass", max_n: 8, run: majorization_search },
    Suite { name: "hkpv-mixture", statement: "determinantal law is the mixture of its projection processes", max_n: 6, run: hkpv_mixture },
    Suite { name: "f-construction", statement: "specializations of F reproduce the spectra and lambda(g) is majorized by lambda(xi) + p", max_n: 5, run: f_construction },
    Suite { name: "sr-paving", statement: "every part of the entropy paving has gap below delta", max_n: 8, run: sr_paving_suite },
    Suite { name: "ab-lemmas", statement: "above-the-roots convexity, boundary lemma and cone direction invariance", max_n: 5, run: ab_lemmas },
];

#[derive(Debug, Serialize)]
pub struct InstanceRecord {
    pub index: usize,
    pub seed: u64,
    pub kind: String,
    pub n: usize,
    pub pass: bool,
    pub metric: f64,
    pub failures: Vec<Failure>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct SuiteReport {
    pub suite: &'static str,
    pub statement: &'static str,
    pub passed: usize,
    pub failed: usize,
    pub instances: Vec<InstanceRecord>,
}

/// Seed of instance `index` of suite number `suite`.
fn instance_seed(seed: u64, suite: usize, index: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ ((suite as u64) << 40) ^ index as u64
}

pub fn run_suite(suite: &Suite, params: &SuiteParams, count: usize) -> SuiteReport {
    let position = SUITES.iter().position(|s| s.name == suite.name).unwrap_or(0);
    let instances: Vec<InstanceRecord> = (0..count)
        .into_par_iter()
        .map(|index| {
            let seed = instance_seed(params.seed, position, index);
            let n = params.n.map_or(1 + index % suite.max_n, |n| n.min(suite.max_n));
            let kind = params.kind.unwrap_or(InstanceKind::ALL[index % InstanceKind::ALL.len()]);
            let mut inst = Instance { index, seed, n, kind, rng: ChaCha8Rng::seed_from_u64(seed), params };
            let mut check = Check::default();
            if let Err(e) = (suite.run)(&mut inst, &mut check) {
                check.failures.push(Failure { invariant: "domain-error", detail: e });
            }
            InstanceRecord {
                index,
                seed,
                kind: check.source.unwrap_or(kind.name()).to_string(),
                n,
                pass: check.failures.is_empty(),
                metric: check.metric,
                failures: check.failures,
                notes: check.notes,
            }
        })
        .collect();
    let failed = instances.iter().filter(|i| !i.pass).count();
    SuiteReport { suite: suite.name, statement: suite.statement, passed: instances.len() - failed, failed, instances }
}

fn text<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn gr_identity(inst: &mut Instance, c: &mut Check) -> Result<(), String> {
    let r = inst.r(2 + inst.index % 2);
    let g = inst.process()?.kernel_poly();
    let a = g_r_bruteforce(&g, r).map_err(text)?;
    let b = g_r_differential(&g, r).map_err(text)?;
    let scale = a.max_abs_coeff().max(b.max_abs_coeff()).max(1.0);
    let len = a.coeffs().len().max(b.coeffs().len());
    let gap = (0..len).map(|k| (a.coeff(k) - b.coeff(k)).abs()).fold(0.0, f64::max) / scale;
    c.metric = gap;
    c.require("gr-identity/coefficients", gap <= inst.params.tol, || format!("relative gap {gap:e} with r = {r}"));
    Ok(())
}

fn paving_bound(inst: &mut Instance, c: &mut Check) -> Result<(), String> {
    c.source = Some("matrix");
    let r = inst.r(2);
    let (k, g, alpha) = inst.kernel_matrix();
    let res = exhaustive_paving(&g, r, alpha).map_err(text)?;
    let worst = res.worst();
    c.metric = res.bound - worst;
    c.require("paving-bound/bound", res.certified, || format!("worst part maxroot {worst} > bound {}", res.bound));
    let oracle = res.partition.parts().iter().map(|&s| op_norm(&principal_submatrix(&k, s))).fold(0.0, f64::max);
    c.require("paving-bound/eigenvalue-oracle", (oracle - worst.max(0.0)).abs() <= inst.params.tol, || {
        format!("worst part maxroot {worst} but largest part norm {oracle}")
    });
    Ok(())
}

fn descent(inst: &mut Instance, c: &mut Check) -> Result<(), String> {
    c.source = Some("matrix");
    let r = inst.r(2);
    let tol = inst.params.tol;
    let (_, g, alpha) = inst.kernel_matrix();
    let out = interlacing_descent(&g, r, alpha, tol).map_err(text)?;
    let leaf = out.result.worst();
    c.metric = out.root_maxroot - leaf;
    c.require("descent/leaf-below-root", leaf <= out.root_maxroot + tol, || {
        format!("leaf maxroot {leaf} > root maxroot {}", out.root_maxroot)
    });
    let gap = out.trace.iter().map(|s| s.sum_gap).fold(0.0, f64::max);
    c.require("descent/node-sum", gap <= tol, || format!("node differs from the sum of its children by {gap:e}"));
    Ok(())
}

fn barrier_soundness(inst: &mut Instance, c: &mut Check) -> Result<(), String> {
    c.source = Some("matrix");
    let r = inst.r(2);
    let tol = inst.params.tol;
    let (_, g, alpha) = inst.kernel_matrix();
    let rep = certified_maxroot_bound(&g, r, alpha, BARRIER_GRID_POINTS).map_err(text)?;
    let rises = rep
        .runs
        .iter()
        .flat_map(|run| &run.steps)
        .flat_map(|s| s.phi_before.iter().zip(&s.phi_after))
        .filter(|(b, a)| **a > **b + BARRIER_MONOTONE_TOL * b.abs().max(1.0))
        .count();
    c.require("barrier-soundness/monotone", rises == 0, || format!("{rises} barrier values increased"));
    let gr = g_r_differential(&g, r).map_err(text)?;
    let maxroot = roots(&gr).map_err(text)?.max().unwrap_or(f64::NEG_INFINITY);
    c.metric = rep.bound - maxroot;
    c.require("barrier-soundness/lower", rep.bound >= maxroot - tol, || {
        format!("certified {} below maxroot(g_r) = {maxroot}", rep.bound)
    });
    c.require("barrier-soundness/upper", rep.bound <= rep.lr_bound + BARRIER_GRID_SLACK, || {
        format!("certified {} above the closed form {}", rep.bound, rep.lr_bound)
    });
    Ok(())
}

fn two_stage(inst: &mut Instance, c: &mut Check) -> Result<(), String> {
    let r = inst.r(4);
    let xi = centered_kernel(&inst.process()?).map_err(text)?;
    let res = two_stage_paving(&xi, r, 1.0).map_err(text)?;
    let worst = res.worst().max(0.0);
    c.metric = res.bound - worst;
    c.require("two-stage/bound", res.certified, || format!("max abs root {worst} > bound {}", res.bound));
    Ok(())
}

fn matrix_paving_suite(inst: &mut Instance, c: &mut Check) -> Result<(), String> {
    c.source = Some("matrix");
    let r = inst.r(2);
    let (k, _, alpha) = inst.kernel_matrix();
    let rep = matrix_paving(&k, r, alpha).map_err(text)?;
    c.metric = rep.max_norm_gap;
    c.require("matrix-paving/norm-equals-maxroot", rep.max_norm_gap <= inst.params.tol, || {
        format!("norm and maxroot differ by {:e}", rep.max_norm_gap)
    });
    Ok(())
}

fn kernel_coeffs(inst: &mut Instance, c: &mut Check) -> Result<(), String> {
    let x = inst.process()?;
    let n = x.n();
    let g = x.kernel_poly();
    let mut worst = 0.0f64;
    for a in 0..1usize << n {
        let incl: f64 = x.pmf().iter().enumerate().filter(|(s, _)| s & a == a).map(|(_, p)| p).sum();
        let want = if a.count_ones() % 2 == 1 { -incl } else { incl };
        worst = worst.max((g.kernel_coeff(SubsetMask(a as u32)) - want).abs());
    }
    c.require("kernel-coeffs/inclusion", worst <= ROUND_TRIP_TOL, || format!("coefficient off by {worst:e}"));
    let back = process_from_kernel(&g).map_err(text)?;
    let gap = back.pmf().iter().zip(x.pmf()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    c.metric = worst.max(gap);
    c.require("kernel-coeffs/round-trip", gap <= ROUND_TRIP_TOL, || format!("pmf changed by {gap:e}"));
    Ok(())
}

fn kernel_classification(inst: &mut Instance, c: &mut Check) -> Result<(), String> {
    let x = inst.process()?;
    let n = x.n();
    let g = x.kernel_poly();
    c.require("kernel-classification/valid-accepted", classify_kernel(&g).is_ok(), || {
        format!("rejected: {}", classify_kernel(&g).err().map(text).unwrap_or_default())
    });
    let rng = &mut inst.rng;
    let (what, bad) = match inst.index % 3 {
        0 => ("top coefficient", g.scale(1.0 + rng.random_range(0.05..0.5))),
        1 => {
            let lmin = roots(&g.diagonalize()).map_err(text)?.min().unwrap_or(0.0);
            ("root interval", g.shift(&vec![lmin + rng.random_range(0.05..0.3); n]).map_err(text)?)
        }
        _ => {
            let b = rng.random_range(1..1usize << n);
            let excess = x.pmf()[b] + rng.random_range(0.05..0.3);
            let sign = if b.count_ones() % 2 == 1 { -1.0 } else { 1.0 };
            let full = (1usize << n) - 1;
            let mut h = g.clone();
            let coeff = h.coeffs()[full ^ b];
            h.set_coeff(SubsetMask((full ^ b) as u32), coeff - sign * excess);
            ("reconstructed mass", h)
        }
    };
    c.require("kernel-classification/invalid-rejected", classify_kernel(&bad).is_err(), || {
        format!("{what} perturbation accepted")
    });
    Ok(())
}

fn size_law(inst: &mut Instance, c: &mut Check) -> Result<(), String> {
    let x = inst.process()?;
    let lambda = x.spectrum().map_err(text)?;
    let outside = lambda.iter().filter(|&&l| !(-SIZE_LAW_TOL..=1.0 + SIZE_LAW_TOL).contains(&l)).count();
    c.require("size-law/unit-interval", outside == 0, || format!("{outside} eigenvalues outside [0, 1]"));
    let want = bernoulli_convolution(lambda.as_slice());
    let got = x.size_distribution();
    let gap = want.iter().zip(&got).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    c.metric = gap;
    c.require("size-law/convolution", gap <= SIZE_LAW_TOL, || format!("size law off by {gap:e}"));
    Ok(())
}

fn is_product_measure(x: &PointProcess) -> bool {
    let p = x.marginals();
    x.pmf().iter().enumerate().all(|(s, &q)| {
        let prod: f64 = p.iter().enumerate().map(|(i, &pi)| if s >> i & 1 == 1 { pi } else { 1.0 - pi }).product();
        (prod - q).abs() <= PRODUCT_TOL
    })
}

fn entropy_bound(inst: &mut Instance, c: &mut Check) -> Result<(), String> {
    let x = inst.process()?;
    let rep = entropy_lower_bound_check(&x).map_err(text)?;
    let slack = rep.entropy - rep.spectral_bound;
    c.metric = slack;
    c.require("entropy-bound/spectral", rep.holds, || format!("H = {} < {}", rep.entropy, rep.spectral_bound));
    let equal = slack.abs() <= ENTROPY_TOL;
    let product = is_product_measure(&x);
    c.require("entropy-bound/equality-iff-product", equal == product, || {
        format!("slack {slack:e} on a {} measure", if product { "product" } else { "non-product" })
    });
    let aux = aux_entropy_checks(&x);
    c.require("entropy-bound/half-marginals", aux.marginal_bound_holds, || {
        format!("H = {} < {}", aux.entropy, aux.half_marginal_sum)
    });
    c.require("entropy-bound/covariance", aux.covariance_holds, || format!("covariance sums {:?}", aux.covariance_sums));
    Ok(())
}

fn conditioning_interlacing(inst: &mut Instance, c: &mut Check) -> Result<(), String> {
    let x = inst.process()?;
    let mut checked = 0;
    for (i, &p) in x.marginals().iter().enumerate() {
        if !(p > MARGINAL_WINDOW.0 && p < MARGINAL_WINDOW.1) {
            continue;
        }
        let (a, b) = conditioning_interlacing_check(&x, i, inst.params.tol).map_err(text)?;
        c.require("conditioning-interlacing/present", a, || format!("point {i}"));
        c.require("conditioning-interlacing/absent", b, || format!("point {i}"));
        checked += 1;
    }
    c.metric = checked as f64;
    Ok(())
}

fn majorization_search(inst: &mut Instance, c: &mut Check) -> Result<(), String> {
    let x = inst.process()?;
    let rep = majorization_conjecture_check(&x).map_err(text)?;
    c.metric = rep.margin;
    if !rep.majorizes {
        let kind = inst.kind;
        c.require("majorization-search/determinantal", kind != InstanceKind::Determinantal, || {
            format!("margin {:e}", rep.margin)
        });
        c.notes.push(format!(
            "counterexample with margin {:e}; reproduce with: stablepave gen --kind {} --n {} --seed {}",
            rep.margin,
            kind.name(),
            inst.n,
            inst.seed
        ));
    }
    Ok(())
}

fn hkpv_mixture(inst: &mut Instance, c: &mut Check) -> Result<(), String> {
    c.source = Some("matrix");
    let k = random_psd_contraction(inst.n, &mut inst.rng);
    let rep = hkpv_mixture_check(&k).map_err(text)?;
    c.metric = rep.max_deviation;
    c.require("hkpv-mixture/identity", rep.max_deviation <= inst.params.tol, || {
        format!("mixture deviates by {:e}", rep.max_deviation)
    });
    Ok(())
}

fn f_construction(inst: &mut Instance, c: &mut Check) -> Result<(), String> {
    let x = inst.process()?;
    let rep = f_specialization_check(&x).map_err(text)?;
    c.metric = rep.majorization_margin;
    c.require("f-construction/specializations", rep.max_specialization_gap <= inst.params.tol, || {
        format!("specialization gap {:e}", rep.max_specialization_gap)
    });
    c.require("f-construction/majorization", rep.majorizes, || format!("margin {:e}", rep.majorization_margin));
    Ok(())
}

fn sr_paving_suite(inst: &mut Instance, c: &mut Check) -> Result<(), String> {
    let delta = inst.params.delta;
    let eps = epsilon_for_delta(delta).map_err(text)?;
    let r = match inst.params.r {
        Some(r) => r,
        None => r_for_delta(delta).map_err(text)?,
    };
    let rep = sr_paving(&inst.process()?, r).map_err(text)?;
    c.metric = rep.max_gap();
    c.require("sr-paving/entropy-gap", rep.max_gap() < delta, || format!("gap {} >= delta {delta}", rep.max_gap()));
    c.require("sr-paving/root-norm", rep.max_rootnorm() <= eps + inst.params.tol, || {
        format!("root norm {} > epsilon {eps}", rep.max_rootnorm())
    });
    Ok(())
}

fn ab_lemmas(inst: &mut Instance, c: &mut Check) -> Result<(), String> {
    let n = inst.n;
    let (source, p) = match inst.index % 4 {
        0 => ("kernel", inst.process()?.kernel_poly()),
        1 => ("generating", inst.process()?.generating_poly()),
        2 => ("matrix", char_poly_matrix(&random_psd_contraction(n, &mut inst.rng))),
        _ => {
            let rng = &mut inst.rng;
            let f: Vec<(f64, f64)> = (0..n).map(|_| (rng.random_range(0.2..2.0), rng.random_range(-1.0..1.0))).collect();
            ("linear", MultiAffinePoly::product_of_linear(&f))
        }
    };
    c.source = Some(source);
    let seed = inst.seed;
    let a = ab_convexity_test(&p, AB_SAMPLES, seed).map_err(text)?;
    let b = boundary_lemma_test(&p, AB_SAMPLES, seed).map_err(text)?;
    c.require("ab-lemmas/convexity", a.holds(), || format!("{} of {} held", a.passed, a.tested));
    c.require("ab-lemmas/boundary", b.holds(), || format!("{} of {} held", b.passed, b.tested));
    let mut tested = a.tested + b.tested;
    if source == "kernel" || source == "matrix" {
        let h = homogenize_multiaffine(&p);
        let d = cone_direction_invariance(&h, 1, AB_SAMPLES, seed).map_err(text)?;
        c.require("ab-lemmas/cone-invariance", d.holds(), || format!("{} of {} pairs agreed", d.passed, d.tested));
        tested += d.tested;
    }
    c.metric = tested as f64;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> SuiteParams {
        SuiteParams { n: None, kind: None, r: None, alpha: 0.25, delta: 0.5, tol: 1e-8, seed: 7 }
    }

    #[test]
    fn names_are_unique() {
        let mut names: Vec<_> = SUITES.iter().map(|s| s.name).collect();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), SUITES.len());
    }

    #[test]
    fn every_suite_passes_a_few_instances() {
        let p = params();
        for s in SUITES {
            let rep = run_suite(s, &p, 5);
            let failures: Vec<_> = rep.instances.iter().flat_map(|i| &i.failures).collect();
            assert_eq!(rep.failed, 0, "{}: {failures:?}", s.name);
        }
    }

    #[test]
    fn runs_are_deterministic() {
        let p = params();
        let suite = SUITES.iter().find(|s| s.name == "size-law").unwrap();
        let a = serde_json::to_string(&run_suite(suite, &p, 8)).unwrap();
        let b = serde_json::to_string(&run_suite(suite, &p, 8)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn instances_reproduce_from_their_seed() {
        let p = SuiteParams { n: Some(4), ..params() };
        let suite = SUITES.iter().find(|s| s.name == "size-law").unwrap();
        let rep = run_suite(suite, &p, 3);
        for rec in &rep.instances {
            let kind: InstanceKind = rec.kind.parse().unwrap();
            let x = random_process(kind, rec.n, &mut ChaCha8Rng::seed_from_u64(rec.seed)).unwrap();
            let want = bernoulli_convolution(x.spectrum().unwrap().as_slice());
            let gap = want.iter().zip(&x.size_distribution()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            assert_eq!(gap, rec.metric);
        }
    }
}
