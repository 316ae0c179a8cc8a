//! JSON and CSV report records.

use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;

use stablepave::paving::{PavingMethod, PavingResult};

use crate::suites::{SuiteParams, SuiteReport};

/// Paving outcome restricted to the nonempty parts, points numbered from 0.
#[derive(Debug, Serialize)]
pub struct PavingReport {
    pub method: PavingMethod,
    pub r: usize,
    pub alpha: Option<f64>,
    pub lambda: Option<f64>,
    pub bound: f64,
    pub partition: Vec<Vec<usize>>,
    pub per_part_maxroot: Vec<f64>,
    pub certified: bool,
    pub runtime_ms: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_part_max_abs_root: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub norms: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub entropy_gaps: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(skip)]
    nonempty: Vec<usize>,
}

impl PavingReport {
    pub fn new(res: &PavingResult, r: usize, alpha: Option<f64>, lambda: Option<f64>, runtime_ms: f64) -> Self {
        let nonempty: Vec<usize> = (0..res.partition.r()).filter(|&i| !res.partition.parts()[i].is_empty()).collect();
        let abs = res.per_part_max_abs_root();
        let pick = |v: &[Option<f64>]| nonempty.iter().map(|&i| v[i].unwrap_or(0.0)).collect::<Vec<_>>();
        Self {
            method: res.method,
            r,
            alpha,
            lambda,
            bound: res.bound,
            partition: res.partition.to_index_lists(),
            per_part_maxroot: pick(&res.per_part_maxroot),
            certified: res.certified,
            runtime_ms,
            per_part_max_abs_root: matches!(res.method, PavingMethod::TwoStage).then(|| pick(&abs)),
            norms: None,
            entropy_gaps: None,
            delta: None,
            epsilon: None,
            nonempty,
        }
    }

    /// Entries of a per-part vector of `res` that belong to nonempty parts.
    pub fn select(&self, res: &PavingResult, per_part: &[f64]) -> Vec<f64> {
        debug_assert_eq!(per_part.len(), res.partition.r());
        self.nonempty.iter().map(|&i| per_part[i]).collect()
    }
}

#[derive(Debug, Serialize)]
pub struct ConfigEcho {
    pub suites: Vec<String>,
    pub count: usize,
    pub n: Option<usize>,
    pub kind: Option<String>,
    pub r: Option<usize>,
    pub alpha: f64,
    pub delta: f64,
    pub tol: f64,
    pub seed: u64,
}

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub config: ConfigEcho,
    pub suites: Vec<SuiteReport>,
    pub passed: usize,
    pub failed: usize,
    pub runtime_ms: f64,
}

#[derive(Debug, Serialize)]
struct CsvRow<'a> {
    suite: &'a str,
    index: usize,
    seed: u64,
    kind: &'a str,
    n: usize,
    pass: bool,
    metric: f64,
    invariant: &'a str,
}

impl RunReport {
    pub fn new(p: &SuiteParams, count: usize, suites: Vec<SuiteReport>, runtime_ms: f64) -> Self {
        let passed = suites.iter().map(|s| s.passed).sum();
        let failed = suites.iter().map(|s| s.failed).sum();
        Self {
            config: ConfigEcho {
                suites: suites.iter().map(|s| s.suite.to_string()).collect(),
                count,
                n: p.n,
                kind: p.kind.map(|k| k.name().to_string()),
                r: p.r,
                alpha: p.alpha,
                delta: p.delta,
                tol: p.tol,
                seed: p.seed,
            },
            suites,
            passed,
            failed,
            runtime_ms,
        }
    }

    /// One row per instance; `invariant` names the first violated invariant, if any.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
        for s in &self.suites {
            for inst in &s.instances {
                w.serialize(CsvRow {
                    suite: s.suite,
                    index: inst.index,
                    seed: inst.seed,
                    kind: &inst.kind,
                    n: inst.n,
                    pass: inst.pass,
                    metric: inst.metric,
                    invariant: inst.failures.first().map_or("", |f| f.invariant),
                })?;
            }
        }
        w.flush()?;
        Ok(())
    }
}
