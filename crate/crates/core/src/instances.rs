//! Random instances for sweeps and the command-line generator.

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::multiaffine::MultiAffinePoly;
use crate::process::generators::{external_field, independent, random_psd_contraction, ust_edges};
use crate::process::{determinantal_process, PointProcess, ProcessError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InstanceKind {
    Independent,
    Determinantal,
    Ust,
    Conditioned,
    Field,
}

impl InstanceKind {
    pub const ALL: [InstanceKind; 5] = [
        InstanceKind::Independent,
        InstanceKind::Determinantal,
        InstanceKind::Ust,
        InstanceKind::Conditioned,
        InstanceKind::Field,
    ];

    pub fn name(self) -> &'static str {
        match self {
            InstanceKind::Independent => "independent",
            InstanceKind::Determinantal => "determinantal",
            InstanceKind::Ust => "ust",
            InstanceKind::Conditioned => "conditioned",
            InstanceKind::Field => "field",
        }
    }
}

impl std::str::FromStr for InstanceKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Self::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| format!("unknown instance kind {s:?}"))
    }
}

/// Edges of a random connected simple graph with exactly `m` edges.
pub fn random_connected_graph<R: Rng + ?Sized>(m: usize, rng: &mut R) -> (usize, Vec<(usize, usize)>) {
    let min_v = (2..).find(|&v: &usize| v * (v - 1) / 2 >= m).unwrap_or(2);
    let v = rng.random_range(min_v..=(m + 1).max(min_v));
    let mut order: Vec<usize> = (0..v).collect();
    order.shuffle(rng);
    let mut edges: Vec<(usize, usize)> = (1..v).map(|i| (order[rng.random_range(0..i)], order[i])).collect();
    let mut rest: Vec<(usize, usize)> = (0..v)
        .flat_map(|a| (a + 1..v).map(move |b| (a, b)))
        .filter(|&(a, b)| !edges.iter().any(|&(x, y)| (x.min(y), x.max(y)) == (a, b)))
        .collect();
    rest.shuffle(rng);
    edges.extend(rest.into_iter().take(m.saturating_sub(v - 1)));
    edges.truncate(m);
    edges.shuffle(rng);
    (v, edges)
}

/// Edges of the complete graph on `v` vertices.
pub fn complete_graph(v: usize) -> Vec<(usize, usize)> {
    (0..v).flat_map(|a| (a + 1..v).map(move |b| (a, b))).collect()
}

/// A random strongly Rayleigh process on `n` points of the given kind.
pub fn random_process<R: Rng + ?Sized>(kind: InstanceKind, n: usize, rng: &mut R) -> Result<PointProcess, ProcessError> {
    match kind {
        InstanceKind::Independent => {
            let p: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
            independent(&p)
        }
        InstanceKind::Determinantal => determinantal_process(&random_psd_contraction(n, rng)),
        InstanceKind::Ust => {
            if n == 0 {
                return independent(&[]);
            }
            let (v, edges) = random_connected_graph(n, rng);
            ust_edges(v, &edges)
        }
        InstanceKind::Conditioned => {
            let extra = rng.random_range(1..=2usize);
            let mut x = determinantal_process(&random_psd_contraction(n + extra, rng))?;
            for _ in 0..extra {
                let i = rng.random_range(0..x.n());
                let p = x.marginals()[i];
                let present = rng.random::<f64>() < p;
                x = match x.condition(i, present) {
                    Ok(y) => y,
                    Err(_) => x.condition(i, !present)?,
                };
            }
            Ok(x)
        }
        InstanceKind::Field => {
            let x = determinantal_process(&random_psd_contraction(n, rng))?;
            let w: Vec<f64> = (0..n).map(|_| (rng.random_range(-1.5f64..1.5)).exp()).collect();
            external_field(&x, &w)
        }
    }
}

/// Random PSD contraction with diagonal at most `alpha` together with `chi[K]`.
pub fn random_kernel_matrix<R: Rng + ?Sized>(n: usize, alpha: f64, rng: &mut R) -> (DMatrix<f64>, MultiAffinePoly) {
    let k = crate::process::generators::random_contraction_with_diag(n, alpha, rng);
    let g = crate::matrix::char_poly_matrix(&k);
    (k, g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn graphs_have_the_requested_size() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for m in 1..12 {
            let (v, e) = random_connected_graph(m, &mut rng);
            assert_eq!(e.len(), m);
            assert!(ust_edges(v, &e).is_ok());
        }
    }

    #[test]
    fn complete_graph_on_four_vertices() {
        let x = ust_edges(4, &complete_graph(4)).unwrap();
        assert_eq!(x.support().len(), 16);
    }

    #[test]
    fn every_kind_is_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for kind in InstanceKind::ALL {
            for n in 1..=6 {
                let x = random_process(kind, n, &mut rng).unwrap();
                assert_eq!(x.n(), n);
                assert_eq!(kind.name().parse::<InstanceKind>().unwrap(), kind);
            }
        }
    }
}
