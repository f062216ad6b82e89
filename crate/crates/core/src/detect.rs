//! Spectral community detection and label scoring.

use std::str::FromStr;

use itertools::Itertools;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::eigen::{top_eigs, Which, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::graph::LabelVector;
use crate::operator::LinearOperator;
use crate::rng;

/// Two-way split by sign: community 0 where `v_i >= 0`, community 1 where
/// `v_i < 0`.
pub fn sign_partition(v: &[f64]) -> LabelVector {
    let labels: Vec<usize> = v.iter().map(|&x| usize::from(x < 0.0)).collect();
    LabelVector::new(labels, 2).expect("labels are 0 or 1")
}

/// Which eigenvectors [`spectral_cluster`] uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpectralMode {
    /// Sign of the eigenvector for the second smallest eigenvalue.
    AdjacencySecondSmallest,
    /// Sign of the eigenvector for the second largest eigenvalue.
    AdjacencySecondLargest,
    /// Sign of the eigenvector for the second largest eigenvalue of a
    /// normalized Laplacian.
    LaplacianSecondLargest,
    /// k-means on the rows of the top-`K` eigenvector matrix.
    TopKEmbedding,
}

impl FromStr for SpectralMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "adjacency-second-smallest" => Ok(SpectralMode::AdjacencySecondSmallest),
            "adjacency-second-largest" => Ok(SpectralMode::AdjacencySecondLargest),
            "laplacian-second-largest" => Ok(SpectralMode::LaplacianSecondLargest),
            "top-k-embedding" => Ok(SpectralMode::TopKEmbedding),
            other => Err(Error::param(format!("unknown spectral mode `{other}`"))),
        }
    }
}

/// Clusters the nodes of `op` into `k` communities.
pub fn spectral_cluster(op: &dyn LinearOperator, k: usize, mode: SpectralMode, seed: u64) -> Result<LabelVector> {
    if k < 2 {
        return Err(Error::param("need at least two communities"));
    }
    let sign_mode = |which: Which| -> Result<LabelVector> {
        if k != 2 {
            return Err(Error::param("sign-based modes split into exactly two communities"));
        }
        let pairs = top_eigs(op, 2, which, DEFAULT_TOL, seed)?;
        Ok(sign_partition(&pairs[1].vector))
    };
    match mode {
        SpectralMode::AdjacencySecondSmallest => sign_mode(Which::SmallestAlgebraic),
        SpectralMode::AdjacencySecondLargest | SpectralMode::LaplacianSecondLargest => {
            sign_mode(Which::LargestAlgebraic)
        }
        SpectralMode::TopKEmbedding => {
            let pairs = top_eigs(op, k, Which::LargestAlgebraic, DEFAULT_TOL, seed)?;
            let n = op.dim();
            let rows: Vec<Vec<f64>> = (0..n).map(|i| pairs.iter().map(|p| p.vector[i]).collect()).collect();
            Ok(kmeans(&rows, k, &KMeansOptions::default(), rng::derive_seed(seed, &[0x6b6d]))?.labels)
        }
    }
}

/// Fraction of nodes whose labels disagree, minimized over relabelings of
/// `estimate`. Exact permutation search for `K <= 8`, Hungarian assignment
/// on the confusion matrix beyond that.
pub fn misclassification_rate(estimate: &LabelVector, truth: &LabelVector) -> Result<f64> {
    let n = truth.len();
    if estimate.len() != n {
        return Err(Error::param(format!(
            "label vectors differ in length: {} vs {n}",
            estimate.len()
        )));
    }
    if n == 0 {
        return Ok(0.0);
    }
    let k = estimate.k().max(truth.k());
    let mut confusion = vec![vec![0i64; k]; k];
    for (&e, &t) in estimate.as_slice().iter().zip(truth.as_slice()) {
        confusion[e][t] += 1;
    }
    let matched = if k <= 8 {
        (0..k)
            .permutations(k)
            .map(|perm| perm.iter().enumerate().map(|(e, &t)| confusion[e][t]).sum::<i64>())
            .max()
            .unwrap_or(0)
    } else {
        let weights = pathfinding::matrix::Matrix::from_rows(confusion)
            .map_err(|e| Error::param(format!("confusion matrix: {e:?}")))?;
        pathfinding::kuhn_munkres::kuhn_munkres(&weights).0
    };
    Ok((n as i64 - matched) as f64 / n as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KMeansOptions {
    pub restarts: usize,
    pub max_iter: usize,
}

impl Default for KMeansOptions {
    fn default() -> Self {
        KMeansOptions {
            restarts: 20,
            max_iter: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansResult {
    pub labels: LabelVector,
    pub centers: Vec<Vec<f64>>,
    pub inertia: f64,
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// k-means++ seeding followed by Lloyd iterations, best of `restarts`.
pub fn kmeans(points: &[Vec<f64>], k: usize, opts: &KMeansOptions, seed: u64) -> Result<KMeansResult> {
    let n = points.len();
    if k == 0 || k > n {
        return Err(Error::param(format!("k = {k} must lie in 1..={n}")));
    }
    let mut best: Option<KMeansResult> = None;
    for restart in 0..opts.restarts.max(1) {
        let mut rng = rng::stream(seed, restart as u64);
        let mut centers: Vec<Vec<f64>> = vec![points[rng.random_range(0..n)].clone()];
        let mut d2: Vec<f64> = points.iter().map(|p| sq_dist(p, &centers[0])).collect();
        while centers.len() < k {
            let total: f64 = d2.iter().sum();
            let next = if total > 0.0 {
                let target = rng.random::<f64>() * total;
                let mut acc = 0.0;
                d2.iter()
                    .position(|&d| {
                        acc += d;
                        acc > target
                    })
                    .unwrap_or(n - 1)
            } else {
                rng.random_range(0..n)
            };
            centers.push(points[next].clone());
            for (d, p) in d2.iter_mut().zip(points) {
                *d = d.min(sq_dist(p, centers.last().unwrap()));
            }
        }

        let mut assign = vec![0usize; n];
        for iter in 0..opts.max_iter {
            let mut changed = false;
            for (i, p) in points.iter().enumerate() {
                let c = (0..k)
                    .min_by(|&a, &b| sq_dist(p, &centers[a]).total_cmp(&sq_dist(p, &centers[b])))
                    .unwrap();
                if c != assign[i] || iter == 0 {
                    changed |= c != assign[i];
                    assign[i] = c;
                }
            }
            let dim = points[0].len();
            let mut sums = vec![vec![0.0; dim]; k];
            let mut counts = vec![0usize; k];
            for (p, &c) in points.iter().zip(&assign) {
                counts[c] += 1;
                for (s, x) in sums[c].iter_mut().zip(p) {
                    *s += x;
                }
            }
            for c in 0..k {
                if counts[c] > 0 {
                    centers[c] = sums[c].iter().map(|s| s / counts[c] as f64).collect();
                }
            }
            if !changed && iter > 0 {
                break;
            }
        }
        let inertia: f64 = points.iter().zip(&assign).map(|(p, &c)| sq_dist(p, &centers[c])).sum();
        if best.as_ref().is_none_or(|b| inertia < b.inertia) {
            best = Some(KMeansResult {
                labels: LabelVector::new(assign, k)?,
                centers,
                inertia,
            });
        }
    }
    Ok(best.expect("at least one restart"))
}
