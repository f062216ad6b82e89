//! Random graph models with independent edges and their expectation matrices.
//!
//! Every model here is an inhomogeneous Erdős–Rényi model once community
//! labels (or latent positions) are fixed: edge `{i, j}` appears independently
//! with probability `P_ij`, and `P` is exposed through [`ExpectedMatrix`].
//!
//! Sampling walks the upper triangle row by row. Row `i` draws from its own
//! ChaCha stream keyed by `(seed, i)`, so rows can be generated in parallel
//! and the output does not depend on the thread count. Block-constant rows
//! are sampled by geometric skipping, which keeps sparse graphs at
//! `O(n + |E|)` work.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, LabelVector};
use crate::rng;

/// Monotone non-increasing map from latent distance to edge probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Kernel {
    /// `exp(-dist / scale)`
    Exponential { scale: f64 },
    /// `exp(-(dist / scale)^2)`
    Gaussian { scale: f64 },
    /// `1 / (1 + dist / scale)`
    Inverse { scale: f64 },
}

impl Default for Kernel {
    fn default() -> Self {
        Kernel::Exponential { scale: 1.0 }
    }
}

impl Kernel {
    pub fn eval(&self, dist: f64) -> f64 {
        match *self {
            Kernel::Exponential { scale } => (-dist / scale).exp(),
            Kernel::Gaussian { scale } => (-(dist / scale).powi(2)).exp(),
            Kernel::Inverse { scale } => 1.0 / (1.0 + dist / scale),
        }
    }

    fn scale(&self) -> f64 {
        match *self {
            Kernel::Exponential { scale } | Kernel::Gaussian { scale } | Kernel::Inverse { scale } => scale,
        }
    }
}

/// A generative model. The node count is supplied at sampling time; models
/// with per-node parameters (`Dcsbm`, `Lsm`, `Ierm`) must match it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum ModelSpec {
    ErdosRenyi {
        p: f64,
    },
    /// Balanced two-community model with within probability `a/n` and
    /// across probability `b/n`.
    PlantedPartition {
        a: f64,
        b: f64,
    },
    Sbm {
        pi: Vec<f64>,
        b: Vec<Vec<f64>>,
    },
    Dcsbm {
        pi: Vec<f64>,
        b: Vec<Vec<f64>>,
        theta: Vec<f64>,
    },
    Lsm {
        positions: Vec<Vec<f64>>,
        #[serde(default)]
        kernel: Kernel,
    },
    Ierm {
        p: Vec<Vec<f64>>,
    },
}

fn check_prob(name: &str, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::param(format!("{name} = {p} is not a probability")))
    }
}

fn check_block_matrix(pi: &[f64], b: &[Vec<f64>]) -> Result<()> {
    let k = pi.len();
    if k == 0 {
        return Err(Error::param("community proportions are empty"));
    }
    if pi.iter().any(|&x| !(x >= 0.0)) {
        return Err(Error::param("community proportions must be non-negative"));
    }
    if (pi.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
        return Err(Error::param("community proportions must sum to 1"));
    }
    if b.len() != k || b.iter().any(|row| row.len() != k) {
        return Err(Error::param(format!("block matrix must be {k}x{k}")));
    }
    for r in 0..k {
        for c in 0..k {
            check_prob(&format!("B[{r}][{c}]"), b[r][c])?;
            if b[r][c] != b[c][r] {
                return Err(Error::param("block matrix must be symmetric"));
            }
        }
    }
    Ok(())
}

impl ModelSpec {
    /// Number of communities the model assigns.
    pub fn communities(&self) -> usize {
        match self {
            ModelSpec::PlantedPartition { .. } => 2,
            ModelSpec::Sbm { pi, .. } | ModelSpec::Dcsbm { pi, .. } => pi.len(),
            _ => 1,
        }
    }

    /// Checks parameter ranges and shapes for a graph on `n` nodes. The
    /// degree-corrected pair constraint depends on the labels and is checked
    /// by [`expected_matrix`].
    pub fn validate(&self, n: usize) -> Result<()> {
        if n == 0 {
            return Err(Error::param("n must be at least 1"));
        }
        match self {
            ModelSpec::ErdosRenyi { p } => check_prob("p", *p),
            ModelSpec::PlantedPartition { a, b } => {
                check_prob("a/n", a / n as f64)?;
                check_prob("b/n", b / n as f64)
            }
            ModelSpec::Sbm { pi, b } => check_block_matrix(pi, b),
            ModelSpec::Dcsbm { pi, b, theta } => {
                check_block_matrix(pi, b)?;
                if theta.len() != n {
                    return Err(Error::param(format!("theta has {} entries, expected {n}", theta.len())));
                }
                if theta.iter().any(|&t| !(t > 0.0 && t.is_finite())) {
                    return Err(Error::param("theta entries must be positive"));
                }
                Ok(())
            }
            ModelSpec::Lsm { positions, kernel } => {
                if positions.len() != n {
                    return Err(Error::param(format!("{} positions given, expected {n}", positions.len())));
                }
                let dim = positions[0].len();
                if positions.iter().any(|x| x.len() != dim) {
                    return Err(Error::param("latent positions must share one dimension"));
                }
                if !(kernel.scale() > 0.0) {
                    return Err(Error::param("kernel scale must be positive"));
                }
                Ok(())
            }
            ModelSpec::Ierm { p } => {
                if p.len() != n || p.iter().any(|row| row.len() != n) {
                    return Err(Error::param(format!("P must be {n}x{n}")));
                }
                for i in 0..n {
                    if p[i][i] != 0.0 {
                        return Err(Error::param("P must have a zero diagonal"));
                    }
                    for j in 0..n {
                        check_prob(&format!("P[{i}][{j}]"), p[i][j])?;
                        if p[i][j] != p[j][i] {
                            return Err(Error::param("P must be symmetric"));
                        }
                    }
                }
                Ok(())
            }
        }
    }

    /// Labels for the model: drawn i.i.d. from `pi` for (DC)SBM, the fixed
    /// balanced split for the planted partition, a single community otherwise.
    pub fn draw_labels(&self, n: usize, seed: u64) -> LabelVector {
        match self {
            ModelSpec::PlantedPartition { .. } => LabelVector::balanced_halves(n),
            ModelSpec::Sbm { pi, .. } | ModelSpec::Dcsbm { pi, .. } => {
                let mut rng = rng::stream(seed, rng::LABEL_STREAM);
                let cumulative: Vec<f64> = pi
                    .iter()
                    .scan(0.0, |acc, &x| {
                        *acc += x;
                        Some(*acc)
                    })
                    .collect();
                let labels = (0..n)
                    .map(|_| {
                        let u: f64 = rng.random::<f64>() * cumulative[pi.len() - 1];
                        cumulative.iter().position(|&c| u < c).unwrap_or(pi.len() - 1)
                    })
                    .collect();
                LabelVector::new(labels, pi.len()).expect("drawn labels are in range")
            }
            _ => LabelVector::uniform(n),
        }
    }
}

/// The expectation `P = E[A]` of a model, kept in structured form where the
/// model allows it. The diagonal is always zero.
#[derive(Debug, Clone, PartialEq)]
pub enum ExpectedMatrix {
    /// `P_ij = theta_i theta_j B[c_i][c_j]` for `i != j`.
    Block(BlockExpectation),
    Dense(DenseExpectation),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockExpectation {
    labels: Vec<usize>,
    k: usize,
    /// Row-major `k x k`.
    probs: Vec<f64>,
    theta: Option<Vec<f64>>,
    /// Node indices per community, increasing.
    members: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenseExpectation {
    n: usize,
    /// Row-major `n x n`.
    p: Vec<f64>,
}

impl BlockExpectation {
    pub fn new(labels: &LabelVector, b: &[Vec<f64>], theta: Option<Vec<f64>>) -> Result<Self> {
        let k = b.len();
        if labels.k() > k {
            return Err(Error::param(format!(
                "labels use {} communities but the block matrix has {k}",
                labels.k()
            )));
        }
        if let Some(t) = &theta {
            if t.len() != labels.len() {
                return Err(Error::param("theta length differs from label length"));
            }
        }
        let mut members = vec![Vec::new(); k];
        for (i, &c) in labels.as_slice().iter().enumerate() {
            members[c].push(i);
        }
        let probs = b.iter().flat_map(|row| row.iter().copied()).collect();
        Ok(BlockExpectation {
            labels: labels.as_slice().to_vec(),
            k,
            probs,
            theta,
            members,
        })
    }

    fn theta(&self, i: usize) -> f64 {
        self.theta.as_ref().map_or(1.0, |t| t[i])
    }

    fn block(&self, r: usize, c: usize) -> f64 {
        self.probs[r * self.k + c]
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// Largest off-diagonal entry; used to validate `theta_i theta_j B <= 1`.
    fn max_entry(&self) -> f64 {
        // Top two theta values per community suffice: the largest pair within
        // a community needs two distinct nodes.
        let top: Vec<[f64; 2]> = self
            .members
            .iter()
            .map(|m| {
                let mut best = [f64::NEG_INFINITY; 2];
                for &i in m {
                    let t = self.theta(i);
                    if t > best[0] {
                        best = [t, best[0]];
                    } else if t > best[1] {
                        best[1] = t;
                    }
                }
                best
            })
            .collect();
        let mut max = 0.0f64;
        for r in 0..self.k {
            for c in r..self.k {
                let v = if r == c {
                    top[r][0] * top[r][1]
                } else {
                    top[r][0] * top[c][0]
                };
                if v.is_finite() {
                    max = max.max(v * self.block(r, c));
                }
            }
        }
        max
    }
}

impl ExpectedMatrix {
    pub fn n(&self) -> usize {
        match self {
            ExpectedMatrix::Block(b) => b.labels.len(),
            ExpectedMatrix::Dense(d) => d.n,
        }
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return 0.0;
        }
        match self {
            ExpectedMatrix::Block(b) => b.theta(i) * b.theta(j) * b.block(b.labels[i], b.labels[j]),
            ExpectedMatrix::Dense(d) => d.p[i * d.n + j],
        }
    }

    /// `y = P x`.
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        match self {
            ExpectedMatrix::Block(b) => {
                let mut sums = vec![0.0; b.k];
                for (i, &xi) in x.iter().enumerate() {
                    sums[b.labels[i]] += b.theta(i) * xi;
                }
                for (i, yi) in y.iter_mut().enumerate() {
                    let c = b.labels[i];
                    let t = b.theta(i);
                    let mut acc = 0.0;
                    for (l, s) in sums.iter().enumerate() {
                        acc += b.block(c, l) * s;
                    }
                    *yi = t * acc - t * t * b.block(c, c) * x[i];
                }
            }
            ExpectedMatrix::Dense(d) => {
                for (i, yi) in y.iter_mut().enumerate() {
                    let row = &d.p[i * d.n..(i + 1) * d.n];
                    *yi = row.iter().zip(x).map(|(p, v)| p * v).sum();
                }
            }
        }
    }

    /// Expected degrees `sum_j P_ij`.
    pub fn row_sums(&self) -> Vec<f64> {
        let ones = vec![1.0; self.n()];
        let mut out = vec![0.0; self.n()];
        self.matvec(&ones, &mut out);
        out
    }

    pub fn max_entry(&self) -> f64 {
        match self {
            ExpectedMatrix::Block(b) => b.max_entry(),
            ExpectedMatrix::Dense(d) => d.p.iter().copied().fold(0.0, f64::max),
        }
    }

    /// Both expected-degree conventions: the largest row sum, and `n` times
    /// the largest entry.
    pub fn max_expected_degree(&self) -> ExpectedDegree {
        ExpectedDegree {
            max_row_sum: self.row_sums().into_iter().fold(0.0, f64::max),
            n_max_entry: self.n() as f64 * self.max_entry(),
        }
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let n = self.n();
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                out[i * n + j] = self.entry(i, j);
            }
        }
        out
    }

    pub(crate) fn block_parts(b: &BlockExpectation) -> (&[usize], usize, &[f64], Option<&[f64]>) {
        (&b.labels, b.k, &b.probs, b.theta.as_deref())
    }
}

/// Expected-degree conventions; callers choose which one a bound needs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpectedDegree {
    /// `max_i sum_j P_ij`
    pub max_row_sum: f64,
    /// `n * max_ij P_ij`
    pub n_max_entry: f64,
}

/// Expectation matrix of `spec` conditioned on `labels`.
pub fn expected_matrix(spec: &ModelSpec, labels: &LabelVector) -> Result<ExpectedMatrix> {
    let n = labels.len();
    spec.validate(n)?;
    if labels.k() > spec.communities() {
        return Err(Error::param(format!(
            "labels use {} communities, model has {}",
            labels.k(),
            spec.communities()
        )));
    }
    let nf = n as f64;
    let m = match spec {
        ModelSpec::ErdosRenyi { p } => ExpectedMatrix::Block(BlockExpectation::new(
            &LabelVector::uniform(n),
            &[vec![*p]],
            None,
        )?),
        ModelSpec::PlantedPartition { a, b } => {
            let (w, x) = (a / nf, b / nf);
            ExpectedMatrix::Block(BlockExpectation::new(labels, &[vec![w, x], vec![x, w]], None)?)
        }
        ModelSpec::Sbm { b, .. } => ExpectedMatrix::Block(BlockExpectation::new(labels, b, None)?),
        ModelSpec::Dcsbm { b, theta, .. } => {
            let e = BlockExpectation::new(labels, b, Some(theta.clone()))?;
            let max = e.max_entry();
            if max > 1.0 {
                return Err(Error::param(format!(
                    "degree-corrected edge probability reaches {max} > 1"
                )));
            }
            ExpectedMatrix::Block(e)
        }
        ModelSpec::Lsm { positions, kernel } => {
            let mut p = vec![0.0; n * n];
            for i in 0..n {
                for j in (i + 1)..n {
                    let dist = positions[i]
                        .iter()
                        .zip(&positions[j])
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum::<f64>()
                        .sqrt();
                    let v = kernel.eval(dist).clamp(0.0, 1.0);
                    p[i * n + j] = v;
                    p[j * n + i] = v;
                }
            }
            ExpectedMatrix::Dense(DenseExpectation { n, p })
        }
        ModelSpec::Ierm { p } => ExpectedMatrix::Dense(DenseExpectation {
            n,
            p: p.iter().flat_map(|row| row.iter().copied()).collect(),
        }),
    };
    Ok(m)
}

/// Both expected-degree conventions for `spec` under `labels`.
pub fn max_expected_degree(spec: &ModelSpec, labels: &LabelVector) -> Result<ExpectedDegree> {
    Ok(expected_matrix(spec, labels)?.max_expected_degree())
}

/// Samples a graph on `n` nodes together with its community labels.
///
/// Each upper-triangle entry is an independent Bernoulli(`P_ij`) draw.
/// Identical `(spec, n, seed)` always produce identical output.
pub fn sample(spec: &ModelSpec, n: usize, seed: u64) -> Result<(Graph, LabelVector)> {
    spec.validate(n)?;
    let labels = spec.draw_labels(n, seed);
    let expected = expected_matrix(spec, &labels)?;
    let graph = sample_expected(&expected, seed);
    Ok((graph, labels))
}

/// Samples one realization of an inhomogeneous model with mean `expected`.
pub fn sample_expected(expected: &ExpectedMatrix, seed: u64) -> Graph {
    let n = expected.n();
    let rows: Vec<Vec<(usize, usize, f64)>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng::stream(seed, i as u64);
            let mut out = Vec::new();
            match expected {
                ExpectedMatrix::Block(b) => sample_block_row(b, i, &mut rng, &mut out),
                ExpectedMatrix::Dense(d) => {
                    for j in (i + 1)..n {
                        let p = d.p[i * n + j];
                        if p > 0.0 && rng.random::<f64>() < p {
                            out.push((i, j, 1.0));
                        }
                    }
                }
            }
            out
        })
        .collect();
    let upper: Vec<(usize, usize, f64)> = rows.into_iter().flatten().collect();
    Graph::from_sorted_upper(n, &upper)
}

/// Row `i` of a block model: for each community, walk the members with index
/// above `i` using geometric gaps at the block's envelope probability, then
/// thin by `theta_j / theta_max` for degree-corrected blocks.
fn sample_block_row(b: &BlockExpectation, i: usize, rng: &mut ChaCha8Rng, out: &mut Vec<(usize, usize, f64)>) {
    let ci = b.labels[i];
    let ti = b.theta(i);
    let mut hits: Vec<usize> = Vec::new();
    for (c, members) in b.members.iter().enumerate() {
        let start = members.partition_point(|&j| j <= i);
        let cols = &members[start..];
        if cols.is_empty() {
            continue;
        }
        let theta_max = match &b.theta {
            Some(t) => cols.iter().map(|&j| t[j]).fold(0.0, f64::max),
            None => 1.0,
        };
        let envelope = (ti * theta_max * b.block(ci, c)).min(1.0);
        if envelope <= 0.0 {
            continue;
        }
        let mut pos = 0usize;
        loop {
            let skip = geometric_skip(rng, envelope);
            pos = match pos.checked_add(skip) {
                Some(p) if p < cols.len() => p,
                _ => break,
            };
            let j = cols[pos];
            let accept = match &b.theta {
                Some(t) => t[j] >= theta_max || rng.random::<f64>() * theta_max < t[j],
                None => true,
            };
            if accept {
                hits.push(j);
            }
            pos += 1;
        }
    }
    hits.sort_unstable();
    out.extend(hits.into_iter().map(|j| (i, j, 1.0)));
}

/// Number of failures before the next success of a Bernoulli(`p`) sequence.
fn geometric_skip(rng: &mut ChaCha8Rng, p: f64) -> usize {
    if p >= 1.0 {
        return 0;
    }
    // u in (0, 1]
    let u: f64 = 1.0 - rng.random::<f64>();
    let k = (u.ln() / (-p).ln_1p()).floor();
    if k >= usize::MAX as f64 {
        usize::MAX
    } else {
        k as usize
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn er_extremes() {
        let (g, _) = sample(&ModelSpec::ErdosRenyi { p: 1.0 }, 4, 3).unwrap();
        assert_eq!(g.edge_count(), 6);
        let (g, _) = sample(&ModelSpec::ErdosRenyi { p: 0.0 }, 100, 3).unwrap();
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn invalid_probabilities_rejected() {
        assert!(sample(&ModelSpec::ErdosRenyi { p: 1.5 }, 4, 0).is_err());
        assert!(sample(&ModelSpec::ErdosRenyi { p: -0.1 }, 4, 0).is_err());
        assert!(sample(&ModelSpec::PlantedPartition { a: 60.0, b: 1.0 }, 50, 0).is_err());
        assert!(sample(&ModelSpec::ErdosRenyi { p: 0.5 }, 0, 0).is_err());
        let bad_sym = ModelSpec::Sbm {
            pi: vec![0.5, 0.5],
            b: vec![vec![0.5, 0.1], vec![0.2, 0.5]],
        };
        assert!(bad_sym.validate(10).is_err());
        let bad_pi = ModelSpec::Sbm {
            pi: vec![0.5, 0.6],
            b: vec![vec![0.5, 0.1], vec![0.1, 0.5]],
        };
        assert!(bad_pi.validate(10).is_err());
    }

    #[test]
    fn dcsbm_product_over_one_rejected() {
        let spec = ModelSpec::Dcsbm {
            pi: vec![1.0],
            b: vec![vec![0.5]],
            theta: vec![2.0, 1.5, 0.1],
        };
        assert!(sample(&spec, 3, 0).is_err());
        let ok = ModelSpec::Dcsbm {
            pi: vec![1.0],
            b: vec![vec![0.5]],
            theta: vec![2.0, 0.9, 0.1],
        };
        assert!(sample(&ok, 3, 0).is_ok());
    }

    #[test]
    fn planted_partition_expectation() {
        let spec = ModelSpec::PlantedPartition { a: 5.0, b: 0.1 };
        let labels = LabelVector::balanced_halves(50);
        let e = expected_matrix(&spec, &labels).unwrap();
        assert_eq!(e.entry(0, 1), 5.0 / 50.0);
        assert_eq!(e.entry(0, 30), 0.1 / 50.0);
        assert_eq!(e.entry(7, 7), 0.0);
        let d = e.max_expected_degree();
        assert!((d.n_max_entry - 5.0).abs() < 1e-12);
        let row = 24.0 * 0.1 + 25.0 * 0.002;
        assert!((d.max_row_sum - row).abs() < 1e-12);
    }

    #[test]
    fn odd_planted_partition_gives_extra_node_to_first_community() {
        let (_, labels) = sample(&ModelSpec::PlantedPartition { a: 3.0, b: 1.0 }, 7, 0).unwrap();
        assert_eq!(labels.community_sizes(), vec![4, 3]);
    }

    #[test]
    fn er_expected_degree_conventions() {
        let e = expected_matrix(&ModelSpec::ErdosRenyi { p: 0.1 }, &LabelVector::uniform(20)).unwrap();
        let d = e.max_expected_degree();
        assert!((d.n_max_entry - 2.0).abs() < 1e-12);
        assert!((d.max_row_sum - 1.9).abs() < 1e-12);
        let zero = ModelSpec::Ierm { p: vec![vec![0.0; 3]; 3] };
        let d = max_expected_degree(&zero, &LabelVector::uniform(3)).unwrap();
        assert_eq!((d.max_row_sum, d.n_max_entry), (0.0, 0.0));
    }

    #[test]
    fn dcsbm_with_unit_theta_matches_sbm() {
        let pi = vec![0.3, 0.7];
        let b = vec![vec![0.4, 0.05], vec![0.05, 0.3]];
        let sbm = ModelSpec::Sbm { pi: pi.clone(), b: b.clone() };
        let dc = ModelSpec::Dcsbm { pi, b, theta: vec![1.0; 12] };
        let labels = sbm.draw_labels(12, 5);
        let e1 = expected_matrix(&sbm, &labels).unwrap().to_dense();
        let e2 = expected_matrix(&dc, &labels).unwrap().to_dense();
        assert_eq!(e1, e2);
    }

    #[test]
    fn block_matvec_matches_dense() {
        let spec = ModelSpec::Dcsbm {
            pi: vec![0.5, 0.5],
            b: vec![vec![0.3, 0.1], vec![0.1, 0.2]],
            theta: (0..9).map(|i| 0.5 + 0.1 * i as f64).collect(),
        };
        let labels = spec.draw_labels(9, 1);
        let e = expected_matrix(&spec, &labels).unwrap();
        let dense = e.to_dense();
        let x: Vec<f64> = (0..9).map(|i| (i as f64 * 0.7).sin()).collect();
        let mut y = vec![0.0; 9];
        e.matvec(&x, &mut y);
        for i in 0..9 {
            let want: f64 = (0..9).map(|j| dense[i * 9 + j] * x[j]).sum();
            assert!((y[i] - want).abs() < 1e-14);
        }
    }

    #[test]
    fn lsm_probability_decreases_with_distance() {
        let positions = vec![vec![0.0, 0.0], vec![0.5, 0.0], vec![2.0, 1.0], vec![-3.0, 0.0]];
        let spec = ModelSpec::Lsm { positions: positions.clone(), kernel: Kernel::default() };
        let e = expected_matrix(&spec, &LabelVector::uniform(4)).unwrap();
        let dist = |i: usize, j: usize| -> f64 {
            positions[i].iter().zip(&positions[j]).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt()
        };
        let pairs: Vec<(usize, usize)> = (0..4).flat_map(|i| ((i + 1)..4).map(move |j| (i, j))).collect();
        for &(i, j) in &pairs {
            for &(k, l) in &pairs {
                if dist(i, j) <= dist(k, l) {
                    assert!(e.entry(i, j) >= e.entry(k, l));
                }
            }
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let spec = ModelSpec::PlantedPartition { a: 5.0, b: 0.1 };
        let (g1, _) = sample(&spec, 50, 7).unwrap();
        let (g2, _) = sample(&spec, 50, 7).unwrap();
        let (g3, _) = sample(&spec, 50, 8).unwrap();
        assert_eq!(g1, g2);
        assert_ne!(g1, g3);
        assert!(g1.is_binary());
    }

    #[test]
    fn model_spec_json() {
        let spec: ModelSpec = serde_json::from_str(r#"{"model":"planted_partition","a":5,"b":0.1}"#).unwrap();
        assert_eq!(spec, ModelSpec::PlantedPartition { a: 5.0, b: 0.1 });
        let lsm: ModelSpec = serde_json::from_str(r#"{"model":"lsm","positions":[[0],[1]]}"#).unwrap();
        assert!(matches!(lsm, ModelSpec::Lsm { kernel: Kernel::Exponential { .. }, .. }));
    }
}
