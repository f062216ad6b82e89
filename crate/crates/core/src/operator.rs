//! Matrix-free symmetric operators.
//!
//! A [`SymmetricOperator`] is a sum of terms, each of the form
//!
//! ```text
//! coef * S (C + kappa * P + gamma * 1 1^T + diag(delta)) S
//! ```
//!
//! where `C` is sparse, `P` is a structured [`ExpectedMatrix`] and `S` is an
//! optional diagonal scaling. One term covers `A`, `A - E[A]`, `A + (tau/n) 1 1^T`
//! and `D^{-1/2} A D^{-1/2}`; differences of Laplacians need two.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::models::ExpectedMatrix;

/// Anything that can multiply a vector. Implementations must be symmetric.
pub trait LinearOperator: Sync {
    fn dim(&self) -> usize;

    /// `y = M x`. `y` is overwritten.
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

/// Symmetric sparse matrix in CSR form, both triangles stored.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    n: usize,
    offsets: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl SparseMatrix {
    pub fn from_graph(g: &Graph) -> Self {
        let n = g.n();
        let mut offsets = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        offsets.push(0);
        for i in 0..n {
            for (j, w) in g.row(i) {
                cols.push(j);
                vals.push(w);
            }
            offsets.push(cols.len());
        }
        SparseMatrix { n, offsets, cols, vals }
    }

    /// Builds from a row-major dense matrix, keeping nonzeros. Fails when the
    /// matrix is not symmetric to within `1e-12` relative.
    pub fn from_dense(n: usize, dense: &[f64]) -> Result<Self> {
        if dense.len() != n * n {
            return Err(Error::param("dense matrix has the wrong size"));
        }
        check_symmetric(n, dense, 1e-12)?;
        let mut offsets = vec![0];
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let v = 0.5 * (dense[i * n + j] + dense[j * n + i]);
                if v != 0.0 {
                    cols.push(j);
                    vals.push(v);
                }
            }
            offsets.push(cols.len());
        }
        Ok(SparseMatrix { n, offsets, cols, vals })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let (s, e) = (self.offsets[i], self.offsets[i + 1]);
        self.cols[s..e].iter().copied().zip(self.vals[s..e].iter().copied())
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = self.row(i).map(|(j, v)| v * x[j]).sum();
        }
    }
}

pub(crate) fn check_symmetric(n: usize, m: &[f64], rel: f64) -> Result<()> {
    let scale = m.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(f64::MIN_POSITIVE);
    for i in 0..n {
        for j in (i + 1)..n {
            if (m[i * n + j] - m[j * n + i]).abs() > rel * scale {
                return Err(Error::param(format!("matrix is not symmetric at ({i}, {j})")));
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone)]
struct Term {
    coef: f64,
    sparse: Option<Arc<SparseMatrix>>,
    structured: Option<(f64, Arc<ExpectedMatrix>)>,
    rank_one: f64,
    diagonal: Option<Vec<f64>>,
    scaling: Option<Vec<f64>>,
}

impl Term {
    fn zero() -> Self {
        Term {
            coef: 1.0,
            sparse: None,
            structured: None,
            rank_one: 0.0,
            diagonal: None,
            scaling: None,
        }
    }

    fn apply_add(&self, n: usize, x: &[f64], y: &mut [f64], scratch: &mut Scratch) {
        let z: &[f64] = match &self.scaling {
            Some(s) => {
                for i in 0..n {
                    scratch.z[i] = s[i] * x[i];
                }
                &scratch.z
            }
            None => x,
        };
        let w = &mut scratch.w;
        match &self.sparse {
            Some(c) => c.matvec(z, w),
            None => w.iter_mut().for_each(|v| *v = 0.0),
        }
        if let Some((kappa, p)) = &self.structured {
            p.matvec(z, &mut scratch.t);
            for i in 0..n {
                w[i] += kappa * scratch.t[i];
            }
        }
        if self.rank_one != 0.0 {
            let s: f64 = z.iter().sum::<f64>() * self.rank_one;
            w.iter_mut().for_each(|v| *v += s);
        }
        if let Some(d) = &self.diagonal {
            for i in 0..n {
                w[i] += d[i] * z[i];
            }
        }
        match &self.scaling {
            Some(s) => {
                for i in 0..n {
                    y[i] += self.coef * s[i] * w[i];
                }
            }
            None => {
                for i in 0..n {
                    y[i] += self.coef * w[i];
                }
            }
        }
    }

    fn entry(&self, i: usize, j: usize, sparse_ij: f64) -> f64 {
        let mut v = sparse_ij + self.rank_one;
        if let Some((kappa, p)) = &self.structured {
            v += kappa * p.entry(i, j);
        }
        if i == j {
            if let Some(d) = &self.diagonal {
                v += d[i];
            }
        }
        if let Some(s) = &self.scaling {
            v *= s[i] * s[j];
        }
        self.coef * v
    }
}

struct Scratch {
    z: Vec<f64>,
    w: Vec<f64>,
    t: Vec<f64>,
}

/// A symmetric `n x n` operator applied without materialization.
#[derive(Debug, Clone)]
pub struct SymmetricOperator {
    n: usize,
    terms: Vec<Term>,
}

impl SymmetricOperator {
    /// The zero operator.
    pub fn zero(n: usize) -> Self {
        SymmetricOperator { n, terms: vec![Term::zero()] }
    }

    /// The adjacency matrix of `g`.
    pub fn from_graph(g: &Graph) -> Self {
        Self::from_sparse(Arc::new(SparseMatrix::from_graph(g)))
    }

    pub fn from_sparse(m: Arc<SparseMatrix>) -> Self {
        let mut term = Term::zero();
        let n = m.n();
        term.sparse = Some(m);
        SymmetricOperator { n, terms: vec![term] }
    }

    /// Wraps a dense symmetric matrix (stored sparsely).
    pub fn from_dense(n: usize, dense: &[f64]) -> Result<Self> {
        Ok(Self::from_sparse(Arc::new(SparseMatrix::from_dense(n, dense)?)))
    }

    /// The structured expectation matrix itself.
    pub fn from_expected(p: Arc<ExpectedMatrix>) -> Self {
        let n = p.n();
        Self::zero(n).with_structured(1.0, p)
    }

    /// `diag(d)`.
    pub fn from_diagonal(d: Vec<f64>) -> Self {
        let n = d.len();
        Self::zero(n).with_diagonal(d)
    }

    fn last(&mut self) -> &mut Term {
        self.terms.last_mut().expect("operator has at least one term")
    }

    /// Adds `kappa * P` inside the current term.
    pub fn with_structured(mut self, kappa: f64, p: Arc<ExpectedMatrix>) -> Self {
        assert_eq!(p.n(), self.n, "expectation size mismatch");
        self.last().structured = Some((kappa, p));
        self
    }

    /// Subtracts `P` inside the current term: `C - P`.
    pub fn with_centering(self, p: Arc<ExpectedMatrix>) -> Self {
        self.with_structured(-1.0, p)
    }

    /// Adds `gamma * 1 1^T` inside the current term.
    pub fn with_rank_one(mut self, gamma: f64) -> Self {
        self.last().rank_one = gamma;
        self
    }

    pub fn with_diagonal(mut self, d: Vec<f64>) -> Self {
        assert_eq!(d.len(), self.n, "diagonal size mismatch");
        self.last().diagonal = Some(d);
        self
    }

    /// Wraps the current term as `S (...) S` with `S = diag(s)`.
    pub fn with_scaling(mut self, s: Vec<f64>) -> Self {
        assert_eq!(s.len(), self.n, "scaling size mismatch");
        self.last().scaling = Some(s);
        self
    }

    /// Multiplies every term by `c`.
    pub fn scaled(mut self, c: f64) -> Self {
        for t in &mut self.terms {
            t.coef *= c;
        }
        self
    }

    /// `self - other`.
    pub fn minus(mut self, other: SymmetricOperator) -> Self {
        assert_eq!(self.n, other.n, "operator size mismatch");
        self.terms.extend(other.scaled(-1.0).terms);
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        let n = self.n;
        let mut scratch = Scratch {
            z: vec![0.0; n],
            w: vec![0.0; n],
            t: vec![0.0; n],
        };
        y.iter_mut().for_each(|v| *v = 0.0);
        for t in &self.terms {
            t.apply_add(n, x, y, &mut scratch);
        }
    }

    /// Row-major dense materialization, built entry by entry from the terms
    /// rather than through `matvec`.
    pub fn to_dense(&self) -> Vec<f64> {
        let n = self.n;
        let mut out = vec![0.0; n * n];
        for t in &self.terms {
            let mut sparse = vec![0.0; n * n];
            if let Some(c) = &t.sparse {
                for i in 0..n {
                    for (j, v) in c.row(i) {
                        sparse[i * n + j] = v;
                    }
                }
            }
            for i in 0..n {
                for j in 0..n {
                    out[i * n + j] += t.entry(i, j, sparse[i * n + j]);
                }
            }
        }
        out
    }

    /// Euclidean norm of every column.
    ///
    /// Single-term operators use a closed form that costs `O(nnz + n K)` for
    /// block expectations; anything else falls back to one matvec per column.
    pub fn column_norms(&self) -> Vec<f64> {
        if self.terms.len() == 1 {
            if let Some(v) = self.single_term_column_norms(&self.terms[0]) {
                return v;
            }
        }
        let n = self.n;
        let mut e = vec![0.0; n];
        let mut y = vec![0.0; n];
        (0..n)
            .map(|i| {
                e[i] = 1.0;
                self.matvec(&e, &mut y);
                e[i] = 0.0;
                y.iter().map(|v| v * v).sum::<f64>().sqrt()
            })
            .collect()
    }

    fn single_term_column_norms(&self, t: &Term) -> Option<Vec<f64>> {
        // Column i of coef * S (C + kappa P + gamma 11^T + diag) S has squared norm
        //   coef^2 s_i^2 sum_j s_j^2 (C_ij + kappa P_ij + gamma + delta_i [i=j])^2.
        // The dense part (kappa P_ij + gamma) is summed per community, then the
        // sparse support and the diagonal are patched in.
        let n = self.n;
        let s = |j: usize| t.scaling.as_ref().map_or(1.0, |v| v[j]);
        let gamma = t.rank_one;
        let (kappa, p) = match &t.structured {
            Some((k, p)) => (*k, Some(p.as_ref())),
            None => (0.0, None),
        };
        let base: Vec<f64> = match p {
            None => {
                let total: f64 = (0..n).map(|j| s(j) * s(j)).sum();
                vec![gamma * gamma * total; n]
            }
            Some(ExpectedMatrix::Block(b)) => {
                let (labels, k, probs, theta) = ExpectedMatrix::block_parts(b);
                let th = |j: usize| theta.map_or(1.0, |v| v[j]);
                let mut w0 = vec![0.0; k];
                let mut w1 = vec![0.0; k];
                let mut w2 = vec![0.0; k];
                for j in 0..n {
                    let s2 = s(j) * s(j);
                    let c = labels[j];
                    w0[c] += s2;
                    w1[c] += s2 * th(j);
                    w2[c] += s2 * th(j) * th(j);
                }
                (0..n)
                    .map(|i| {
                        let ci = labels[i];
                        let ti = th(i);
                        (0..k)
                            .map(|l| {
                                let q = kappa * ti * probs[ci * k + l];
                                gamma * gamma * w0[l] + 2.0 * gamma * q * w1[l] + q * q * w2[l]
                            })
                            .sum::<f64>()
                            // Block formula includes a j = i term with P_ii != 0;
                            // take it back out, it is re-added below.
                            - s(i) * s(i) * (gamma + kappa * ti * ti * probs[ci * k + ci]).powi(2)
                            + s(i) * s(i) * gamma * gamma
                    })
                    .collect()
            }
            Some(ExpectedMatrix::Dense(_)) => return None,
        };
        let entry_dense = |i: usize, j: usize| gamma + p.map_or(0.0, |p| kappa * p.entry(i, j));
        let out = (0..n)
            .map(|i| {
                let mut acc = base[i];
                let mut diag_sparse = 0.0;
                if let Some(c) = &t.sparse {
                    for (j, v) in c.row(i) {
                        if j == i {
                            diag_sparse = v;
                            continue;
                        }
                        let d = entry_dense(i, j);
                        acc += s(j) * s(j) * ((v + d).powi(2) - d * d);
                    }
                }
                let delta = t.diagonal.as_ref().map_or(0.0, |d| d[i]);
                // diagonal entry: P_ii = 0, so the dense value there is gamma.
                acc += s(i) * s(i) * ((diag_sparse + gamma + delta).powi(2) - gamma * gamma);
                (t.coef * t.coef * s(i) * s(i) * acc.max(0.0)).sqrt()
            })
            .collect();
        Some(out)
    }
}

impl LinearOperator for SymmetricOperator {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.matvec(x, y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::LabelVector;
    use crate::models::{expected_matrix, ModelSpec};
    use rand::{Rng, SeedableRng};

    fn dense_mul(n: usize, m: &[f64], x: &[f64]) -> Vec<f64> {
        (0..n).map(|i| (0..n).map(|j| m[i * n + j] * x[j]).sum()).collect()
    }

    fn small_graph() -> Graph {
        Graph::from_edges(5, [(0, 1, 1.0), (1, 2, 0.5), (2, 3, 1.0), (0, 4, 0.25)]).unwrap()
    }

    #[test]
    fn graph_operator_matches_adjacency() {
        let g = small_graph();
        let op = SymmetricOperator::from_graph(&g);
        assert_eq!(op.to_dense(), g.to_dense());
    }

    #[test]
    fn rank_one_and_scaling_materialize() {
        let g = small_graph();
        let s = vec![1.0, 0.5, 2.0, 1.0, 0.1];
        let op = SymmetricOperator::from_graph(&g).with_rank_one(0.3).with_scaling(s.clone());
        let d = op.to_dense();
        let a = g.to_dense();
        for i in 0..5 {
            for j in 0..5 {
                let want = s[i] * s[j] * (a[i * 5 + j] + 0.3);
                assert!((d[i * 5 + j] - want).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn composed_matvec_matches_dense() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let spec = ModelSpec::Dcsbm {
            pi: vec![0.5, 0.5],
            b: vec![vec![0.4, 0.1], vec![0.1, 0.3]],
            theta: (0..20).map(|i| 0.6 + 0.02 * i as f64).collect(),
        };
        let labels = spec.draw_labels(20, 2);
        let e = Arc::new(expected_matrix(&spec, &labels).unwrap());
        let (g, _) = crate::models::sample(&ModelSpec::ErdosRenyi { p: 0.2 }, 20, 4).unwrap();
        let scale: Vec<f64> = (0..20).map(|_| rng.random::<f64>() + 0.1).collect();
        let diag: Vec<f64> = (0..20).map(|_| rng.random::<f64>() - 0.5).collect();
        let ops = vec![
            SymmetricOperator::from_graph(&g).with_centering(e.clone()),
            SymmetricOperator::from_graph(&g).with_rank_one(0.05).with_scaling(scale.clone()),
            SymmetricOperator::from_graph(&g)
                .with_centering(e.clone())
                .with_rank_one(-0.2)
                .with_diagonal(diag.clone())
                .with_scaling(scale.clone()),
            SymmetricOperator::from_graph(&g)
                .with_rank_one(0.1)
                .with_scaling(scale.clone())
                .minus(SymmetricOperator::from_expected(e.clone()).with_scaling(scale.clone())),
        ];
        for op in &ops {
            let d = op.to_dense();
            for _ in 0..20 {
                let x: Vec<f64> = (0..20).map(|_| rng.random::<f64>() - 0.5).collect();
                let mut y = vec![0.0; 20];
                op.matvec(&x, &mut y);
                let want = dense_mul(20, &d, &x);
                let norm = want.iter().map(|v| v * v).sum::<f64>().sqrt();
                let err = y.iter().zip(&want).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
                assert!(err <= 1e-12 * norm.max(1e-300));
            }
        }
    }

    #[test]
    fn closed_form_column_norms_match_dense() {
        let spec = ModelSpec::PlantedPartition { a: 4.0, b: 1.0 };
        let labels = LabelVector::balanced_halves(12);
        let e = Arc::new(expected_matrix(&spec, &labels).unwrap());
        let (g, _) = crate::models::sample(&spec, 12, 9).unwrap();
        let scale: Vec<f64> = (0..12).map(|i| 0.3 + 0.1 * i as f64).collect();
        let diag: Vec<f64> = (0..12).map(|i| 0.05 * i as f64 - 0.2).collect();
        let op = SymmetricOperator::from_graph(&g)
            .with_centering(e)
            .with_rank_one(0.07)
            .with_diagonal(diag)
            .with_scaling(scale)
            .scaled(-1.5);
        let d = op.to_dense();
        let norms = op.column_norms();
        for i in 0..12 {
            let want = (0..12).map(|j| d[j * 12 + i].powi(2)).sum::<f64>().sqrt();
            assert!((norms[i] - want).abs() < 1e-12 * want.max(1.0), "{} vs {}", norms[i], want);
        }
    }

    #[test]
    fn asymmetric_dense_rejected() {
        assert!(SymmetricOperator::from_dense(2, &[0.0, 1.0, 2.0, 0.0]).is_err());
    }
}
