//! Undirected weighted graphs and community label vectors.
//!
//! A [`Graph`] stores both directions of every edge in compressed sparse row
//! form so that row iteration is `O(deg)`. The diagonal is always zero.
//!
//! Text formats:
//!
//! - graphs are TSV edge lists with a `# n=<n>` header followed by
//!   `i<TAB>j<TAB>weight` lines, 0-indexed, `i < j`;
//! - labels are one integer per line in `1..=K`, in node order.

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    offsets: Vec<usize>,
    targets: Vec<usize>,
    weights: Vec<f64>,
}

impl Graph {
    /// Graph on `n` nodes with no edges.
    pub fn empty(n: usize) -> Self {
        Graph {
            n,
            offsets: vec![0; n + 1],
            targets: Vec::new(),
            weights: Vec::new(),
        }
    }

    /// Builds a graph from undirected edges. Either orientation is accepted;
    /// self-loops, duplicates, out-of-range endpoints and weights outside
    /// `(0, 1]` are rejected.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        let mut list: Vec<(usize, usize, f64)> = Vec::new();
        for (i, j, w) in edges {
            if i == j {
                return Err(Error::param(format!("self-loop at node {i}")));
            }
            if i >= n || j >= n {
                return Err(Error::param(format!("edge ({i}, {j}) out of range for n={n}")));
            }
            if !(w > 0.0 && w <= 1.0) {
                return Err(Error::param(format!("edge ({i}, {j}) has weight {w} outside (0, 1]")));
            }
            list.push((i.min(j), i.max(j), w));
        }
        list.sort_by(|x, y| (x.0, x.1).cmp(&(y.0, y.1)));
        if let Some(dup) = list.windows(2).find(|p| (p[0].0, p[0].1) == (p[1].0, p[1].1)) {
            return Err(Error::param(format!("duplicate edge ({}, {})", dup[0].0, dup[0].1)));
        }
        Ok(Self::from_sorted_upper(n, &list))
    }

    /// `upper` must be sorted, duplicate free, with `i < j < n`.
    pub(crate) fn from_sorted_upper(n: usize, upper: &[(usize, usize, f64)]) -> Self {
        let mut counts = vec![0usize; n + 1];
        for &(i, j, _) in upper {
            counts[i + 1] += 1;
            counts[j + 1] += 1;
        }
        for k in 0..n {
            counts[k + 1] += counts[k];
        }
        let offsets = counts;
        let mut cursor = offsets.clone();
        let mut targets = vec![0usize; 2 * upper.len()];
        let mut weights = vec![0.0; 2 * upper.len()];
        // Lower-triangle entries of row j arrive in increasing i because the
        // list is sorted by i, and they precede all upper entries (j' > j),
        // so each row ends up sorted without a second pass.
        for &(i, j, w) in upper {
            targets[cursor[j]] = i;
            weights[cursor[j]] = w;
            cursor[j] += 1;
        }
        for &(i, j, w) in upper {
            targets[cursor[i]] = j;
            weights[cursor[i]] = w;
            cursor[i] += 1;
        }
        let g = Graph {
            n,
            offsets,
            targets,
            weights,
        };
        debug_assert!((0..n).all(|i| g.targets[g.offsets[i]..g.offsets[i + 1]].windows(2).all(|w| w[0] < w[1])));
        g
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    /// Neighbors of `i` with edge weights, in increasing neighbor order.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let (s, e) = (self.offsets[i], self.offsets[i + 1]);
        self.targets[s..e]
            .iter()
            .copied()
            .zip(self.weights[s..e].iter().copied())
    }

    /// Number of incident edges, ignoring weights.
    pub fn neighbor_count(&self, i: usize) -> usize {
        self.offsets[i + 1] - self.offsets[i]
    }

    /// Weight of edge `(i, j)`, or 0 if absent.
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        let (s, e) = (self.offsets[i], self.offsets[i + 1]);
        match self.targets[s..e].binary_search(&j) {
            Ok(k) => self.weights[s + k],
            Err(_) => 0.0,
        }
    }

    /// Upper-triangle edges `(i, j, w)` with `i < j`, in row-major order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |i| self.row(i).filter(move |&(j, _)| j > i).map(move |(j, w)| (i, j, w)))
    }

    /// Weighted degrees (row sums).
    pub fn degrees(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.row(i).map(|(_, w)| w).sum()).collect()
    }

    pub fn max_degree(&self) -> f64 {
        self.degrees().into_iter().fold(0.0, f64::max)
    }

    /// Average weighted degree, `2 * total weight / n`.
    pub fn average_degree(&self) -> f64 {
        if self.n == 0 {
            return 0.0;
        }
        self.degrees().iter().sum::<f64>() / self.n as f64
    }

    /// True when every stored weight equals 1.
    pub fn is_binary(&self) -> bool {
        self.weights.iter().all(|&w| w == 1.0)
    }

    /// Row-major dense materialization. Intended for small `n`.
    pub fn to_dense(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.n * self.n];
        for i in 0..self.n {
            for (j, w) in self.row(i) {
                m[i * self.n + j] = w;
            }
        }
        m
    }

    pub fn write_tsv<W: Write>(&self, mut out: W) -> Result<()> {
        let mut buf = String::new();
        writeln!(buf, "# n={}", self.n).unwrap();
        for (i, j, w) in self.edges() {
            writeln!(buf, "{i}\t{j}\t{w}").unwrap();
        }
        out.write_all(buf.as_bytes())?;
        Ok(())
    }

    pub fn to_tsv_string(&self) -> String {
        let mut v = Vec::new();
        self.write_tsv(&mut v).expect("writing to a Vec cannot fail");
        String::from_utf8(v).expect("tsv output is utf-8")
    }

    pub fn read_tsv<R: BufRead>(input: R) -> Result<Self> {
        let mut n: Option<usize> = None;
        let mut edges = Vec::new();
        for (idx, line) in input.lines().enumerate() {
            let line = line?;
            let lineno = idx + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            if let Some(rest) = trimmed.strip_prefix('#') {
                if n.is_none() {
                    let value = rest
                        .trim()
                        .strip_prefix("n=")
                        .ok_or_else(|| parse_err(lineno, "expected header `# n=<count>`"))?;
                    n = Some(value.trim().parse().map_err(|_| parse_err(lineno, "bad node count"))?);
                }
                continue;
            }
            if n.is_none() {
                return Err(parse_err(lineno, "edge before `# n=` header"));
            }
            let fields: Vec<&str> = trimmed.split('\t').collect();
            if fields.len() != 3 {
                return Err(parse_err(lineno, "expected `i<TAB>j<TAB>weight`"));
            }
            let i: usize = fields[0].parse().map_err(|_| parse_err(lineno, "bad source index"))?;
            let j: usize = fields[1].parse().map_err(|_| parse_err(lineno, "bad target index"))?;
            let w: f64 = fields[2].parse().map_err(|_| parse_err(lineno, "bad weight"))?;
            if i >= j {
                return Err(parse_err(lineno, "edge lines must satisfy i < j"));
            }
            edges.push((i, j, w));
        }
        let n = n.ok_or_else(|| parse_err(0, "missing `# n=` header"))?;
        Graph::from_edges(n, edges)
    }

    pub fn from_tsv_str(s: &str) -> Result<Self> {
        Self::read_tsv(s.as_bytes())
    }

    /// Applies `f(i, j, w)` to every edge weight; edges mapped to 0 are dropped.
    pub(crate) fn map_weights(&self, mut f: impl FnMut(usize, usize, f64) -> f64) -> Graph {
        let upper: Vec<(usize, usize, f64)> = self
            .edges()
            .map(|(i, j, w)| (i, j, f(i, j, w)))
            .filter(|e| e.2 > 0.0)
            .collect();
        Graph::from_sorted_upper(self.n, &upper)
    }
}

fn parse_err(line: usize, message: &str) -> Error {
    Error::Parse {
        line,
        message: message.to_string(),
    }
}

/// Community assignment per node. Stored 0-based; `k` is the number of
/// communities. Text output is 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelVector {
    labels: Vec<usize>,
    k: usize,
}

impl LabelVector {
    /// Labels are 0-based community indices; `k` must exceed every label.
    pub fn new(labels: Vec<usize>, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::param("label vector needs at least one community"));
        }
        if let Some(&bad) = labels.iter().find(|&&c| c >= k) {
            return Err(Error::param(format!("label {} exceeds K={k}", bad + 1)));
        }
        Ok(LabelVector { labels, k })
    }

    /// Infers `K` as the largest label present.
    pub fn from_zero_based(labels: Vec<usize>) -> Self {
        let k = labels.iter().copied().max().map_or(1, |m| m + 1);
        LabelVector { labels, k }
    }

    /// Single community containing every node.
    pub fn uniform(n: usize) -> Self {
        LabelVector { labels: vec![0; n], k: 1 }
    }

    /// First `ceil(n/2)` nodes in community 0, the rest in community 1.
    pub fn balanced_halves(n: usize) -> Self {
        let first = n.div_ceil(2);
        let labels = (0..n).map(|i| usize::from(i >= first)).collect();
        LabelVector { labels, k: 2 }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.labels
    }

    pub fn get(&self, i: usize) -> usize {
        self.labels[i]
    }

    pub fn community_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &c in &self.labels {
            sizes[c] += 1;
        }
        sizes
    }

    pub fn write_text<W: Write>(&self, mut out: W) -> Result<()> {
        let mut buf = String::with_capacity(self.labels.len() * 2);
        for &c in &self.labels {
            writeln!(buf, "{}", c + 1).unwrap();
        }
        out.write_all(buf.as_bytes())?;
        Ok(())
    }

    pub fn read_text<R: BufRead>(input: R) -> Result<Self> {
        let mut labels = Vec::new();
        for (idx, line) in input.lines().enumerate() {
            let line = line?;
            let t = line.trim();
            if t.is_empty() {
                continue;
            }
            let v: usize = t.parse().map_err(|_| parse_err(idx + 1, "bad label"))?;
            if v == 0 {
                return Err(parse_err(idx + 1, "labels are 1-based"));
            }
            labels.push(v - 1);
        }
        Ok(Self::from_zero_based(labels))
    }
}
