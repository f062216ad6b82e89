//! Seeded Monte-Carlo experiments.
//!
//! Every grid point gets a seed derived from the master seed and its index,
//! and replicate `r` of that point uses `derive_seed(point_seed, [r])`.
//! Replicates run in parallel on the ambient rayon pool and are aggregated
//! in index order, so results do not depend on the thread count.

use std::io::Write;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds;
use crate::detect::{misclassification_rate, sign_partition, spectral_cluster, SpectralMode};
use crate::eigen::{dense_eig_oracle, spectral_norm, top_eigs, EigenPair, Which, DEFAULT_TOL, ORACLE_MAX_N};
use crate::error::{Error, Result};
use crate::graph::{Graph, LabelVector};
use crate::models::{expected_matrix, sample, ExpectedMatrix, ModelSpec};
use crate::operator::SymmetricOperator;
use crate::regularize::{
    choose_tau, degree_regularize, laplacian, regularized_laplacian, remove_high_degree,
};
use crate::rng::derive_seed;

/// How a sampled graph is regularized before measuring its deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum Regularization {
    None,
    /// Cap weighted degrees at `multiplier * d`, `d = n max P_ij`.
    DegreeCap { multiplier: f64 },
    /// Drop vertices with degree above `multiplier * d`.
    VertexRemoval { multiplier: f64 },
    /// Compare `L(A_tau)` with `L(E[A]_tau)`, `tau = rho * average degree`.
    TauLaplacian { rho: f64 },
}

impl Regularization {
    pub fn name(&self) -> &'static str {
        match self {
            Regularization::None => "none",
            Regularization::DegreeCap { .. } => "degree-cap",
            Regularization::VertexRemoval { .. } => "vertex-removal",
            Regularization::TauLaplacian { .. } => "tau-laplacian",
        }
    }
}

/// Model family swept by [`measure_concentration`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum GridModel {
    /// `G(n, d/n)` for each expected degree `d`.
    ErdosRenyi { degrees: Vec<f64> },
    /// `G(n, a/n, b/n)` for each `(a, b)`.
    PlantedPartition { pairs: Vec<(f64, f64)> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub model: GridModel,
    pub n_grid: Vec<usize>,
    pub replicates: usize,
    pub regularization: Regularization,
    pub seed: u64,
    #[serde(default = "default_tol")]
    pub tol: f64,
}

fn default_tol() -> f64 {
    1e-6
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(Error::param("replicates must be at least 1"));
        }
        if self.n_grid.is_empty() {
            return Err(Error::param("n grid is empty"));
        }
        let empty = match &self.model {
            GridModel::ErdosRenyi { degrees } => degrees.is_empty(),
            GridModel::PlantedPartition { pairs } => pairs.is_empty(),
        };
        if empty {
            return Err(Error::param("model grid is empty"));
        }
        if !(self.tol > 0.0) {
            return Err(Error::param("tol must be positive"));
        }
        Ok(())
    }

    /// Grid points in the order they are reported.
    pub fn points(&self) -> Vec<GridPoint> {
        let mut out = Vec::new();
        for &n in &self.n_grid {
            match &self.model {
                GridModel::ErdosRenyi { degrees } => {
                    for &d in degrees {
                        out.push(GridPoint { n, d: Some(d), a: None, b: None });
                    }
                }
                GridModel::PlantedPartition { pairs } => {
                    for &(a, b) in pairs {
                        out.push(GridPoint { n, d: None, a: Some(a), b: Some(b) });
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub n: usize,
    pub d: Option<f64>,
    pub a: Option<f64>,
    pub b: Option<f64>,
}

impl GridPoint {
    pub fn spec(&self) -> Result<ModelSpec> {
        match (self.d, self.a, self.b) {
            (Some(d), _, _) => Ok(ModelSpec::ErdosRenyi { p: d / self.n as f64 }),
            (None, Some(a), Some(b)) => Ok(ModelSpec::PlantedPartition { a, b }),
            _ => Err(Error::param("grid point has no model parameters")),
        }
    }
}

/// One row of an experiment's output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub n: usize,
    pub d: Option<f64>,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub snr: Option<f64>,
    pub method: String,
    pub statistic: String,
    pub mean: f64,
    pub stderr: f64,
    pub replicates: usize,
    /// Seed of the grid point; replicate `r` used `derive_seed(seed, [r])`.
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub experiment: String,
    /// The full configuration, for provenance.
    pub config: serde_json::Value,
    pub records: Vec<Record>,
}

fn fmt_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_float).unwrap_or_default()
}

impl ExperimentResult {
    pub fn records_for(&self, statistic: &str) -> impl Iterator<Item = &Record> {
        let s = statistic.to_string();
        self.records.iter().filter(move |r| r.statistic == s)
    }

    /// CSV with a header row; floats carry 17 significant digits.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "experiment", "n", "d", "a", "b", "snr", "method", "statistic", "mean", "stderr", "R", "seed",
        ])?;
        for r in &self.records {
            w.write_record([
                self.experiment.clone(),
                r.n.to_string(),
                fmt_opt(r.d),
                fmt_opt(r.a),
                fmt_opt(r.b),
                fmt_opt(r.snr),
                r.method.clone(),
                r.statistic.clone(),
                fmt_float(r.mean),
                fmt_float(r.stderr),
                r.replicates.to_string(),
                r.seed.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("csv is utf-8")
    }
}

/// Mean and standard error of the finite values.
pub fn mean_stderr(values: &[f64]) -> (f64, f64, usize) {
    let v: Vec<f64> = values.iter().copied().filter(|x| x.is_finite()).collect();
    let r = v.len();
    if r == 0 {
        return (f64::NAN, f64::NAN, 0);
    }
    let mean = v.iter().sum::<f64>() / r as f64;
    if r == 1 {
        return (mean, 0.0, 1);
    }
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (r - 1) as f64;
    (mean, (var / r as f64).sqrt(), r)
}

/// Measurements from one replicate of [`measure_concentration`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicateStats {
    /// Spectral norm of the deviation; `NaN` when the eigensolver failed.
    pub deviation: f64,
    pub max_degree: f64,
    pub touched: f64,
    /// Largest column norm of the deviation operator; `NaN` if not computed.
    pub seginer: f64,
    pub misclassification: Option<f64>,
}

/// Samples one graph for `point` with `seed`, regularizes it, and measures
/// the deviation from the expectation of the original model.
pub fn measure_replicate(point: &GridPoint, regularization: Regularization, tol: f64, seed: u64) -> Result<ReplicateStats> {
    let spec = point.spec()?;
    let (graph, labels) = sample(&spec, point.n, seed)?;
    let expected = Arc::new(expected_matrix(&spec, &labels)?);
    let d = expected.max_expected_degree().n_max_entry;
    let max_degree = graph.max_degree();
    let mut touched = 0.0;

    let (deviation_op, detect_op): (SymmetricOperator, SymmetricOperator) = match regularization {
        Regularization::None => (
            SymmetricOperator::from_graph(&graph).with_centering(expected.clone()),
            SymmetricOperator::from_graph(&graph),
        ),
        Regularization::DegreeCap { multiplier } => {
            let (reg, report) = degree_regularize(&graph, d.max(f64::MIN_POSITIVE), multiplier)?;
            touched = report.touched.len() as f64;
            (
                SymmetricOperator::from_graph(&reg).with_centering(expected.clone()),
                SymmetricOperator::from_graph(&reg),
            )
        }
        Regularization::VertexRemoval { multiplier } => {
            let reg = remove_high_degree(&graph, (multiplier * d).max(f64::MIN_POSITIVE))?;
            touched = (0..graph.n())
                .filter(|&i| graph.neighbor_count(i) > 0 && reg.neighbor_count(i) == 0)
                .count() as f64;
            (
                SymmetricOperator::from_graph(&reg).with_centering(expected.clone()),
                SymmetricOperator::from_graph(&reg),
            )
        }
        Regularization::TauLaplacian { rho } => {
            let tau = choose_tau(&graph, rho)?;
            let sample_lap = regularized_laplacian(&graph, tau)?;
            let expected_lap = expected_laplacian(&expected, tau);
            (sample_lap.clone().minus(expected_lap), sample_lap)
        }
    };

    let deviation = match spectral_norm(&deviation_op, tol) {
        Ok(v) => v,
        Err(Error::Numerical { best_estimate, .. }) => {
            log::warn!("eigensolver failed for seed {seed}; best estimate {best_estimate:?}");
            f64::NAN
        }
        Err(e) => return Err(e),
    };
    let seginer = if matches!(regularization, Regularization::TauLaplacian { .. }) {
        f64::NAN
    } else {
        bounds::seginer_stat(&deviation_op)
    };
    let misclassification = if labels.k() == 2 {
        spectral_cluster(&detect_op, 2, SpectralMode::AdjacencySecondLargest, seed)
            .ok()
            .map(|est| misclassification_rate(&est, &labels))
            .transpose()?
    } else {
        None
    };
    Ok(ReplicateStats {
        deviation,
        max_degree,
        touched,
        seginer,
        misclassification,
    })
}

/// `L(P + (tau/n) 1 1^T)` for a structured expectation `P`.
pub fn expected_laplacian(expected: &Arc<ExpectedMatrix>, tau: f64) -> SymmetricOperator {
    let n = expected.n();
    let scale: Vec<f64> = expected
        .row_sums()
        .into_iter()
        .map(|d| if d + tau > 0.0 { 1.0 / (d + tau).sqrt() } else { 0.0 })
        .collect();
    SymmetricOperator::from_expected(expected.clone())
        .with_rank_one(tau / n as f64)
        .with_scaling(scale)
}

fn point_seed(master: u64, index: usize) -> u64 {
    derive_seed(master, &[index as u64])
}

/// Seed used by replicate `rep` of a grid point seeded with `point_seed`.
pub fn replicate_seed(point_seed: u64, rep: usize) -> u64 {
    derive_seed(point_seed, &[rep as u64])
}

fn run_replicates(config: &ExperimentConfig) -> Result<Vec<(GridPoint, u64, Vec<ReplicateStats>)>> {
    config.validate()?;
    let points = config.points();
    for p in &points {
        p.spec()?.validate(p.n)?;
    }
    let jobs: Vec<(usize, usize)> = (0..points.len())
        .flat_map(|p| (0..config.replicates).map(move |r| (p, r)))
        .collect();
    let results: Vec<Result<ReplicateStats>> = jobs
        .par_iter()
        .map(|&(p, r)| {
            let seed = replicate_seed(point_seed(config.seed, p), r);
            measure_replicate(&points[p], config.regularization, config.tol, seed)
        })
        .collect();
    let mut results = results.into_iter();
    let mut out = Vec::with_capacity(points.len());
    for (idx, point) in points.into_iter().enumerate() {
        let stats = results
            .by_ref()
            .take(config.replicates)
            .collect::<Result<Vec<_>>>()?;
        out.push((point, point_seed(config.seed, idx), stats));
    }
    Ok(out)
}

/// Deviation norms `||A' - E[A]||` (or the Laplacian analogue) over a grid,
/// with ratios to `sqrt(d)` and to the closed-form bounds at `C = 1`.
pub fn measure_concentration(config: &ExperimentConfig) -> Result<ExperimentResult> {
    let method = config.regularization.name().to_string();
    let mut records = Vec::new();
    for (point, seed, stats) in run_replicates(config)? {
        let spec = point.spec()?;
        let labels = spec.draw_labels(point.n, 0);
        let degree = expected_matrix(&spec, &labels)?.max_expected_degree();
        let d = degree.n_max_entry;
        let n = point.n;
        let mut push = |statistic: &str, values: Vec<f64>| {
            let (mean, stderr, count) = mean_stderr(&values);
            records.push(Record {
                n,
                d: Some(d),
                a: point.a,
                b: point.b,
                snr: None,
                method: method.clone(),
                statistic: statistic.to_string(),
                mean,
                stderr,
                replicates: count,
                seed,
            });
        };
        let dev: Vec<f64> = stats.iter().map(|s| s.deviation).collect();
        let ratio = |bound: f64| -> Vec<f64> { dev.iter().map(|x| x / bound).collect() };
        push("deviation", dev.clone());
        push(
            "failures",
            vec![stats.iter().filter(|s| s.deviation.is_nan()).count() as f64],
        );
        push("max_degree", stats.iter().map(|s| s.max_degree).collect());
        if !matches!(config.regularization, Regularization::None) {
            push("touched", stats.iter().map(|s| s.touched).collect());
        }
        if !matches!(config.regularization, Regularization::TauLaplacian { .. }) {
            push("ratio_sqrt_d", ratio(d.sqrt()));
            push("ratio_bai_yin", ratio(bounds::bai_yin_limit(d)));
            push("ratio_bvh", ratio(bounds::bvh_bound_graph(degree.max_row_sum, n, 1.0)));
            push("ratio_bernstein", ratio(bounds::bernstein_graph(degree.max_row_sum, n, 1.0)));
            if let Ok(b) = bounds::benaych_bound(d, n, 1.0) {
                push("ratio_benaych", ratio(b.value));
            }
            push("seginer", stats.iter().map(|s| s.seginer).collect());
            push(
                "ratio_seginer",
                stats.iter().map(|s| s.deviation / s.seginer).collect(),
            );
            push("ratio_thm51", ratio(bounds::regularized_concentration_bound(1.0, d, 1.0)?));
        } else if let Regularization::TauLaplacian { rho } = config.regularization {
            // tau is data dependent; evaluate the bound at its expected value.
            let tau = rho * degree.max_row_sum;
            if tau > 0.0 {
                push("ratio_thm54", ratio(bounds::regularized_laplacian_bound(1.0, tau, d, 1.0)?));
            }
        }
        if stats.iter().any(|s| s.misclassification.is_some()) {
            push(
                "misclassification",
                stats.iter().map(|s| s.misclassification.unwrap_or(f64::NAN)).collect(),
            );
        }
    }
    Ok(ExperimentResult {
        experiment: "concentration".into(),
        config: serde_json::to_value(config)?,
        records,
    })
}

/// Deviation norms without regularization, next to every applicable bound.
pub fn bound_scorecard(config: &ExperimentConfig) -> Result<ExperimentResult> {
    let mut cfg = config.clone();
    cfg.regularization = Regularization::None;
    let mut result = measure_concentration(&cfg)?;
    let mut extra = Vec::new();
    for r in result.records_for("deviation") {
        let spec = GridPoint { n: r.n, d: None, a: r.a, b: r.b };
        let d = r.d.unwrap_or(0.0);
        let row_sum = match spec.a {
            Some(_) => {
                let s = spec.spec()?;
                expected_matrix(&s, &s.draw_labels(r.n, 0))?.max_expected_degree().max_row_sum
            }
            None => d * (r.n - 1) as f64 / r.n as f64,
        };
        let mut bound = |name: &str, value: f64| {
            extra.push(Record {
                statistic: format!("bound_{name}"),
                mean: value,
                stderr: 0.0,
                ..r.clone()
            });
        };
        bound("bai_yin", bounds::bai_yin_limit(d));
        bound("bvh", bounds::bvh_bound_graph(row_sum, r.n, 1.0));
        bound("bernstein", bounds::bernstein_graph(row_sum, r.n, 1.0));
        if let Ok(b) = bounds::benaych_bound(d, r.n, 1.0) {
            bound("benaych", b.value);
        }
        bound("thm51", bounds::regularized_concentration_bound(1.0, d, 1.0)?);
    }
    result.records.extend(extra);
    result.experiment = "scorecard".into();
    Ok(result)
}

/// `(sum v_i^2)^2 / (n sum v_i^4)`: near 1 for spread-out vectors, near
/// `1/n` for vectors concentrated on one node.
pub fn participation_ratio(v: &[f64]) -> f64 {
    let s2: f64 = v.iter().map(|x| x * x).sum();
    let s4: f64 = v.iter().map(|x| x.powi(4)).sum();
    if s4 == 0.0 {
        return 0.0;
    }
    s2 * s2 / (v.len() as f64 * s4)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Figure2Config {
    pub n: usize,
    pub a: f64,
    pub b: f64,
    /// `tau = rho * average degree`.
    pub rho: f64,
    pub seed: u64,
}

impl Default for Figure2Config {
    fn default() -> Self {
        Figure2Config {
            n: 50,
            a: 5.0,
            b: 0.1,
            rho: 0.1,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Figure2Result {
    pub config: Figure2Config,
    pub tau: f64,
    /// Rows per node: three leading eigenvectors of `L(A)`, then three of
    /// `L(A_tau)`.
    pub table: Vec<[f64; 6]>,
    pub eigenvalues_plain: [f64; 3],
    pub eigenvalues_regularized: [f64; 3],
    pub misclassification_plain: f64,
    pub misclassification_regularized: f64,
    /// Participation ratios of the top two eigenvectors of `L(A)`.
    pub participation_plain: [f64; 2],
    pub participation_regularized: [f64; 2],
}

impl Figure2Result {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["node", "lap_v1", "lap_v2", "lap_v3", "reg_v1", "reg_v2", "reg_v3"])?;
        for (i, row) in self.table.iter().enumerate() {
            let mut rec = vec![i.to_string()];
            rec.extend(row.iter().map(|&x| fmt_float(x)));
            w.write_record(rec)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Orients a vector so that its largest-magnitude entry is positive.
fn orient(mut v: Vec<f64>) -> Vec<f64> {
    let pivot = v.iter().copied().fold(0.0f64, |m, x| if x.abs() > m.abs() { x } else { m });
    if pivot < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
    v
}

/// The `k` largest eigenpairs. Small operators go through the dense Jacobi
/// solver, whose eigenvectors for a repeated eigenvalue of a disconnected
/// graph stay supported on single components; Lanczos would return a random
/// mixture of them instead.
fn leading_pairs(op: &SymmetricOperator, k: usize, seed: u64) -> Result<Vec<EigenPair>> {
    let n = op.n();
    if n > ORACLE_MAX_N {
        return top_eigs(op, k, Which::LargestAlgebraic, DEFAULT_TOL, seed);
    }
    let dense = dense_eig_oracle(n, &op.to_dense())?;
    Ok((0..k)
        .map(|c| EigenPair {
            value: dense.values[n - 1 - c],
            vector: dense.vector(n - 1 - c).to_vec(),
        })
        .collect())
}

/// Leading eigenvectors of the plain and `tau`-regularized Laplacians of one
/// planted-partition draw, with sign-partition errors from the second
/// eigenvector of each.
pub fn figure2(config: &Figure2Config) -> Result<Figure2Result> {
    let spec = ModelSpec::PlantedPartition { a: config.a, b: config.b };
    let (graph, truth) = sample(&spec, config.n, config.seed)?;
    figure2_for_graph(config, &graph, &truth)
}

fn figure2_for_graph(config: &Figure2Config, graph: &Graph, truth: &LabelVector) -> Result<Figure2Result> {
    let n = graph.n();
    let k = 3.min(n);
    let tau = choose_tau(graph, config.rho)?;
    let plain = leading_pairs(&laplacian(graph), k, config.seed)?;
    let reg = leading_pairs(&regularized_laplacian(graph, tau)?, k, config.seed)?;
    let pv: Vec<Vec<f64>> = plain.iter().map(|p| orient(p.vector.clone())).collect();
    let rv: Vec<Vec<f64>> = reg.iter().map(|p| orient(p.vector.clone())).collect();
    let col = |vs: &[Vec<f64>], c: usize, i: usize| vs.get(c).map_or(f64::NAN, |v| v[i]);
    let table = (0..n)
        .map(|i| {
            [
                col(&pv, 0, i),
                col(&pv, 1, i),
                col(&pv, 2, i),
                col(&rv, 0, i),
                col(&rv, 1, i),
                col(&rv, 2, i),
            ]
        })
        .collect();
    let vals = |ps: &[EigenPair]| -> [f64; 3] {
        [0, 1, 2].map(|c| ps.get(c).map_or(f64::NAN, |p| p.value))
    };
    let second = |vs: &[Vec<f64>]| -> Result<f64> {
        match vs.get(1) {
            Some(v) => misclassification_rate(&sign_partition(v), truth),
            None => Ok(f64::NAN),
        }
    };
    let pr = |vs: &[Vec<f64>], c: usize| vs.get(c).map_or(f64::NAN, |v| participation_ratio(v));
    Ok(Figure2Result {
        config: *config,
        tau,
        table,
        eigenvalues_plain: vals(&plain),
        eigenvalues_regularized: vals(&reg),
        misclassification_plain: second(&pv)?,
        misclassification_regularized: second(&rv)?,
        participation_plain: [pr(&pv, 0), pr(&pv, 1)],
        participation_regularized: [pr(&rv, 0), pr(&rv, 1)],
    })
}

/// Aggregates of [`figure2`] over many seeds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Figure2Summary {
    pub draws: usize,
    pub seeds: Vec<u64>,
    pub misclassification_plain: Vec<f64>,
    pub misclassification_regularized: Vec<f64>,
    /// `min` of the top-two participation ratios of `L(A)`, per draw.
    pub min_participation_plain: Vec<f64>,
    pub median_plain: f64,
    pub median_regularized: f64,
    /// Fraction of draws with at most 3 misclassified nodes (regularized).
    pub fraction_regularized_at_most_three: f64,
    /// Fraction of draws where a top-two eigenvector of `L(A)` has
    /// participation ratio below 0.2.
    pub fraction_plain_localized: f64,
}

pub fn median(values: &[f64]) -> f64 {
    let mut v: Vec<f64> = values.iter().copied().filter(|x| !x.is_nan()).collect();
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

/// Runs [`figure2`] on `draws` seeds derived from `base.seed`.
pub fn figure2_batch(base: &Figure2Config, draws: usize) -> Result<Figure2Summary> {
    let seeds: Vec<u64> = (0..draws).map(|i| derive_seed(base.seed, &[i as u64])).collect();
    let results: Vec<Figure2Result> = seeds
        .par_iter()
        .map(|&seed| figure2(&Figure2Config { seed, ..*base }))
        .collect::<Result<_>>()?;
    let plain: Vec<f64> = results.iter().map(|r| r.misclassification_plain).collect();
    let reg: Vec<f64> = results.iter().map(|r| r.misclassification_regularized).collect();
    let participation: Vec<f64> = results
        .iter()
        .map(|r| r.participation_plain[0].min(r.participation_plain[1]))
        .collect();
    let n = base.n as f64;
    let at_most_three = reg.iter().filter(|&&m| m * n <= 3.0 + 1e-9).count() as f64 / draws.max(1) as f64;
    let localized = participation.iter().filter(|&&p| p < 0.2).count() as f64 / draws.max(1) as f64;
    Ok(Figure2Summary {
        draws,
        seeds,
        median_plain: median(&plain),
        median_regularized: median(&reg),
        misclassification_plain: plain,
        misclassification_regularized: reg,
        min_participation_plain: participation,
        fraction_regularized_at_most_three: at_most_three,
        fraction_plain_localized: localized,
    })
}

/// Detection pipelines compared by [`phase_sweep`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PhaseMethod {
    /// Cap degrees at `2a`, split by the eigenvector of the second largest
    /// eigenvalue.
    RegularizedAdjacency,
    /// Cap degrees at `2a`, split by the eigenvector of the second smallest
    /// eigenvalue.
    RegularizedAdjacencySecondSmallest,
    /// `L(A_tau)` with `tau = rho * average degree`, second largest.
    RegularizedLaplacian,
}

impl PhaseMethod {
    pub fn name(&self) -> &'static str {
        match self {
            PhaseMethod::RegularizedAdjacency => "regularized-adjacency",
            PhaseMethod::RegularizedAdjacencySecondSmallest => "regularized-adjacency-second-smallest",
            PhaseMethod::RegularizedLaplacian => "regularized-laplacian",
        }
    }
}

impl std::str::FromStr for PhaseMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            PhaseMethod::RegularizedAdjacency,
            PhaseMethod::RegularizedAdjacencySecondSmallest,
            PhaseMethod::RegularizedLaplacian,
        ]
        .into_iter()
        .find(|m| m.name() == s)
        .ok_or_else(|| Error::param(format!("unknown method `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseConfig {
    /// Average degree `(a + b) / 2`.
    pub d: f64,
    /// Values of `(a - b)^2 / (a + b)`.
    pub snr_grid: Vec<f64>,
    pub n: usize,
    pub replicates: usize,
    pub methods: Vec<PhaseMethod>,
    pub seed: u64,
    /// Laplacian regularization `tau = rho * average degree`.
    #[serde(default = "one")]
    pub rho: f64,
    /// Degree cap multiplier on `a` for the adjacency methods.
    #[serde(default = "two")]
    pub cap_multiplier: f64,
}

fn one() -> f64 {
    1.0
}

fn two() -> f64 {
    2.0
}

/// `(a, b)` with `(a + b) / 2 = d` and `(a - b)^2 / (a + b) = snr`, `a >= b`,
/// or `None` when that needs `b < 0` or `a > n`.
pub fn solve_ab(d: f64, snr: f64, n: usize) -> Option<(f64, f64)> {
    if !(d > 0.0) || !(snr >= 0.0) {
        return None;
    }
    let half_gap = (2.0 * d * snr).sqrt() / 2.0;
    let (a, b) = (d + half_gap, d - half_gap);
    (b >= 0.0 && a <= n as f64).then_some((a, b))
}

/// One replicate of [`phase_sweep`]: accuracy `1 - misclassification`.
pub fn phase_replicate(a: f64, b: f64, n: usize, method: PhaseMethod, rho: f64, cap_multiplier: f64, seed: u64) -> Result<f64> {
    let spec = ModelSpec::PlantedPartition { a, b };
    let (graph, truth) = sample(&spec, n, seed)?;
    let estimate = match method {
        PhaseMethod::RegularizedAdjacency | PhaseMethod::RegularizedAdjacencySecondSmallest => {
            let (reg, _) = degree_regularize(&graph, a.max(f64::MIN_POSITIVE), cap_multiplier)?;
            let mode = if method == PhaseMethod::RegularizedAdjacency {
                SpectralMode::AdjacencySecondLargest
            } else {
                SpectralMode::AdjacencySecondSmallest
            };
            spectral_cluster(&SymmetricOperator::from_graph(&reg), 2, mode, seed)?
        }
        PhaseMethod::RegularizedLaplacian => {
            let tau = choose_tau(&graph, rho)?;
            let op = if tau > 0.0 {
                regularized_laplacian(&graph, tau)?
            } else {
                laplacian(&graph)
            };
            spectral_cluster(&op, 2, SpectralMode::LaplacianSecondLargest, seed)?
        }
    };
    Ok(1.0 - misclassification_rate(&estimate, &truth)?)
}

/// Accuracy of each method across an SNR grid at fixed average degree.
pub fn phase_sweep(config: &PhaseConfig) -> Result<ExperimentResult> {
    if config.replicates == 0 || config.snr_grid.is_empty() || config.methods.is_empty() {
        return Err(Error::param("phase sweep needs replicates, SNR values and methods"));
    }
    let mut records = Vec::new();
    let mut jobs = Vec::new();
    for (si, &snr) in config.snr_grid.iter().enumerate() {
        let Some((a, b)) = solve_ab(config.d, snr, config.n) else {
            records.push((si, None));
            continue;
        };
        for (mi, &method) in config.methods.iter().enumerate() {
            let seed = point_seed(config.seed, si);
            records.push((si, Some((mi, a, b, seed))));
            for rep in 0..config.replicates {
                jobs.push((si, mi, a, b, method, replicate_seed(seed, rep)));
            }
        }
    }
    let accuracies: Vec<f64> = jobs
        .par_iter()
        .map(|&(_, _, a, b, method, seed)| {
            match phase_replicate(a, b, config.n, method, config.rho, config.cap_multiplier, seed) {
                Ok(acc) => Ok(acc),
                Err(Error::Numerical { .. }) => Ok(f64::NAN),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<_>>()?;
    let mut out = Vec::new();
    let mut cursor = 0;
    for (si, slot) in records {
        let snr = config.snr_grid[si];
        match slot {
            None => out.push(Record {
                n: config.n,
                d: Some(config.d),
                a: None,
                b: None,
                snr: Some(snr),
                method: "none".into(),
                statistic: "infeasible".into(),
                mean: f64::NAN,
                stderr: f64::NAN,
                replicates: 0,
                seed: point_seed(config.seed, si),
            }),
            Some((mi, a, b, seed)) => {
                let acc = &accuracies[cursor..cursor + config.replicates];
                cursor += config.replicates;
                let (mean, stderr, count) = mean_stderr(acc);
                out.push(Record {
                    n: config.n,
                    d: Some(config.d),
                    a: Some(a),
                    b: Some(b),
                    snr: Some(snr),
                    method: config.methods[mi].name().into(),
                    statistic: "accuracy".into(),
                    mean,
                    stderr,
                    replicates: count,
                    seed,
                });
            }
        }
    }
    Ok(ExperimentResult {
        experiment: "phase".into(),
        config: serde_json::to_value(config)?,
        records: out,
    })
}
