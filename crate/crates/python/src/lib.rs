//! Python bindings for `specgraph`.

use pyo3::exceptions::{PyOSError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use specgraph::detect::{self, SpectralMode};
use specgraph::experiments::{self, Figure2Config};
use specgraph::models::{self, ModelSpec};
use specgraph::regularize;
use specgraph::{bounds, Error, LabelVector, SymmetricOperator, Which};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Numerical { .. } => PyRuntimeError::new_err(e.to_string()),
        Error::Io(_) => PyOSError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

/// An undirected weighted graph without self-loops.
#[pyclass(name = "Graph", frozen)]
struct PyGraph {
    inner: specgraph::Graph,
}

#[pymethods]
impl PyGraph {
    #[new]
    fn new(n: usize, edges: Vec<(usize, usize, f64)>) -> PyResult<Self> {
        specgraph::Graph::from_edges(n, edges).map(|inner| PyGraph { inner }).map_err(to_py)
    }

    #[staticmethod]
    fn from_tsv(text: &str) -> PyResult<Self> {
        specgraph::Graph::from_tsv_str(text).map(|inner| PyGraph { inner }).map_err(to_py)
    }

    fn to_tsv(&self) -> String {
        self.inner.to_tsv_string()
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn edge_count(&self) -> usize {
        self.inner.edge_count()
    }

    fn edges(&self) -> Vec<(usize, usize, f64)> {
        self.inner.edges().collect()
    }

    fn degrees(&self) -> Vec<f64> {
        self.inner.degrees()
    }

    fn average_degree(&self) -> f64 {
        self.inner.average_degree()
    }

    fn max_degree(&self) -> f64 {
        self.inner.max_degree()
    }

    fn __eq__(&self, other: &PyGraph) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!("Graph(n={}, edges={})", self.inner.n(), self.inner.edge_count())
    }
}

fn labels_from(labels: Vec<usize>) -> PyResult<LabelVector> {
    if labels.contains(&0) {
        return Err(PyValueError::new_err("labels are 1-based"));
    }
    Ok(LabelVector::from_zero_based(labels.into_iter().map(|l| l - 1).collect()))
}

fn labels_to(labels: &LabelVector) -> Vec<usize> {
    labels.as_slice().iter().map(|l| l + 1).collect()
}

/// Samples a graph from a JSON model description such as
/// `{"model": "planted_partition", "a": 5, "b": 0.1}`. Returns the graph and
/// 1-based community labels.
#[pyfunction]
#[pyo3(signature = (model, n, seed=0))]
fn sample(model: &str, n: usize, seed: u64) -> PyResult<(PyGraph, Vec<usize>)> {
    let spec: ModelSpec = serde_json::from_str(model).map_err(|e| PyValueError::new_err(e.to_string()))?;
    let (g, labels) = models::sample(&spec, n, seed).map_err(to_py)?;
    Ok((PyGraph { inner: g }, labels_to(&labels)))
}

#[pyfunction]
#[pyo3(signature = (n, p, seed=0))]
fn erdos_renyi(n: usize, p: f64, seed: u64) -> PyResult<PyGraph> {
    let (g, _) = models::sample(&ModelSpec::ErdosRenyi { p }, n, seed).map_err(to_py)?;
    Ok(PyGraph { inner: g })
}

#[pyfunction]
#[pyo3(signature = (n, a, b, seed=0))]
fn planted_partition(n: usize, a: f64, b: f64, seed: u64) -> PyResult<(PyGraph, Vec<usize>)> {
    let (g, labels) = models::sample(&ModelSpec::PlantedPartition { a, b }, n, seed).map_err(to_py)?;
    Ok((PyGraph { inner: g }, labels_to(&labels)))
}

/// Caps weighted degrees at `multiplier * d_hat`. Returns the new graph and
/// the 0-based indices of the vertices that were scaled down.
#[pyfunction]
#[pyo3(signature = (graph, d_hat, multiplier=2.0))]
fn degree_regularize(graph: &PyGraph, d_hat: f64, multiplier: f64) -> PyResult<(PyGraph, Vec<usize>)> {
    let (g, report) = regularize::degree_regularize(&graph.inner, d_hat, multiplier).map_err(to_py)?;
    Ok((PyGraph { inner: g }, report.touched))
}

#[pyfunction]
fn remove_high_degree(graph: &PyGraph, threshold: f64) -> PyResult<PyGraph> {
    regularize::remove_high_degree(&graph.inner, threshold)
        .map(|inner| PyGraph { inner })
        .map_err(to_py)
}

fn operator(graph: &PyGraph, kind: &str, tau: f64) -> PyResult<SymmetricOperator> {
    match kind {
        "adjacency" => Ok(SymmetricOperator::from_graph(&graph.inner)),
        "laplacian" if tau == 0.0 => Ok(regularize::laplacian(&graph.inner)),
        "laplacian" => regularize::regularized_laplacian(&graph.inner, tau).map_err(to_py),
        other => Err(PyValueError::new_err(format!("unknown operator `{other}`"))),
    }
}

fn which_from(name: &str) -> PyResult<Which> {
    match name {
        "largest" => Ok(Which::LargestAlgebraic),
        "smallest" => Ok(Which::SmallestAlgebraic),
        "magnitude" => Ok(Which::LargestMagnitude),
        other => Err(PyValueError::new_err(format!("unknown selector `{other}`"))),
    }
}

/// Extreme eigenpairs of the adjacency matrix or of the (`tau`-regularized)
/// normalized Laplacian.
#[pyfunction]
#[pyo3(signature = (graph, k, operator="adjacency", which="largest", tau=0.0, tol=1e-8, seed=0))]
fn eigs(
    graph: &PyGraph,
    k: usize,
    operator: &str,
    which: &str,
    tau: f64,
    tol: f64,
    seed: u64,
) -> PyResult<Vec<(f64, Vec<f64>)>> {
    let op = self::operator(graph, operator, tau)?;
    let pairs = specgraph::top_eigs(&op, k, which_from(which)?, tol, seed).map_err(to_py)?;
    Ok(pairs.into_iter().map(|p| (p.value, p.vector)).collect())
}

#[pyfunction]
#[pyo3(signature = (graph, operator="adjacency", tau=0.0, tol=1e-8))]
fn spectral_norm(graph: &PyGraph, operator: &str, tau: f64, tol: f64) -> PyResult<f64> {
    let op = self::operator(graph, operator, tau)?;
    specgraph::spectral_norm(&op, tol).map_err(to_py)
}

/// `||A - E[A]||` for a graph and the JSON model it was drawn from.
#[pyfunction]
#[pyo3(signature = (graph, model, labels, tol=1e-8))]
fn deviation_norm(graph: &PyGraph, model: &str, labels: Vec<usize>, tol: f64) -> PyResult<f64> {
    let spec: ModelSpec = serde_json::from_str(model).map_err(|e| PyValueError::new_err(e.to_string()))?;
    let labels = labels_from(labels)?;
    let expected = models::expected_matrix(&spec, &labels).map_err(to_py)?;
    if expected.n() != graph.inner.n() {
        return Err(PyValueError::new_err("graph and model sizes differ"));
    }
    let op = SymmetricOperator::from_graph(&graph.inner).with_centering(expected.into());
    specgraph::spectral_norm(&op, tol).map_err(to_py)
}

/// Spectral clustering. `tau_rho` sets `tau = tau_rho * average degree` for
/// the Laplacian method. Returns 1-based labels.
#[pyfunction]
#[pyo3(signature = (graph, method="laplacian-second-largest", k=2, tau_rho=1.0, seed=0))]
fn detect_communities(graph: &PyGraph, method: &str, k: usize, tau_rho: f64, seed: u64) -> PyResult<Vec<usize>> {
    let mode: SpectralMode = method.parse().map_err(to_py)?;
    let op = match mode {
        SpectralMode::LaplacianSecondLargest if tau_rho > 0.0 => {
            let tau = regularize::choose_tau(&graph.inner, tau_rho).map_err(to_py)?;
            self::operator(graph, "laplacian", tau)?
        }
        SpectralMode::LaplacianSecondLargest => regularize::laplacian(&graph.inner),
        _ => SymmetricOperator::from_graph(&graph.inner),
    };
    let labels = detect::spectral_cluster(&op, k, mode, seed).map_err(to_py)?;
    Ok(labels_to(&labels))
}

#[pyfunction]
fn misclassification_rate(estimate: Vec<usize>, truth: Vec<usize>) -> PyResult<f64> {
    detect::misclassification_rate(&labels_from(estimate)?, &labels_from(truth)?).map_err(to_py)
}

/// Evaluates a named bound: bai-yin, bernstein, bvh, benaych, thm51 or thm54.
#[pyfunction]
#[pyo3(signature = (name, d, n=2, c=1.0, r=1.0, tau=1.0))]
fn bound(name: &str, d: f64, n: usize, c: f64, r: f64, tau: f64) -> PyResult<f64> {
    bounds::evaluate_named(name, bounds::BoundArgs { d, n, c, r, tau }).map_err(to_py)
}

/// Weak-recovery and strong-consistency checks plus the SNR
/// `(a - b)^2 / (a + b)`.
#[pyfunction]
fn recovery_thresholds(a: f64, b: f64, n: usize) -> PyResult<(f64, bool, bool)> {
    let t = bounds::recovery_thresholds(a, b, n).map_err(to_py)?;
    Ok((t.snr, t.weak_recovery, t.strong_consistency))
}

/// Leading Laplacian eigenvectors of one planted-partition draw. Returns
/// `(table, (plain_error, regularized_error), tau)` where each table row
/// holds three eigenvector entries of `L(A)` followed by three of `L(A_tau)`.
#[pyfunction]
#[pyo3(signature = (n=50, a=5.0, b=0.1, rho=0.1, seed=0))]
#[allow(clippy::type_complexity)]
fn figure2(n: usize, a: f64, b: f64, rho: f64, seed: u64) -> PyResult<(Vec<[f64; 6]>, (f64, f64), f64)> {
    let r = experiments::figure2(&Figure2Config { n, a, b, rho, seed }).map_err(to_py)?;
    Ok((r.table, (r.misclassification_plain, r.misclassification_regularized), r.tau))
}

#[pymodule]
fn specgraph_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGraph>()?;
    m.add_function(wrap_pyfunction!(sample, m)?)?;
    m.add_function(wrap_pyfunction!(erdos_renyi, m)?)?;
    m.add_function(wrap_pyfunction!(planted_partition, m)?)?;
    m.add_function(wrap_pyfunction!(degree_regularize, m)?)?;
    m.add_function(wrap_pyfunction!(remove_high_degree, m)?)?;
    m.add_function(wrap_pyfunction!(eigs, m)?)?;
    m.add_function(wrap_pyfunction!(spectral_norm, m)?)?;
    m.add_function(wrap_pyfunction!(deviation_norm, m)?)?;
    m.add_function(wrap_pyfunction!(detect_communities, m)?)?;
    m.add_function(wrap_pyfunction!(misclassification_rate, m)?)?;
    m.add_function(wrap_pyfunction!(bound, m)?)?;
    m.add_function(wrap_pyfunction!(recovery_thresholds, m)?)?;
    m.add_function(wrap_pyfunction!(figure2, m)?)?;
    Ok(())
}
