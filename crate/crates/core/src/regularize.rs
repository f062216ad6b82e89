//! Regularization of sparse graphs: degree capping, high-degree vertex
//! removal, and normalized Laplacians with and without the `tau / n`
//! all-entries shift.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::operator::SymmetricOperator;

/// What [`degree_regularize`] did to a graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularizationReport {
    pub d_hat: f64,
    pub cap: f64,
    /// Vertices whose incident weights were scaled down, ascending.
    pub touched: Vec<usize>,
    /// Cumulative factor applied to each touched vertex, aligned with `touched`.
    pub scale_factors: Vec<f64>,
    pub max_degree_before: f64,
    pub max_degree_after: f64,
    /// `ceil(10 n / d_hat)`.
    pub budget: usize,
    pub within_budget: bool,
    pub passes: usize,
}

/// Down-weights edges at high-degree vertices until every weighted degree is
/// at most `cap_multiplier * d_hat`.
///
/// Vertices are visited in decreasing order of current degree; a vertex
/// whose degree `w` exceeds the cap has all its incident weights multiplied
/// by `cap / w`. Passes repeat until no vertex exceeds the cap. Edges away
/// from touched vertices keep their weights.
pub fn degree_regularize(g: &Graph, d_hat: f64, cap_multiplier: f64) -> Result<(Graph, RegularizationReport)> {
    if !(d_hat > 0.0) {
        return Err(Error::param("d_hat must be positive"));
    }
    if !(cap_multiplier > 0.0) {
        return Err(Error::param("cap multiplier must be positive"));
    }
    let n = g.n();
    let cap = cap_multiplier * d_hat;
    let mut factor = vec![1.0f64; n];
    let mut degree = g.degrees();
    let max_before = degree.iter().copied().fold(0.0, f64::max);
    let weight = |i: usize, j: usize, w: f64, factor: &[f64]| w * factor[i] * factor[j];

    let mut passes = 0;
    while degree.iter().any(|&d| d > cap) {
        passes += 1;
        if passes > n + 8 {
            return Err(Error::numerical("degree capping failed to settle", Some(degree.iter().copied().fold(0.0, f64::max))));
        }
        let mut order: Vec<usize> = (0..n).filter(|&i| degree[i] > cap).collect();
        order.sort_by(|&a, &b| degree[b].total_cmp(&degree[a]).then(a.cmp(&b)));
        for v in order {
            let current: f64 = g.row(v).map(|(j, w)| weight(v, j, w, &factor)).sum();
            if current <= cap {
                continue;
            }
            factor[v] *= cap / current;
        }
        // Recompute from scratch so rounding does not accumulate.
        degree = (0..n)
            .map(|i| g.row(i).map(|(j, w)| weight(i, j, w, &factor)).sum())
            .collect();
    }

    let out = g.map_weights(|i, j, w| weight(i, j, w, &factor));
    let touched: Vec<usize> = (0..n).filter(|&i| factor[i] < 1.0).collect();
    let scale_factors = touched.iter().map(|&i| factor[i]).collect();
    let budget = (10.0 * n as f64 / d_hat).ceil() as usize;
    let within_budget = touched.len() <= budget;
    if !within_budget {
        log::warn!(
            "degree capping touched {} vertices, more than the 10n/d budget of {budget}",
            touched.len()
        );
    }
    let max_after = out.max_degree();
    Ok((
        out,
        RegularizationReport {
            d_hat,
            cap,
            touched,
            scale_factors,
            max_degree_before: max_before,
            max_degree_after: max_after,
            budget,
            within_budget,
            passes,
        },
    ))
}

/// Deletes every edge incident to a vertex whose degree exceeds `threshold`.
/// The vertex set is preserved.
pub fn remove_high_degree(g: &Graph, threshold: f64) -> Result<Graph> {
    if !(threshold > 0.0) {
        return Err(Error::param("threshold must be positive"));
    }
    let deg = g.degrees();
    Ok(g.map_weights(|i, j, w| if deg[i] > threshold || deg[j] > threshold { 0.0 } else { w }))
}

fn inv_sqrt_or_zero(d: f64) -> f64 {
    if d > 0.0 {
        1.0 / d.sqrt()
    } else {
        0.0
    }
}

/// `D^{-1/2} A D^{-1/2}`, with isolated vertices mapped to zero rows.
pub fn laplacian(g: &Graph) -> SymmetricOperator {
    let scale = g.degrees().into_iter().map(inv_sqrt_or_zero).collect();
    SymmetricOperator::from_graph(g).with_scaling(scale)
}

/// `A + (tau / n) 1 1^T`, kept matrix-free.
pub fn tau_regularize(g: &Graph, tau: f64) -> Result<SymmetricOperator> {
    if !(tau >= 0.0) {
        return Err(Error::param("tau must be non-negative"));
    }
    Ok(SymmetricOperator::from_graph(g).with_rank_one(tau / g.n() as f64))
}

/// Degrees of `A + (tau / n) 1 1^T`, i.e. `d_i + tau`.
pub fn tau_degrees(g: &Graph, tau: f64) -> Vec<f64> {
    g.degrees().into_iter().map(|d| d + tau).collect()
}

/// Normalized Laplacian of `A + (tau / n) 1 1^T`.
pub fn regularized_laplacian(g: &Graph, tau: f64) -> Result<SymmetricOperator> {
    if !(tau >= 0.0) {
        return Err(Error::param("tau must be non-negative"));
    }
    let degrees = tau_degrees(g, tau);
    if tau == 0.0 && degrees.iter().any(|&d| d == 0.0) {
        return Err(Error::param("tau = 0 requires a graph without isolated vertices"));
    }
    let scale = degrees.into_iter().map(inv_sqrt_or_zero).collect();
    Ok(tau_regularize(g, tau)?.with_scaling(scale))
}

/// `rho` times the average degree.
pub fn choose_tau(g: &Graph, rho: f64) -> Result<f64> {
    if !(rho > 0.0 && rho <= 1.0) {
        return Err(Error::param("rho must lie in (0, 1]"));
    }
    let avg = g.average_degree();
    if avg == 0.0 {
        log::warn!("graph has no edges; tau is 0");
    }
    Ok(rho * avg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigen::{dense_eig_oracle, top_eigs, Which};
    use crate::models::{sample, ModelSpec};

    fn star(leaves: usize) -> Graph {
        Graph::from_edges(leaves + 1, (1..=leaves).map(|j| (0, j, 1.0))).unwrap()
    }

    fn complete(n: usize) -> Graph {
        Graph::from_edges(n, (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j, 1.0)))).unwrap()
    }

    #[test]
    fn compliant_graph_is_untouched() {
        let g = complete(4);
        let (out, report) = degree_regularize(&g, 2.0, 2.0).unwrap();
        assert_eq!(out, g);
        assert!(report.touched.is_empty());
        assert_eq!(report.passes, 0);
    }

    #[test]
    fn star_center_scaled() {
        let g = star(9);
        let (out, report) = degree_regularize(&g, 2.0, 2.0).unwrap();
        assert_eq!(report.touched, vec![0]);
        assert!((report.scale_factors[0] - 4.0 / 9.0).abs() < 1e-15);
        let deg = out.degrees();
        assert!((deg[0] - 4.0).abs() < 1e-12);
        for d in &deg[1..] {
            assert!((d - 4.0 / 9.0).abs() < 1e-15);
        }
        assert!(report.max_degree_after <= 4.0);
    }

    #[test]
    fn planted_partition_capped_at_two_a() {
        let (g, _) = sample(&ModelSpec::PlantedPartition { a: 5.0, b: 0.1 }, 50, 3).unwrap();
        let (out, _) = degree_regularize(&g, 5.0, 2.0).unwrap();
        assert!(out.degrees().iter().all(|&d| d <= 10.0));
    }

    #[test]
    fn regularization_is_idempotent() {
        let (g, _) = sample(&ModelSpec::ErdosRenyi { p: 0.05 }, 300, 1).unwrap();
        let (once, r1) = degree_regularize(&g, 4.0, 1.0).unwrap();
        assert!(!r1.touched.is_empty());
        let (twice, r2) = degree_regularize(&once, 4.0, 1.0).unwrap();
        assert_eq!(once, twice);
        assert!(r2.touched.is_empty());
    }

    #[test]
    fn removal() {
        assert_eq!(remove_high_degree(&Graph::empty(5), 1.0).unwrap(), Graph::empty(5));
        let out = remove_high_degree(&star(9), 5.0).unwrap();
        assert_eq!(out.edge_count(), 0);
        assert_eq!(out.n(), 10);
        let k4 = complete(4);
        assert_eq!(remove_high_degree(&k4, 3.0).unwrap(), k4);
    }

    #[test]
    fn laplacian_of_single_edge() {
        let g = Graph::from_edges(2, [(0, 1, 1.0)]).unwrap();
        assert_eq!(laplacian(&g).to_dense(), vec![0.0, 1.0, 1.0, 0.0]);
    }

    #[test]
    fn isolated_vertex_row_is_zero() {
        let g = Graph::from_edges(3, [(0, 1, 1.0)]).unwrap();
        let d = laplacian(&g).to_dense();
        assert!(d[6..9].iter().all(|&v| v == 0.0));
        assert!(d.iter().skip(2).step_by(3).all(|&v| v == 0.0));
    }

    #[test]
    fn laplacian_of_complete_graph() {
        let d = laplacian(&complete(4)).to_dense();
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { 0.0 } else { 1.0 / 3.0 };
                assert!((d[i * 4 + j] - want).abs() < 1e-15);
            }
        }
        let top = top_eigs(&laplacian(&complete(4)), 1, Which::LargestAlgebraic, 1e-12, 0).unwrap();
        assert!((top[0].value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tau_shift() {
        let g = complete(4);
        assert_eq!(tau_regularize(&g, 0.0).unwrap().to_dense(), g.to_dense());
        let empty = Graph::empty(6);
        let op = tau_regularize(&empty, 6.0).unwrap();
        assert!(op.to_dense().iter().all(|&v| (v - 1.0).abs() < 1e-15));
        assert!((crate::eigen::spectral_norm(&op, 1e-10).unwrap() - 6.0).abs() < 1e-9);
        assert!(tau_regularize(&g, -1.0).is_err());
    }

    #[test]
    fn tau_degrees_add_tau() {
        let (g, _) = sample(&ModelSpec::PlantedPartition { a: 5.0, b: 0.1 }, 50, 2).unwrap();
        let tau = choose_tau(&g, 0.1).unwrap();
        let op = tau_regularize(&g, tau).unwrap();
        let mut rowsum = vec![0.0; 50];
        op.matvec(&[1.0; 50], &mut rowsum);
        for (r, d) in rowsum.iter().zip(g.degrees()) {
            assert!((r - (d + tau)).abs() < 1e-12);
            assert!(*r > 0.0);
        }
    }

    #[test]
    fn regularized_laplacian_of_two_edges_is_connected() {
        let g = Graph::from_edges(4, [(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        let op = regularized_laplacian(&g, 0.5).unwrap();
        let e = dense_eig_oracle(4, &op.to_dense()).unwrap();
        assert!((e.values[3] - 1.0).abs() < 1e-12);
        assert!(e.values[2] < 1.0 - 1e-6);
        // Without tau the eigenvalue 1 is double.
        let plain = dense_eig_oracle(4, &laplacian(&g).to_dense()).unwrap();
        assert!((plain.values[2] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn regularized_laplacian_requires_tau_with_isolated_vertices() {
        let g = Graph::from_edges(3, [(0, 1, 1.0)]).unwrap();
        assert!(regularized_laplacian(&g, 0.0).is_err());
        assert!(regularized_laplacian(&complete(3), 0.0).is_ok());
    }

    #[test]
    fn tau_choice() {
        assert_eq!(choose_tau(&complete(4), 1.0).unwrap(), 3.0);
        assert_eq!(choose_tau(&Graph::empty(4), 0.25).unwrap(), 0.0);
        assert!((choose_tau(&star(9), 0.25).unwrap() - 0.45).abs() < 1e-15);
        assert!(choose_tau(&star(9), 0.0).is_err());
        assert!(choose_tau(&star(9), 1.5).is_err());
    }
}
