//! Closed-form concentration bounds and recovery thresholds.
//!
//! Hidden absolute constants are explicit `c` parameters; pass `1.0` to get
//! the bare formula.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::SymmetricOperator;

/// `2 sqrt(d)`, the limiting norm of a centered dense random graph.
pub fn bai_yin_limit(d: f64) -> f64 {
    2.0 * d.sqrt()
}

/// Matrix Bernstein tail `min(1, 2n exp(-(t^2/2) / (sigma2 + K t / 3)))`.
pub fn bernstein_tail(sigma2: f64, k: f64, n: usize, t: f64) -> Result<f64> {
    if sigma2 < 0.0 || k <= 0.0 || t < 0.0 {
        return Err(Error::param("need sigma2 >= 0, K > 0, t >= 0"));
    }
    let exponent = -(t * t / 2.0) / (sigma2 + k * t / 3.0);
    let exponent = if exponent.is_nan() { 0.0 } else { exponent };
    Ok((2.0 * n as f64 * exponent.exp()).min(1.0))
}

/// `c (sigma sqrt(log n) + K log n)`.
pub fn bernstein_expectation(sigma: f64, k: f64, n: usize, c: f64) -> Result<f64> {
    if sigma < 0.0 || k < 0.0 || c < 0.0 || n < 2 {
        return Err(Error::param("need sigma, K, C >= 0 and n >= 2"));
    }
    let ln = (n as f64).ln();
    Ok(c * (sigma * ln.sqrt() + k * ln))
}

/// `c (max_i sqrt(sum_j sigma_ij^2) + sqrt(log n) max_ij K_ij)` for
/// row-major `n x n` variance and sup-norm arrays.
pub fn bvh_bound(variances: &[f64], sup_bounds: &[f64], n: usize, c: f64) -> Result<f64> {
    if variances.len() != n * n || sup_bounds.len() != n * n {
        return Err(Error::param(format!("expected two {n}x{n} arrays")));
    }
    if n == 0 {
        return Ok(0.0);
    }
    let row = (0..n)
        .map(|i| variances[i * n..(i + 1) * n].iter().sum::<f64>().sqrt())
        .fold(0.0, f64::max);
    let kmax = sup_bounds.iter().copied().fold(0.0, f64::max);
    Ok(c * (row + (n as f64).ln().sqrt() * kmax))
}

/// The inhomogeneous random graph case: `sigma_ij^2 = P_ij`, `K_ij = 1`,
/// giving `c (sqrt(d) + sqrt(log n))` with `d` the largest expected row sum.
pub fn bvh_bound_graph(max_row_sum: f64, n: usize, c: f64) -> f64 {
    c * (max_row_sum.sqrt() + (n.max(1) as f64).ln().sqrt())
}

/// `sqrt(d log n) + log n`, matrix Bernstein applied to a random graph.
pub fn bernstein_graph(d: f64, n: usize, c: f64) -> f64 {
    let ln = (n.max(1) as f64).ln();
    c * ((d * ln).sqrt() + ln)
}

/// Largest column Euclidean norm of an operator.
pub fn seginer_stat(op: &SymmetricOperator) -> f64 {
    op.column_norms().into_iter().fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BenaychBound {
    pub value: f64,
    /// Whether `4 <= d <= n^(2/13)` holds.
    pub in_window: bool,
}

/// `2 sqrt(d) + c sqrt(log n / (1 + log(log n / d)))`.
///
/// Fails when `1 + log(log n / d) <= 0`, where the formula is undefined.
pub fn benaych_bound(d: f64, n: usize, c: f64) -> Result<BenaychBound> {
    if !(d > 0.0) || n < 2 {
        return Err(Error::param("need d > 0 and n >= 2"));
    }
    let ln = (n as f64).ln();
    let inner = 1.0 + (ln / d).ln();
    if !(inner > 0.0) {
        return Err(Error::param(format!(
            "1 + log(log n / d) = {inner} is not positive; bound undefined"
        )));
    }
    let in_window = d >= 4.0 && d <= (n as f64).powf(2.0 / 13.0);
    if !in_window {
        log::warn!("d = {d} is outside 4 <= d <= n^(2/13); evaluating anyway");
    }
    Ok(BenaychBound {
        value: bai_yin_limit(d) + c * (ln / inner).sqrt(),
        in_window,
    })
}

/// `c r^{3/2} sqrt(d)`; holds with probability at least `1 - n^{-r}`.
pub fn regularized_concentration_bound(r: f64, d: f64, c: f64) -> Result<f64> {
    if r < 1.0 || d < 0.0 {
        return Err(Error::param("need r >= 1 and d >= 0"));
    }
    Ok(c * r.powf(1.5) * d.sqrt())
}

/// `c r^2 / sqrt(tau) (1 + d / tau)^{5/2}`; holds with probability at least
/// `1 - e^{-r}`.
pub fn regularized_laplacian_bound(r: f64, tau: f64, d: f64, c: f64) -> Result<f64> {
    if r < 1.0 || !(tau > 0.0) || d < 0.0 {
        return Err(Error::param("need r >= 1, tau > 0 and d >= 0"));
    }
    Ok(c * r * r / tau.sqrt() * (1.0 + d / tau).powf(2.5))
}

/// Threshold checks for the balanced two-community planted partition
/// `G(n, a/n, b/n)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecoveryThresholds {
    pub a: f64,
    pub b: f64,
    pub n: usize,
    /// `(a - b)^2 / (a + b)`, 0 when `a = b = 0`.
    pub snr: f64,
    /// `(a - b)^2 > 2 (a + b)`
    pub weak_recovery: bool,
    /// `|sqrt(a / log n) - sqrt(b / log n)| > sqrt(2)`
    pub strong_consistency: bool,
}

impl RecoveryThresholds {
    /// `(a - b)^2 > c (a + b)` for a caller-chosen constant.
    pub fn partial_recovery(&self, c: f64) -> bool {
        (self.a - self.b).powi(2) > c * (self.a + self.b)
    }
}

pub fn recovery_thresholds(a: f64, b: f64, n: usize) -> Result<RecoveryThresholds> {
    if a < 0.0 || b < 0.0 || n < 2 {
        return Err(Error::param("need a, b >= 0 and n >= 2"));
    }
    let diff2 = (a - b).powi(2);
    let snr = if a + b == 0.0 { 0.0 } else { diff2 / (a + b) };
    let ln = (n as f64).ln();
    Ok(RecoveryThresholds {
        a,
        b,
        n,
        snr,
        weak_recovery: diff2 > 2.0 * (a + b),
        strong_consistency: ((a / ln).sqrt() - (b / ln).sqrt()).abs() > 2f64.sqrt(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    Sparse,
    SemiSparse,
    SemiDense,
    Dense,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Regime::Sparse => "sparse",
            Regime::SemiSparse => "semi-sparse",
            Regime::SemiDense => "semi-dense",
            Regime::Dense => "dense",
        })
    }
}

/// Finite-`n` stand-ins for the asymptotic density classes: dense when
/// `d >= n/10`, else sparse when `d <= 10`, semi-sparse when `d <= 3 log n`,
/// semi-dense otherwise.
pub fn classify_regime(n: usize, d: f64) -> Result<Regime> {
    if n < 2 || d < 0.0 {
        return Err(Error::param("need n >= 2 and d >= 0"));
    }
    let nf = n as f64;
    Ok(if d >= nf / 10.0 {
        Regime::Dense
    } else if d <= 10.0 {
        Regime::Sparse
    } else if d <= 3.0 * nf.ln() {
        Regime::SemiSparse
    } else {
        Regime::SemiDense
    })
}

/// Names accepted by [`evaluate_named`].
pub const BOUND_NAMES: [&str; 6] = ["bai-yin", "bernstein", "bvh", "benaych", "thm51", "thm54"];

/// Parameters for [`evaluate_named`]; unused fields are ignored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundArgs {
    pub d: f64,
    pub n: usize,
    pub c: f64,
    pub r: f64,
    pub tau: f64,
}

impl Default for BoundArgs {
    fn default() -> Self {
        BoundArgs {
            d: 0.0,
            n: 2,
            c: 1.0,
            r: 1.0,
            tau: 1.0,
        }
    }
}

/// Evaluates a bound by registry name for a random graph with expected
/// degree `d` on `n` nodes.
pub fn evaluate_named(name: &str, args: BoundArgs) -> Result<f64> {
    let BoundArgs { d, n, c, r, tau } = args;
    match name {
        "bai-yin" => Ok(bai_yin_limit(d)),
        "bernstein" => Ok(bernstein_graph(d, n, c)),
        "bvh" => Ok(bvh_bound_graph(d, n, c)),
        "benaych" => benaych_bound(d, n, c).map(|b| b.value),
        "thm51" => regularized_concentration_bound(r, d, c),
        "thm54" => regularized_laplacian_bound(r, tau, d, c),
        other => Err(Error::param(format!(
            "unknown bound `{other}`; expected one of {}",
            BOUND_NAMES.join(", ")
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;

    #[test]
    fn bai_yin_values() {
        assert_eq!(bai_yin_limit(4.0), 4.0);
        assert_eq!(bai_yin_limit(0.0), 0.0);
        assert_eq!(bai_yin_limit(25.0), 10.0);
    }

    #[test]
    fn bernstein_tail_values() {
        assert_eq!(bernstein_tail(1.0, 1.0, 5, 0.0).unwrap(), 1.0);
        let v = bernstein_tail(1.0, 1.0, 1, 3.0).unwrap();
        assert!((v - 2.0 * (-2.25f64).exp()).abs() < 1e-15);
        assert!((v - 0.2108).abs() < 1e-4);
        assert!(bernstein_tail(1.0, 1.0, 1, 1e6).unwrap() < 1e-100);
        assert!(bernstein_tail(1.0, 0.0, 1, 1.0).is_err());
    }

    #[test]
    fn bernstein_expectation_values() {
        let ln2 = 2f64.ln();
        assert!((bernstein_expectation(1.0, 0.0, 2, 1.0).unwrap() - ln2.sqrt()).abs() < 1e-15);
        assert!((bernstein_expectation(1.0, 0.0, 2, 1.0).unwrap() - 0.8326).abs() < 1e-4);
        assert!((bernstein_expectation(0.0, 1.0, 2, 1.0).unwrap() - 0.6931).abs() < 1e-4);
        assert_eq!(bernstein_expectation(3.0, 2.0, 9, 0.0).unwrap(), 0.0);
        assert!(bernstein_expectation(1.0, 1.0, 1, 1.0).is_err());
    }

    #[test]
    fn bvh_cases() {
        assert_eq!(bvh_bound(&[0.0; 9], &[0.0; 9], 3, 1.0).unwrap(), 0.0);
        // One nonzero row: sqrt(0.25 + 0.25 + 0.5) = 1, K = 0.
        let var = [0.0, 0.25, 0.25, 0.25, 0.0, 0.0, 0.25, 0.0, 0.0];
        let mut var_row = var;
        var_row[0] = 0.5;
        assert!((bvh_bound(&var_row, &[0.0; 9], 3, 1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!(bvh_bound(&[0.0; 8], &[0.0; 9], 3, 1.0).is_err());
    }

    #[test]
    fn bvh_specializes_for_er() {
        let (n, p) = (40usize, 0.1);
        let mut var = vec![p; n * n];
        let mut sup = vec![1.0; n * n];
        for i in 0..n {
            var[i * n + i] = 0.0;
            sup[i * n + i] = 0.0;
        }
        let d = (n - 1) as f64 * p;
        let direct = d.sqrt() + (n as f64).ln().sqrt();
        assert!((bvh_bound(&var, &sup, n, 1.0).unwrap() - direct).abs() < 1e-12);
        assert!((bvh_bound_graph(d, n, 1.0) - direct).abs() < 1e-12);
    }

    #[test]
    fn seginer_on_unweighted_graph_is_sqrt_max_degree() {
        let k4 = Graph::from_edges(4, (0..4).flat_map(|i| ((i + 1)..4).map(move |j| (i, j, 1.0)))).unwrap();
        let op = SymmetricOperator::from_graph(&k4);
        assert!((seginer_stat(&op) - 3f64.sqrt()).abs() < 1e-15);
        let star = Graph::from_edges(6, (1..6).map(|j| (0, j, 1.0))).unwrap();
        assert!((seginer_stat(&SymmetricOperator::from_graph(&star)) - 5f64.sqrt()).abs() < 1e-15);
        assert_eq!(seginer_stat(&SymmetricOperator::zero(5)), 0.0);
    }

    #[test]
    fn benaych_values() {
        let e = std::f64::consts::E;
        // log n = 4e, so log(log n / d) = 1.
        let n = (4.0 * e).exp().round() as usize;
        let ln = (n as f64).ln();
        let want = 4.0 + (ln / (1.0 + (ln / 4.0).ln())).sqrt();
        let got = benaych_bound(4.0, n, 1.0).unwrap();
        assert!((got.value - want).abs() < 1e-12);
        assert!((got.value - (4.0 + (2.0 * e).sqrt())).abs() < 1e-3);
        assert_eq!(benaych_bound(9.0, 1000, 0.0).unwrap().value, 6.0);
        assert!(benaych_bound(100.0, 1000, 1.0).is_err());
    }

    #[test]
    fn regularized_bounds() {
        assert_eq!(regularized_concentration_bound(1.0, 4.0, 1.0).unwrap(), 2.0);
        assert!((regularized_concentration_bound(4.0, 9.0, 1.0).unwrap() - 24.0).abs() < 1e-12);
        assert_eq!(regularized_concentration_bound(2.0, 0.0, 1.0).unwrap(), 0.0);
        let d = 3.0;
        let v = regularized_laplacian_bound(1.0, d, d, 1.0).unwrap();
        assert!((v - 2f64.powf(2.5) / d.sqrt()).abs() < 1e-12);
        assert!(regularized_laplacian_bound(1.0, 1e12, 3.0, 1.0).unwrap() < 1e-5);
        assert_eq!(regularized_laplacian_bound(1.0, 2.0, 3.0, 0.0).unwrap(), 0.0);
        assert!(regularized_laplacian_bound(1.0, 0.0, 3.0, 1.0).is_err());
        assert!(regularized_concentration_bound(0.5, 3.0, 1.0).is_err());
    }

    #[test]
    fn thresholds() {
        let t = recovery_thresholds(5.0, 1.0, 1000).unwrap();
        assert!(t.weak_recovery);
        assert!((t.snr - 16.0 / 6.0).abs() < 1e-15);
        let s = recovery_thresholds(3.0, 3.0, 1000).unwrap();
        assert!(!s.weak_recovery && !s.strong_consistency && s.snr == 0.0);
        assert_eq!(recovery_thresholds(0.0, 0.0, 10).unwrap().snr, 0.0);
        // log n scale: a = 49 log n, b = log n gives |7 - 1| = 6 > sqrt 2.
        let n = 10_000usize;
        let ln = (n as f64).ln();
        let st = recovery_thresholds(49.0 * ln, ln, n).unwrap();
        assert!(st.strong_consistency);
        let weak = recovery_thresholds(1.5 * ln, ln, n).unwrap();
        assert!(!weak.strong_consistency);
        assert!(t.partial_recovery(2.0) && !t.partial_recovery(3.0));
    }

    #[test]
    fn regimes() {
        assert_eq!(classify_regime(1_000_000, 5.0).unwrap(), Regime::Sparse);
        assert_eq!(classify_regime(1_000_000, 100.0).unwrap(), Regime::SemiDense);
        assert_eq!(classify_regime(1_000_000, 30.0).unwrap(), Regime::SemiSparse);
        assert_eq!(classify_regime(1000, 1000.0).unwrap(), Regime::Dense);
    }

    #[test]
    fn registry() {
        let args = BoundArgs { d: 25.0, ..Default::default() };
        assert_eq!(evaluate_named("bai-yin", args).unwrap(), 10.0);
        assert!(evaluate_named("nope", args).is_err());
    }
}
