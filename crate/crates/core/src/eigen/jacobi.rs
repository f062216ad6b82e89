//! Dense cyclic Jacobi eigensolver. Slow and simple; used as a test oracle.

use crate::error::{Error, Result};
use crate::operator::check_symmetric;

pub const ORACLE_MAX_N: usize = 256;

/// Full eigen-decomposition of a dense symmetric matrix.
#[derive(Debug, Clone)]
pub struct DenseEigen {
    pub n: usize,
    /// Ascending.
    pub values: Vec<f64>,
    /// Column-major: eigenvector `k` is `vectors[k * n..(k + 1) * n]`.
    pub vectors: Vec<f64>,
}

impl DenseEigen {
    pub fn vector(&self, k: usize) -> &[f64] {
        &self.vectors[k * self.n..(k + 1) * self.n]
    }

    /// Frobenius norm of `M - V diag(values) V^T`.
    pub fn reconstruction_error(&self, m: &[f64]) -> f64 {
        let n = self.n;
        let mut err = 0.0;
        for i in 0..n {
            for j in 0..n {
                let r: f64 = (0..n).map(|k| self.values[k] * self.vectors[k * n + i] * self.vectors[k * n + j]).sum();
                err += (m[i * n + j] - r).powi(2);
            }
        }
        err.sqrt()
    }
}

/// Cyclic Jacobi on a row-major symmetric matrix with `n <= 256`.
pub fn dense_eig_oracle(n: usize, matrix: &[f64]) -> Result<DenseEigen> {
    if n > ORACLE_MAX_N {
        return Err(Error::param(format!("dense oracle limited to n <= {ORACLE_MAX_N}")));
    }
    if matrix.len() != n * n {
        return Err(Error::param("matrix has the wrong size"));
    }
    check_symmetric(n, matrix, 1e-10)?;
    let mut a = matrix.to_vec();
    for i in 0..n {
        for j in (i + 1)..n {
            let v = 0.5 * (a[i * n + j] + a[j * n + i]);
            a[i * n + j] = v;
            a[j * n + i] = v;
        }
    }
    // v[row * n + col], columns are eigenvectors
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let frob: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j].powi(2))
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * frob || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq.abs() <= f64::MIN_POSITIVE {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                a[p * n + p] -= t * apq;
                a[q * n + q] += t * apq;
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for r in 0..n {
                    if r != p && r != q {
                        let arp = a[r * n + p];
                        let arq = a[r * n + q];
                        let nrp = c * arp - s * arq;
                        let nrq = s * arp + c * arq;
                        a[r * n + p] = nrp;
                        a[p * n + r] = nrp;
                        a[r * n + q] = nrq;
                        a[q * n + r] = nrq;
                    }
                    let vrp = v[r * n + p];
                    let vrq = v[r * n + q];
                    v[r * n + p] = c * vrp - s * vrq;
                    v[r * n + q] = s * vrp + c * vrq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a[x * n + x].total_cmp(&a[y * n + y]));
    let values = order.iter().map(|&k| a[k * n + k]).collect();
    let mut vectors = vec![0.0; n * n];
    for (new, &old) in order.iter().enumerate() {
        for r in 0..n {
            vectors[new * n + r] = v[r * n + old];
        }
    }
    Ok(DenseEigen { n, values, vectors })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn diagonal_is_its_own_decomposition() {
        let m = [3.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, 2.0];
        let e = dense_eig_oracle(3, &m).unwrap();
        assert_eq!(e.values, vec![-1.0, 2.0, 3.0]);
        assert_eq!(e.vector(0), &[0.0, 1.0, 0.0]);
    }

    #[test]
    fn swap_matrix() {
        let e = dense_eig_oracle(2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-15);
        assert!((e.values[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn wigner_reconstruction() {
        let n = 64;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(64);
        let mut m = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let x: f64 = rng.random::<f64>() * 2.0 - 1.0;
                m[i * n + j] = x;
                m[j * n + i] = x;
            }
        }
        let e = dense_eig_oracle(n, &m).unwrap();
        let norm = e.values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        assert!(e.reconstruction_error(&m) <= 1e-8 * norm);
        for a in 0..n {
            for b in a..n {
                let dot: f64 = e.vector(a).iter().zip(e.vector(b)).map(|(x, y)| x * y).sum();
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((dot - want).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn rejects_asymmetric_and_oversized() {
        assert!(dense_eig_oracle(2, &[0.0, 1.0, 0.5, 0.0]).is_err());
        assert!(dense_eig_oracle(257, &vec![0.0; 257 * 257]).is_err());
    }
}
