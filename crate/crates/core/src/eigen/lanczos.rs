//! Lanczos iteration with full reorthogonalization and explicit restarts.
//!
//! Each call finds one extreme eigenpair of the operator restricted to the
//! orthogonal complement of a set of locked vectors. Callers obtain several
//! eigenpairs by locking the ones already found, which also handles repeated
//! eigenvalues: a single Krylov space only ever sees one direction of each
//! eigenspace.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::tridiag::tridiagonal_eigen;
use super::{EigenPair, Which};
use crate::error::{Error, Result};
use crate::operator::LinearOperator;

#[derive(Debug, Clone, Copy)]
pub(crate) struct LanczosOptions {
    pub tol: f64,
    pub max_basis: usize,
    pub max_matvecs: usize,
}

impl LanczosOptions {
    pub fn new(n: usize, tol: f64) -> Self {
        LanczosOptions {
            tol,
            max_basis: n.min(120),
            max_matvecs: (10 * n).max(200),
        }
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

fn project_out<'a>(w: &mut [f64], vs: impl Iterator<Item = &'a Vec<f64>> + Clone) {
    // Two passes of classical Gram-Schmidt.
    for _ in 0..2 {
        for q in vs.clone() {
            let c = dot(q, w);
            axpy(-c, q, w);
        }
    }
}

pub(crate) fn random_unit(n: usize, locked: &[Vec<f64>], rng: &mut ChaCha8Rng) -> Option<Vec<f64>> {
    for _ in 0..8 {
        let mut v: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
        project_out(&mut v, locked.iter());
        let nv = norm(&v);
        if nv > 1e-8 {
            v.iter_mut().for_each(|x| *x /= nv);
            return Some(v);
        }
    }
    None
}

/// Ritz index targeted for `which`, given ascending Ritz values.
fn target_indices(theta: &[f64], which: Which) -> Vec<usize> {
    let last = theta.len() - 1;
    match which {
        Which::LargestAlgebraic => vec![last],
        Which::SmallestAlgebraic => vec![0],
        Which::LargestMagnitude => {
            if last == 0 {
                vec![0]
            } else if theta[last].abs() >= theta[0].abs() {
                vec![last, 0]
            } else {
                vec![0, last]
            }
        }
    }
}

/// One extreme eigenpair of `op` on the complement of `locked`.
pub(crate) fn extreme_pair(
    op: &dyn LinearOperator,
    locked: &[Vec<f64>],
    which: Which,
    opts: LanczosOptions,
    rng: &mut ChaCha8Rng,
) -> Result<EigenPair> {
    let n = op.dim();
    let avail = n.saturating_sub(locked.len());
    if avail == 0 {
        return Err(Error::param("no directions left outside the locked subspace"));
    }
    let mut start = random_unit(n, locked, rng)
        .ok_or_else(|| Error::numerical("could not draw a start vector outside the locked subspace", None))?;
    let mut matvecs = 0usize;
    let mut best: Option<f64> = None;
    let mut w = vec![0.0; n];
    let mut scratch = vec![0.0; n];

    loop {
        let m_max = opts.max_basis.min(avail).max(1);
        let mut basis: Vec<Vec<f64>> = vec![start];
        let mut alphas: Vec<f64> = Vec::with_capacity(m_max);
        let mut betas: Vec<f64> = Vec::with_capacity(m_max);
        let mut anorm = 0.0f64;
        let mut next_check = 4usize.min(m_max);
        let mut restart_vec: Option<Vec<f64>> = None;

        for j in 0..m_max {
            op.apply(&basis[j], &mut w);
            matvecs += 1;
            let alpha = dot(&basis[j], &w);
            project_out(&mut w, locked.iter().chain(basis.iter()));
            let beta = norm(&w);
            alphas.push(alpha);
            anorm = anorm.max(alpha.abs() + beta + betas.last().copied().unwrap_or(0.0));
            let k = j + 1;
            let breakdown = beta <= 1e-12 * anorm || anorm == 0.0;
            let exhausted = k == avail;
            if k == next_check || k == m_max || breakdown {
                next_check = (k + (k / 8).max(4)).min(m_max);
                let (theta, s) = tridiagonal_eigen(&alphas, &betas);
                let targets = target_indices(&theta, which);
                let resid = |idx: usize| beta * s[idx * k + k - 1].abs();
                let converged = targets
                    .iter()
                    .all(|&idx| resid(idx) <= opts.tol * theta[idx].abs().max(1.0));
                let pick = targets[0];
                best = Some(theta[pick]);
                let ritz = |idx: usize| -> Vec<f64> {
                    let mut x = vec![0.0; n];
                    for (l, q) in basis.iter().enumerate() {
                        axpy(s[idx * k + l], q, &mut x);
                    }
                    let nx = norm(&x);
                    x.iter_mut().for_each(|v| *v /= nx);
                    x
                };
                if converged || breakdown || exhausted {
                    let mut x = ritz(pick);
                    project_out(&mut x, locked.iter());
                    let nx = norm(&x);
                    x.iter_mut().for_each(|v| *v /= nx);
                    op.apply(&x, &mut scratch);
                    matvecs += 1;
                    let value = dot(&x, &scratch);
                    let true_resid = scratch
                        .iter()
                        .zip(&x)
                        .map(|(mx, xi)| (mx - value * xi).powi(2))
                        .sum::<f64>()
                        .sqrt();
                    if true_resid <= 10.0 * opts.tol * value.abs().max(1.0) || exhausted || breakdown {
                        return Ok(EigenPair { value, vector: x });
                    }
                    restart_vec = Some(x);
                    break;
                }
                if k == m_max {
                    // Restart from the target Ritz vector(s).
                    let mut x = vec![0.0; n];
                    for &idx in &targets {
                        axpy(1.0, &ritz(idx), &mut x);
                    }
                    restart_vec = Some(x);
                    break;
                }
            }
            if matvecs >= opts.max_matvecs {
                break;
            }
            let mut q = std::mem::take(&mut w);
            q.iter_mut().for_each(|v| *v /= beta);
            w = vec![0.0; n];
            betas.push(beta);
            basis.push(q);
        }

        if matvecs >= opts.max_matvecs {
            return Err(Error::numerical(
                format!("Lanczos did not converge within {} matrix-vector products", opts.max_matvecs),
                best,
            ));
        }
        let mut x = match restart_vec {
            Some(x) => x,
            None => random_unit(n, locked, rng).expect("complement is nonempty"),
        };
        project_out(&mut x, locked.iter());
        let nx = norm(&x);
        if !(nx > 1e-12) {
            x = random_unit(n, locked, rng).expect("complement is nonempty");
        } else {
            x.iter_mut().for_each(|v| *v /= nx);
        }
        start = x;
    }
}
