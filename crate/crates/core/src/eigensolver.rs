//! Matrix-free block Davidson solver for the lowest eigenpairs of a real
//! symmetric operator.

use std::fmt;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A real symmetric linear operator.
pub trait SymmetricOperator: Sync {
    fn dim(&self) -> usize;
    /// `y = A x`.
    fn apply(&self, x: &[f64], y: &mut [f64]);
    fn diagonal(&self) -> Vec<f64>;
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DavidsonOptions {
    pub n_eigs: usize,
    /// Residual tolerance relative to `max(1, |E|)`.
    pub tol: f64,
    pub max_matvecs_per_eig: usize,
    /// Search space size that triggers a restart.
    pub max_subspace: usize,
    /// Operators at most this large are diagonalized densely.
    pub dense_threshold: usize,
    pub seed: u64,
}

impl Default for DavidsonOptions {
    fn default() -> Self {
        Self {
            n_eigs: 4,
            tol: 1e-9,
            max_matvecs_per_eig: 5000,
            max_subspace: 64,
            dense_threshold: 16,
            seed: 0x5eed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub converged: bool,
    pub dense: bool,
    pub iterations: usize,
    pub matvecs: usize,
    pub eigenvalues: Vec<f64>,
    pub residuals: Vec<f64>,
}

impl fmt::Display for ConvergenceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} after {} iterations / {} matvecs; residuals [",
            if self.converged { "converged" } else { "not converged" },
            self.iterations,
            self.matvecs
        )?;
        for (i, r) in self.residuals.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{r:.2e}")?;
        }
        f.write_str("]")
    }
}

#[derive(Debug, Clone)]
pub struct Eigenpairs {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
    pub report: ConvergenceReport,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

fn dense_matrix(op: &dyn SymmetricOperator) -> DMatrix<f64> {
    let n = op.dim();
    let mut m = DMatrix::zeros(n, n);
    let mut e = vec![0.0; n];
    let mut col = vec![0.0; n];
    for j in 0..n {
        e[j] = 1.0;
        op.apply(&e, &mut col);
        for i in 0..n {
            m[(i, j)] = col[i];
        }
        e[j] = 0.0;
    }
    m
}

fn dense_solve(op: &dyn SymmetricOperator, n_eigs: usize) -> Eigenpairs {
    let n = op.dim();
    let m = dense_matrix(op);
    let sym = (&m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    order.truncate(n_eigs);
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = order
        .iter()
        .map(|&i| eig.eigenvectors.column(i).iter().copied().collect())
        .collect();
    Eigenpairs {
        report: ConvergenceReport {
            converged: true,
            dense: true,
            iterations: 0,
            matvecs: n,
            eigenvalues: values.clone(),
            residuals: vec![0.0; values.len()],
        },
        values,
        vectors,
    }
}

/// Orthogonalizes `v` against `basis` twice and normalizes it; returns `false`
/// when nothing new remains.
fn orthonormalize(v: &mut [f64], basis: &[Vec<f64>]) -> bool {
    let before = dot(v, v).sqrt();
    if before == 0.0 || !before.is_finite() {
        return false;
    }
    for _ in 0..2 {
        for b in basis {
            let c = dot(v, b);
            axpy(-c, b, v);
        }
    }
    let after = dot(v, v).sqrt();
    if after <= 1e-8 * before {
        return false;
    }
    v.iter_mut().for_each(|x| *x /= after);
    true
}

/// Lowest `opts.n_eigs` eigenpairs of `op`.
///
/// Starting vectors are the unit vectors of the smallest diagonal entries with
/// a small seeded perturbation, so that no symmetry sector is missed.
/// Corrections use the diagonal preconditioner; the search space is
/// collapsed onto the current Ritz vectors when it reaches `max_subspace`.
pub fn lowest_eigenpairs(op: &dyn SymmetricOperator, opts: &DavidsonOptions) -> Result<Eigenpairs> {
    let n = op.dim();
    if opts.n_eigs == 0 {
        return Err(Error::InvalidArgument("n_eigs must be positive".into()));
    }
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {}", opts.tol)));
    }
    let nev = opts.n_eigs.min(n);
    if n == 0 {
        return Err(Error::InvalidArgument("empty operator".into()));
    }
    if n <= opts.dense_threshold.max(nev) || n <= 2 * nev + 1 {
        return Ok(dense_solve(op, nev));
    }

    let diag = op.diagonal();
    let block = (nev + 2).min(n);
    let max_sub = opts.max_subspace.max(3 * block).min(n);
    let max_matvecs = opts.max_matvecs_per_eig.saturating_mul(nev);

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| diag[a].total_cmp(&diag[b]).then(a.cmp(&b)));
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut v: Vec<Vec<f64>> = Vec::new();
    let mut av: Vec<Vec<f64>> = Vec::new();
    let mut matvecs = 0;
    let mut pending: Vec<Vec<f64>> = order[..block]
        .iter()
        .map(|&i| {
            let mut g: Vec<f64> = (0..n).map(|_| 1e-3 * (rng.gen::<f64>() - 0.5)).collect();
            g[i] += 1.0;
            g
        })
        .collect();

    let mut iterations = 0;
    let mut theta: Vec<f64>;
    let mut residuals: Vec<f64> = Vec::new();
    loop {
        for mut p in pending.drain(..) {
            if orthonormalize(&mut p, &v) {
                let mut y = vec![0.0; n];
                op.apply(&p, &mut y);
                matvecs += 1;
                v.push(p);
                av.push(y);
            }
        }
        iterations += 1;
        let m = v.len();
        let h = DMatrix::from_fn(m, m, |i, j| {
            let a = dot(&v[i], &av[j]);
            let b = dot(&v[j], &av[i]);
            0.5 * (a + b)
        });
        let eig = SymmetricEigen::new(h);
        let mut idx: Vec<usize> = (0..m).collect();
        idx.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let keep = nev.min(m);
        theta = idx[..keep].iter().map(|&i| eig.eigenvalues[i]).collect();

        let ritz = |k: usize, basis: &[Vec<f64>]| {
            let c = eig.eigenvectors.column(idx[k]);
            let mut x = vec![0.0; n];
            for (j, b) in basis.iter().enumerate() {
                axpy(c[j], b, &mut x);
            }
            x
        };
        let mut new_dirs = Vec::new();
        residuals.clear();
        let mut all_done = keep == nev;
        for k in 0..keep {
            let x = ritz(k, &v);
            let ax = ritz(k, &av);
            let r: Vec<f64> = ax.iter().zip(&x).map(|(a, b)| a - theta[k] * b).collect();
            let rn = dot(&r, &r).sqrt();
            residuals.push(rn);
            if rn > opts.tol * theta[k].abs().max(1.0) {
                all_done = false;
                let t: Vec<f64> = r
                    .iter()
                    .zip(&diag)
                    .map(|(ri, di)| {
                        let d = theta[k] - di;
                        let d = if d.abs() < 1e-8 { 1e-8f64.copysign(d) } else { d };
                        ri / d
                    })
                    .collect();
                new_dirs.push((t, r));
            }
        }
        if all_done {
            let vectors: Vec<Vec<f64>> = (0..nev).map(|k| ritz(k, &v)).collect();
            return Ok(Eigenpairs {
                values: theta.clone(),
                vectors,
                report: ConvergenceReport {
                    converged: true,
                    dense: false,
                    iterations,
                    matvecs,
                    eigenvalues: theta,
                    residuals,
                },
            });
        }
        let stalled = matvecs >= max_matvecs;
        if stalled {
            break;
        }
        if m + new_dirs.len() > max_sub {
            // collapse onto the Ritz vectors, recomputing their images exactly
            let keep_n = block.min(m);
            let ritz_vectors: Vec<Vec<f64>> = (0..keep_n).map(|k| ritz(k, &v)).collect();
            v = Vec::with_capacity(keep_n);
            av = Vec::with_capacity(keep_n);
            for mut x in ritz_vectors {
                if orthonormalize(&mut x, &v) {
                    let mut y = vec![0.0; n];
                    op.apply(&x, &mut y);
                    matvecs += 1;
                    v.push(x);
                    av.push(y);
                }
            }
        }
        let mut added = 0;
        for (t, r) in new_dirs {
            let mut t = t;
            if orthonormalize(&mut t, &v) {
                pending.push(t);
                added += 1;
            } else {
                let mut r = r;
                if orthonormalize(&mut r, &v) {
                    pending.push(r);
                    added += 1;
                }
            }
        }
        if added == 0 {
            let mut g: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() - 0.5).collect();
            if orthonormalize(&mut g, &v) {
                pending.push(g);
            } else {
                break;
            }
        }
    }
    Err(Error::NonConvergence {
        report: ConvergenceReport {
            converged: false,
            dense: false,
            iterations,
            matvecs,
            eigenvalues: theta,
            residuals,
        },
    })
}
