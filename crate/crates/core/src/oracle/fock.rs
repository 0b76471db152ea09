//! Ground state of a few coupled oscillators in a truncated Fock space.

use std::collections::HashMap;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::eigensolver::ConvergenceReport;
use crate::error::{Error, Result};

pub const MAX_FOCK_MODES: usize = 4;
pub const MAX_FOCK_QUANTA: usize = 8;
/// Allowed change between the half and full truncation.
pub const FOCK_TOLERANCE: f64 = 1e-7;

fn occupations(modes: usize, n_max: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0usize; modes];
    fn rec(k: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k == cur.len() {
            out.push(cur.clone());
            return;
        }
        for n in 0..=left {
            cur[k] = n;
            rec(k + 1, left - n, cur, out);
        }
        cur[k] = 0;
    }
    rec(0, n_max, &mut cur, &mut out);
    out
}

/// `x = a + a†` on one mode of a sparse state.
fn apply_x(state: &HashMap<Vec<usize>, f64>, k: usize) -> HashMap<Vec<usize>, f64> {
    let mut out = HashMap::new();
    for (occ, &amp) in state {
        let n = occ[k];
        if n > 0 {
            let mut down = occ.clone();
            down[k] -= 1;
            *out.entry(down).or_insert(0.0) += amp * (n as f64).sqrt();
        }
        let mut up = occ.clone();
        up[k] += 1;
        *out.entry(up).or_insert(0.0) += amp * ((n + 1) as f64).sqrt();
    }
    out
}

fn ground_at(omega: &[f64], v: &DMatrix<f64>, n_max: usize) -> f64 {
    let basis = occupations(omega.len(), n_max);
    let index: HashMap<Vec<usize>, usize> = basis.iter().cloned().enumerate().map(|(i, o)| (o, i)).collect();
    let dim = basis.len();
    let mut h = DMatrix::<f64>::zeros(dim, dim);
    for (j, occ) in basis.iter().enumerate() {
        h[(j, j)] += occ.iter().zip(omega).map(|(&n, &w)| n as f64 * w).sum::<f64>();
        let start: HashMap<Vec<usize>, f64> = [(occ.clone(), 1.0)].into_iter().collect();
        for k in 0..omega.len() {
            let xk = apply_x(&start, k);
            for l in 0..omega.len() {
                let c = v[(l, k)];
                if c == 0.0 {
                    continue;
                }
                for (target, amp) in apply_x(&xk, l) {
                    if let Some(&i) = index.get(&target) {
                        h[(i, j)] += c * amp;
                    }
                }
            }
        }
    }
    SymmetricEigen::new(h).eigenvalues.min()
}

/// Lowest eigenvalue of `Σ ω_k a_k†a_k + Σ_kl V_kl (a_k + a_k†)(a_l + a_l†)`
/// among states with at most `n_max` quanta in total.
///
/// The result is accepted only if truncating at `n_max / 2` gives the same
/// energy within [`FOCK_TOLERANCE`].
pub fn fock_oscillator_ground(omega: &[f64], v: &DMatrix<f64>, n_max: usize) -> Result<f64> {
    if omega.len() > MAX_FOCK_MODES {
        return Err(Error::SizeCap {
            what: "Fock oracle modes",
            size: omega.len(),
            cap: MAX_FOCK_MODES,
        });
    }
    if !(2..=MAX_FOCK_QUANTA).contains(&n_max) {
        return Err(Error::InvalidArgument(format!(
            "quanta limit must be in 2..={MAX_FOCK_QUANTA}, got {n_max}"
        )));
    }
    if v.nrows() != omega.len() || v.ncols() != omega.len() {
        return Err(Error::DimensionMismatch("coupling table does not match modes".into()));
    }
    if omega.is_empty() {
        return Ok(0.0);
    }
    let coarse = ground_at(omega, v, n_max / 2);
    let fine = ground_at(omega, v, n_max);
    if (fine - coarse).abs() >= FOCK_TOLERANCE {
        return Err(Error::NonConvergence {
            report: ConvergenceReport {
                converged: false,
                dense: true,
                iterations: 2,
                matvecs: 0,
                eigenvalues: vec![coarse, fine],
                residuals: vec![(fine - coarse).abs()],
            },
        });
    }
    Ok(fine)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uncoupled_is_zero() {
        let e = fock_oscillator_ground(&[0.5, 0.7], &DMatrix::zeros(2, 2), 8).unwrap();
        assert!(e.abs() < 1e-15);
    }

    #[test]
    fn two_mode_closed_form() {
        let (w1, w2, c) = (0.6, 0.8, 0.01);
        let v = DMatrix::from_row_slice(2, 2, &[0.0, c, c, 0.0]);
        let e = fock_oscillator_ground(&[w1, w2], &v, 8).unwrap();
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[w1 * w1, 4.0 * (w1 * w2).sqrt() * c, 4.0 * (w1 * w2).sqrt() * c, w2 * w2],
        );
        let big: f64 = m.symmetric_eigenvalues().iter().map(|x| x.sqrt()).sum();
        assert!((e - (big - w1 - w2) / 2.0).abs() < 1e-9, "{e}");
    }

    #[test]
    fn strong_coupling_fails_convergence() {
        let v = DMatrix::from_row_slice(2, 2, &[0.0, 0.2, 0.2, 0.0]);
        assert!(fock_oscillator_ground(&[0.5, 0.5], &v, 4).is_err());
    }
}
