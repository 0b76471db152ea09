//! Coupled-oscillator matrix, its normal modes, and the couplings of the normal
//! modes to the system.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fcidump::IntegralSet;
use crate::model::{BathMode, BathModes};

/// Largest oscillator count handled by the dense eigensolver.
pub const MAX_MODES: usize = 8192;

/// Quadratic form of the bath: bare frequencies, the coefficients `V_kk'` of
/// `(a_k† + a_k)(a_k'† + a_k')`, and `M = ω² + 4√ω V √ω`.
#[derive(Debug, Clone)]
pub struct CouplingMatrix {
    pub omega: DVector<f64>,
    pub v: DMatrix<f64>,
    pub m: DMatrix<f64>,
}

impl CouplingMatrix {
    pub fn from_parts(omega: DVector<f64>, v: DMatrix<f64>) -> Result<Self> {
        let n = omega.len();
        if v.nrows() != n || v.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "{n} frequencies but a {}x{} coupling table",
                v.nrows(),
                v.ncols()
            )));
        }
        if n > MAX_MODES {
            return Err(Error::SizeCap {
                what: "bath",
                size: n,
                cap: MAX_MODES,
            });
        }
        let sq = omega.map(f64::sqrt);
        let mut m = DMatrix::from_fn(n, n, |i, j| 4.0 * sq[i] * v[(i, j)] * sq[j]);
        for k in 0..n {
            m[(k, k)] += omega[k] * omega[k];
        }
        Ok(Self { omega, v, m })
    }

    pub fn dim(&self) -> usize {
        self.omega.len()
    }
}

/// Assembles the coupling matrix for an enumerated mode list.
///
/// Every mode enters through its transition pair `(upper, lower)` weighted by
/// its vertex factor, so `V_kk' = f_k (u_k l_k|u_k' l_k') f_k'`. The diagonal
/// is nonzero only for triplet system modes, whose frequencies do not already
/// contain the exchange self-interaction.
pub fn build_coupling_matrix(set: &IntegralSet, modes: &BathModes) -> Result<CouplingMatrix> {
    let list = &modes.modes;
    let n = list.len();
    if n > MAX_MODES {
        return Err(Error::SizeCap {
            what: "bath",
            size: n,
            cap: MAX_MODES,
        });
    }
    let entry = |a: &BathMode, b: &BathMode| a.vertex * set.eri(a.upper, a.lower, b.upper, b.lower) * b.vertex;
    let rows: Vec<Vec<f64>> = list
        .par_iter()
        .enumerate()
        .map(|(i, a)| {
            list.iter()
                .enumerate()
                .map(|(j, b)| {
                    if i != j || a.kind.is_triplet_system() {
                        entry(a, b)
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect();
    let v = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
    let omega = DVector::from_iterator(n, list.iter().map(|m| m.omega));
    CouplingMatrix::from_parts(omega, v)
}

/// Normal modes of the bath and their couplings to the system.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NormalModeBasis {
    /// Bare frequencies ω_k, in mode order.
    pub omega: Vec<f64>,
    /// Normal-mode frequencies Ω_n, ascending.
    pub big_omega: Vec<f64>,
    /// Column n is the eigenvector of `M` for Ω_n².
    #[serde(skip)]
    pub s: DMatrix<f64>,
    /// `[g₁₁, g₁₂, g₂₂]` for each normal mode.
    pub g: Vec<[f64; 3]>,
}

impl NormalModeBasis {
    pub fn dim(&self) -> usize {
        self.big_omega.len()
    }

    /// `g_pq` of normal mode `n` for system indices `p, q ∈ {0, 1}`.
    #[inline]
    pub fn g_pq(&self, n: usize, p: usize, q: usize) -> f64 {
        self.g[n][p + q]
    }
}

/// Diagonalizes `M` and transforms the bare couplings `lambda` to normal modes.
pub fn diagonalize(cm: &CouplingMatrix, lambda: &[[f64; 3]]) -> Result<NormalModeBasis> {
    let n = cm.dim();
    if lambda.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "{} coupling rows for {n} modes",
            lambda.len()
        )));
    }
    if n == 0 {
        return Ok(NormalModeBasis {
            omega: Vec::new(),
            big_omega: Vec::new(),
            s: DMatrix::zeros(0, 0),
            g: Vec::new(),
        });
    }
    let eig = SymmetricEigen::new(cm.m.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let mut big_omega = Vec::with_capacity(n);
    let mut s = DMatrix::zeros(n, n);
    for (col, &src) in order.iter().enumerate() {
        let ev = eig.eigenvalues[src];
        if ev <= 0.0 || !ev.is_finite() {
            return Err(Error::PositiveDefiniteness {
                index: col,
                eigenvalue: ev,
            });
        }
        big_omega.push(ev.sqrt());
        let v = eig.eigenvectors.column(src);
        let lead = v.iter().cloned().fold(0.0f64, |acc, x| if x.abs() > acc.abs() { x } else { acc });
        let sign = if lead < 0.0 { -1.0 } else { 1.0 };
        s.set_column(col, &(v * sign));
    }
    let omega: Vec<f64> = cm.omega.iter().cloned().collect();
    let g = transform_couplings(lambda, &omega, &big_omega, &s);
    Ok(NormalModeBasis {
        omega,
        big_omega,
        s,
        g,
    })
}

/// `g_pq,n = Σ_k √(ω_k/Ω_n) λ_pq,k S_kn`.
pub fn transform_couplings(
    lambda: &[[f64; 3]],
    omega: &[f64],
    big_omega: &[f64],
    s: &DMatrix<f64>,
) -> Vec<[f64; 3]> {
    let n = omega.len();
    let w = DMatrix::from_fn(n, 3, |k, c| omega[k].sqrt() * lambda[k][c]);
    let g = s.transpose() * w;
    (0..n)
        .map(|i| {
            let f = big_omega[i].sqrt().recip();
            [g[(i, 0)] * f, g[(i, 1)] * f, g[(i, 2)] * f]
        })
        .collect()
}

/// Zero-point shift `Σ (Ω − ω)/2` of the coupled bath.
pub fn zero_point_shift(nm: &NormalModeBasis) -> f64 {
    nm.big_omega.iter().sum::<f64>() / 2.0 - nm.omega.iter().sum::<f64>() / 2.0
}

/// RPA ground energy of the environment: `E_HF + Σ E_corr + Σ (Ω − ω)/2`.
pub fn environment_ground_energy(modes: &BathModes, nm: &NormalModeBasis, e_hf_env: f64) -> f64 {
    e_hf_env + modes.sum_e_corr() + zero_point_shift(nm)
}

/// Maximum deviation from the identity of the coordinate and momentum maps
/// between bare and normal-mode ladder operators composed with their inverses.
pub fn coordinate_map_residuals(nm: &NormalModeBasis) -> (f64, f64) {
    let n = nm.dim();
    let w_half = DVector::from_iterator(n, nm.omega.iter().map(|w| w.sqrt()));
    let o_half = DVector::from_iterator(n, nm.big_omega.iter().map(|w| w.sqrt()));
    let scale = |left: &DVector<f64>, m: &DMatrix<f64>, right: &DVector<f64>| {
        DMatrix::from_fn(n, n, |i, j| left[i] * m[(i, j)] * right[j])
    };
    let st = nm.s.transpose();
    let inv = |v: &DVector<f64>| v.map(f64::recip);
    let x_fwd = scale(&o_half, &st, &inv(&w_half));
    let x_back = scale(&w_half, &nm.s, &inv(&o_half));
    let p_fwd = scale(&inv(&o_half), &st, &w_half);
    let p_back = scale(&inv(&w_half), &nm.s, &o_half);
    let dev = |m: DMatrix<f64>| {
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((m[(i, j)] - target).abs());
            }
        }
        worst
    };
    (dev(x_fwd * x_back), dev(p_fwd * p_back))
}

/// Lorentzian-broadened density of `g₁₂²` over normal-mode frequencies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralDensity {
    pub energy: Vec<f64>,
    pub value: Vec<f64>,
}

/// `S(E) = Σ_n g₁₂,n² (γ/π) / ((E − Ω_n)² + γ²)` on the given grid.
pub fn spectral_density(nm: &NormalModeBasis, gamma: f64, grid: &[f64]) -> Result<SpectralDensity> {
    if grid.is_empty() {
        return Err(Error::InvalidArgument("empty energy grid".into()));
    }
    if gamma <= 0.0 || !gamma.is_finite() {
        return Err(Error::InvalidArgument(format!("half-width must be positive, got {gamma}")));
    }
    let norm = gamma / std::f64::consts::PI;
    let value = grid
        .iter()
        .map(|&e| {
            nm.big_omega
                .iter()
                .zip(&nm.g)
                .map(|(&w, g)| g[1] * g[1] * norm / ((e - w).powi(2) + gamma * gamma))
                .sum()
        })
        .collect();
    Ok(SpectralDensity {
        energy: grid.to_vec(),
        value,
    })
}

/// Uniform grid over `[0, max Ω + 10γ]` with both endpoints included.
pub fn default_grid(nm: &NormalModeBasis, gamma: f64, points: usize) -> Vec<f64> {
    let top = nm.big_omega.last().copied().unwrap_or(0.0) + 10.0 * gamma;
    let points = points.max(2);
    (0..points)
        .map(|i| top * i as f64 / (points - 1) as f64)
        .collect()
}
