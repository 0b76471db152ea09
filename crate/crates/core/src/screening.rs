//! Static screening: eliminating bath modes into renormalized Coulomb
//! integrals of the system, and the resulting excitation energies.

use nalgebra::{DMatrix, Matrix4, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{GroundStateClass, SpinLabel, SystemBlock, SystemParams};
use crate::normal_modes::{CouplingMatrix, NormalModeBasis};

/// Two-body integrals over the system orbitals, indexed `[p][q][r][s]`.
pub type SystemTable = [[[[f64; 2]; 2]; 2]; 2];

/// Overlap above which a state counts as a triplet.
pub const TRIPLET_THRESHOLD: f64 = 0.5;

/// `Q[i][j] = Σ_n g_i,n g_j,n / Ω_n` over the modes accepted by `include`,
/// with `i, j` running over `(11, 12, 22)`. Summation is in mode order.
pub fn screening_sums(nm: &NormalModeBasis, include: impl Fn(usize) -> bool) -> [[f64; 3]; 3] {
    let mut q = [[0.0; 3]; 3];
    for n in (0..nm.dim()).filter(|&n| include(n)) {
        let g = &nm.g[n];
        let w = nm.big_omega[n];
        for i in 0..3 {
            for j in 0..3 {
                q[i][j] += g[i] * g[j] / w;
            }
        }
    }
    q
}

fn table_from_sums(q: &[[f64; 3]; 3]) -> SystemTable {
    let mut t = [[[[0.0; 2]; 2]; 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            for c in 0..2 {
                for d in 0..2 {
                    t[a][b][c][d] = 2.0 * q[a + b][c + d];
                }
            }
        }
    }
    t
}

fn subtract(h: &SystemTable, dh: &SystemTable) -> SystemTable {
    let mut out = *h;
    for a in 0..2 {
        for b in 0..2 {
            for c in 0..2 {
                for d in 0..2 {
                    out[a][b][c][d] -= dh[a][b][c][d];
                }
            }
        }
    }
    out
}

/// `h̃ = h − Σ_n 2 g g / Ω` from the normal-mode couplings.
pub fn screened_integrals_eig(h: &SystemTable, nm: &NormalModeBasis) -> SystemTable {
    subtract(h, &table_from_sums(&screening_sums(nm, |_| true)))
}

/// `h̃ = h − 2 λᵀ √ω M⁻¹ √ω λ`, solving with the coupling matrix directly.
pub fn screened_integrals_inv(h: &SystemTable, lambda: &[[f64; 3]], cm: &CouplingMatrix) -> Result<SystemTable> {
    let n = cm.dim();
    if lambda.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "{} coupling rows for {n} modes",
            lambda.len()
        )));
    }
    if n == 0 {
        return Ok(*h);
    }
    let w = DMatrix::from_fn(n, 3, |k, c| cm.omega[k].sqrt() * lambda[k][c]);
    let chol = cm.m.clone().cholesky().ok_or(Error::SingularMatrix)?;
    let x = chol.solve(&w);
    let qm = w.transpose() * x;
    let mut q = [[0.0; 3]; 3];
    for (i, row) in q.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = qm[(i, j)];
        }
    }
    Ok(subtract(h, &table_from_sums(&q)))
}

/// System parameters with the chosen normal modes folded into the Coulomb
/// integrals. Orbital energies and one-body hopping stay bare.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScreenedParams {
    pub params: SystemParams,
    /// Normal modes whose screening is included.
    pub renormalized_modes: Vec<usize>,
}

impl ScreenedParams {
    pub fn u1_t(&self) -> f64 {
        self.params.u1
    }
    pub fn u2_t(&self) -> f64 {
        self.params.u2
    }
    pub fn j12_t(&self) -> f64 {
        self.params.j12
    }
    pub fn k12_t(&self) -> f64 {
        self.params.k12
    }
    pub fn tau1_t(&self) -> f64 {
        self.params.t1_tilde
    }
    pub fn tau2_t(&self) -> f64 {
        self.params.t2_tilde
    }
}

/// Renormalizes the system block by the modes accepted by `include`.
pub fn screen_params(block: &SystemBlock, nm: &NormalModeBasis, include: impl Fn(usize) -> bool) -> ScreenedParams {
    let renormalized_modes: Vec<usize> = (0..nm.dim()).filter(|&n| include(n)).collect();
    let q = screening_sums(nm, include);
    let params = SystemParams::from_block(&block.minus(&table_from_sums(&q)));
    ScreenedParams {
        params,
        renormalized_modes,
    }
}

/// Eigenstates of the 6×6 system Hamiltonian, ascending.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemSpectrum {
    pub energies: Vec<f64>,
    pub labels: Vec<SpinLabel>,
    /// Eigenvectors in the basis `|↑↓,0⟩, |0,↑↓⟩, |↑,↓⟩, |↓,↑⟩, |↑,↑⟩, |↓,↓⟩`.
    pub vectors: Vec<[f64; 6]>,
}

impl SystemSpectrum {
    pub fn lowest(&self, label: SpinLabel) -> Option<f64> {
        self.nth(label, 0)
    }

    pub fn nth(&self, label: SpinLabel, n: usize) -> Option<f64> {
        self.energies
            .iter()
            .zip(&self.labels)
            .filter(|(_, &l)| l == label)
            .nth(n)
            .map(|(&e, _)| e)
    }

    fn from_states(mut states: Vec<(f64, [f64; 6])>) -> Self {
        states.sort_by(|a, b| a.0.total_cmp(&b.0));
        let labels = states
            .iter()
            .map(|(_, v)| {
                if triplet_weight(v) > TRIPLET_THRESHOLD {
                    SpinLabel::Triplet
                } else {
                    SpinLabel::Singlet
                }
            })
            .collect();
        Self {
            energies: states.iter().map(|s| s.0).collect(),
            labels,
            vectors: states.into_iter().map(|s| s.1).collect(),
        }
    }
}

/// Weight of a 6-component state on the triplet manifold.
pub fn triplet_weight(v: &[f64; 6]) -> f64 {
    let t0 = (v[2] + v[3]) * std::f64::consts::FRAC_1_SQRT_2;
    t0 * t0 + v[4] * v[4] + v[5] * v[5]
}

fn polarized_triplets(sp: &SystemParams) -> [(f64, [f64; 6]); 2] {
    let e = sp.triplet_energy();
    [
        (e, [0.0, 0.0, 0.0, 0.0, 1.0, 0.0]),
        (e, [0.0, 0.0, 0.0, 0.0, 0.0, 1.0]),
    ]
}

/// Dense diagonalization of the 6×6 system Hamiltonian.
pub fn diagonalize_system(sp: &SystemParams) -> SystemSpectrum {
    let m6 = sp.matrix6();
    let block: Matrix4<f64> = m6.fixed_view::<4, 4>(0, 0).into_owned();
    let eig = SymmetricEigen::new(block);
    let mut states: Vec<(f64, [f64; 6])> = (0..4)
        .map(|i| {
            let c = eig.eigenvectors.column(i);
            (eig.eigenvalues[i], [c[0], c[1], c[2], c[3], 0.0, 0.0])
        })
        .collect();
    states.extend(polarized_triplets(sp));
    SystemSpectrum::from_states(states)
}

/// Closed-form eigensystem valid for vanishing hopping; otherwise falls back
/// to [`diagonalize_system`].
pub fn analytic_eigensystem(sp: &SystemParams) -> SystemSpectrum {
    if sp.t1_tilde.abs() >= 1e-12 || sp.t2_tilde.abs() >= 1e-12 {
        log::debug!("nonzero hopping; using dense diagonalization");
        return diagonalize_system(sp);
    }
    let (d, k) = (sp.delta12, sp.k12);
    let root = d.hypot(k);
    let den = (k * k + (root + d).powi(2)).sqrt();
    let (cos, sin) = if den == 0.0 { (1.0, 0.0) } else { ((root + d) / den, k / den) };
    let base = sp.eps1 + sp.eps2 + sp.u1 + sp.u2;
    let open = sp.eps1 + sp.eps2 + sp.j12;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut states = vec![
        (base - root, [cos, -sin, 0.0, 0.0, 0.0, 0.0]),
        (open + k, [0.0, 0.0, h, -h, 0.0, 0.0]),
        (base + root, [sin, cos, 0.0, 0.0, 0.0, 0.0]),
        (open - k, [0.0, 0.0, h, h, 0.0, 0.0]),
    ];
    states.extend(polarized_triplets(sp));
    SystemSpectrum::from_states(states)
}

/// Outcome of the static approximation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StaticResult {
    pub screened: ScreenedParams,
    pub spectrum: SystemSpectrum,
    /// Lowest triplet minus lowest singlet.
    pub triplet_gap: f64,
    /// Lowest singlet excitation.
    pub singlet_gap: f64,
    /// Five lowest normal-mode frequencies.
    pub lowest_modes: Vec<f64>,
    /// `min Ω / Δ₁₂`.
    pub markov_ratio: Option<f64>,
}

/// Screens with every normal mode and diagonalizes the renormalized system.
///
/// The triplet gap is read off the renormalized spectrum. For a singlet bare
/// ground state the lowest singlet excitation is the lowest bath frequency;
/// otherwise it is the second renormalized singlet.
pub fn static_solve(block: &SystemBlock, bare: &GroundStateClass, nm: &NormalModeBasis) -> Result<StaticResult> {
    let screened = screen_params(block, nm, |_| true);
    let spectrum = diagonalize_system(&screened.params);
    let s0 = spectrum.lowest(SpinLabel::Singlet).expect("three singlets");
    let t0 = spectrum.lowest(SpinLabel::Triplet).expect("three triplets");
    let min_omega = nm.big_omega.first().copied();
    let second = spectrum.nth(SpinLabel::Singlet, 1).expect("three singlets") - s0;
    let singlet_gap = match (bare.label, min_omega) {
        (SpinLabel::Singlet, Some(w)) => w,
        _ => second,
    };
    let delta = SystemParams::from_block(block).delta12;
    Ok(StaticResult {
        triplet_gap: t0 - s0,
        singlet_gap,
        lowest_modes: nm.big_omega.iter().take(5).copied().collect(),
        markov_ratio: min_omega.filter(|_| delta != 0.0).map(|w| w / delta),
        screened,
        spectrum,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use nalgebra::DVector;

    fn single_mode(g: [f64; 3], w: f64) -> NormalModeBasis {
        NormalModeBasis {
            omega: vec![w],
            big_omega: vec![w],
            s: DMatrix::identity(1, 1),
            g: vec![g],
        }
    }

    fn block() -> SystemBlock {
        let mut b = SystemBlock::default();
        b.t = [[-0.9, 0.01], [0.01, -0.2]];
        let vals = [(0, 0, 0, 0, 0.7), (1, 1, 1, 1, 0.6), (0, 0, 1, 1, 0.5), (0, 1, 0, 1, 0.1), (0, 0, 0, 1, 0.02), (0, 1, 1, 1, -0.03)];
        for (p, q, r, s, v) in vals {
            for [a, b2, c, d] in [[p, q, r, s], [q, p, r, s], [p, q, s, r], [q, p, s, r], [r, s, p, q], [s, r, p, q], [r, s, q, p], [s, r, q, p]] {
                b.h[a][b2][c][d] = v;
            }
        }
        b
    }

    #[test]
    fn zero_coupling_is_identity() {
        let b = block();
        assert_eq!(screened_integrals_eig(&b.h, &single_mode([0.0; 3], 0.5)), b.h);
        let sp = screen_params(&b, &single_mode([0.0; 3], 0.5), |_| true);
        assert_eq!(sp.params, SystemParams::from_block(&b));
    }

    #[test]
    fn single_mode_diagonal_coupling() {
        let b = block();
        let (g, w) = (0.05, 0.4);
        let ht = screened_integrals_eig(&b.h, &single_mode([g, 0.0, 0.0], w));
        assert_abs_diff_eq!(ht[0][0][0][0], b.h[0][0][0][0] - 2.0 * g * g / w, epsilon = 1e-15);
        assert_eq!(ht[1][1][1][1], b.h[1][1][1][1]);
    }

    #[test]
    fn closed_form_parameter_shifts() {
        let b = block();
        let g = [0.03, 0.02, -0.04];
        let w = 0.7;
        let sp = SystemParams::from_block(&b);
        let st = screen_params(&b, &single_mode(g, w), |_| true).params;
        assert_abs_diff_eq!(st.u1, sp.u1 - g[0] * g[0] / w, epsilon = 1e-15);
        assert_abs_diff_eq!(st.u2, sp.u2 - g[2] * g[2] / w, epsilon = 1e-15);
        assert_abs_diff_eq!(st.j12, sp.j12 - 2.0 * g[0] * g[2] / w, epsilon = 1e-15);
        assert_abs_diff_eq!(st.k12, sp.k12 - 2.0 * g[1] * g[1] / w, epsilon = 1e-15);
        assert_abs_diff_eq!(st.t1_tilde, sp.t1_tilde - 2.0 * g[1] * g[0] / w, epsilon = 1e-15);
        assert_abs_diff_eq!(st.t2_tilde, sp.t2_tilde - 2.0 * g[1] * g[2] / w, epsilon = 1e-15);
        assert_eq!((st.eps1, st.eps2), (sp.eps1, sp.eps2));
    }

    #[test]
    fn inverse_route_diagonal_reduction() {
        let b = block();
        let lambda = [[0.02, 0.03, 0.01]];
        let cm = CouplingMatrix::from_parts(DVector::from_column_slice(&[0.6]), DMatrix::zeros(1, 1)).unwrap();
        let inv = screened_integrals_inv(&b.h, &lambda, &cm).unwrap();
        let eig = screened_integrals_eig(&b.h, &single_mode(lambda[0], 0.6));
        for (a, e) in inv.iter().flatten().flatten().flatten().zip(eig.iter().flatten().flatten().flatten()) {
            assert_abs_diff_eq!(a, e, epsilon = 1e-15);
        }
    }

    #[test]
    fn matrix_entries() {
        let sp = SystemParams::new(0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
        assert_eq!(sp.matrix6(), nalgebra::Matrix6::zeros());
        let sp = SystemParams::new(-1.0, -0.4, 0.3, 0.2, 0.25, 0.07, 0.0, 0.0);
        let m = sp.matrix6();
        assert_eq!(m[(0, 1)], 0.07);
        assert_eq!(m[(2, 3)], -0.07);
    }

    #[test]
    fn analytic_matches_dense() {
        let sp = SystemParams::new(-1.0, -0.4, 0.3, 0.2, 0.25, 0.07, 0.0, 0.0);
        let a = analytic_eigensystem(&sp);
        let d = diagonalize_system(&sp);
        for (x, y) in a.energies.iter().zip(&d.energies) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-12);
        }
        assert_eq!(a.labels, d.labels);
    }

    #[test]
    fn analytic_degenerate_mixing() {
        let sp = SystemParams::new(-1.0, -1.0, 0.5, 0.5, 0.25, 0.07, 0.0, 0.0);
        assert_eq!(sp.delta12, 0.0);
        let a = analytic_eigensystem(&sp);
        let i = a.energies.iter().position(|&e| (e - (-2.0 + 1.0 - 0.07)).abs() < 1e-15).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!(a.vectors[i][0], h, epsilon = 1e-15);
        assert_abs_diff_eq!(a.vectors[i][1], -h, epsilon = 1e-15);
    }

    #[test]
    fn triplet_vector_survives_hopping() {
        let sp = SystemParams::new(-1.0, -0.4, 0.3, 0.2, 0.25, 0.07, 0.05, -0.03);
        let m = sp.matrix6();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let v = nalgebra::Vector6::new(0.0, 0.0, h, h, 0.0, 0.0);
        let mv = m * v;
        assert!((mv - v * sp.triplet_energy()).norm() < 1e-15);
    }
}
