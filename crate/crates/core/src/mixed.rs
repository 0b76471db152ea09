//! Mixed approximation: the most strongly coupled normal modes become explicit
//! bath qubits, the rest are folded into screened system parameters, and the
//! qubit Hamiltonian is diagonalized in a truncated excitation subspace.
//!
//! Qubits 0 and 1 encode the system. The four `S_z = 0` states map to
//! computational states `(q0, q1)` as
//!
//! | state       | q0 | q1 |
//! |-------------|----|----|
//! | `\|↑↓,0⟩`   | 0  | 0  |
//! | `\|0,↑↓⟩`   | 0  | 1  |
//! | `\|↑,↓⟩`    | 1  | 0  |
//! | `\|↓,↑⟩`    | 1  | 1  |
//!
//! so the closed-shell reference is the all-zero state. Bath qubit `2 + i`
//! holds the `i`-th strongest mode; `|0⟩` is its unexcited state.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::eigensolver::{lowest_eigenpairs, ConvergenceReport, DavidsonOptions, SymmetricOperator};
use crate::error::{Error, Result};
use crate::model::{EnvModel, SpinLabel, SystemBlock, SystemParams};
use crate::normal_modes::NormalModeBasis;
use crate::pauli::{FlipGroup, PauliBuilder, PauliTermSum, MAX_QUBITS};
use crate::screening::{screen_params, ScreenedParams};
use crate::subspace::{ExcitationCount, TruncatedSubspace};

/// Largest number of explicit bath qubits.
pub const MAX_EXPLICIT: usize = MAX_QUBITS - 2;

/// Width of the window around 1/2 in which a spin assignment is reported as ambiguous.
pub const AMBIGUITY_WINDOW: f64 = 0.1;

/// Normal modes ranked by their coupling strength to the system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingRank {
    /// `L_n = (g₁₂² + (g₁₁ − g₂₂)²)/Ω` for every normal mode, in mode order.
    pub l: Vec<f64>,
    /// Mode indices sorted by descending `L`, ties by index.
    pub order: Vec<usize>,
}

impl CouplingRank {
    pub fn explicit(&self, nq: usize) -> &[usize] {
        &self.order[..nq.min(self.order.len())]
    }

    /// Membership mask of the explicit set.
    pub fn explicit_mask(&self, nq: usize) -> Vec<bool> {
        let mut mask = vec![false; self.order.len()];
        for &n in self.explicit(nq) {
            mask[n] = true;
        }
        mask
    }
}

pub fn rank_modes(nm: &NormalModeBasis) -> CouplingRank {
    let l: Vec<f64> = nm
        .g
        .iter()
        .zip(&nm.big_omega)
        .map(|(g, w)| (g[1] * g[1] + (g[0] - g[2]).powi(2)) / w)
        .collect();
    let mut order: Vec<usize> = (0..l.len()).collect();
    order.sort_by(|&a, &b| l[b].total_cmp(&l[a]).then(a.cmp(&b)));
    CouplingRank { l, order }
}

/// Screening by the modes that are not explicit.
pub fn renormalize_remainder(block: &SystemBlock, nm: &NormalModeBasis, rank: &CouplingRank, nq: usize) -> ScreenedParams {
    let mask = rank.explicit_mask(nq);
    screen_params(block, nm, |n| !mask[n])
}

/// Adds a spin-summed one-body operator `Σ_pq X_pq Σ_σ c†_pσ c_qσ` on the
/// system qubits, optionally multiplied by `X` on a bath qubit.
fn add_one_body(b: &mut PauliBuilder, x11: f64, x12: f64, x22: f64, bath: Option<usize>) {
    let with = |f: &[(usize, char)]| -> Vec<(usize, char)> {
        let mut v = f.to_vec();
        if let Some(q) = bath {
            v.push((q, 'X'));
        }
        v
    };
    b.add_factors(x12, &with(&[(0, 'X'), (1, 'Z')]));
    b.add_factors(x12, &with(&[(0, 'Y'), (1, 'Y')]));
    b.add_factors(x11 + x22, &with(&[]));
    b.add_factors((x11 - x22) / 2.0, &with(&[(1, 'Z')]));
    b.add_factors((x11 - x22) / 2.0, &with(&[(0, 'Z'), (1, 'Z')]));
}

/// The `S_z = 0` system Hamiltonian on qubits 0 and 1.
pub fn add_system(b: &mut PauliBuilder, sp: &SystemParams) {
    let (t1, t2) = (sp.t1_tilde, sp.t2_tilde);
    b.add_constant(sp.eps1 + sp.eps2 + (sp.u1 + sp.u2 + sp.j12) / 2.0);
    b.add_factors((sp.u1 + sp.u2 - sp.j12) / 2.0, &[(0, 'Z')]);
    b.add_factors(-sp.delta12 / 2.0, &[(1, 'Z')]);
    b.add_factors(-sp.delta12 / 2.0, &[(0, 'Z'), (1, 'Z')]);
    b.add_factors(sp.k12, &[(0, 'Z'), (1, 'X')]);
    b.add_factors((t1 + t2) / 2.0, &[(0, 'X'), (1, 'Z')]);
    b.add_factors((t1 + t2) / 2.0, &[(0, 'Y'), (1, 'Y')]);
    b.add_factors((t1 - t2) / 2.0, &[(0, 'X')]);
    b.add_factors((t2 - t1) / 2.0, &[(0, 'X'), (1, 'X')]);
}

/// Qubit Hamiltonian with `nq` explicit modes.
///
/// `env_const` is added to the constant offset; it should hold the core
/// energy and the environment ground energy.
pub fn assemble_hamiltonian(
    screened: &ScreenedParams,
    nm: &NormalModeBasis,
    rank: &CouplingRank,
    nq: usize,
    env_const: f64,
) -> Result<PauliTermSum> {
    if nq > MAX_EXPLICIT {
        return Err(Error::SizeCap {
            what: "explicit bath",
            size: nq,
            cap: MAX_EXPLICIT,
        });
    }
    if nq > nm.dim() {
        return Err(Error::InvalidArgument(format!(
            "{nq} explicit modes requested but the bath has {}",
            nm.dim()
        )));
    }
    let mut b = PauliBuilder::new(2 + nq)?;
    b.add_constant(env_const);
    add_system(&mut b, &screened.params);
    let (mut c11, mut c12, mut c22) = (0.0, 0.0, 0.0);
    for (i, &n) in rank.explicit(nq).iter().enumerate() {
        let q = 2 + i;
        let w = nm.big_omega[n];
        let [g11, g12, g22] = nm.g[n];
        b.add_constant(w / 2.0);
        b.add_factors(-w / 2.0, &[(q, 'Z')]);
        add_one_body(&mut b, g11, g12, g22, Some(q));
        c11 += (g11 * g11 + g12 * g12) / w;
        c12 += g12 * (g11 + g22) / w;
        c22 += (g12 * g12 + g22 * g22) / w;
    }
    add_one_body(&mut b, c11, c12, c22, None);
    Ok(b.finish())
}

/// A Pauli sum restricted to a truncated subspace.
pub struct ProjectedOperator<'a> {
    pub sub: &'a TruncatedSubspace,
    offset: f64,
    diag: Option<FlipGroup>,
    groups: Vec<FlipGroup>,
}

impl<'a> ProjectedOperator<'a> {
    pub fn new(h: &PauliTermSum, sub: &'a TruncatedSubspace) -> Result<Self> {
        if h.n_qubits != sub.n_qubits() {
            return Err(Error::DimensionMismatch(format!(
                "operator on {} qubits, subspace on {}",
                h.n_qubits,
                sub.n_qubits()
            )));
        }
        let mut groups = h.flip_groups();
        let diag = if groups.first().is_some_and(|g| g.x == 0) {
            Some(groups.remove(0))
        } else {
            None
        };
        Ok(Self {
            sub,
            offset: h.constant_offset,
            diag,
            groups,
        })
    }
}

impl SymmetricOperator for ProjectedOperator<'_> {
    fn dim(&self) -> usize {
        self.sub.dim()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let sub = self.sub;
        y.par_chunks_mut(256).enumerate().for_each(|(chunk, out)| {
            for (j, yi) in out.iter_mut().enumerate() {
                let t_idx = chunk * 256 + j;
                let t = sub.state(t_idx);
                let mut acc = self.offset;
                if let Some(d) = &self.diag {
                    acc += d.amplitude(t);
                }
                acc *= x[t_idx];
                for g in &self.groups {
                    let s = t ^ g.x;
                    if let Some(si) = sub.index_of(s) {
                        acc += g.amplitude(s) * x[si];
                    }
                }
                *yi = acc;
            }
        });
    }

    fn diagonal(&self) -> Vec<f64> {
        self.sub
            .basis()
            .iter()
            .map(|&s| self.offset + self.diag.as_ref().map_or(0.0, |d| d.amplitude(s)))
            .collect()
    }
}

/// Weight of a subspace vector on the `S_z = 0` triplet of the system qubits.
pub fn triplet_weight(sub: &TruncatedSubspace, psi: &[f64]) -> f64 {
    let norm: f64 = psi.iter().map(|x| x * x).sum();
    let mut w = 0.0;
    for (i, &s) in sub.basis().iter().enumerate() {
        match s & 0b11 {
            0b01 => {
                let partner = sub.index_of(s | 0b10).map_or(0.0, |j| psi[j]);
                w += (psi[i] + partner).powi(2) / 2.0;
            }
            0b11 if sub.index_of(s & !0b10).is_none() => w += psi[i] * psi[i] / 2.0,
            _ => {}
        }
    }
    w / norm
}

/// Norm of the part of `psi` with at least one excited bath qubit.
pub fn bath_weight(sub: &TruncatedSubspace, psi: &[f64]) -> f64 {
    let norm: f64 = psi.iter().map(|x| x * x).sum();
    let excited: f64 = psi
        .iter()
        .enumerate()
        .filter(|&(i, _)| sub.state(i) >> 2 != 0)
        .map(|(_, x)| x * x)
        .sum();
    excited / norm
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixedOptions {
    pub nq: usize,
    pub max_excitations: usize,
    pub counting: ExcitationCount,
    pub davidson: DavidsonOptions,
    /// Upper bound on eigenpairs requested while searching for the states
    /// that define the gaps.
    pub max_eigs: usize,
}

impl Default for MixedOptions {
    fn default() -> Self {
        Self {
            nq: 62,
            max_excitations: 4,
            counting: ExcitationCount::AllQubits,
            davidson: DavidsonOptions::default(),
            max_eigs: 64,
        }
    }
}

/// Default excitation limit for a given number of explicit qubits.
pub fn default_max_excitations(nq: usize) -> usize {
    if nq <= 62 {
        4
    } else {
        2
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixedResult {
    pub model: EnvModel,
    pub nq: usize,
    pub max_excitations: usize,
    pub subspace_dim: usize,
    /// Total energies including the constant offset.
    pub eigenvalues: Vec<f64>,
    pub triplet_weights: Vec<f64>,
    /// Weight on states with at least one excited bath qubit.
    pub bath_weights: Vec<f64>,
    pub labels: Vec<SpinLabel>,
    pub triplet_gap: f64,
    pub singlet_gap: f64,
    /// `(mode index, Ω, L)` of the explicit modes.
    pub explicit_modes: Vec<(usize, f64, f64)>,
    pub screened: ScreenedParams,
    pub report: ConvergenceReport,
    pub warnings: Vec<String>,
}

/// Everything the mixed solver needs besides its options.
pub struct MixedInputs<'a> {
    pub block: &'a SystemBlock,
    pub model: EnvModel,
    pub nm: &'a NormalModeBasis,
    pub rank: &'a CouplingRank,
    pub env_const: f64,
}

/// Builds, projects and diagonalizes the qubit Hamiltonian, then reads off
/// the triplet and singlet excitation energies.
///
/// The triplet gap is the lowest triplet minus the lowest singlet. In the
/// singlet model the singlet gap is the lowest bath excitation: the smaller of
/// the lowest renormalized frequency and the lowest singlet carrying mostly
/// bath-qubit excitation. In the triplet model it is the second singlet.
pub fn solve_mixed(inp: &MixedInputs<'_>, opts: &MixedOptions) -> Result<MixedResult> {
    let nq = opts.nq;
    let screened = renormalize_remainder(inp.block, inp.nm, inp.rank, nq);
    let h = assemble_hamiltonian(&screened, inp.nm, inp.rank, nq, inp.env_const)?;
    let sub = TruncatedSubspace::new(h.n_qubits, opts.max_excitations, opts.counting)?;
    let op = ProjectedOperator::new(&h, &sub)?;

    let mut n_eigs = opts.davidson.n_eigs.max(3).min(sub.dim());
    let mut warnings = Vec::new();
    loop {
        let dav = DavidsonOptions { n_eigs, ..opts.davidson };
        let pairs = lowest_eigenpairs(&op, &dav)?;
        let weights: Vec<f64> = pairs.vectors.iter().map(|v| triplet_weight(&sub, v)).collect();
        let labels: Vec<SpinLabel> = weights
            .iter()
            .map(|&w| if w > 0.5 { SpinLabel::Triplet } else { SpinLabel::Singlet })
            .collect();
        let nth = |label: SpinLabel, k: usize| {
            pairs
                .values
                .iter()
                .zip(&labels)
                .filter(|(_, &l)| l == label)
                .nth(k)
                .map(|(&e, _)| e)
        };
        let bath: Vec<f64> = pairs.vectors.iter().map(|v| bath_weight(&sub, v)).collect();
        // lowest singlet whose weight sits mostly on excited bath qubits
        let bath_singlet = pairs
            .values
            .iter()
            .zip(&labels)
            .zip(&bath)
            .find(|((_, &l), &b)| l == SpinLabel::Singlet && b > 0.5)
            .map(|((&e, _), _)| e);
        let found = nth(SpinLabel::Triplet, 0).is_some()
            && nth(SpinLabel::Singlet, 0).is_some()
            && match inp.model {
                EnvModel::Singlet => nq == 0 || bath_singlet.is_some(),
                EnvModel::Triplet => nth(SpinLabel::Singlet, 1).is_some(),
            };
        if !found && n_eigs < sub.dim().min(opts.max_eigs) {
            n_eigs = (2 * n_eigs).min(sub.dim()).min(opts.max_eigs);
            continue;
        }
        let s0 = nth(SpinLabel::Singlet, 0).ok_or_else(|| missing("singlet", n_eigs))?;
        let t0 = nth(SpinLabel::Triplet, 0).ok_or_else(|| missing("triplet", n_eigs))?;
        let second = nth(SpinLabel::Singlet, 1).map(|e| e - s0);
        for (i, &w) in weights.iter().enumerate() {
            if (w - 0.5).abs() <= AMBIGUITY_WINDOW {
                let msg = format!(
                    "state {i} at {:.8} Ha has triplet weight {w:.3}; read as {} but could be {}",
                    pairs.values[i],
                    labels[i],
                    if labels[i] == SpinLabel::Singlet { "triplet" } else { "singlet" }
                );
                log::warn!("{msg}");
                warnings.push(msg);
            }
        }
        let mask = inp.rank.explicit_mask(nq);
        let min_renormalized = (0..inp.nm.dim())
            .filter(|&n| !mask[n])
            .map(|n| inp.nm.big_omega[n])
            .reduce(f64::min);
        let singlet_gap = match inp.model {
            EnvModel::Singlet => match (min_renormalized, bath_singlet.map(|e| e - s0)) {
                (Some(a), Some(b)) => a.min(b),
                (Some(a), None) => a,
                (None, Some(b)) => b,
                (None, None) => {
                    return Err(missing("bath-excited singlet", n_eigs));
                }
            },
            EnvModel::Triplet => second.ok_or_else(|| missing("second singlet", n_eigs))?,
        };
        let explicit_modes = inp
            .rank
            .explicit(nq)
            .iter()
            .map(|&n| (n, inp.nm.big_omega[n], inp.rank.l[n]))
            .collect();
        return Ok(MixedResult {
            model: inp.model,
            nq,
            max_excitations: opts.max_excitations,
            subspace_dim: sub.dim(),
            triplet_gap: t0 - s0,
            singlet_gap,
            eigenvalues: pairs.values,
            triplet_weights: weights,
            bath_weights: bath,
            labels,
            explicit_modes,
            screened,
            report: pairs.report,
            warnings,
        });
    }
}

fn missing(what: &str, n_eigs: usize) -> Error {
    Error::InvalidArgument(format!(
        "no {what} state among the lowest {n_eigs} eigenpairs; raise the eigenpair limit"
    ))
}

/// One row of a convergence sweep. Gaps are in eV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub nq: usize,
    pub k: usize,
    #[serde(rename = "triplet_gap_eV")]
    pub triplet_gap_ev: Option<f64>,
    #[serde(rename = "singlet_gap_eV")]
    pub singlet_gap_ev: Option<f64>,
    pub iterations: usize,
    pub matvecs: usize,
    pub wall_s: f64,
    pub error: Option<String>,
}

/// Solves for every `nq` in turn; failures are recorded and the sweep goes on.
pub fn convergence_sweep(
    inp: &MixedInputs<'_>,
    base: &MixedOptions,
    nq_list: &[usize],
    k_schedule: impl Fn(usize) -> usize,
) -> Result<Vec<SweepRow>> {
    if nq_list.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidArgument("qubit counts must be ascending".into()));
    }
    Ok(nq_list
        .iter()
        .map(|&nq| {
            let k = k_schedule(nq);
            let opts = MixedOptions {
                nq,
                max_excitations: k,
                ..*base
            };
            let start = Instant::now();
            let res = solve_mixed(inp, &opts);
            let wall_s = start.elapsed().as_secs_f64();
            match res {
                Ok(r) => SweepRow {
                    nq,
                    k,
                    triplet_gap_ev: Some(crate::to_ev(r.triplet_gap)),
                    singlet_gap_ev: Some(crate::to_ev(r.singlet_gap)),
                    iterations: r.report.iterations,
                    matvecs: r.report.matvecs,
                    wall_s,
                    error: None,
                },
                Err(e) => {
                    let (iterations, matvecs) = match &e {
                        Error::NonConvergence { report } => (report.iterations, report.matvecs),
                        _ => (0, 0),
                    };
                    log::warn!("sweep point nq={nq} failed: {e}");
                    SweepRow {
                        nq,
                        k,
                        triplet_gap_ev: None,
                        singlet_gap_ev: None,
                        iterations,
                        matvecs,
                        wall_s,
                        error: Some(e.to_string()),
                    }
                }
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    fn system_only(sp: &SystemParams) -> DMatrix<f64> {
        let mut b = PauliBuilder::new(2).unwrap();
        add_system(&mut b, sp);
        b.finish().to_dense().unwrap()
    }

    #[test]
    fn system_qubit_encoding_matches_matrix() {
        let sp = SystemParams::new(-1.1, -0.35, 0.31, 0.27, 0.22, 0.06, 0.04, -0.025);
        let q = system_only(&sp);
        let m6 = sp.matrix6();
        // state order |↑↓,0⟩, |0,↑↓⟩, |↑,↓⟩, |↓,↑⟩ → q0 + 2 q1 = 0, 2, 1, 3
        let map = [0usize, 2, 1, 3];
        for i in 0..4 {
            for j in 0..4 {
                assert!((q[(map[i], map[j])] - m6[(i, j)]).abs() < 1e-15, "({i},{j})");
            }
        }
    }

    #[test]
    fn one_body_operator_encoding() {
        let (x11, x12, x22) = (0.3, -0.07, 0.11);
        let mut b = PauliBuilder::new(2).unwrap();
        add_one_body(&mut b, x11, x12, x22, None);
        let q = b.finish().to_dense().unwrap();
        // closed shells: 2 X_pp; open shells: X11 + X22; hopping ±X12
        assert!((q[(0, 0)] - 2.0 * x11).abs() < 1e-15);
        assert!((q[(2, 2)] - 2.0 * x22).abs() < 1e-15);
        assert!((q[(1, 1)] - (x11 + x22)).abs() < 1e-15);
        assert!((q[(0, 1)] - x12).abs() < 1e-15);
        assert!((q[(0, 3)] + x12).abs() < 1e-15);
        assert!((q[(2, 1)] - x12).abs() < 1e-15);
        assert!((q[(2, 3)] + x12).abs() < 1e-15);
    }

    #[test]
    fn rank_example_and_ties() {
        let nm = NormalModeBasis {
            omega: vec![0.5, 0.5, 0.7],
            big_omega: vec![0.5, 0.5, 0.7],
            s: DMatrix::identity(3, 3),
            g: vec![[0.0; 3], [0.02, 0.03, 0.01], [0.0; 3]],
        };
        let r = rank_modes(&nm);
        assert!((r.l[1] - 2.0e-3).abs() < 1e-15);
        assert_eq!(r.order, vec![1, 0, 2]);
    }

    #[test]
    fn triplet_weight_of_pure_states() {
        let sub = TruncatedSubspace::new(3, 3, ExcitationCount::AllQubits).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut psi = vec![0.0; sub.dim()];
        psi[sub.index_of(0b001).unwrap()] = h;
        psi[sub.index_of(0b011).unwrap()] = h;
        assert!((triplet_weight(&sub, &psi) - 1.0).abs() < 1e-15);
        psi[sub.index_of(0b011).unwrap()] = -h;
        assert!(triplet_weight(&sub, &psi).abs() < 1e-15);
    }
}
