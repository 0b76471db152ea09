//! Orbital partition, system parameters, ground-state classification and bath
//! mode enumeration.
//!
//! Orbital indices are 0-based. The system orbitals are referred to as `1`
//! (HOMO) and `2` (LUMO) in names and docs, matching the usual notation.

use std::fmt;

use nalgebra::{Matrix3, Matrix6};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fcidump::IntegralSet;

/// Split of the orbital space into system and environment.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitalPartition {
    pub homo: usize,
    pub lumo: usize,
    /// Doubly occupied environment orbitals (the α set).
    pub doubly_occupied: Vec<usize>,
    /// Empty environment orbitals (the m set).
    pub empty: Vec<usize>,
}

impl OrbitalPartition {
    /// HOMO from the closed-shell electron count, LUMO directly above it.
    pub fn default_for(set: &IntegralSet) -> Result<Self> {
        let homo = set.nelec.div_ceil(2).max(1) - 1;
        Self::with_frontier(set.norb(), homo, homo + 1)
    }

    /// Contiguous partition around an explicit HOMO/LUMO pair.
    pub fn with_frontier(norb: usize, homo: usize, lumo: usize) -> Result<Self> {
        if norb < 2 {
            return Err(Error::Partition(format!(
                "need at least 2 orbitals for a HOMO/LUMO system, got {norb}"
            )));
        }
        if homo >= norb || lumo >= norb {
            return Err(Error::Partition(format!(
                "HOMO {} / LUMO {} outside 1..={norb}",
                homo + 1,
                lumo + 1
            )));
        }
        if lumo != homo + 1 {
            return Err(Error::Partition(format!(
                "LUMO {} must directly follow HOMO {}; use an explicit partition for other layouts",
                lumo + 1,
                homo + 1
            )));
        }
        Ok(Self {
            homo,
            lumo,
            doubly_occupied: (0..homo).collect(),
            empty: (lumo + 1..norb).collect(),
        })
    }

    /// Fully explicit partition, validated as a disjoint cover of the orbitals.
    pub fn explicit(
        norb: usize,
        homo: usize,
        lumo: usize,
        doubly_occupied: Vec<usize>,
        empty: Vec<usize>,
    ) -> Result<Self> {
        if homo == lumo {
            return Err(Error::Partition("HOMO and LUMO coincide".into()));
        }
        let mut seen = vec![false; norb];
        for &o in [homo, lumo].iter().chain(&doubly_occupied).chain(&empty) {
            if o >= norb {
                return Err(Error::Partition(format!("orbital {} outside 1..={norb}", o + 1)));
            }
            if std::mem::replace(&mut seen[o], true) {
                return Err(Error::Partition(format!("orbital {} listed twice", o + 1)));
            }
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::Partition(format!("orbital {} not assigned", missing + 1)));
        }
        Ok(Self {
            homo,
            lumo,
            doubly_occupied,
            empty,
        })
    }

    pub fn n_db(&self) -> usize {
        self.doubly_occupied.len()
    }

    pub fn n_empt(&self) -> usize {
        self.empty.len()
    }

    pub fn norb(&self) -> usize {
        self.n_db() + self.n_empt() + 2
    }
}

/// One-body HOMO/LUMO block and the sixteen two-body integrals over {1,2}.
///
/// `t` already includes the mean field of the doubly occupied orbitals.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SystemBlock {
    pub t: [[f64; 2]; 2],
    pub h: [[[[f64; 2]; 2]; 2]; 2],
}

impl SystemBlock {
    pub fn from_integrals(set: &IntegralSet, part: &OrbitalPartition) -> Self {
        let sys = [part.homo, part.lumo];
        let mut block = SystemBlock::default();
        for (a, &p) in sys.iter().enumerate() {
            for (b, &q) in sys.iter().enumerate() {
                let mut v = set.t(p, q);
                for &k in &part.doubly_occupied {
                    v += 2.0 * set.eri(p, q, k, k) - set.eri(p, k, q, k);
                }
                block.t[a][b] = v;
                for (c, &r) in sys.iter().enumerate() {
                    for (d, &s) in sys.iter().enumerate() {
                        block.h[a][b][c][d] = set.eri(p, q, r, s);
                    }
                }
            }
        }
        block
    }

    /// Same block with two-body integrals lowered by `dh`.
    pub fn minus(&self, dh: &[[[[f64; 2]; 2]; 2]; 2]) -> Self {
        let mut out = *self;
        for a in 0..2 {
            for b in 0..2 {
                for c in 0..2 {
                    for d in 0..2 {
                        out.h[a][b][c][d] -= dh[a][b][c][d];
                    }
                }
            }
        }
        out
    }
}

/// Parameters of the two-orbital system Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    pub eps1: f64,
    pub eps2: f64,
    pub u1: f64,
    pub u2: f64,
    pub j12: f64,
    pub k12: f64,
    pub t1_tilde: f64,
    pub t2_tilde: f64,
    pub delta12: f64,
}

impl SystemParams {
    #[allow(clippy::too_many_arguments)]
    pub fn new(eps1: f64, eps2: f64, u1: f64, u2: f64, j12: f64, k12: f64, t1: f64, t2: f64) -> Self {
        Self {
            eps1,
            eps2,
            u1,
            u2,
            j12,
            k12,
            t1_tilde: t1,
            t2_tilde: t2,
            delta12: eps2 + u2 - eps1 - u1,
        }
    }

    pub fn from_block(b: &SystemBlock) -> Self {
        let h = &b.h;
        Self::new(
            b.t[0][0],
            b.t[1][1],
            h[0][0][0][0] / 2.0,
            h[1][1][1][1] / 2.0,
            h[0][0][1][1],
            h[0][1][0][1],
            b.t[0][1] + h[0][0][0][1],
            b.t[0][1] + h[0][1][1][1],
        )
    }

    /// Logs a warning for parameters that physical integrals cannot produce.
    pub fn check_physical(&self) {
        if self.u1 < 0.0 || self.u2 < 0.0 || self.k12 < 0.0 {
            log::warn!(
                "unphysical system parameters: U1={:.6} U2={:.6} K12={:.6}",
                self.u1,
                self.u2,
                self.k12
            );
        }
    }

    /// The 6×6 Hamiltonian in the basis
    /// `|↑↓,0⟩, |0,↑↓⟩, |↑,↓⟩, |↓,↑⟩, |↑,↑⟩, |↓,↓⟩`.
    pub fn matrix6(&self) -> Matrix6<f64> {
        let (t1, t2, k) = (self.t1_tilde, self.t2_tilde, self.k12);
        let open = self.eps1 + self.eps2 + self.j12;
        let mut m = Matrix6::zeros();
        m[(0, 0)] = 2.0 * (self.eps1 + self.u1);
        m[(1, 1)] = 2.0 * (self.eps2 + self.u2);
        m[(2, 2)] = open;
        m[(3, 3)] = open;
        m[(4, 4)] = open - k;
        m[(5, 5)] = open - k;
        let mut set = |i: usize, j: usize, v: f64| {
            m[(i, j)] = v;
            m[(j, i)] = v;
        };
        set(0, 1, k);
        set(0, 2, t1);
        set(0, 3, -t1);
        set(1, 2, t2);
        set(1, 3, -t2);
        set(2, 3, -k);
        m
    }

    /// Singlet block in the basis `|↑↓,0⟩, |0,↑↓⟩, (|↑,↓⟩−|↓,↑⟩)/√2`.
    pub fn singlet_matrix(&self) -> Matrix3<f64> {
        let s2 = std::f64::consts::SQRT_2;
        Matrix3::new(
            2.0 * (self.eps1 + self.u1),
            self.k12,
            s2 * self.t1_tilde,
            self.k12,
            2.0 * (self.eps2 + self.u2),
            s2 * self.t2_tilde,
            s2 * self.t1_tilde,
            s2 * self.t2_tilde,
            self.eps1 + self.eps2 + self.j12 + self.k12,
        )
    }

    pub fn triplet_energy(&self) -> f64 {
        self.eps1 + self.eps2 + self.j12 - self.k12
    }
}

/// Reads the system parameters off the integrals.
pub fn system_params(set: &IntegralSet, part: &OrbitalPartition) -> SystemParams {
    let sp = SystemParams::from_block(&SystemBlock::from_integrals(set, part));
    sp.check_physical();
    sp
}

/// Hartree-Fock energy of every orbital with the doubly occupied set as reference.
/// The returned vector is indexed by orbital.
pub fn hf_orbital_energies(set: &IntegralSet, part: &OrbitalPartition) -> Vec<f64> {
    (0..set.norb())
        .map(|k| {
            set.t(k, k)
                + part
                    .doubly_occupied
                    .iter()
                    .map(|&a| 2.0 * set.eri(k, k, a, a) - set.eri(k, a, k, a))
                    .sum::<f64>()
        })
        .collect()
}

/// Hartree-Fock energy of the closed-shell environment determinant.
pub fn environment_hf_energy(set: &IntegralSet, part: &OrbitalPartition) -> f64 {
    let d = &part.doubly_occupied;
    let one: f64 = d.iter().map(|&a| 2.0 * set.t(a, a)).sum();
    let two: f64 = d
        .iter()
        .flat_map(|&a| d.iter().map(move |&b| (a, b)))
        .map(|(a, b)| 2.0 * set.eri(a, a, b, b) - set.eri(a, b, a, b))
        .sum();
    one + two
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpinLabel {
    Singlet,
    Triplet,
}

impl fmt::Display for SpinLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SpinLabel::Singlet => "singlet",
            SpinLabel::Triplet => "triplet",
        })
    }
}

/// Environment model, chosen by the spin of the system ground state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EnvModel {
    #[serde(rename = "sg")]
    Singlet,
    #[serde(rename = "tr")]
    Triplet,
}

impl EnvModel {
    pub fn tag(self) -> &'static str {
        match self {
            EnvModel::Singlet => "sg",
            EnvModel::Triplet => "tr",
        }
    }

    pub fn for_label(label: SpinLabel) -> Self {
        match label {
            SpinLabel::Singlet => EnvModel::Singlet,
            SpinLabel::Triplet => EnvModel::Triplet,
        }
    }
}

impl fmt::Display for EnvModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl std::str::FromStr for EnvModel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sg" | "singlet" => Ok(EnvModel::Singlet),
            "tr" | "triplet" => Ok(EnvModel::Triplet),
            other => Err(Error::InvalidArgument(format!("unknown model `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroundStateClass {
    pub label: SpinLabel,
    pub e_singlet_lowest: f64,
    pub e_triplet: f64,
}

impl GroundStateClass {
    pub fn model(&self) -> EnvModel {
        EnvModel::for_label(self.label)
    }
}

pub fn classify_ground_state(sp: &SystemParams) -> GroundStateClass {
    let e_singlet_lowest = sp.singlet_matrix().symmetric_eigenvalues().min();
    let e_triplet = sp.triplet_energy();
    GroundStateClass {
        label: if e_triplet < e_singlet_lowest {
            SpinLabel::Triplet
        } else {
            SpinLabel::Singlet
        },
        e_singlet_lowest,
        e_triplet,
    }
}

/// Family a bath mode belongs to. The declaration order is the output order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeKind {
    /// α → m between environment orbitals.
    EnvEnv,
    /// HOMO → m, singlet model.
    HomoToVirtual,
    /// α → LUMO, singlet model.
    OccToLumo,
    /// HOMO → m, triplet model.
    HomoExcitationTriplet,
    /// α → HOMO, triplet model.
    IntoHomoTriplet,
    /// LUMO → m, triplet model.
    LumoExcitationTriplet,
    /// α → LUMO, triplet model.
    IntoLumoTriplet,
}

impl ModeKind {
    pub fn is_triplet_system(self) -> bool {
        matches!(
            self,
            ModeKind::HomoExcitationTriplet
                | ModeKind::IntoHomoTriplet
                | ModeKind::LumoExcitationTriplet
                | ModeKind::IntoLumoTriplet
        )
    }
}

/// One electron-hole transition `lower → upper` treated as an oscillator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BathMode {
    pub kind: ModeKind,
    pub upper: usize,
    pub lower: usize,
    pub omega: f64,
    pub r: f64,
    pub e_corr: f64,
    /// Vertex factor multiplying every integral this mode enters with:
    /// `r` for singlet-type modes and `1/√2` for triplet system modes.
    pub vertex: f64,
    /// Bare couplings λ₁₁, λ₁₂, λ₂₂ to the system.
    pub lambda: [f64; 3],
}

impl BathMode {
    /// `λ_pq` for system indices `p, q ∈ {0, 1}`.
    #[inline]
    pub fn lambda_pq(&self, p: usize, q: usize) -> f64 {
        self.lambda[p + q]
    }
}

impl fmt::Display for BathMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:?}({} <- {}) omega={:.6}",
            self.kind,
            self.upper + 1,
            self.lower + 1,
            self.omega
        )
    }
}

/// Paired-transition parameters `(Δ, ω, E_corr, r)` for a singlet-type mode.
fn paired(delta: f64, k: f64, shift: f64) -> (f64, f64, f64) {
    let root = delta.hypot(k);
    let omega = root + shift;
    let e_corr = delta - root;
    let den = (k * k + (root + delta).powi(2)).sqrt();
    let r = if den == 0.0 { 1.0 } else { (root + delta - k) / den };
    (omega, e_corr, r)
}

/// Mode count of the singlet environment model.
pub fn n_rpa_singlet(n_db: usize, n_empt: usize) -> usize {
    (n_db + 1) * (n_empt + 1) - 1
}

/// Mode count of the triplet environment model.
pub fn n_rpa_triplet(n_db: usize, n_empt: usize) -> usize {
    (n_db + 2) * (n_empt + 2) - 4
}

pub fn n_rpa(model: EnvModel, n_db: usize, n_empt: usize) -> usize {
    match model {
        EnvModel::Singlet => n_rpa_singlet(n_db, n_empt),
        EnvModel::Triplet => n_rpa_triplet(n_db, n_empt),
    }
}

/// Retained bath modes plus the ones removed for a non-positive frequency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BathModes {
    pub model: EnvModel,
    pub modes: Vec<BathMode>,
    pub dropped: Vec<BathMode>,
}

impl BathModes {
    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn sum_e_corr(&self) -> f64 {
        self.modes.iter().map(|m| m.e_corr).sum()
    }
}

/// Enumerates the environment oscillators of the chosen model.
///
/// Modes with `ω ≤ 0` abort the run unless `drop_unstable` is set, in which
/// case they are moved to [`BathModes::dropped`].
pub fn enumerate_bath_modes(
    set: &IntegralSet,
    part: &OrbitalPartition,
    model: EnvModel,
    drop_unstable: bool,
) -> Result<BathModes> {
    let sp = SystemParams::from_block(&SystemBlock::from_integrals(set, part));
    let eps = hf_orbital_energies(set, part);
    let (h1, h2) = (part.homo, part.lumo);
    let h = |p, q, r, s| set.eri(p, q, r, s);
    let u = |p: usize| h(p, p, p, p) / 2.0;
    let jj = |p: usize, q: usize| h(p, p, q, q);
    let kk = |p: usize, q: usize| h(p, q, p, q);
    let s2 = std::f64::consts::SQRT_2;

    let make = |kind, upper, lower, omega, r, e_corr, vertex: f64| {
        let lambda = [
            s2 * vertex * h(h1, h1, upper, lower),
            s2 * vertex * h(h1, h2, upper, lower),
            s2 * vertex * h(h2, h2, upper, lower),
        ];
        BathMode {
            kind,
            upper,
            lower,
            omega,
            r,
            e_corr,
            vertex,
            lambda,
        }
    };

    let mut all = Vec::with_capacity(n_rpa(model, part.n_db(), part.n_empt()));
    for &m in &part.empty {
        for &a in &part.doubly_occupied {
            let delta = eps[m] - eps[a] + u(m) + u(a) - 2.0 * jj(m, a) + kk(m, a);
            let (omega, e_corr, r) = paired(delta, kk(m, a), -u(a) - u(m) + jj(m, a) + kk(m, a));
            all.push(make(ModeKind::EnvEnv, m, a, omega, r, e_corr, r));
        }
    }
    match model {
        EnvModel::Singlet => {
            for &m in &part.empty {
                let delta = eps[m] + u(m) - sp.eps1 - sp.u1;
                let k = kk(m, h1);
                let (omega, e_corr, r) = paired(delta, k, jj(m, h1) - sp.u1 - u(m) + k);
                all.push(make(ModeKind::HomoToVirtual, m, h1, omega, r, e_corr, r));
            }
            for &a in &part.doubly_occupied {
                let k = kk(h2, a);
                let delta = sp.eps2 - eps[a] + sp.u2 + u(a) - 2.0 * jj(h2, a) + k;
                let (omega, e_corr, r) = paired(delta, k, jj(h2, a) - u(a) - sp.u2 + k);
                all.push(make(ModeKind::OccToLumo, h2, a, omega, r, e_corr, r));
            }
        }
        EnvModel::Triplet => {
            let f = std::f64::consts::FRAC_1_SQRT_2;
            let (j12, k12) = (sp.j12, sp.k12);
            for &m in &part.empty {
                let w = eps[m] - sp.eps1 + jj(m, h2) - kk(m, h2) - j12 + k12;
                all.push(make(ModeKind::HomoExcitationTriplet, m, h1, w, 1.0, 0.0, f));
            }
            for &a in &part.doubly_occupied {
                let w = sp.eps1 - eps[a] + 2.0 * sp.u1 - 2.0 * jj(h1, a) + kk(h1, a) - jj(h2, a) + j12;
                all.push(make(ModeKind::IntoHomoTriplet, h1, a, w, 1.0, 0.0, f));
            }
            for &m in &part.empty {
                let w = eps[m] - sp.eps2 + jj(m, h1) - kk(m, h1) - j12 + k12;
                all.push(make(ModeKind::LumoExcitationTriplet, m, h2, w, 1.0, 0.0, f));
            }
            for &a in &part.doubly_occupied {
                let w = sp.eps2 - eps[a] + 2.0 * sp.u2 - 2.0 * jj(h2, a) + kk(h2, a) - jj(h1, a) + j12;
                all.push(make(ModeKind::IntoLumoTriplet, h2, a, w, 1.0, 0.0, f));
            }
        }
    }
    all.sort_by_key(|m| (m.kind, m.upper, m.lower));

    let (modes, dropped): (Vec<_>, Vec<_>) = all.into_iter().partition(|m| m.omega > 0.0);
    if !dropped.is_empty() {
        if !drop_unstable {
            return Err(Error::UnstableModes {
                count: dropped.len(),
                first: dropped[0].to_string(),
            });
        }
        log::warn!(
            "dropping {} bath mode(s) with non-positive frequency; {} retained",
            dropped.len(),
            modes.len()
        );
    }
    Ok(BathModes {
        model,
        modes,
        dropped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn set_with(norb: usize, nelec: usize) -> IntegralSet {
        IntegralSet::zeros(norb, nelec, 0).unwrap()
    }

    #[test]
    fn default_partition_six_orbitals() {
        let p = OrbitalPartition::default_for(&set_with(6, 6)).unwrap();
        assert_eq!((p.homo, p.lumo), (2, 3));
        assert_eq!(p.doubly_occupied, vec![0, 1]);
        assert_eq!(p.empty, vec![4, 5]);
    }

    #[test]
    fn default_partition_two_orbitals() {
        let p = OrbitalPartition::default_for(&set_with(2, 2)).unwrap();
        assert_eq!((p.homo, p.lumo, p.n_db(), p.n_empt()), (0, 1, 0, 0));
    }

    #[test]
    fn partition_rejections() {
        assert!(OrbitalPartition::with_frontier(6, 1, 4).is_err());
        assert!(OrbitalPartition::with_frontier(6, 5, 6).is_err());
        assert!(OrbitalPartition::default_for(&set_with(1, 2)).is_err());
        assert!(OrbitalPartition::default_for(&set_with(2, 4)).is_err());
        assert!(OrbitalPartition::explicit(4, 0, 0, vec![1], vec![2, 3]).is_err());
        assert!(OrbitalPartition::explicit(4, 0, 1, vec![2], vec![2, 3]).is_err());
        assert!(OrbitalPartition::explicit(4, 0, 1, vec![], vec![3]).is_err());
        let p = OrbitalPartition::explicit(6, 1, 4, vec![0, 2, 3], vec![5]).unwrap();
        assert_eq!(p.norb(), 6);
    }

    #[test]
    fn params_without_environment_are_raw_integrals() {
        let mut s = set_with(2, 2);
        s.set_t(0, 0, -1.1);
        s.set_t(1, 1, -0.3);
        s.set_t(0, 1, 0.02);
        s.set_eri(0, 0, 0, 0, 0.7);
        s.set_eri(0, 0, 0, 1, 0.01);
        s.set_eri(0, 0, 1, 1, 0.30);
        let p = OrbitalPartition::default_for(&s).unwrap();
        let sp = system_params(&s, &p);
        assert_eq!(sp.eps1, -1.1);
        assert_eq!(sp.u1, 0.35);
        assert_eq!(sp.j12, 0.30);
        assert_abs_diff_eq!(sp.t1_tilde, 0.03, epsilon = 1e-15);
        assert_eq!(sp.delta12, sp.eps2 + sp.u2 - sp.eps1 - sp.u1);
    }

    #[test]
    fn hf_energy_single_occupied() {
        let mut s = set_with(4, 4);
        s.set_t(3, 3, 0.5);
        s.set_eri(3, 3, 0, 0, 0.2);
        s.set_eri(3, 0, 3, 0, 0.1);
        let p = OrbitalPartition::default_for(&s).unwrap();
        assert_eq!(p.doubly_occupied, vec![0]);
        assert_abs_diff_eq!(hf_orbital_energies(&s, &p)[3], 0.8, epsilon = 1e-15);
    }

    #[test]
    fn classification_example() {
        let sp = SystemParams::new(-1.0, -0.5, 0.3, 0.25, 0.2, 0.05, 0.0, 0.0);
        let g = classify_ground_state(&sp);
        assert_abs_diff_eq!(sp.delta12, 0.45, epsilon = 1e-15);
        assert_abs_diff_eq!(g.e_triplet, -1.35, epsilon = 1e-15);
        let closed = -1.5 + 0.55 - (0.45f64.powi(2) + 0.05f64.powi(2)).sqrt();
        assert_abs_diff_eq!(g.e_singlet_lowest, closed, epsilon = 1e-12);
        assert_abs_diff_eq!(g.e_singlet_lowest, -1.402769, epsilon = 1e-6);
        assert_eq!(g.label, SpinLabel::Singlet);
    }

    #[test]
    fn classification_closed_shell_limit() {
        let sp = SystemParams::new(-1.0, 1.0, 0.3, 0.3, 0.2, 0.0, 0.0, 0.0);
        let g = classify_ground_state(&sp);
        assert_abs_diff_eq!(g.e_singlet_lowest, 2.0 * (-1.0 + 0.3), epsilon = 1e-12);
        assert_eq!(g.label, SpinLabel::Singlet);
    }

    #[test]
    fn classification_degenerate_triplet() {
        let sp = SystemParams::new(-1.0, -1.0, 0.3, 0.3, 0.1, 0.1, 0.0, 0.0);
        let g = classify_ground_state(&sp);
        assert_abs_diff_eq!(g.e_triplet, -2.0, epsilon = 1e-15);
        let dense = sp.matrix6().symmetric_eigenvalues();
        let min = dense.iter().cloned().fold(f64::INFINITY, f64::min);
        assert_abs_diff_eq!(min, g.e_triplet.min(g.e_singlet_lowest), epsilon = 1e-12);
        assert_eq!(g.label, SpinLabel::Triplet);
    }

    #[test]
    fn paired_limits() {
        let (w, e, r) = paired(0.8, 0.0, -0.3);
        assert_abs_diff_eq!(w, 0.5, epsilon = 1e-15);
        assert_eq!(e, 0.0);
        assert_eq!(r, 1.0);
        let (_, _, r) = paired(0.0, 0.2, 0.0);
        assert_eq!(r, 0.0);
    }

    #[test]
    fn mode_counts() {
        assert_eq!(n_rpa_singlet(10, 20), 230);
        assert_eq!(n_rpa_triplet(10, 20), 260);
        assert_eq!(n_rpa_singlet(0, 0), 0);
        assert_eq!(n_rpa_triplet(0, 0), 0);
    }

    #[test]
    fn env_mode_without_exchange() {
        let mut s = set_with(4, 4);
        let p = OrbitalPartition::default_for(&s).unwrap();
        for k in 0..4 {
            s.set_t(k, k, -1.0 + 0.5 * k as f64);
            s.set_eri(k, k, k, k, 0.4);
        }
        s.set_eri(3, 3, 0, 0, 0.1);
        let modes = enumerate_bath_modes(&s, &p, EnvModel::Singlet, false).unwrap();
        let env = modes.modes.iter().find(|m| m.kind == ModeKind::EnvEnv).unwrap();
        // ε_m − ε_α from HF energies with the α orbital occupied
        let eps = hf_orbital_energies(&s, &p);
        let delta = eps[3] - eps[0] + 0.2 + 0.2 - 0.2;
        assert_abs_diff_eq!(env.omega, delta - 0.4 + 0.1, epsilon = 1e-14);
        assert_eq!(env.r, 1.0);
        assert_eq!(env.e_corr, 0.0);
    }

    #[test]
    fn unstable_modes_abort_or_drop() {
        let mut s = set_with(4, 4);
        for k in 0..4 {
            s.set_eri(k, k, k, k, 2.0);
        }
        let p = OrbitalPartition::default_for(&s).unwrap();
        let err = enumerate_bath_modes(&s, &p, EnvModel::Singlet, false).unwrap_err();
        assert!(matches!(err, Error::UnstableModes { .. }));
        let kept = enumerate_bath_modes(&s, &p, EnvModel::Singlet, true).unwrap();
        assert_eq!(kept.len() + kept.dropped.len(), 3);
    }
}
