//! Seeded generators of test molecules and random model instances.
//!
//! [`synthetic_integrals`] produces integral sets that look like a
//! closed-shell molecule in its canonical orbital basis: occupied orbitals low,
//! virtual orbitals high, a positive semidefinite Coulomb kernel built from a
//! low-rank factorization, and weak off-diagonal couplings.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::fcidump::IntegralSet;
use crate::model::SystemParams;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub norb: usize,
    pub nelec: usize,
    pub seed: u64,
    /// Target `Δ₁₂`; large values give a closed-shell singlet, values near
    /// zero favour a triplet system ground state.
    pub delta12: f64,
    /// Scale of off-diagonal transition densities, which set the bath couplings.
    pub coupling: f64,
    /// Scale of off-diagonal one-electron integrals.
    pub hopping: f64,
}

impl SyntheticSpec {
    pub fn new(norb: usize, nelec: usize, seed: u64) -> Self {
        Self {
            norb,
            nelec,
            seed,
            delta12: 0.5,
            coupling: 0.1,
            hopping: 0.01,
        }
    }
}

pub fn synthetic_integrals(spec: &SyntheticSpec) -> IntegralSet {
    let n = spec.norb;
    let mut r = rng(spec.seed);
    let mut set = IntegralSet::zeros(n, spec.nelec, 0).expect("orbital count within limits");
    let n_aux = n + 2;
    let a = 0.6;
    let frontier = spec.nelec.div_ceil(2).max(1) - 1;
    let mut b: Vec<DMatrix<f64>> = (0..n_aux)
        .map(|l| {
            let mut m = DMatrix::zeros(n, n);
            for p in 0..n {
                let own = if l == p { 1.0 } else { 0.0 };
                m[(p, p)] = a * (own + 0.3 * r.gen::<f64>());
                for q in 0..p {
                    // a weak HOMO/LUMO transition density keeps the system hopping small
                    let damp = if q == frontier && p == frontier + 1 { 0.2 } else { 1.0 };
                    let v = damp * a * spec.coupling * (2.0 * r.gen::<f64>() - 1.0);
                    m[(p, q)] = v;
                    m[(q, p)] = v;
                }
            }
            m
        })
        .collect();
    if frontier + 1 < n {
        // exchange channel that raises K12 without adding system hopping
        let mut m = DMatrix::zeros(n, n);
        m[(frontier, frontier + 1)] = 0.25 * a;
        m[(frontier + 1, frontier)] = 0.25 * a;
        b.push(m);
    }
    for p in 0..n {
        for q in 0..=p {
            for rr in 0..n {
                for s in 0..=rr {
                    if rr * (rr + 1) / 2 + s > p * (p + 1) / 2 + q {
                        continue;
                    }
                    let v: f64 = b.iter().map(|m| m[(p, q)] * m[(rr, s)]).sum();
                    set.set_eri(p, q, rr, s, v);
                }
            }
        }
    }

    let homo = frontier;
    let lumo = homo + 1;
    let u = |p: usize| set.eri(p, p, p, p) / 2.0;
    let eps1 = -0.4 + 0.05 * (r.gen::<f64>() - 0.5);
    let eps2 = if lumo < n { eps1 + u(homo) - u(lumo) + spec.delta12 } else { 0.0 };
    let target: Vec<f64> = (0..n)
        .map(|p| {
            let jitter = 0.05 * r.gen::<f64>();
            if p < homo {
                eps1 - 0.25 - 0.08 * (homo - 1 - p) as f64 - jitter
            } else if p == homo {
                eps1
            } else if p == lumo {
                eps2
            } else {
                eps2.max(eps1 + 0.2) + 0.2 + 0.08 * (p - lumo - 1) as f64 + jitter
            }
        })
        .collect();
    for p in 0..n {
        let mf: f64 = (0..homo)
            .map(|k| 2.0 * set.eri(p, p, k, k) - set.eri(p, k, p, k))
            .sum();
        set.set_t(p, p, target[p] - mf);
        for q in 0..p {
            set.set_t(p, q, spec.hopping * (2.0 * r.gen::<f64>() - 1.0));
        }
    }
    set.core_energy = 0.5 + r.gen::<f64>();
    set
}

/// Integral set with every symmetry-distinct entry drawn uniformly from
/// `[-1, 1]`; for format tests, not physics.
pub fn random_integral_set(norb: usize, seed: u64) -> IntegralSet {
    let mut r = rng(seed);
    let nelec = r.gen_range(1..=2 * norb);
    let mut set = IntegralSet::zeros(norb, nelec, (nelec % 2) as i64).expect("orbital count within limits");
    for p in 0..norb {
        for q in 0..=p {
            set.set_t(p, q, 2.0 * r.gen::<f64>() - 1.0);
            for rr in 0..norb {
                for s in 0..=rr {
                    if rr * (rr + 1) / 2 + s <= p * (p + 1) / 2 + q {
                        set.set_eri(p, q, rr, s, 2.0 * r.gen::<f64>() - 1.0);
                    }
                }
            }
        }
    }
    set.core_energy = 10.0 * (r.gen::<f64>() - 0.5);
    set.orbsym = (0..norb).map(|_| r.gen_range(1..=4)).collect();
    set
}

/// Two-orbital, two-electron set with physical-looking random integrals.
pub fn random_two_orbital(seed: u64) -> IntegralSet {
    let mut r = rng(seed);
    let mut s = IntegralSet::zeros(2, 2, 0).expect("two orbitals");
    s.set_t(0, 0, -1.5 + r.gen::<f64>());
    s.set_t(1, 1, -0.8 + r.gen::<f64>());
    s.set_t(0, 1, 0.2 * (r.gen::<f64>() - 0.5));
    s.set_eri(0, 0, 0, 0, 0.5 + 0.3 * r.gen::<f64>());
    s.set_eri(1, 1, 1, 1, 0.4 + 0.3 * r.gen::<f64>());
    s.set_eri(0, 0, 1, 1, 0.3 + 0.2 * r.gen::<f64>());
    s.set_eri(0, 1, 0, 1, 0.02 + 0.1 * r.gen::<f64>());
    s.set_eri(0, 0, 0, 1, 0.1 * (r.gen::<f64>() - 0.5));
    s.set_eri(0, 1, 1, 1, 0.1 * (r.gen::<f64>() - 0.5));
    s.core_energy = r.gen::<f64>();
    s
}

/// System parameters with zero hopping.
pub fn random_system_params(r: &mut impl Rng) -> SystemParams {
    let eps1 = -2.0 + 2.0 * r.gen::<f64>();
    let eps2 = eps1 + 1.5 * r.gen::<f64>() - 0.25;
    SystemParams::new(
        eps1,
        eps2,
        0.6 * r.gen::<f64>(),
        0.6 * r.gen::<f64>(),
        0.5 * r.gen::<f64>(),
        0.2 * r.gen::<f64>(),
        0.0,
        0.0,
    )
}

/// A bare bath: frequencies, quadratic couplings with a positive definite
/// `M`, and linear couplings to the system.
#[derive(Debug, Clone)]
pub struct RandomBath {
    pub omega: DVector<f64>,
    pub v: DMatrix<f64>,
    pub lambda: Vec<[f64; 3]>,
}

/// `strength` scales the quadratic couplings; up to about 1 keeps `M`
/// positive definite.
pub fn random_bath(n: usize, strength: f64, r: &mut impl Rng) -> RandomBath {
    let omega = DVector::from_fn(n, |_, _| 0.4 + 1.1 * r.gen::<f64>());
    let scale = strength * 0.015 / (n.max(1) as f64).sqrt();
    let mut v = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..i {
            let x = scale * (2.0 * r.gen::<f64>() - 1.0);
            v[(i, j)] = x;
            v[(j, i)] = x;
        }
    }
    let lambda = (0..n)
        .map(|_| [0.1 * (r.gen::<f64>() - 0.5), 0.1 * (r.gen::<f64>() - 0.5), 0.1 * (r.gen::<f64>() - 0.5)])
        .collect();
    RandomBath { omega, v, lambda }
}
