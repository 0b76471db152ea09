//! Full configuration interaction by explicit fermion operator algebra.
//!
//! Spin orbital `p + σ·norb` (σ = 0 for up, 1 for down) is bit `p + σ·norb`
//! of an occupation mask. Creation and annihilation operators pick up the
//! Jordan-Wigner sign of the occupied modes below them.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::fcidump::IntegralSet;

/// Largest orbital count accepted.
pub const MAX_FCI_ORBITALS: usize = 8;

fn annihilate(det: u32, i: usize) -> Option<(u32, f64)> {
    let bit = 1u32 << i;
    if det & bit == 0 {
        return None;
    }
    let sign = if (det & (bit - 1)).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
    Some((det ^ bit, sign))
}

fn create(det: u32, i: usize) -> Option<(u32, f64)> {
    let bit = 1u32 << i;
    if det & bit != 0 {
        return None;
    }
    let sign = if (det & (bit - 1)).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
    Some((det | bit, sign))
}

/// Applies `ops` right to left; `(index, true)` creates, `(index, false)` annihilates.
fn apply(det: u32, ops: &[(usize, bool)]) -> Option<(u32, f64)> {
    let mut d = det;
    let mut sign = 1.0;
    for &(i, dagger) in ops.iter().rev() {
        let (nd, s) = if dagger { create(d, i)? } else { annihilate(d, i)? };
        d = nd;
        sign *= s;
    }
    Some((d, sign))
}

fn sector(norb: usize, n_up: usize, n_down: usize) -> Vec<u32> {
    let pick = |n: usize| -> Vec<u32> {
        (0u32..1 << norb).filter(|m| m.count_ones() as usize == n).collect()
    };
    let ups = pick(n_up);
    let downs = pick(n_down);
    let mut dets = Vec::with_capacity(ups.len() * downs.len());
    for &d in &downs {
        for &u in &ups {
            dets.push(u | (d << norb));
        }
    }
    dets
}

/// Number of determinants in the set's `nelec`/`ms2` sector, if it exists.
pub fn sector_dim(set: &IntegralSet) -> Option<usize> {
    let n = set.norb() as u64;
    let ne = set.nelec as i64;
    let (up, down) = (ne + set.ms2, ne - set.ms2);
    if up < 0 || down < 0 || up % 2 != 0 || up / 2 > n as i64 || down / 2 > n as i64 {
        return None;
    }
    let choose = |k: u64| (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1));
    Some((choose(up as u64 / 2) * choose(down as u64 / 2)) as usize)
}

/// Hamiltonian matrix over the determinants with the set's `nelec` and `ms2`.
pub fn fci_matrix(set: &IntegralSet) -> Result<(Vec<u32>, DMatrix<f64>)> {
    let n = set.norb();
    if n > MAX_FCI_ORBITALS {
        return Err(Error::SizeCap {
            what: "FCI orbital space",
            size: n,
            cap: MAX_FCI_ORBITALS,
        });
    }
    let ne = set.nelec as i64;
    let (twice_up, twice_down) = (ne + set.ms2, ne - set.ms2);
    if twice_up < 0 || twice_down < 0 || twice_up % 2 != 0 || twice_up / 2 > n as i64 || twice_down / 2 > n as i64 {
        return Err(Error::InvalidArgument(format!(
            "no determinants with NELEC={} MS2={} in {n} orbitals",
            set.nelec, set.ms2
        )));
    }
    let dets = sector(n, (twice_up / 2) as usize, (twice_down / 2) as usize);
    let mut lookup = std::collections::HashMap::with_capacity(dets.len());
    for (i, &d) in dets.iter().enumerate() {
        lookup.insert(d, i);
    }
    let dim = dets.len();
    let mut h = DMatrix::from_diagonal_element(dim, dim, set.core_energy);
    let so = |p: usize, s: usize| p + s * n;
    for (j, &det) in dets.iter().enumerate() {
        for p in 0..n {
            for q in 0..n {
                let t = set.t(p, q);
                if t == 0.0 {
                    continue;
                }
                for s in 0..2 {
                    if let Some((d, sign)) = apply(det, &[(so(p, s), true), (so(q, s), false)]) {
                        h[(lookup[&d], j)] += t * sign;
                    }
                }
            }
        }
        for p in 0..n {
            for q in 0..n {
                for r in 0..n {
                    for s in 0..n {
                        let v = set.eri(p, q, r, s);
                        if v == 0.0 {
                            continue;
                        }
                        for a in 0..2 {
                            for b in 0..2 {
                                let ops = [
                                    (so(p, a), true),
                                    (so(r, b), true),
                                    (so(s, b), false),
                                    (so(q, a), false),
                                ];
                                if let Some((d, sign)) = apply(det, &ops) {
                                    h[(lookup[&d], j)] += 0.5 * v * sign;
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Ok((dets, h))
}

/// Lowest `n_states` eigenvalues of the full many-body Hamiltonian, including
/// the core energy.
pub fn fci_lowest(set: &IntegralSet, n_states: usize) -> Result<Vec<f64>> {
    let (_, h) = fci_matrix(set)?;
    let mut e: Vec<f64> = SymmetricEigen::new(h).eigenvalues.iter().copied().collect();
    e.sort_by(f64::total_cmp);
    e.truncate(n_states);
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_orbital_pair() {
        let mut s = IntegralSet::zeros(1, 2, 0).unwrap();
        s.set_t(0, 0, -0.8);
        s.set_eri(0, 0, 0, 0, 0.6);
        s.core_energy = 0.25;
        let e = fci_lowest(&s, 1).unwrap();
        assert!((e[0] - (2.0 * -0.8 + 0.6 + 0.25)).abs() < 1e-14);
    }

    #[test]
    fn hermitian() {
        let mut s = IntegralSet::zeros(3, 2, 0).unwrap();
        s.set_t(0, 1, 0.1);
        s.set_t(1, 2, -0.2);
        s.set_eri(0, 1, 1, 2, 0.05);
        s.set_eri(0, 2, 0, 1, 0.03);
        let (_, h) = fci_matrix(&s).unwrap();
        assert!((&h - h.transpose()).amax() < 1e-15);
    }

    #[test]
    fn sector_size() {
        let s = IntegralSet::zeros(6, 4, 0).unwrap();
        assert_eq!(sector_dim(&s), Some(225));
        assert_eq!(fci_matrix(&s).unwrap().0.len(), 225);
        assert_eq!(sector_dim(&IntegralSet::zeros(2, 2, 4).unwrap()), None);
    }

    #[test]
    fn empty_sector() {
        let s = IntegralSet::zeros(2, 2, 4).unwrap();
        assert!(fci_lowest(&s, 1).is_err());
    }
}
