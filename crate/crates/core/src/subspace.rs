//! Computational-basis subspaces of bounded excitation number.
//!
//! States are ranked with the combinatorial number system, so lookups need no
//! hash table: a state of Hamming weight `w` sits at
//! `offset[w] + Σ_i C(c_i, i)` with `c_1 < c_2 < …` its set bits.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::MAX_QUBITS;

/// Largest subspace dimension that will be built.
pub const MAX_DIM: usize = 1 << 27;

/// Which qubits count toward the excitation limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExcitationCount {
    /// Hamming weight over every qubit.
    AllQubits,
    /// Hamming weight over bath qubits only; the two system qubits are free.
    BathOnly,
}

/// Number of system qubits left unconstrained by [`ExcitationCount::BathOnly`].
pub const SYSTEM_QUBITS: usize = 2;

#[derive(Debug, Clone)]
pub struct TruncatedSubspace {
    n_qubits: usize,
    max_excitations: usize,
    counting: ExcitationCount,
    /// `binom[c][i] = C(c, i)` for `c ≤ n`, `i ≤ k + 1`.
    binom: Vec<Vec<u64>>,
    /// Rank offset of the first state of each weight within the counted register.
    offset: Vec<u64>,
    counted_dim: usize,
    basis: Vec<u128>,
}

fn sat_binomials(n: usize, k: usize) -> Vec<Vec<u64>> {
    let mut b = vec![vec![0u64; k + 2]; n + 1];
    for c in 0..=n {
        b[c][0] = 1;
        for i in 1..=(k + 1).min(c) {
            b[c][i] = b[c - 1][i - 1].saturating_add(if i < c { b[c - 1][i] } else { 0 });
        }
    }
    b
}

impl TruncatedSubspace {
    pub fn new(n_qubits: usize, max_excitations: usize, counting: ExcitationCount) -> Result<Self> {
        if n_qubits > MAX_QUBITS {
            return Err(Error::SizeCap {
                what: "qubit register",
                size: n_qubits,
                cap: MAX_QUBITS,
            });
        }
        let (free, counted) = match counting {
            ExcitationCount::AllQubits => (0, n_qubits),
            ExcitationCount::BathOnly => {
                if n_qubits < SYSTEM_QUBITS {
                    return Err(Error::InvalidArgument(format!(
                        "bath-only counting needs at least {SYSTEM_QUBITS} qubits"
                    )));
                }
                (SYSTEM_QUBITS, n_qubits - SYSTEM_QUBITS)
            }
        };
        let k = max_excitations.min(counted);
        let binom = sat_binomials(counted, k);
        let mut offset = Vec::with_capacity(k + 2);
        let mut total: u64 = 0;
        for w in 0..=k {
            offset.push(total);
            total = total.saturating_add(binom[counted][w]);
        }
        offset.push(total);
        let full = (total as u128) << free;
        if full > MAX_DIM as u128 {
            return Err(Error::SizeCap {
                what: "truncated subspace",
                size: usize::try_from(full).unwrap_or(usize::MAX),
                cap: MAX_DIM,
            });
        }
        let counted_dim = total as usize;
        let mut counted_states = Vec::with_capacity(counted_dim);
        for w in 0..=k {
            if w == 0 {
                counted_states.push(0u128);
                continue;
            }
            // Gosper's hack walks same-weight masks in colexicographic order
            let mut x: u128 = if w == 128 { u128::MAX } else { (1u128 << w) - 1 };
            loop {
                counted_states.push(x);
                let c = x & x.wrapping_neg();
                let Some(r) = x.checked_add(c) else { break };
                let next = (((r ^ x) >> 2) / c) | r;
                if counted < 128 && next >> counted != 0 {
                    break;
                }
                x = next;
            }
        }
        let basis = match counting {
            ExcitationCount::AllQubits => counted_states,
            ExcitationCount::BathOnly => (0..1u128 << SYSTEM_QUBITS)
                .flat_map(|s| counted_states.iter().map(move |&b| s | (b << SYSTEM_QUBITS)))
                .collect(),
        };
        Ok(Self {
            n_qubits,
            max_excitations,
            counting,
            binom,
            offset,
            counted_dim,
            basis,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn max_excitations(&self) -> usize {
        self.max_excitations
    }

    pub fn counting(&self) -> ExcitationCount {
        self.counting
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[u128] {
        &self.basis
    }

    #[inline]
    pub fn state(&self, index: usize) -> u128 {
        self.basis[index]
    }

    #[inline]
    fn rank_counted(&self, mut s: u128) -> Option<usize> {
        let w = s.count_ones() as usize;
        if w + 1 >= self.offset.len() {
            return None;
        }
        let mut r = self.offset[w];
        let mut i = 1;
        while s != 0 {
            let c = s.trailing_zeros() as usize;
            r += self.binom[c][i];
            s &= s - 1;
            i += 1;
        }
        Some(r as usize)
    }

    /// Position of `s` in the basis, or `None` outside the subspace.
    #[inline]
    pub fn index_of(&self, s: u128) -> Option<usize> {
        if self.n_qubits < 128 && s >> self.n_qubits != 0 {
            return None;
        }
        match self.counting {
            ExcitationCount::AllQubits => self.rank_counted(s),
            ExcitationCount::BathOnly => {
                let sys = (s & ((1 << SYSTEM_QUBITS) - 1)) as usize;
                self.rank_counted(s >> SYSTEM_QUBITS)
                    .map(|r| sys * self.counted_dim + r)
            }
        }
    }
}

/// `Σ_{j ≤ k} C(n, j)` without overflow checks beyond `u128`.
pub fn truncated_dim(n: usize, k: usize) -> u128 {
    let mut total = 0u128;
    let mut c = 1u128;
    for j in 0..=k.min(n) {
        total += c;
        c = c * (n - j) as u128 / (j + 1) as u128;
    }
    total
}
