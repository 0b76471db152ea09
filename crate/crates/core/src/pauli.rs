//! Real Hermitian qubit operators as weighted Pauli strings.
//!
//! A string is stored as a pair of bit masks `(x, z)` with one bit per qubit;
//! `Y` sets both. Qubit `q` corresponds to bit `q` of a computational basis
//! state, and `Z|0⟩ = |0⟩`. Only strings with an even number of `Y` factors
//! are real, so only those are accepted.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest register supported by the bit-mask encoding.
pub const MAX_QUBITS: usize = 128;

/// Largest register [`PauliTermSum::to_dense`] will expand.
pub const MAX_DENSE_QUBITS: usize = 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    pub n_qubits: usize,
    pub x: u128,
    pub z: u128,
}

impl PauliString {
    pub fn identity(n_qubits: usize) -> Self {
        Self { n_qubits, x: 0, z: 0 }
    }

    /// Builds a string from `(qubit, letter)` factors; unlisted qubits are `I`.
    pub fn from_factors(n_qubits: usize, factors: &[(usize, char)]) -> Result<Self> {
        let mut s = Self::identity(n_qubits);
        for &(q, c) in factors {
            if q >= n_qubits {
                return Err(Error::InvalidArgument(format!("qubit {q} outside register of {n_qubits}")));
            }
            let bit = 1u128 << q;
            let (x, z) = letter_bits(c)?;
            // later factors multiply earlier ones up to a phase; callers never repeat qubits
            s.x ^= if x { bit } else { 0 };
            s.z ^= if z { bit } else { 0 };
        }
        Ok(s)
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    pub fn n_y(&self) -> u32 {
        (self.x & self.z).count_ones()
    }

    pub fn letter(&self, q: usize) -> char {
        let bit = 1u128 << q;
        match (self.x & bit != 0, self.z & bit != 0) {
            (false, false) => 'I',
            (true, false) => 'X',
            (true, true) => 'Y',
            (false, true) => 'Z',
        }
    }

    /// Sign `(-1)^{nY/2}` of the real matrix, valid for even `nY`.
    #[inline]
    pub fn y_sign(&self) -> f64 {
        if (self.n_y() / 2) % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// `⟨s ⊕ x| P |s⟩` for a real string.
    #[inline]
    pub fn phase(&self, s: u128) -> f64 {
        let odd = (s & self.z).count_ones() & 1 == 1;
        if odd {
            -self.y_sign()
        } else {
            self.y_sign()
        }
    }
}

fn letter_bits(c: char) -> Result<(bool, bool)> {
    match c {
        'I' | 'i' => Ok((false, false)),
        'X' | 'x' => Ok((true, false)),
        'Y' | 'y' => Ok((true, true)),
        'Z' | 'z' => Ok((false, true)),
        other => Err(Error::InvalidArgument(format!("unknown Pauli letter `{other}`"))),
    }
}

impl fmt::Display for PauliString {
    /// Qubit 0 is the leftmost letter.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in 0..self.n_qubits {
            write!(f, "{}", self.letter(q))?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let n = s.chars().count();
        if n > MAX_QUBITS {
            return Err(Error::SizeCap {
                what: "Pauli string",
                size: n,
                cap: MAX_QUBITS,
            });
        }
        let mut out = Self::identity(n);
        for (q, c) in s.chars().enumerate() {
            let (x, z) = letter_bits(c)?;
            if x {
                out.x |= 1 << q;
            }
            if z {
                out.z |= 1 << q;
            }
        }
        Ok(out)
    }
}

impl Serialize for PauliString {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for PauliString {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PauliTerm {
    pub coeff: f64,
    pub string: PauliString,
}

/// Sum of Pauli strings with real coefficients plus a scalar offset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PauliTermSum {
    pub n_qubits: usize,
    pub constant_offset: f64,
    pub terms: Vec<PauliTerm>,
}

/// Accumulates terms, merging equal strings.
#[derive(Debug, Clone)]
pub struct PauliBuilder {
    n_qubits: usize,
    constant: f64,
    terms: BTreeMap<(u128, u128), f64>,
}

impl PauliBuilder {
    pub fn new(n_qubits: usize) -> Result<Self> {
        if n_qubits > MAX_QUBITS {
            return Err(Error::SizeCap {
                what: "qubit register",
                size: n_qubits,
                cap: MAX_QUBITS,
            });
        }
        Ok(Self {
            n_qubits,
            constant: 0.0,
            terms: BTreeMap::new(),
        })
    }

    pub fn add_constant(&mut self, c: f64) {
        self.constant += c;
    }

    pub fn add(&mut self, coeff: f64, string: PauliString) {
        debug_assert_eq!(string.n_y() % 2, 0, "complex Pauli string {string}");
        if string.is_identity() {
            self.constant += coeff;
        } else {
            *self.terms.entry((string.z, string.x)).or_insert(0.0) += coeff;
        }
    }

    /// Adds `coeff · P` with `P` given as factors.
    pub fn add_factors(&mut self, coeff: f64, factors: &[(usize, char)]) {
        let s = PauliString::from_factors(self.n_qubits, factors).expect("qubit in range");
        self.add(coeff, s);
    }

    pub fn finish(self) -> PauliTermSum {
        let n = self.n_qubits;
        PauliTermSum {
            n_qubits: n,
            constant_offset: self.constant,
            terms: self
                .terms
                .into_iter()
                .filter(|&(_, c)| c != 0.0)
                .map(|((z, x), coeff)| PauliTerm {
                    coeff,
                    string: PauliString { n_qubits: n, x, z },
                })
                .collect(),
        }
    }
}

impl PauliTermSum {
    /// Checks register size, real strings, finite coefficients and uniqueness.
    pub fn validate(&self) -> Result<()> {
        if self.n_qubits > MAX_QUBITS {
            return Err(Error::SizeCap {
                what: "qubit register",
                size: self.n_qubits,
                cap: MAX_QUBITS,
            });
        }
        if !self.constant_offset.is_finite() {
            return Err(Error::InvalidArgument("non-finite constant offset".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for t in &self.terms {
            if t.string.n_qubits != self.n_qubits {
                return Err(Error::InvalidArgument(format!(
                    "string {} has {} qubits, register has {}",
                    t.string, t.string.n_qubits, self.n_qubits
                )));
            }
            if t.string.n_y() % 2 != 0 {
                return Err(Error::InvalidArgument(format!("string {} is not real", t.string)));
            }
            if !t.coeff.is_finite() {
                return Err(Error::InvalidArgument(format!("non-finite coefficient on {}", t.string)));
            }
            if !seen.insert((t.string.x, t.string.z)) {
                return Err(Error::InvalidArgument(format!("duplicate string {}", t.string)));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let s: Self = serde_json::from_str(text)?;
        s.validate()?;
        Ok(s)
    }

    /// Terms grouped by flip mask; group `x = 0` holds the diagonal.
    pub fn flip_groups(&self) -> Vec<FlipGroup> {
        let mut groups: BTreeMap<u128, Vec<(u128, f64)>> = BTreeMap::new();
        for t in &self.terms {
            groups
                .entry(t.string.x)
                .or_default()
                .push((t.string.z, t.coeff * t.string.y_sign()));
        }
        groups.into_iter().map(|(x, zs)| FlipGroup { x, zs }).collect()
    }

    /// Dense matrix including the constant offset.
    pub fn to_dense(&self) -> Result<DMatrix<f64>> {
        if self.n_qubits > MAX_DENSE_QUBITS {
            return Err(Error::SizeCap {
                what: "dense qubit register",
                size: self.n_qubits,
                cap: MAX_DENSE_QUBITS,
            });
        }
        let dim = 1usize << self.n_qubits;
        let mut m = DMatrix::from_diagonal_element(dim, dim, self.constant_offset);
        for t in &self.terms {
            for s in 0..dim {
                let out = (s as u128 ^ t.string.x) as usize;
                m[(out, s)] += t.coeff * t.string.phase(s as u128);
            }
        }
        Ok(m)
    }
}

/// Terms sharing one flip mask `x`: `⟨s ⊕ x| H |s⟩ = Σ c (−1)^{|s ∧ z|}`.
#[derive(Debug, Clone, PartialEq)]
pub struct FlipGroup {
    pub x: u128,
    /// `(z mask, coefficient with the Y sign folded in)`.
    pub zs: Vec<(u128, f64)>,
}

impl FlipGroup {
    #[inline]
    pub fn amplitude(&self, s: u128) -> f64 {
        self.zs
            .iter()
            .map(|&(z, c)| if (s & z).count_ones() & 1 == 1 { -c } else { c })
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn string_round_trip() {
        let s: PauliString = "XIYZY".parse().unwrap();
        assert_eq!(s.to_string(), "XIYZY");
        assert_eq!(s.letter(0), 'X');
        assert_eq!(s.n_y(), 2);
        assert!("XQ".parse::<PauliString>().is_err());
    }

    #[test]
    fn merge_and_identity_folding() {
        let mut b = PauliBuilder::new(2).unwrap();
        b.add(0.5, "ZI".parse().unwrap());
        b.add(0.25, "ZI".parse().unwrap());
        b.add(1.5, "II".parse().unwrap());
        b.add(0.1, "XX".parse().unwrap());
        b.add(-0.1, "XX".parse().unwrap());
        let h = b.finish();
        assert_eq!(h.terms.len(), 1);
        assert_eq!(h.terms[0].coeff, 0.75);
        assert_eq!(h.constant_offset, 1.5);
    }

    #[test]
    fn single_qubit_matrices() {
        let one = |s: &str| {
            let mut b = PauliBuilder::new(1).unwrap();
            b.add(1.0, s.parse().unwrap());
            b.finish().to_dense().unwrap()
        };
        assert_eq!(one("Z"), DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]));
        assert_eq!(one("X"), DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]));
    }

    #[test]
    fn yy_is_real() {
        let mut b = PauliBuilder::new(2).unwrap();
        b.add(1.0, "YY".parse().unwrap());
        let m = b.finish().to_dense().unwrap();
        // YY = −|00⟩⟨11| − |11⟩⟨00| + |01⟩⟨10| + |10⟩⟨01|
        assert_eq!(m[(0, 3)], -1.0);
        assert_eq!(m[(3, 0)], -1.0);
        assert_eq!(m[(1, 2)], 1.0);
        assert_eq!(m[(2, 1)], 1.0);
    }

    #[test]
    fn json_round_trip_and_validation() {
        let mut b = PauliBuilder::new(3).unwrap();
        b.add(0.3, "XZI".parse().unwrap());
        b.add(-0.2, "YYZ".parse().unwrap());
        b.add_constant(1.25);
        let h = b.finish();
        let back = PauliTermSum::from_json(&h.to_json().unwrap()).unwrap();
        assert_eq!(h, back);
        let bad = r#"{"n_qubits":1,"constant_offset":0.0,"terms":[{"coeff":1.0,"string":"Y"}]}"#;
        assert!(PauliTermSum::from_json(bad).is_err());
    }
}
