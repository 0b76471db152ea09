//! Dense qubit Hamiltonians from Kronecker products of single-qubit matrices.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::pauli::PauliTermSum;

/// Largest register expanded densely.
pub const MAX_ORACLE_QUBITS: usize = 14;

fn factor(letter: char) -> DMatrix<f64> {
    match letter {
        'I' => DMatrix::identity(2, 2),
        'X' => DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]),
        // Y = i·[[0, −1], [1, 0]]; the factors of i are restored per string
        'Y' => DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]),
        'Z' => DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]),
        _ => unreachable!(),
    }
}

/// Dense `2ⁿ × 2ⁿ` matrix. Qubit 0 is the least significant index bit, so
/// the full product is `M_{n−1} ⊗ … ⊗ M_0`.
pub fn dense_qubit_matrix(h: &PauliTermSum) -> Result<DMatrix<f64>> {
    let n = h.n_qubits;
    if n > MAX_ORACLE_QUBITS {
        return Err(Error::SizeCap {
            what: "dense qubit register",
            size: n,
            cap: MAX_ORACLE_QUBITS,
        });
    }
    let dim = 1usize << n;
    let mut m = DMatrix::from_diagonal_element(dim, dim, h.constant_offset);
    for t in &h.terms {
        let letters: Vec<char> = t.string.to_string().chars().collect();
        let n_y = letters.iter().filter(|&&c| c == 'Y').count();
        if n_y % 2 != 0 {
            return Err(Error::InvalidArgument(format!("string {} is not real", t.string)));
        }
        // i^{nY} for even nY
        let sign = if (n_y / 2) % 2 == 0 { 1.0 } else { -1.0 };
        let mut full = DMatrix::from_element(1, 1, 1.0);
        for &c in letters.iter().rev() {
            full = full.kronecker(&factor(c));
        }
        m += full * (sign * t.coeff);
    }
    Ok(m)
}

/// Full ascending spectrum.
pub fn dense_qubit_diag(h: &PauliTermSum) -> Result<Vec<f64>> {
    let m = dense_qubit_matrix(h)?;
    let mut e: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    e.sort_by(f64::total_cmp);
    Ok(e)
}
