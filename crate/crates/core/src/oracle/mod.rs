//! Brute-force reference solvers.
//!
//! These work directly from the second-quantized or matrix definitions and do
//! not call into the production pipeline. They are slow by design and only
//! accept small inputs.

pub mod fci;
pub mod fock;
pub mod qubit;

pub use fci::fci_lowest;
pub use fock::fock_oscillator_ground;
pub use qubit::{dense_qubit_diag, dense_qubit_matrix};
