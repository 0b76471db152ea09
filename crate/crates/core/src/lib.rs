//! Two-qubit system plus bath models of molecular electronic structure.
//!
//! A molecular Hamiltonian given as FCIDUMP integrals is split into a
//! HOMO/LUMO "system" encoded on two qubits and an environment of
//! electron-hole transitions treated as coupled oscillators. After the
//! oscillators are brought to normal modes, vertical excitation energies are
//! obtained either by eliminating every mode into screened Coulomb integrals
//! ([`screening`]) or by keeping the most strongly coupled modes as explicit
//! qubits and diagonalizing the resulting qubit Hamiltonian in a truncated
//! excitation subspace ([`mixed`]).
//!
//! Energies are in Hartree unless a name says otherwise; `ħ = 1`.
//!
//! ```
//! use sysbath::{fcidump, model, pipeline};
//!
//! let text = "&FCI NORB=2,NELEC=2,MS2=0 &END\n\
//!             0.6744 1 1 1 1\n0.6973 2 2 2 2\n0.6636 1 1 2 2\n0.1813 1 2 1 2\n\
//!             -1.2524 1 1 0 0\n-0.4759 2 2 0 0\n0.7137 0 0 0 0\n";
//! let set = fcidump::parse_fcidump(text).unwrap();
//! let part = model::OrbitalPartition::default_for(&set).unwrap();
//! let run = pipeline::Pipeline::build(&set, &part, &pipeline::PipelineOptions::default()).unwrap();
//! let st = run.static_solve().unwrap();
//! assert!(st.triplet_gap > 0.0);
//! ```

pub mod eigensolver;
pub mod error;
pub mod fcidump;
pub mod mixed;
pub mod model;
pub mod normal_modes;
pub mod oracle;
pub mod pauli;
pub mod pipeline;
pub mod report;
pub mod screening;
pub mod subspace;
pub mod synthetic;

pub use error::{Error, Result};

/// Hartree to electronvolt conversion factor.
pub const HARTREE_TO_EV: f64 = 27.211386245988;

/// Converts Hartree to eV.
#[inline]
pub fn to_ev(hartree: f64) -> f64 {
    hartree * HARTREE_TO_EV
}

/// Converts eV to Hartree.
#[inline]
pub fn to_hartree(ev: f64) -> f64 {
    ev / HARTREE_TO_EV
}
