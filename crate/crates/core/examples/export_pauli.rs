//! Assembles the qubit Hamiltonian with four explicit bath qubits, prints it
//! as JSON and checks that the reloaded sum is symmetric.

use sysbath::model::OrbitalPartition;
use sysbath::pauli::PauliTermSum;
use sysbath::pipeline::{Pipeline, PipelineOptions};
use sysbath::synthetic::{synthetic_integrals, SyntheticSpec};

fn main() -> sysbath::Result<()> {
    let set = synthetic_integrals(&SyntheticSpec::new(6, 6, 8));
    let part = OrbitalPartition::default_for(&set)?;
    let run = Pipeline::build(&set, &part, &PipelineOptions::default())?;
    let h = run.pauli(4)?;
    let json = h.to_json()?;
    println!("{json}");

    let back = PauliTermSum::from_json(&json)?;
    assert_eq!(back, h);
    let m = back.to_dense()?;
    eprintln!(
        "{} terms on {} qubits, asymmetry {:.1e}",
        back.terms.len(),
        back.n_qubits,
        (&m - m.transpose()).amax()
    );
    Ok(())
}
