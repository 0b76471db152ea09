//! Compares the model against full configuration interaction on molecules
//! small enough to solve exactly.
//!
//! With no environment the two-orbital model is exact. With an environment
//! the static ground energy is an approximation; the printed difference shows
//! how good.

use sysbath::model::OrbitalPartition;
use sysbath::oracle::fci_lowest;
use sysbath::pipeline::{Pipeline, PipelineOptions};
use sysbath::synthetic::{random_two_orbital, synthetic_integrals, SyntheticSpec};

fn main() -> sysbath::Result<()> {
    let two = random_two_orbital(3);
    let mut sets = vec![("2 orbitals", two)];
    for norb in [4, 6] {
        sets.push((
            if norb == 4 { "4 orbitals" } else { "6 orbitals" },
            synthetic_integrals(&SyntheticSpec::new(norb, norb, 17)),
        ));
    }
    for (name, set) in sets {
        let part = OrbitalPartition::default_for(&set)?;
        let run = Pipeline::build(&set, &part, &PipelineOptions::default())?;
        let st = run.static_solve()?;
        let model = st.spectrum.energies[0] + run.env_const();
        let exact = fci_lowest(&set, 1)?[0];
        println!("{name}: model {model:.10}  FCI {exact:.10}  difference {:.2e} Ha", model - exact);
    }
    Ok(())
}
