//! Gaps as a function of the number of explicit bath qubits, as CSV.

use sysbath::mixed::{default_max_excitations, MixedOptions};
use sysbath::model::OrbitalPartition;
use sysbath::pipeline::{Pipeline, PipelineOptions};
use sysbath::report::write_sweep_csv;
use sysbath::synthetic::{synthetic_integrals, SyntheticSpec};

fn main() -> sysbath::Result<()> {
    let set = synthetic_integrals(&SyntheticSpec::new(8, 8, 13));
    let part = OrbitalPartition::default_for(&set)?;
    let run = Pipeline::build(&set, &part, &PipelineOptions::default())?;
    let top = run.nm.dim();
    let list: Vec<usize> = [0, 1, 2, 4, 6, 8, 12, 16].into_iter().filter(|&n| n <= top).collect();
    let rows = run.sweep(&MixedOptions::default(), &list, default_max_excitations)?;
    write_sweep_csv(&rows, std::io::stdout().lock())
}
