//! Writes the broadened normal-mode spectral density as CSV on stdout.

use sysbath::model::OrbitalPartition;
use sysbath::pipeline::{Pipeline, PipelineOptions};
use sysbath::report::write_spectrum_csv;
use sysbath::synthetic::{synthetic_integrals, SyntheticSpec};
use sysbath::to_hartree;

fn main() -> sysbath::Result<()> {
    let set = synthetic_integrals(&SyntheticSpec::new(12, 12, 21));
    let part = OrbitalPartition::default_for(&set)?;
    let run = Pipeline::build(&set, &part, &PipelineOptions::default())?;
    let sd = run.spectrum(to_hartree(0.02), 801)?;
    write_spectrum_csv(&sd, std::io::stdout().lock())
}
