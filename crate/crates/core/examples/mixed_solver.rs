//! Mixed approximation with the strongest-coupled modes as explicit qubits.
//!
//!     cargo run --release --example mixed_solver [-- NQ [K]]

use sysbath::mixed::{default_max_excitations, MixedOptions};
use sysbath::model::OrbitalPartition;
use sysbath::pipeline::{Pipeline, PipelineOptions};
use sysbath::synthetic::{synthetic_integrals, SyntheticSpec};
use sysbath::to_ev;

fn main() -> sysbath::Result<()> {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<usize>().expect("integer argument"));
    let set = synthetic_integrals(&SyntheticSpec::new(10, 10, 9));
    let part = OrbitalPartition::default_for(&set)?;
    let run = Pipeline::build(&set, &part, &PipelineOptions::default())?;

    let nq = args.next().unwrap_or(8).min(run.nm.dim());
    let k = args.next().unwrap_or_else(|| default_max_excitations(nq));
    let res = run.mixed(&MixedOptions {
        nq,
        max_excitations: k,
        ..MixedOptions::default()
    })?;
    let st = run.static_solve()?;

    println!("{} explicit qubits, at most {k} excitations, subspace {}", nq, res.subspace_dim);
    for (n, w, l) in &res.explicit_modes {
        println!("  mode {n:>3}  Omega {:.3} eV  L {l:.3e}", to_ev(*w));
    }
    for (e, (lab, w)) in res.eigenvalues.iter().zip(res.labels.iter().zip(&res.triplet_weights)) {
        println!("  E = {e:.10} Ha  {lab:<8} triplet weight {w:.3}");
    }
    println!("{}", res.report);
    println!("triplet gap {:.3} eV (static {:.3})", to_ev(res.triplet_gap), to_ev(st.triplet_gap));
    println!("singlet gap {:.3} eV (static {:.3})", to_ev(res.singlet_gap), to_ev(st.singlet_gap));
    Ok(())
}
