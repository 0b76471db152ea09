//! Static approximation: every bath mode is folded into screened system
//! integrals and the 6x6 system is solved.

use sysbath::model::OrbitalPartition;
use sysbath::pipeline::{Pipeline, PipelineOptions};
use sysbath::synthetic::{synthetic_integrals, SyntheticSpec};
use sysbath::to_ev;

fn main() -> sysbath::Result<()> {
    let set = synthetic_integrals(&SyntheticSpec::new(12, 12, 4));
    let part = OrbitalPartition::default_for(&set)?;
    let run = Pipeline::build(&set, &part, &PipelineOptions::default())?;
    let st = run.static_solve()?;

    let (b, s) = (&run.bare, &st.screened.params);
    println!("{:>8} {:>12} {:>12}", "", "bare/eV", "screened/eV");
    for (name, x, y) in [
        ("U1", b.u1, s.u1),
        ("U2", b.u2, s.u2),
        ("J12", b.j12, s.j12),
        ("K12", b.k12, s.k12),
        ("t1", b.t1_tilde, s.t1_tilde),
        ("t2", b.t2_tilde, s.t2_tilde),
    ] {
        println!("{name:>8} {:>12.5} {:>12.5}", to_ev(x), to_ev(y));
    }
    println!("model {}, {} bath modes", run.model, run.modes.len());
    println!("triplet gap {:.3} eV", to_ev(st.triplet_gap));
    println!("singlet gap {:.3} eV", to_ev(st.singlet_gap));
    if let Some(r) = st.markov_ratio {
        println!("min Omega / Delta12 = {r:.2}");
    }
    Ok(())
}
