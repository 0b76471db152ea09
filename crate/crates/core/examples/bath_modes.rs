//! Lists the environment oscillators of a synthetic molecule for both
//! environment models.

use sysbath::model::{enumerate_bath_modes, n_rpa, EnvModel, OrbitalPartition};
use sysbath::synthetic::{synthetic_integrals, SyntheticSpec};
use sysbath::to_ev;

fn main() -> sysbath::Result<()> {
    let set = synthetic_integrals(&SyntheticSpec::new(6, 6, 5));
    let part = OrbitalPartition::default_for(&set)?;
    for model in [EnvModel::Singlet, EnvModel::Triplet] {
        let modes = enumerate_bath_modes(&set, &part, model, false)?;
        println!(
            "{model} model: {} modes (expected {})",
            modes.len(),
            n_rpa(model, part.n_db(), part.n_empt())
        );
        for m in &modes.modes {
            println!("  {m}  omega = {:.3} eV", to_ev(m.omega));
        }
        println!("  sum of correlation corrections {:.6} Ha", modes.sum_e_corr());
    }
    Ok(())
}
