//! Builds the bath coupling matrix, diagonalizes it and checks the normal-mode
//! transformation.

use sysbath::model::{enumerate_bath_modes, EnvModel, OrbitalPartition};
use sysbath::normal_modes::{build_coupling_matrix, coordinate_map_residuals, diagonalize, zero_point_shift};
use sysbath::synthetic::{synthetic_integrals, SyntheticSpec};
use sysbath::to_ev;

fn main() -> sysbath::Result<()> {
    let set = synthetic_integrals(&SyntheticSpec::new(10, 10, 2));
    let part = OrbitalPartition::default_for(&set)?;
    let modes = enumerate_bath_modes(&set, &part, EnvModel::Singlet, false)?;
    let cm = build_coupling_matrix(&set, &modes)?;
    let lambda: Vec<[f64; 3]> = modes.modes.iter().map(|m| m.lambda).collect();
    let nm = diagonalize(&cm, &lambda)?;

    println!("{:>3} {:>10} {:>10} {:>11} {:>11} {:>11}", "n", "Omega/eV", "omega/eV", "g11", "g12", "g22");
    for n in 0..nm.dim() {
        let g = nm.g[n];
        println!(
            "{n:>3} {:>10.4} {:>10.4} {:>11.2e} {:>11.2e} {:>11.2e}",
            to_ev(nm.big_omega[n]),
            to_ev(nm.omega[n]),
            g[0],
            g[1],
            g[2]
        );
    }
    let (x, p) = coordinate_map_residuals(&nm);
    println!("coordinate map deviation {x:.1e}, momentum map deviation {p:.1e}");
    println!("zero-point shift {:.6e} Ha", zero_point_shift(&nm));
    Ok(())
}
