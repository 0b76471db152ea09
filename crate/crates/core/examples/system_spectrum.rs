//! The six two-electron states of a HOMO/LUMO pair, from the closed forms and
//! from dense diagonalization.

use sysbath::model::{classify_ground_state, SystemParams};
use sysbath::screening::{analytic_eigensystem, diagonalize_system};
use sysbath::to_ev;

fn main() {
    // eps1, eps2, U1, U2, J12, K12, t1, t2 in Hartree
    let sp = SystemParams::new(-0.35, 0.05, 0.22, 0.20, 0.18, 0.03, 0.0, 0.0);
    let closed = analytic_eigensystem(&sp);
    let dense = diagonalize_system(&sp);

    println!("{:>4} {:>14} {:>14} {:>8}", "n", "closed (eV)", "dense (eV)", "spin");
    for i in 0..6 {
        println!(
            "{i:>4} {:>14.6} {:>14.6} {:>8}",
            to_ev(closed.energies[i]),
            to_ev(dense.energies[i]),
            dense.labels[i]
        );
    }
    let class = classify_ground_state(&sp);
    println!("ground state: {} (environment model {})", class.label, class.model());
}
