//! Round-trips an FCIDUMP file through the parser and emitter.
//!
//! Without arguments a synthetic 8-orbital molecule is generated and written
//! to `synthetic.fcidump` in the current directory; with a path argument that
//! file is read instead.
//!
//!     cargo run --example parse_fcidump [-- path/to/FCIDUMP]

use sysbath::fcidump::{emit_fcidump, parse_fcidump, read_fcidump};
use sysbath::synthetic::{synthetic_integrals, SyntheticSpec};

fn main() -> sysbath::Result<()> {
    let set = match std::env::args().nth(1) {
        Some(path) => read_fcidump(path.as_ref())?,
        None => {
            let set = synthetic_integrals(&SyntheticSpec::new(8, 8, 1));
            std::fs::write("synthetic.fcidump", emit_fcidump(&set))?;
            println!("wrote synthetic.fcidump");
            set
        }
    };
    println!(
        "NORB={} NELEC={} MS2={} core={:.10}",
        set.norb(),
        set.nelec,
        set.ms2,
        set.core_energy
    );
    let distinct = set.two_body_entries().filter(|(_, v)| *v != 0.0).count();
    println!("{distinct} symmetry-distinct nonzero two-electron integrals");

    let again = parse_fcidump(&emit_fcidump(&set))?;
    let diff = set.max_abs_diff(&again).expect("same shape");
    println!("max |difference| after emit + parse: {diff:.1e}");
    Ok(())
}
