//! Runs the `sysbath` binary on synthetic dumps and checks what it writes.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use serde_json::Value;
use tempfile::TempDir;

use sysbath::fcidump::emit_fcidump;
use sysbath::pauli::PauliTermSum;
use sysbath::pipeline::{Pipeline, PipelineOptions};
use sysbath::model::OrbitalPartition;
use sysbath::report::{read_sweep_csv, SweepReport};
use sysbath::synthetic::{synthetic_integrals, SyntheticSpec};

struct Fixture {
    dir: TempDir,
}

impl Fixture {
    fn new() -> Self {
        Self { dir: tempfile::tempdir().unwrap() }
    }

    fn dump(&self, name: &str, norb: usize, nelec: usize) -> PathBuf {
        let set = synthetic_integrals(&SyntheticSpec::new(norb, nelec, 5));
        self.write(name, &emit_fcidump(&set))
    }

    fn write(&self, name: &str, text: &str) -> PathBuf {
        let p = self.dir.path().join(name);
        std::fs::write(&p, text).unwrap();
        p
    }
}

fn sysbath(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sysbath")).args(args).output().unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn inspect_two_orbitals_has_no_environment() {
    let fx = Fixture::new();
    let f = fx.dump("h2.fcidump", 2, 2);
    let out = sysbath(&["inspect", path(&f), "--format", "text"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("environment absent; N_RPA = 0"), "{text}");

    let v = json(&sysbath(&["inspect", path(&f)]));
    assert_eq!(v["n_rpa"], 0);
    assert_eq!(v["environment_present"], false);
}

#[test]
fn inspect_reports_mode_counts() {
    let fx = Fixture::new();
    let f = fx.dump("six.fcidump", 6, 6);
    let v = json(&sysbath(&["inspect", path(&f)]));
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["partition"]["homo"], 3);
    assert_eq!(v["partition"]["lumo"], 4);
    assert_eq!(v["n_rpa_sg"], 8);
    assert_eq!(v["n_rpa_tr"], 12);
}

#[test]
fn malformed_input_exits_with_two_and_names_the_line() {
    let fx = Fixture::new();
    let f = fx.write(
        "bad.fcidump",
        "&FCI NORB=2,NELEC=2,MS2=0,\n ORBSYM=1,1,\n ISYM=1,\n&END\n 0.5 1 1 1 1\n oops 1 1 0 0\n",
    );
    let out = sysbath(&["inspect", path(&f)]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 6"), "{err}");
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["exit_code"], 2);

    let out = sysbath(&["inspect", path(&fx.dir.path().join("missing.fcidump"))]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bad_partition_is_rejected() {
    let fx = Fixture::new();
    let f = fx.dump("six.fcidump", 6, 6);
    let out = sysbath(&["inspect", path(&f), "--explicit-partition", "1,2/5,6"]);
    assert_eq!(out.status.code(), Some(2));
    let out = sysbath(&["inspect", path(&f), "--homo", "9"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn static_json_and_units() {
    let fx = Fixture::new();
    let f = fx.dump("six.fcidump", 6, 6);
    let ev = json(&sysbath(&["solve", "static", path(&f)]));
    assert_eq!(ev["schema_version"], 1);
    assert_eq!(ev["kind"], "static");
    assert_eq!(ev["n_rpa"], 8);
    let ha = json(&sysbath(&["solve", "static", path(&f), "--unit", "hartree"]));
    assert_eq!(ha["gaps"]["unit"], "Ha");
    let t_ev = ev["gaps"]["triplet"].as_f64().unwrap();
    let t_ha = ha["gaps"]["triplet"].as_f64().unwrap();
    assert!((t_ev - t_ha * sysbath::HARTREE_TO_EV).abs() < 1e-9);
    assert!((ev["gaps_eV"]["triplet"].as_f64().unwrap() - t_ev).abs() <= 5e-4);
}

#[test]
fn mixed_with_no_explicit_modes_equals_static() {
    let fx = Fixture::new();
    let f = fx.dump("six.fcidump", 6, 6);
    let st = json(&sysbath(&["solve", "static", path(&f), "--unit", "hartree"]));
    let mx = json(&sysbath(&["solve", "mixed", path(&f), "--nq", "0", "--unit", "hartree"]));
    assert_eq!(mx["nq"], 0);
    for key in ["triplet", "singlet"] {
        let a = st["gaps"][key].as_f64().unwrap();
        let b = mx["gaps"][key].as_f64().unwrap();
        assert!((a - b).abs() < 1e-9, "{key}: {a} vs {b}");
    }
    let mx = json(&sysbath(&["solve", "mixed", path(&f), "--nq", "4", "--max-exc", "6"]));
    assert_eq!(mx["explicit_modes"].as_array().unwrap().len(), 4);
    assert_eq!(mx["convergence"]["converged"], true);
}

#[test]
fn gaps_as_csv_and_text() {
    let fx = Fixture::new();
    let f = fx.dump("six.fcidump", 6, 6);
    let out = sysbath(&["solve", "static", path(&f), "--format", "csv"]);
    assert!(out.status.success());
    let mut rdr = csv::Reader::from_reader(&out.stdout[..]);
    assert_eq!(rdr.headers().unwrap().iter().collect::<Vec<_>>(), ["model", "triplet_gap", "singlet_gap", "unit"]);
    let rows: Vec<(String, f64, f64, String)> = rdr.deserialize().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 1);
    assert_eq!((rows[0].0.as_str(), rows[0].3.as_str()), ("sg", "eV"));
    let out = sysbath(&["solve", "mixed", path(&f), "--nq", "2", "--format", "text"]);
    assert!(out.status.success());
    assert!(!out.stdout.is_empty());
}

#[test]
fn spectrum_csv_covers_requested_points() {
    let fx = Fixture::new();
    let f = fx.dump("six.fcidump", 6, 6);
    let out_file = fx.dir.path().join("s.csv");
    let out = sysbath(&["spectrum", path(&f), "--format", "csv", "--points", "101", "-o", path(&out_file)]);
    assert!(out.status.success());
    let mut rdr = csv::Reader::from_path(&out_file).unwrap();
    assert_eq!(rdr.headers().unwrap().iter().collect::<Vec<_>>(), ["energy_eV", "S_eV"]);
    let rows: Vec<(f64, f64)> = rdr.deserialize().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 101);
    assert!(rows[0].0 >= 0.0);
    assert!(rows.windows(2).all(|w| w[1].0 > w[0].0));
    assert!(rows.iter().all(|r| r.1 >= 0.0));
}

#[test]
fn exported_pauli_sum_reloads() {
    let fx = Fixture::new();
    let f = fx.dump("six.fcidump", 6, 6);
    let out = sysbath(&["export-pauli", path(&f), "--nq", "0"]);
    assert!(out.status.success());
    let h = PauliTermSum::from_json(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
    assert_eq!(h.n_qubits, 2);
    assert!(h.terms.len() <= 16);
    let m = h.to_dense().unwrap();
    assert!((&m - m.transpose()).amax() < 1e-12);

    let out = sysbath(&["export-pauli", path(&f), "--nq", "3"]);
    let h3 = PauliTermSum::from_json(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
    assert_eq!(h3.n_qubits, 5);

    let set = synthetic_integrals(&SyntheticSpec::new(6, 6, 5));
    let part = OrbitalPartition::default_for(&set).unwrap();
    let run = Pipeline::build(&set, &part, &PipelineOptions::default()).unwrap();
    assert_eq!(h3, run.pauli(3).unwrap());
}

#[test]
fn sweep_in_both_formats() {
    let fx = Fixture::new();
    let f = fx.dump("six.fcidump", 6, 6);
    let v = sysbath(&["sweep", path(&f), "--nq-list", "0,2,4", "--max-exc", "3"]);
    assert!(v.status.success());
    let rep = SweepReport::from_json(std::str::from_utf8(&v.stdout).unwrap()).unwrap();
    assert_eq!(rep.rows.iter().map(|r| r.nq).collect::<Vec<_>>(), [0, 2, 4]);

    let c = sysbath(&["sweep", path(&f), "--nq-list", "0,2,4", "--max-exc", "3", "--format", "csv"]);
    let rows = read_sweep_csv(&c.stdout[..]).unwrap();
    assert_eq!(rows.len(), 3);
    for (a, b) in rows.iter().zip(&rep.rows) {
        assert_eq!((a.nq, a.k), (b.nq, b.k));
        assert_eq!(a.triplet_gap_ev, b.triplet_gap_ev);
    }
}

#[test]
fn verify_passes_on_small_system() {
    let fx = Fixture::new();
    let f = fx.dump("four.fcidump", 4, 4);
    let v = json(&sysbath(&["verify", path(&f), "--nq", "3"]));
    assert_eq!(v["all_passed"], true);
    assert!(v["checks"].as_array().unwrap().len() >= 4);
}

#[test]
fn reads_standard_input() {
    let set = synthetic_integrals(&SyntheticSpec::new(4, 4, 5));
    let mut child = Command::new(env!("CARGO_BIN_EXE_sysbath"))
        .args(["solve", "static", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(emit_fcidump(&set).as_bytes()).unwrap();
    let out = child.wait_with_output().unwrap();
    let v = json(&out);
    assert_eq!(v["n_rpa"], 3);
}
