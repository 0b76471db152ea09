//! Machine-readable result documents and their CSV/JSON encodings.
//!
//! Every JSON document carries `schema_version`. Field names end in the unit
//! of the numbers they hold (`_Ha`, `_eV`); the `gaps` object instead carries
//! an explicit `unit` tag and follows the unit the caller asked for.

use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::eigensolver::ConvergenceReport;
use crate::error::{Error, Result};
use crate::mixed::{MixedResult, SweepRow};
use crate::model::{n_rpa_singlet, n_rpa_triplet, EnvModel, SpinLabel, SystemParams};
use crate::normal_modes::SpectralDensity;
use crate::pipeline::{Check, Pipeline};
use crate::screening::{ScreenedParams, StaticResult};
use crate::{to_ev, HARTREE_TO_EV};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum EnergyUnit {
    #[default]
    #[serde(rename = "eV")]
    Ev,
    #[serde(rename = "Ha")]
    Hartree,
}

impl EnergyUnit {
    pub fn convert(self, hartree: f64) -> f64 {
        match self {
            EnergyUnit::Ev => hartree * HARTREE_TO_EV,
            EnergyUnit::Hartree => hartree,
        }
    }
}

impl fmt::Display for EnergyUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EnergyUnit::Ev => "eV",
            EnergyUnit::Hartree => "Ha",
        })
    }
}

impl FromStr for EnergyUnit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ev" => Ok(EnergyUnit::Ev),
            "ha" | "hartree" => Ok(EnergyUnit::Hartree),
            other => Err(Error::InvalidArgument(format!("unknown energy unit `{other}`"))),
        }
    }
}

/// Rounds an energy in eV to the reported precision of 1 meV.
pub fn round_mev(ev: f64) -> f64 {
    (ev * 1000.0).round() / 1000.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gaps {
    pub unit: EnergyUnit,
    pub triplet: f64,
    pub singlet: f64,
}

impl Gaps {
    pub fn new(unit: EnergyUnit, triplet_ha: f64, singlet_ha: f64) -> Self {
        Self {
            unit,
            triplet: unit.convert(triplet_ha),
            singlet: unit.convert(singlet_ha),
        }
    }

    /// eV rounded to 1 meV.
    pub fn ev_rounded(triplet_ha: f64, singlet_ha: f64) -> Self {
        Self {
            unit: EnergyUnit::Ev,
            triplet: round_mev(to_ev(triplet_ha)),
            singlet: round_mev(to_ev(singlet_ha)),
        }
    }
}

/// System parameters by name.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamTable {
    pub eps1: f64,
    pub eps2: f64,
    pub u1: f64,
    pub u2: f64,
    pub j12: f64,
    pub k12: f64,
    pub t1: f64,
    pub t2: f64,
    pub delta12: f64,
}

impl ParamTable {
    pub fn new(sp: &SystemParams, unit: EnergyUnit) -> Self {
        let c = |x| unit.convert(x);
        Self {
            eps1: c(sp.eps1),
            eps2: c(sp.eps2),
            u1: c(sp.u1),
            u2: c(sp.u2),
            j12: c(sp.j12),
            k12: c(sp.k12),
            t1: c(sp.t1_tilde),
            t2: c(sp.t2_tilde),
            delta12: c(sp.delta12),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionInfo {
    /// 1-based.
    pub homo: usize,
    /// 1-based.
    pub lumo: usize,
    pub n_db: usize,
    pub n_empt: usize,
}

#[allow(non_snake_case)]
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InspectReport {
    pub schema_version: u32,
    pub norb: usize,
    pub nelec: usize,
    pub ms2: i64,
    pub partition: PartitionInfo,
    pub n_rpa_sg: usize,
    pub n_rpa_tr: usize,
    pub model: EnvModel,
    pub n_rpa: usize,
    pub environment_present: bool,
    pub params_Ha: ParamTable,
    pub params_eV: ParamTable,
    pub ground_state: SpinLabel,
    pub e_singlet_lowest_Ha: f64,
    pub e_triplet_Ha: f64,
    pub lowest_modes_eV: Vec<f64>,
    pub markov_ratio: Option<f64>,
    pub excluded_modes: Vec<String>,
}

impl InspectReport {
    pub fn new(run: &Pipeline, nelec: usize, ms2: i64) -> Self {
        let (n_db, n_empt) = (run.part.n_db(), run.part.n_empt());
        let lowest: Vec<f64> = run.nm.big_omega.iter().take(5).map(|&w| to_ev(w)).collect();
        let markov_ratio = run
            .nm
            .big_omega
            .first()
            .filter(|_| run.bare.delta12 != 0.0)
            .map(|w| w / run.bare.delta12);
        Self {
            schema_version: SCHEMA_VERSION,
            norb: run.part.norb(),
            nelec,
            ms2,
            partition: PartitionInfo {
                homo: run.part.homo + 1,
                lumo: run.part.lumo + 1,
                n_db,
                n_empt,
            },
            n_rpa_sg: n_rpa_singlet(n_db, n_empt),
            n_rpa_tr: n_rpa_triplet(n_db, n_empt),
            model: run.model,
            n_rpa: run.n_rpa(),
            environment_present: n_db + n_empt > 0,
            params_Ha: ParamTable::new(&run.bare, EnergyUnit::Hartree),
            params_eV: ParamTable::new(&run.bare, EnergyUnit::Ev),
            ground_state: run.class.label,
            e_singlet_lowest_Ha: run.class.e_singlet_lowest,
            e_triplet_Ha: run.class.e_triplet,
            lowest_modes_eV: lowest,
            markov_ratio,
            excluded_modes: run.modes.dropped.iter().map(|m| m.to_string()).collect(),
        }
    }

    /// Human-readable summary.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let p = &self.params_eV;
        s += &format!("orbitals {}  electrons {}  MS2 {}\n", self.norb, self.nelec, self.ms2);
        s += &format!(
            "system HOMO {} LUMO {}; environment {} doubly occupied, {} empty\n",
            self.partition.homo, self.partition.lumo, self.partition.n_db, self.partition.n_empt
        );
        if self.environment_present {
            s += &format!(
                "bath modes: {} ({} model; sg {}, tr {})\n",
                self.n_rpa, self.model, self.n_rpa_sg, self.n_rpa_tr
            );
        } else {
            s += "environment absent; N_RPA = 0\n";
        }
        s += &format!(
            "eps1 {:.4} eps2 {:.4} U1 {:.4} U2 {:.4} J12 {:.4} K12 {:.4} t1 {:.4} t2 {:.4} Delta12 {:.4} eV\n",
            p.eps1, p.eps2, p.u1, p.u2, p.j12, p.k12, p.t1, p.t2, p.delta12
        );
        s += &format!("ground state: {}\n", self.ground_state);
        if !self.lowest_modes_eV.is_empty() {
            let w: Vec<String> = self.lowest_modes_eV.iter().map(|w| format!("{w:.3}")).collect();
            s += &format!("lowest normal modes (eV): {}\n", w.join(" "));
        }
        if let Some(r) = self.markov_ratio {
            s += &format!("min Omega / Delta12 = {r:.3}\n");
        }
        for m in &self.excluded_modes {
            s += &format!("excluded: {m}\n");
        }
        s
    }
}

#[allow(non_snake_case)]
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StaticReport {
    pub schema_version: u32,
    pub kind: String,
    pub model: EnvModel,
    pub gaps_eV: Gaps,
    pub gaps: Gaps,
    pub screened_params_Ha: ParamTable,
    pub bare_params_Ha: ParamTable,
    pub n_rpa: usize,
    pub excluded_modes: Vec<String>,
    pub system_energies_Ha: Vec<f64>,
    pub system_labels: Vec<SpinLabel>,
    pub lowest_modes_eV: Vec<f64>,
    pub markov_ratio: Option<f64>,
    pub environment_energy_Ha: f64,
}

impl StaticReport {
    pub fn new(run: &Pipeline, st: &StaticResult, unit: EnergyUnit) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            kind: "static".into(),
            model: run.model,
            gaps_eV: Gaps::ev_rounded(st.triplet_gap, st.singlet_gap),
            gaps: Gaps::new(unit, st.triplet_gap, st.singlet_gap),
            screened_params_Ha: ParamTable::new(&st.screened.params, EnergyUnit::Hartree),
            bare_params_Ha: ParamTable::new(&run.bare, EnergyUnit::Hartree),
            n_rpa: run.modes.len(),
            excluded_modes: run.modes.dropped.iter().map(|m| m.to_string()).collect(),
            system_energies_Ha: st.spectrum.energies.clone(),
            system_labels: st.spectrum.labels.clone(),
            lowest_modes_eV: st.lowest_modes.iter().map(|&w| to_ev(w)).collect(),
            markov_ratio: st.markov_ratio,
            environment_energy_Ha: run.env_const(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExplicitMode {
    pub mode: usize,
    #[serde(rename = "omega_eV")]
    pub omega_ev: f64,
    pub l: f64,
}

#[allow(non_snake_case)]
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixedReport {
    pub schema_version: u32,
    pub kind: String,
    pub model: EnvModel,
    pub nq: usize,
    pub max_excitations: usize,
    pub subspace_dim: usize,
    pub gaps_eV: Gaps,
    pub gaps: Gaps,
    pub eigenvalues_Ha: Vec<f64>,
    pub labels: Vec<SpinLabel>,
    pub triplet_weights: Vec<f64>,
    pub explicit_modes: Vec<ExplicitMode>,
    pub screened_params_Ha: ParamTable,
    pub n_rpa: usize,
    pub excluded_modes: Vec<String>,
    pub convergence: ConvergenceReport,
    pub warnings: Vec<String>,
}

impl MixedReport {
    pub fn new(run: &Pipeline, r: &MixedResult, unit: EnergyUnit) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            kind: "mixed".into(),
            model: r.model,
            nq: r.nq,
            max_excitations: r.max_excitations,
            subspace_dim: r.subspace_dim,
            gaps_eV: Gaps::ev_rounded(r.triplet_gap, r.singlet_gap),
            gaps: Gaps::new(unit, r.triplet_gap, r.singlet_gap),
            eigenvalues_Ha: r.eigenvalues.clone(),
            labels: r.labels.clone(),
            triplet_weights: r.triplet_weights.clone(),
            explicit_modes: r
                .explicit_modes
                .iter()
                .map(|&(mode, w, l)| ExplicitMode {
                    mode,
                    omega_ev: to_ev(w),
                    l,
                })
                .collect(),
            screened_params_Ha: ParamTable::new(&r.screened.params, EnergyUnit::Hartree),
            n_rpa: run.modes.len(),
            excluded_modes: run.modes.dropped.iter().map(|m| m.to_string()).collect(),
            convergence: r.report.clone(),
            warnings: r.warnings.clone(),
        }
    }
}

/// Body of a failed command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub schema_version: u32,
    pub error: String,
    pub exit_code: i32,
    /// Partial solver state for convergence failures.
    pub convergence: Option<ConvergenceReport>,
}

impl ErrorReport {
    pub fn new(e: &Error) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            error: e.to_string(),
            exit_code: e.exit_code(),
            convergence: match e {
                Error::NonConvergence { report } => Some(report.clone()),
                _ => None,
            },
        }
    }
}

/// Flat key/value CSV of the headline numbers of a solve.
pub fn gaps_csv(model: EnvModel, gaps: &Gaps, mut w: impl Write) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(&mut w);
    let unit = gaps.unit.to_string();
    wtr.write_record(["model", "triplet_gap", "singlet_gap", "unit"]).map_err(csv_err)?;
    wtr.write_record([
        model.tag().to_string(),
        format!("{:.10}", gaps.triplet),
        format!("{:.10}", gaps.singlet),
        unit,
    ])
    .map_err(csv_err)?;
    wtr.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub schema_version: u32,
    pub model: EnvModel,
    pub rows: Vec<SweepRow>,
}

impl SweepReport {
    pub fn new(model: EnvModel, rows: Vec<SweepRow>) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            model,
            rows,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let r: Self = serde_json::from_str(text)?;
        if r.schema_version != SCHEMA_VERSION {
            return Err(Error::InvalidArgument(format!(
                "unsupported schema version {}",
                r.schema_version
            )));
        }
        Ok(r)
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::InvalidArgument(format!("CSV: {e}"))
}

/// Columns `nq, k, triplet_gap_eV, singlet_gap_eV, iterations, matvecs, wall_s, error`.
pub fn write_sweep_csv(rows: &[SweepRow], w: impl Write) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    for r in rows {
        wtr.serialize(r).map_err(csv_err)?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_sweep_csv(r: impl Read) -> Result<Vec<SweepRow>> {
    csv::Reader::from_reader(r)
        .deserialize()
        .map(|row| row.map_err(csv_err))
        .collect()
}

/// Columns `energy_eV, S_eV`.
pub fn write_spectrum_csv(sd: &SpectralDensity, w: impl Write) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["energy_eV", "S_eV"]).map_err(csv_err)?;
    for (&e, &s) in sd.energy.iter().zip(&sd.value) {
        wtr.write_record([format!("{:.8}", to_ev(e)), format!("{:.10e}", to_ev(s))])
            .map_err(csv_err)?;
    }
    wtr.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub schema_version: u32,
    pub checks: Vec<Check>,
    pub all_passed: bool,
}

impl VerifyReport {
    pub fn new(checks: Vec<Check>) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            all_passed: checks.iter().all(|c| c.pass != Some(false)),
            checks,
        }
    }
}

/// Screened parameters in a named table, Hartree.
pub fn screened_table(s: &ScreenedParams) -> ParamTable {
    ParamTable::new(&s.params, EnergyUnit::Hartree)
}
