use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use sysbath::eigensolver::DavidsonOptions;
use sysbath::fcidump::{read_fcidump, IntegralSet};
use sysbath::mixed::{default_max_excitations, MixedOptions};
use sysbath::model::{EnvModel, OrbitalPartition};
use sysbath::pipeline::{verify, Pipeline, PipelineOptions};
use sysbath::report::{
    gaps_csv, write_spectrum_csv, write_sweep_csv, EnergyUnit, ErrorReport, Gaps, InspectReport, MixedReport,
    StaticReport, SweepReport, VerifyReport,
};
use sysbath::subspace::ExcitationCount;
use sysbath::{to_hartree, Error, Result};

#[derive(Parser)]
#[command(name = "sysbath", version, about = "Two-qubit system plus bath excitation energies from FCIDUMP integrals")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Summarize the partition, system parameters and bath.
    Inspect(Common),
    /// Compute excitation energies.
    #[command(subcommand)]
    Solve(Solve),
    /// Mixed solves over a list of explicit-qubit counts.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        solver: SolverArgs,
        /// Comma-separated ascending qubit counts; defaults to a doubling ladder.
        #[arg(long, value_delimiter = ',')]
        nq_list: Option<Vec<usize>>,
    },
    /// Broadened normal-mode spectral density as CSV.
    Spectrum {
        #[command(flatten)]
        common: Common,
        /// Lorentzian half-width in eV.
        #[arg(long, default_value_t = 0.02)]
        gamma: f64,
        #[arg(long, default_value_t = 2001)]
        points: usize,
    },
    /// Write the qubit Hamiltonian as a JSON Pauli sum.
    ExportPauli {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 62)]
        nq: usize,
    },
    /// Cross-check against brute-force references where the size allows.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 4)]
        nq: usize,
    },
}

#[derive(Subcommand)]
enum Solve {
    /// Eliminate every bath mode into screened integrals.
    Static(Common),
    /// Keep the strongest modes as explicit qubits.
    Mixed {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        solver: SolverArgs,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Auto,
    Sg,
    Tr,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum UnitArg {
    Ev,
    Hartree,
}

#[derive(Args)]
struct Common {
    /// FCIDUMP file, or `-` for standard input.
    input: PathBuf,
    /// 1-based HOMO index.
    #[arg(long)]
    homo: Option<usize>,
    /// 1-based LUMO index.
    #[arg(long)]
    lumo: Option<usize>,
    /// Environment orbitals as `OCC/EMPTY`, comma-separated 1-based lists,
    /// e.g. `1,2,4/6,7`. Requires --homo and --lumo.
    #[arg(long)]
    explicit_partition: Option<String>,
    #[arg(long, value_enum, default_value_t = ModelArg::Auto)]
    model: ModelArg,
    /// Remove bath modes with non-positive frequency instead of failing.
    #[arg(long)]
    drop_unstable_modes: bool,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long, value_enum, default_value_t = UnitArg::Ev)]
    unit: UnitArg,
    /// Write to this file instead of standard output.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SolverArgs {
    #[arg(long, default_value_t = 62)]
    nq: usize,
    /// Excitation limit; 4 up to 62 explicit qubits, 2 beyond.
    #[arg(long)]
    max_exc: Option<usize>,
    #[arg(long, default_value_t = 4)]
    n_eigs: usize,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, default_value_t = 5000)]
    max_matvecs: usize,
    /// Count excitations on bath qubits only.
    #[arg(long)]
    count_bath_only: bool,
}

impl SolverArgs {
    fn options(&self, nq: usize) -> Result<MixedOptions> {
        if !(self.tol > 0.0) {
            return Err(Error::InvalidArgument(format!("tolerance must be positive, got {}", self.tol)));
        }
        if self.n_eigs == 0 {
            return Err(Error::InvalidArgument("need at least one eigenpair".into()));
        }
        Ok(MixedOptions {
            nq,
            max_excitations: self.max_exc.unwrap_or_else(|| default_max_excitations(nq)),
            counting: if self.count_bath_only {
                ExcitationCount::BathOnly
            } else {
                ExcitationCount::AllQubits
            },
            davidson: DavidsonOptions {
                n_eigs: self.n_eigs,
                tol: self.tol,
                max_matvecs_per_eig: self.max_matvecs,
                ..DavidsonOptions::default()
            },
            ..MixedOptions::default()
        })
    }
}

fn one_based(i: usize, what: &str) -> Result<usize> {
    i.checked_sub(1)
        .ok_or_else(|| Error::Partition(format!("{what} index is 1-based, got 0")))
}

fn parse_list(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(|x| {
            x.parse::<usize>()
                .map_err(|_| Error::Partition(format!("bad orbital index `{x}`")))
                .and_then(|i| one_based(i, "orbital"))
        })
        .collect()
}

impl Common {
    fn unit(&self) -> EnergyUnit {
        match self.unit {
            UnitArg::Ev => EnergyUnit::Ev,
            UnitArg::Hartree => EnergyUnit::Hartree,
        }
    }

    fn load(&self) -> Result<(IntegralSet, Pipeline)> {
        let set = read_fcidump(&self.input)?;
        let part = match (&self.explicit_partition, self.homo, self.lumo) {
            (Some(spec), Some(h), Some(l)) => {
                let (occ, empty) = spec
                    .split_once('/')
                    .ok_or_else(|| Error::Partition(format!("expected OCC/EMPTY, got `{spec}`")))?;
                OrbitalPartition::explicit(
                    set.norb(),
                    one_based(h, "HOMO")?,
                    one_based(l, "LUMO")?,
                    parse_list(occ)?,
                    parse_list(empty)?,
                )?
            }
            (Some(_), _, _) => return Err(Error::Partition("--explicit-partition needs --homo and --lumo".into())),
            (None, None, None) => OrbitalPartition::default_for(&set)?,
            (None, h, l) => {
                let homo = match h {
                    Some(h) => one_based(h, "HOMO")?,
                    None => one_based(l.unwrap(), "LUMO")?.checked_sub(1).ok_or_else(|| {
                        Error::Partition("LUMO 1 leaves no room for a HOMO".into())
                    })?,
                };
                let lumo = match l {
                    Some(l) => one_based(l, "LUMO")?,
                    None => homo + 1,
                };
                OrbitalPartition::with_frontier(set.norb(), homo, lumo)?
            }
        };
        let opts = PipelineOptions {
            model: match self.model {
                ModelArg::Auto => None,
                ModelArg::Sg => Some(EnvModel::Singlet),
                ModelArg::Tr => Some(EnvModel::Triplet),
            },
            drop_unstable: self.drop_unstable_modes,
        };
        let run = Pipeline::build(&set, &part, &opts)?;
        Ok((set, run))
    }

    fn sink(&self) -> Result<Box<dyn Write>> {
        Ok(match &self.output {
            Some(p) => Box::new(File::create(p)?),
            None => Box::new(io::stdout().lock()),
        })
    }
}

fn write_json(mut w: impl Write, value: &impl serde::Serialize) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    Ok(())
}

fn emit_gaps(c: &Common, model: EnvModel, gaps: &Gaps, json: &impl serde::Serialize) -> Result<()> {
    let mut w = c.sink()?;
    match c.format {
        Format::Csv => gaps_csv(model, gaps, &mut w),
        Format::Text => {
            writeln!(w, "model {model}")?;
            writeln!(w, "triplet gap {:.3} {}", gaps.triplet, gaps.unit)?;
            writeln!(w, "singlet gap {:.3} {}", gaps.singlet, gaps.unit)?;
            Ok(())
        }
        Format::Json => write_json(w, json),
    }
}

fn run(cmd: &Command) -> Result<ExitCode> {
    match cmd {
        Command::Verify { common, nq } => verify_cmd(common, *nq),
        _ => dispatch(cmd).map(|()| ExitCode::SUCCESS),
    }
}

fn dispatch(cmd: &Command) -> Result<()> {
    match cmd {
        Command::Inspect(c) => {
            let (set, run) = c.load()?;
            let rep = InspectReport::new(&run, set.nelec, set.ms2);
            let mut w = c.sink()?;
            match c.format {
                Format::Text => Ok(w.write_all(rep.to_text().as_bytes())?),
                _ => write_json(w, &rep),
            }
        }
        Command::Solve(Solve::Static(c)) => {
            let (_, run) = c.load()?;
            let st = run.static_solve()?;
            let rep = StaticReport::new(&run, &st, c.unit());
            emit_gaps(c, run.model, &rep.gaps, &rep)
        }
        Command::Solve(Solve::Mixed { common: c, solver }) => {
            let (_, run) = c.load()?;
            let nq = solver.nq.min(run.nm.dim());
            if nq < solver.nq {
                log::info!("only {} bath modes; using {nq} explicit qubits", run.nm.dim());
            }
            let res = run.mixed(&solver.options(nq)?)?;
            let rep = MixedReport::new(&run, &res, c.unit());
            emit_gaps(c, run.model, &rep.gaps, &rep)
        }
        Command::Sweep {
            common: c,
            solver,
            nq_list,
        } => {
            let (_, run) = c.load()?;
            let dim = run.nm.dim();
            let list: Vec<usize> = match nq_list {
                Some(l) => l.clone(),
                None => {
                    let mut l: Vec<usize> = [0, 1, 2, 4, 8, 16, 32, 62, 126].into_iter().filter(|&n| n <= dim).collect();
                    if !l.contains(&dim.min(126)) {
                        l.push(dim.min(126));
                    }
                    l
                }
            };
            let base = solver.options(0)?;
            let fixed = solver.max_exc;
            let rows = run.sweep(&base, &list, |nq| fixed.unwrap_or_else(|| default_max_excitations(nq)))?;
            let w = c.sink()?;
            match c.format {
                Format::Json => write_json(w, &SweepReport::new(run.model, rows)),
                _ => write_sweep_csv(&rows, w),
            }
        }
        Command::Spectrum { common: c, gamma, points } => {
            let (_, run) = c.load()?;
            let sd = run.spectrum(to_hartree(*gamma), *points)?;
            let w = c.sink()?;
            match c.format {
                Format::Json => write_json(w, &sd),
                _ => write_spectrum_csv(&sd, w),
            }
        }
        Command::ExportPauli { common: c, nq } => {
            let (_, run) = c.load()?;
            let h = run.pauli((*nq).min(run.nm.dim()))?;
            let mut w = c.sink()?;
            writeln!(w, "{}", h.to_json()?)?;
            Ok(())
        }
        Command::Verify { .. } => unreachable!(),
    }
}

fn verify_cmd(c: &Common, nq: usize) -> Result<ExitCode> {
    let (set, run) = c.load()?;
    let rep = VerifyReport::new(verify(&set, &run, nq)?);
    write_json(c.sink()?, &rep)?;
    if !rep.all_passed {
        eprintln!("sysbath: at least one cross-check failed");
        return Ok(ExitCode::from(3));
    }
    Ok(ExitCode::SUCCESS)
}

fn init_threads() -> Result<()> {
    if let Ok(v) = std::env::var("SYSBATH_THREADS") {
        let n: usize = v
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("SYSBATH_THREADS must be a positive integer, got `{v}`")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match init_threads().and_then(|_| run(&cli.command)) {
        Ok(code) => code,
        // A closed downstream pipe (`| head`) is not worth reporting.
        Err(Error::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("sysbath: {e}");
            if let Ok(s) = serde_json::to_string(&ErrorReport::new(&e)) {
                let _ = writeln!(io::stdout(), "{s}");
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
