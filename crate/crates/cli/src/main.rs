//! `qlm`: error tables, cross-checks, simulations and POVM export.

mod output;
mod verify;

use std::io::{self, Write};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use qlm_core::e_and_d::{ed_error_continuous, excess_risk, Machine};
use qlm_core::machines::optimal::DEFAULT_BRUTE_FORCE_CAP;
use qlm_core::machines::{covariant_povm, lm_error_projection, optimal_error, tetrahedron_povm};
use qlm_core::simulate::{reuse_experiment, MachineKind, MachineReport, TrialConfig};
use serde::Serialize;

use output::{Format, Table};

const EXIT_VERIFY_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(
    name = "qlm",
    version,
    about = "Quantum learning machines for qubit classification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Error probabilities and scaled excess risks for n = 1..=n_max.
    ErrorTable {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n_max: u64,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Cross-check every route to the optimal error against each other.
    Verify {
        #[arg(long, default_value_t = 4)]
        cap: usize,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Monte Carlo run of a machine on Haar-random state pairs.
    Simulate {
        #[arg(long)]
        n: usize,
        #[arg(long, value_parser = parse_machine)]
        machine: MachineKind,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Data qubits classified per learning measurement.
        #[arg(long, default_value_t = 1)]
        batch: usize,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Export the learning POVM.
    Povm {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = PovmChoice::Quadrature)]
        kind: PovmChoice,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum PovmChoice {
    Quadrature,
    Tetrahedron,
}

fn parse_machine(s: &str) -> Result<MachineKind, String> {
    s.parse().map_err(|_| {
        let names: Vec<_> = MachineKind::ALL.iter().map(|m| m.name()).collect();
        format!("expected one of {}", names.join(", "))
    })
}

/// Failure of a subcommand, mapped to an exit code.
enum Failure {
    Usage(String),
    Verify(String),
    Io(io::Error),
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

impl From<qlm_core::Error> for Failure {
    fn from(e: qlm_core::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Io(io::Error::other(e))
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Io(io::Error::other(e))
    }
}

#[derive(Serialize)]
struct ErrorRow {
    n: usize,
    p_opt: f64,
    p_lm_projection: f64,
    p_ed_continuous: f64,
    n_r_lm: f64,
    n_r_ed: f64,
}

fn error_table(n_max: usize, format: Format, out: &mut dyn Write) -> Result<(), Failure> {
    let mut rows = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        rows.push(ErrorRow {
            n,
            p_opt: optimal_error(n),
            p_lm_projection: lm_error_projection(n)?,
            p_ed_continuous: ed_error_continuous(n)?,
            n_r_lm: n as f64 * excess_risk(Machine::Lm, n)?,
            n_r_ed: n as f64 * excess_risk(Machine::EdContinuous, n)?,
        });
    }
    if format == Format::Json {
        return output::write_json(out, &rows);
    }
    let mut table = Table::new([
        "n",
        "P_opt",
        "P_LM_projection",
        "P_ED_continuous",
        "nR_LM",
        "nR_ED",
    ]);
    for r in &rows {
        table.push(
            r.n,
            [
                r.p_opt,
                r.p_lm_projection,
                r.p_ed_continuous,
                r.n_r_lm,
                r.n_r_ed,
            ],
        );
    }
    table.write(out, format)
}

fn simulate(
    config: &TrialConfig,
    batch: usize,
    format: Format,
    out: &mut dyn Write,
) -> Result<(), Failure> {
    eprintln!(
        "qlm: {} trials of {} at n = {} (seed {}, batch {batch})",
        config.trials, config.machine, config.n, config.seed
    );
    let report = reuse_experiment(config, batch)?;
    write_report(&report, format, out)
}

fn write_report(
    report: &MachineReport,
    format: Format,
    out: &mut dyn Write,
) -> Result<(), Failure> {
    match format {
        Format::Json => output::write_json(out, report),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(MachineReport::CSV_HEADER)?;
            w.write_record(report.csv_record())?;
            w.flush()?;
            Ok(())
        }
        Format::Pretty => {
            let rows = MachineReport::CSV_HEADER.iter().zip(report.csv_record());
            for (key, value) in rows {
                writeln!(out, "{key:>10}  {value}")?;
            }
            writeln!(out, "{:>10}  {}", "batch", report.batch)?;
            if let Some(bits) = report.memory_bits {
                writeln!(out, "{:>10}  {bits:.4}", "memory")?;
            }
            Ok(())
        }
    }
}

fn povm(n: usize, kind: PovmChoice, format: Format, out: &mut dyn Write) -> Result<(), Failure> {
    let povm = match kind {
        PovmChoice::Quadrature => covariant_povm(n)?,
        PovmChoice::Tetrahedron if n == 1 => tetrahedron_povm()?,
        PovmChoice::Tetrahedron => {
            return Err(Failure::Usage(format!(
                "the tetrahedral POVM needs n = 1, got n = {n}"
            )))
        }
    };
    let export = povm.export()?;
    match format {
        Format::Json => output::write_json(out, &export),
        Format::Csv | Format::Pretty => {
            if format == Format::Pretty {
                writeln!(
                    out,
                    "n = {}, {} outcomes (bound {}), {:.4} bits, completeness defect {:.3e}",
                    export.n,
                    export.outcome_count,
                    export.outcome_bound,
                    export.memory_bits,
                    export.completeness_defect
                )?;
            }
            let mut table = Table::new(["mu", "weight", "alpha", "beta", "gamma"]);
            for (mu, o) in export.outcomes.iter().enumerate() {
                table.push(mu, [o.weight, o.alpha, o.beta, o.gamma]);
            }
            table.write(out, format)
        }
    }
}

fn run(cli: Cli, out: &mut dyn Write) -> Result<(), Failure> {
    match cli.command {
        Command::ErrorTable { n_max, format } => {
            error_table(n_max as usize, Format::resolve(format), out)
        }
        Command::Verify { cap, format } => {
            if cap == 0 || cap > DEFAULT_BRUTE_FORCE_CAP {
                return Err(Failure::Usage(format!(
                    "--cap must be between 1 and {DEFAULT_BRUTE_FORCE_CAP}, got {cap}"
                )));
            }
            let checks = verify::run_checks(cap)?;
            verify::write(&checks, Format::resolve(format), out)?;
            match checks.iter().find(|c| !c.passed()) {
                Some(c) => Err(Failure::Verify(c.name.to_string())),
                None => Ok(()),
            }
        }
        Command::Simulate {
            n,
            machine,
            trials,
            seed,
            batch,
            format,
        } => {
            let config = TrialConfig::new(n, machine, trials, seed)?;
            simulate(&config, batch, Format::resolve(format), out)
        }
        Command::Povm { n, kind, format } => povm(n, kind, Format::resolve(format), out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = io::BufWriter::new(stdout.lock());
    let result = run(cli, &mut out).and_then(|()| out.flush().map_err(Failure::from));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("qlm: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Verify(name)) => {
            let _ = out.flush();
            eprintln!("qlm: verification failed: {name}");
            ExitCode::from(EXIT_VERIFY_FAILED)
        }
        Err(Failure::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(Failure::Io(e)) => {
            eprintln!("qlm: {e}");
            ExitCode::FAILURE
        }
    }
}
