use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use homsim::config::parse_grids;
use homsim::sweep::{write_csv, write_jsonl};
use homsim::{commands, load, AppError, Overrides};
use homsim_core::Units;
use serde::Serialize;

#[derive(Parser)]
#[command(name = "homsim", version, about = "Two-photon interference through lossy dielectrics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form coincidence probability (and the quadrature oracle with --oracle)
    Simulate(Common),
    /// One-parameter scan written as CSV
    Sweep(Common),
    /// Arm-2 parameters that restore the dark fringe
    Tune(Common),
    /// Compare the two beta conventions against the oracle
    Adjudicate(Common),
}

#[derive(Clone, Copy, ValueEnum)]
enum UnitsArg {
    Si,
    Natural,
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    /// Also run the quadrature oracle
    #[arg(long)]
    oracle: bool,
    /// Output path (sweep CSV); default stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON-lines mirror of the sweep rows
    #[arg(long)]
    jsonl: Option<PathBuf>,
    #[arg(long, value_enum)]
    units: Option<UnitsArg>,
    /// "freq_points,time_points,time_halfwidth_sigmas"
    #[arg(long)]
    grids: Option<String>,
}

impl Common {
    fn overrides(&self) -> Result<Overrides, AppError> {
        let grids = match &self.grids {
            Some(g) => Some(parse_grids(g).map_err(|e| AppError::config(format!("--grids: {e}")))?),
            None => None,
        };
        let units = self.units.map(|u| match u {
            UnitsArg::Si => Units::Si,
            UnitsArg::Natural => Units::Natural,
        });
        Ok(Overrides { units, grids })
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, AppError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| AppError::io(path.display().to_string(), e))
}

fn print_json<T: Serialize>(value: &T) -> Result<(), AppError> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value).map_err(|e| AppError::io("stdout", e.into()))?;
    writeln!(out).map_err(|e| AppError::io("stdout", e))
}

fn run(cli: Cli) -> Result<(), AppError> {
    match cli.command {
        Command::Simulate(c) => {
            let setup = load(&c.config, &c.overrides()?)?;
            print_json(&commands::simulate(&setup, c.oracle)?)
        }
        Command::Sweep(c) => {
            let setup = load(&c.config, &c.overrides()?)?;
            let (rows, report) = commands::sweep(&setup, c.oracle)?;
            if let Some(path) = &c.jsonl {
                write_jsonl(create(path)?, &rows)?;
            }
            match &c.out {
                Some(path) => {
                    write_csv(create(path)?, &rows)?;
                    print_json(&report)
                }
                None => write_csv(io::stdout().lock(), &rows),
            }
        }
        Command::Tune(c) => {
            let setup = load(&c.config, &c.overrides()?)?;
            print_json(&commands::tune(&setup)?)
        }
        Command::Adjudicate(c) => {
            let setup = load(&c.config, &c.overrides()?)?;
            print_json(&commands::adjudicate(&setup)?)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help / --version
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let first = e.to_string().lines().next().unwrap_or("").trim_start_matches("error: ").to_string();
            eprintln!("error[config]: {first}");
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.diagnostic());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
