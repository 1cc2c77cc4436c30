//! `kcontact`: derivations, constraint algorithm and finite-difference
//! checks for dissipative field theories.

mod commands;
mod config;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::{CliError, CliResult, Outcome};
use config::{Command, ConfigFile, Numeric, RunConfig};

#[derive(Parser, Debug)]
#[command(name = "kcontact", version, about = "Symbolic k-contact derivations and PDE checks")]
struct Cli {
    /// Config file of `[section]` headers and `key = value` lines.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Write the report (or the simulation CSV) here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Sub,
}

#[derive(Args, Debug)]
struct ModelArg {
    /// Built-in model: damped_string, damped_klein_gordon, dissipative_maxwell.
    #[arg(conflicts_with = "model_flag")]
    model: Option<String>,

    #[arg(long = "model", id = "model_flag", value_name = "MODEL")]
    model_flag: Option<String>,
}

impl ModelArg {
    fn name(self) -> Option<String> {
        self.model.or(self.model_flag)
    }
}

#[derive(Args, Debug)]
struct NumericArgs {
    /// Grid cells.
    #[arg(long = "N")]
    cells: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    dt: Option<f64>,
    /// Final time.
    #[arg(long = "T")]
    t_end: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    gamma: Option<f64>,
    #[arg(long)]
    c2: Option<f64>,
    #[arg(long)]
    m2: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    gamma0: Option<f64>,
    #[arg(long)]
    mu0: Option<f64>,
    /// Steps between stored snapshots.
    #[arg(long)]
    snapshot_every: Option<usize>,
}

impl From<NumericArgs> for Numeric {
    fn from(a: NumericArgs) -> Numeric {
        Numeric {
            cells: a.cells,
            dt: a.dt,
            t_end: a.t_end,
            gamma: a.gamma,
            c2: a.c2,
            m2: a.m2,
            gamma0: a.gamma0,
            mu0: a.mu0,
            snapshot_every: a.snapshot_every,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Sub {
    /// Print L, E_L, the Legendre map, the unified Hamiltonian, the contact
    /// forms and the Euler-Lagrange residuals.
    Derive(ModelArg),
    /// Hessian, regularity and, for regular models, Reeb fields.
    Classify(ModelArg),
    /// Run the constraint algorithm on the unified bundle.
    Constraints {
        #[command(flatten)]
        model: ModelArg,
        #[arg(long)]
        max_iterations: Option<usize>,
    },
    /// Simulate the 1+1 reduction and write CSV.
    Simulate {
        #[command(flatten)]
        model: ModelArg,
        #[command(flatten)]
        numeric: NumericArgs,
    },
    /// Run the verification suite and print one line per check.
    Verify {
        #[command(flatten)]
        model: ModelArg,
        #[command(flatten)]
        numeric: NumericArgs,
    },
}

fn resolve(cli: Cli) -> CliResult<RunConfig> {
    let (command, model) = match cli.command {
        Sub::Derive(m) => (Command::Derive, m.name()),
        Sub::Classify(m) => (Command::Classify, m.name()),
        Sub::Constraints { model, max_iterations } => (Command::Constraints { max_iterations }, model.name()),
        Sub::Simulate { model, numeric } => (Command::Simulate(numeric.into()), model.name()),
        Sub::Verify { model, numeric } => (Command::Verify(numeric.into()), model.name()),
    };
    let file = cli.config.as_deref().map(ConfigFile::load).transpose()?;
    Ok(RunConfig::resolve(command, model, cli.out, file.as_ref())?)
}

fn execute(rc: &RunConfig) -> CliResult<()> {
    let outcome: Outcome = match &rc.command {
        Command::Derive => commands::derive(&rc.model)?,
        Command::Classify => commands::classify(&rc.model)?,
        Command::Constraints { max_iterations } => commands::constraints(&rc.model, *max_iterations)?,
        Command::Simulate(n) => {
            let o = commands::simulate(&rc.model, n, rc.out.as_deref())?;
            std::io::stdout().write_all(o.text.as_bytes())?;
            return Ok(());
        }
        Command::Verify(n) => commands::verify(&rc.model, n)?,
    };
    match &rc.out {
        Some(path) => std::fs::write(path, &outcome.text)?,
        None => std::io::stdout().write_all(outcome.text.as_bytes())?,
    }
    if outcome.failed > 0 {
        return Err(CliError::Verification {
            failed: outcome.failed,
            total: outcome.total,
        });
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let result = resolve(cli).and_then(|rc| {
        log::debug!("{rc:?}");
        execute(&rc)
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
