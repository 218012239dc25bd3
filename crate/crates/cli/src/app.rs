//! Argument parsing and dispatch for the `afl` binary.

use std::ffi::OsString;
use std::path::PathBuf;

use afl_core::Regime;
use clap::{Parser, Subcommand, ValueEnum};

use crate::{cmd_run, cmd_solve, cmd_verify_ledger, CliError, ExperimentConfig};

#[derive(Parser)]
#[command(
    name = "afl",
    version,
    about = "Procurement-auction federated learning simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum RegimeArg {
    Complete,
    Incomplete,
}

impl From<RegimeArg> for Regime {
    fn from(r: RegimeArg) -> Self {
        match r {
            RegimeArg::Complete => Regime::Complete,
            RegimeArg::Incomplete => Regime::Incomplete,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment grid described by a TOML config.
    Run {
        config: PathBuf,
        /// Overrides `output_dir` from the config.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the hash chain of a ledger file.
    VerifyLedger { file: PathBuf },
    /// Print the optimal contract for one client.
    Solve {
        #[arg(long)]
        theta: f64,
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        #[arg(long, default_value_t = 2.0)]
        delta: f64,
        #[arg(long, value_enum)]
        regime: RegimeArg,
    },
}

/// What the process should print and the code it should exit with.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Invocation {
    pub code: u8,
    pub stdout: String,
    pub stderr: String,
}

fn dispatch(cli: Cli) -> Result<String, CliError> {
    Ok(match cli.command {
        Command::Run { config, out } => {
            let config = ExperimentConfig::load(&config)?;
            let outputs = cmd_run(&config, out.as_deref())?;
            outputs
                .files
                .iter()
                .map(|f| format!("wrote {}\n", f.display()))
                .collect()
        }
        Command::VerifyLedger { file } => format!("{}\n", cmd_verify_ledger(&file)?),
        Command::Solve {
            theta,
            lambda,
            delta,
            regime,
        } => format!("{}\n", cmd_solve(theta, lambda, delta, regime.into())?),
    })
}

/// Parses `args` (program name first) and runs the requested command.
pub fn execute<I, T>(args: I) -> Invocation
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            let code = e.exit_code() as u8;
            return if code == 0 {
                Invocation {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            } else {
                Invocation {
                    code: 2,
                    stdout: String::new(),
                    stderr: text,
                }
            };
        }
    };
    match dispatch(cli) {
        Ok(stdout) => Invocation {
            code: 0,
            stdout,
            stderr: String::new(),
        },
        Err(e) => Invocation {
            code: e.exit_code(),
            stdout: String::new(),
            stderr: format!("afl: {e}\n"),
        },
    }
}
