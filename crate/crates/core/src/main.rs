use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use handsoff::cli::{self, Overrides};
use handsoff::{Penalty, WarmStart};

#[derive(Parser)]
#[command(name = "handsoff", version, about = "Maximum hands-off control via non-convex penalties")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the DC algorithm for one penalty.
    Solve(RunArgs),
    /// Run the l1 baseline and every configured penalty.
    Compare(RunArgs),
    /// Check a penalty against the equivalence assumption.
    Validate {
        /// Inline spec, e.g. "mcp lambda=1 alpha=0.5".
        spec: Option<String>,
        #[arg(long)]
        penalty: Option<String>,
    },
    /// Compare DCA output with exhaustive search or the analytic certificate.
    Oracle(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    penalty: Option<String>,
    #[arg(long, value_enum)]
    warm_start: Option<Warm>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Warm {
    Zero,
    L1,
}

fn overrides(args: &RunArgs) -> Result<Overrides, u8> {
    let penalty = match &args.penalty {
        Some(s) => Some(s.parse::<Penalty>().map_err(|e| {
            eprintln!("error: {e}");
            cli::exit_code(&e) as u8
        })?),
        None => None,
    };
    Ok(Overrides {
        output: args.output.clone(),
        penalty,
        warm_start: args.warm_start.map(|w| match w {
            Warm::Zero => WarmStart::Zero,
            Warm::L1 => WarmStart::L1,
        }),
        seed: args.seed,
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = io::stdout();
    let code = match &cli.command {
        Command::Validate { spec, penalty } => match spec.as_ref().or(penalty.as_ref()) {
            Some(s) => cli::cmd_validate(s, &mut out),
            None => {
                eprintln!("error: give a penalty spec");
                cli::EXIT_CONFIG
            }
        },
        Command::Solve(args) | Command::Compare(args) | Command::Oracle(args) => {
            let ov = match overrides(args) {
                Ok(ov) => ov,
                Err(code) => return ExitCode::from(code),
            };
            match &cli.command {
                Command::Solve(_) => cli::cmd_solve(&args.config, &ov, &mut out),
                Command::Compare(_) => cli::cmd_compare(&args.config, &ov, &mut out),
                _ => cli::cmd_oracle(&args.config, &ov, &mut out),
            }
        }
    };
    ExitCode::from(code as u8)
}
