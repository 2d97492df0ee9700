use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use colorweyl::statistics::PresetKind;
use colorweyl_cli::commands::{self, parse_field};
use colorweyl_cli::{CliError, Format, Overrides, Report, Session, VerifyOptions};

#[derive(Parser)]
#[command(name = "colorweyl", version, about = "Exact engine for graded quantum Weyl algebras")]
struct Cli {
    /// Session config (JSON): a factor descriptor or {"factor": …, "cap": …}
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    preset: Option<PresetKind>,
    /// Number of modes
    #[arg(long = "N", global = true)]
    n: Option<usize>,
    /// Occupation cap for modes with q = +1
    #[arg(long, global = true)]
    cap: Option<u32>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Bits of working precision for numeric pivot signs
    #[arg(long, global = true, env = "COLORWEYL_PRECISION")]
    precision: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the defining relations for the factor
    Relations,
    /// Normal-order an expression
    Normalize { expr: String },
    /// Apply an expression to a Fock basis state
    Act {
        expr: String,
        /// Occupation vector, e.g. 1,0,1 (default: vacuum)
        #[arg(long)]
        state: Option<String>,
    },
    /// List composite-particle states
    States {
        /// Magnetic field in units of Phi0
        #[arg(long = "B")]
        b: String,
        #[arg(long)]
        include_vacuum: bool,
    },
    /// Gram matrix at one degree and its positivity verdict
    Gram {
        #[arg(long)]
        degree: u32,
        /// Also write numeric entries as CSV
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Factorization c = c'·b and crossed-product checks
    Superize,
    /// Run every verification suite
    Verify {
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 500)]
        words: usize,
        #[arg(long, default_value_t = 3)]
        max_degree: u32,
    },
}

fn run(cli: Cli) -> Result<(Report, Format), CliError> {
    let overrides = Overrides {
        config: cli.config,
        preset: cli.preset,
        n: cli.n,
        cap: cli.cap,
        precision: cli.precision,
        format: cli.format,
        seed: cli.seed,
    };
    let s = Session::resolve(&overrides)?;
    let report = match &cli.command {
        Command::Relations => commands::relations(&s)?,
        Command::Normalize { expr } => commands::normalize(&s, expr)?,
        Command::Act { expr, state } => commands::act(&s, expr, state.as_deref())?,
        Command::States { b, include_vacuum } => commands::states(&s, &parse_field(b)?, *include_vacuum)?,
        Command::Gram { degree, csv } => commands::gram(&s, *degree, csv.as_deref())?,
        Command::Superize => commands::superize(&s)?,
        Command::Verify { samples, words, max_degree } => {
            commands::verify(&s, &VerifyOptions { samples: *samples, words: *words, max_degree: *max_degree })?
        }
    };
    Ok((report, s.config.format))
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok((report, format)) => {
            match format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&report.json).expect("serializable")),
                Format::Table => print!("{}", report.table),
            }
            if report.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
