mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use crate::commands::CliError;

#[derive(Parser, Debug)]
#[command(name = "wdcalc", version, about = "Exact calculus for l-modular Weil-Deligne representations")]
pub struct Cli {
    /// Residue characteristic of the coefficient field.
    #[arg(long, global = true)]
    pub ell: Option<u64>,
    /// Cardinality of the residue field of the local field.
    #[arg(long, global = true)]
    pub q: Option<u64>,
    /// Minimal degree of the coefficient field over F_ell.
    #[arg(long, global = true, default_value_t = 1)]
    pub field_deg: u32,
    /// Line-oriented file of `IRR` declarations and `FUSE` rules.
    #[arg(long, global = true)]
    pub fusion_file: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print the normal form of a class.
    Normalize { class: String },
    /// Direct sum of two classes.
    Dsum { a: String, b: String },
    /// Contragredient of a class.
    Dual { class: String },
    /// Twist a class by `nu^k` or by an unramified character.
    Twist {
        class: String,
        #[arg(long, allow_hyphen_values = true, conflicts_with = "char")]
        nu: Option<i64>,
        /// Frobenius value of the unramified character.
        #[arg(long, allow_hyphen_values = true)]
        char: Option<String>,
    },
    /// Semisimplified tensor product of two classes.
    Tensor { a: String, b: String },
    /// Replace full twist orbits of segments by cycles.
    Cv { class: String },
    /// L, gamma and epsilon factors of a class.
    Factors { class: String },
    /// Matrix realization of a class.
    Realize { class: String },
    /// Class of a matrix dump read from a file, or `-` for stdin.
    Decompose { dump: PathBuf },
    /// Compare the formal tensor product with the matrix computation.
    Oracle { a: String, b: String },
    /// Parameters attached to a generic representation.
    Correspond { rep: String },
    /// Run a verification sweep.
    Verify {
        #[command(subcommand)]
        check: Check,
    },
}

#[derive(Subcommand, Debug)]
pub enum Check {
    /// Equality of representation-side and parameter-side factors.
    Preservation {
        /// `small` or `full`.
        #[arg(long, default_value = "small")]
        grid: String,
    },
    /// L of a tensor of segments against the product formula and matrices.
    Multiplicativity {
        #[arg(long, default_value_t = 5)]
        max_n: u32,
    },
    /// Formal tensor products against the matrix oracle.
    TensorOracle {
        #[arg(long, default_value_t = 3)]
        max_r: u32,
    },
    /// Realize then decompose every class on the trivial line.
    Roundtrip {
        #[arg(long, default_value_t = 8)]
        max_dim: u64,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let format = cli.format;
    match commands::run(&cli) {
        Ok(outcome) => {
            match format {
                Format::Text => print!("{}", outcome.report.text()),
                Format::Json => println!("{}", outcome.report.json()),
            }
            if outcome.mismatch {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            match format {
                Format::Text => eprintln!("error[{}]: {}", e.code(), e),
                Format::Json => eprintln!(
                    "{}",
                    serde_json::json!({ "error": e.code(), "message": e.to_string() })
                ),
            }
            ExitCode::from(match e {
                CliError::Domain(_) | CliError::Usage(_) | CliError::Io(_) => 1,
            })
        }
    }
}
