use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod config;
mod report;

use commands::CliError;

const EXIT_OK: u8 = 0;
const EXIT_FAIL: u8 = 1;
const EXIT_ERROR: u8 = 2;
const EXIT_USAGE: u8 = 64;

#[derive(Parser, Debug)]
#[command(name = "ncdomain", version, about = "Weighted-shift models, Berezin transforms and rigidity checks for noncommutative domains")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalArgs {
    /// Domain config file (n, m, depth, symbol, tolerances, seed).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Truncation depth N of the Fock model.
    #[arg(long = "depth", short = 'N', global = true)]
    pub depth: Option<usize>,
    /// Eigenvalue tolerance for positivity decisions.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Also write the JSON report to this file.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

#[derive(Args, Debug, Clone)]
pub struct DomainArgs {
    /// Series file of the defining symbol f.
    #[arg(long, short = 'f')]
    pub symbol: Option<PathBuf>,
    /// Positivity order m.
    #[arg(short = 'm')]
    pub m: Option<usize>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Weight table b_α^(m) up to depth N, checked against the series-power oracle.
    Weights {
        #[command(flatten)]
        domain: DomainArgs,
    },
    /// Truncated weighted-shift model: defect and contraction checks.
    Model {
        #[command(flatten)]
        domain: DomainArgs,
        /// Include the dense generator matrices in the results.
        #[arg(long)]
        matrices: bool,
    },
    /// Membership of a tuple in D_f^m.
    Member {
        #[command(flatten)]
        domain: DomainArgs,
        /// Tuple file (array of square matrices).
        #[arg(long, short = 'x')]
        tuple: PathBuf,
    },
    /// Radial norm estimates of a series on the model.
    Norm {
        #[command(flatten)]
        domain: DomainArgs,
        #[arg(long)]
        series: PathBuf,
        /// Increasing radii in [0, 1).
        #[arg(long, value_delimiter = ',', default_values_t = [0.0, 0.5, 0.9, 0.99])]
        radii: Vec<f64>,
    },
    /// Formal composition F ∘ (Φ_1, …, Φ_n).
    Compose {
        #[arg(long)]
        outer: PathBuf,
        /// One file per component of the inner map, in order.
        #[arg(long, required = true)]
        inner: Vec<PathBuf>,
        /// Tuple at which to compare with nested evaluation.
        #[arg(long)]
        at: Option<PathBuf>,
    },
    /// Berezin transform at a tuple T.
    Berezin {
        #[command(flatten)]
        domain: DomainArgs,
        #[arg(long, short = 't')]
        tuple: PathBuf,
        /// Left word of the hereditary monomial V_α V_β^*.
        #[arg(long)]
        alpha: Option<String>,
        /// Right word of the hereditary monomial V_α V_β^*.
        #[arg(long)]
        beta: Option<String>,
        /// Matrix file for g on the truncated Fock space.
        #[arg(long, conflicts_with_all = ["alpha", "beta"])]
        g: Option<PathBuf>,
        /// Also compute the resolvent form and the difference.
        #[arg(long)]
        both: bool,
    },
    /// Depth-N certificate for the linear map X ↦ [X]U between two domains.
    Biholo {
        #[command(flatten)]
        domain: DomainArgs,
        /// Series file of the target symbol g.
        #[arg(long)]
        target: PathBuf,
        /// Positivity order l of the target domain.
        #[arg(short = 'l')]
        l: usize,
        /// n×n matrix file for U.
        #[arg(long)]
        u: PathBuf,
    },
    /// Iterates a map tangent to the identity on the depth-p model.
    ProbeCartan {
        #[command(flatten)]
        domain: DomainArgs,
        /// One series file per component of F.
        #[arg(long = "map", required = true)]
        maps: Vec<PathBuf>,
        #[arg(short = 'p', default_value_t = 2)]
        p: usize,
        #[arg(long, default_value_t = 10_000)]
        max_iterations: usize,
    },
    /// Runs the acceptance suite.
    Selftest,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let start = Instant::now();
    match commands::run(&cli) {
        Ok(body) => {
            let report = report::Report { body, wall_time_seconds: start.elapsed().as_secs_f64() };
            if let Some(path) = &cli.global.out {
                if let Err(e) = std::fs::write(path, report.to_json()) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return ExitCode::from(EXIT_ERROR);
                }
            }
            match cli.global.format {
                Format::Text => print!("{}", report.to_text()),
                Format::Json => println!("{}", report.to_json()),
            }
            ExitCode::from(if report.all_pass() { EXIT_OK } else { EXIT_FAIL })
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(CliError::Compute(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
