mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Debug)]
pub enum CliError {
    /// Bad input: exit code 2, nothing written.
    Config(String),
    /// The computation ran but a check failed: exit code 1.
    Failed(String),
}

#[derive(Parser)]
#[command(name = "hyperdelta", version, about = "δ-measures on hyperplane arrangements and the resultant identity")]
struct Cli {
    /// Worker threads (defaults to the number of cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the measure identity for each case of a config.
    Verify {
        #[arg(long)]
        config: PathBuf,
        /// Directory for `verify_report.json`; the report goes to stdout otherwise.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Relative tolerance for the quadrature routes.
        #[arg(long)]
        tolerance: Option<f64>,
    },
    /// Print the exact expansion of J for |A|, |B| ≤ 4.
    ExpandJ {
        /// `|A|,|B|`, e.g. `2,3`.
        #[arg(long, value_parser = commands::parse_sizes)]
        sizes: (usize, usize),
        /// Leading coefficient of P, integer, fraction or decimal.
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        a: String,
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        b: String,
    },
    /// Monte Carlo and localized density grids for the 3×3 Horn problem.
    Horn {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// Relative tolerance of the ψ-quadrature.
        #[arg(long)]
        tolerance: Option<f64>,
    },
    /// Integrate a test function against δ of a product of affine factors.
    Integrate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        tolerance: Option<f64>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.workers {
        if n == 0 {
            eprintln!("error: --workers must be positive");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let result = match cli.command {
        Command::Verify { config, out, seed, tolerance } => commands::verify(&config, out.as_deref(), seed, tolerance),
        Command::ExpandJ { sizes, a, b } => commands::expand_j(sizes, &a, &b),
        Command::Horn { config, out, seed, tolerance } => commands::horn(&config, &out, seed, tolerance),
        Command::Integrate { config, seed, tolerance } => commands::integrate(&config, seed, tolerance),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Failed(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
        Err(CliError::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
