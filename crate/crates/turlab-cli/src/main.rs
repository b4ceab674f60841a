//! `turlab` command-line front end.
//!
//! Exit codes: 0 all checks pass, 1 a bound or symmetry check failed,
//! 2 malformed or inconsistent input, 3 I/O failure.

mod grid;

use clap::{Parser, Subcommand};
use grid::GridSpec;
use serde::Serialize;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use turlab::dist::FtValidation;
use turlab::engine::SWEEP_CSV_HEADER;
use turlab::fmt::fmt_f64;
use turlab::{
    build_minimal, classical_bound, evaluate_bounds, hasegawa_bound, numeric_min_search, sweep,
    tight_bound, BoundVerdict, FtDistribution,
};

const EXIT_PASS: u8 = 0;
const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_BAD_INPUT: u8 = 2;
const EXIT_IO: u8 = 3;

#[derive(Parser)]
#[command(
    name = "turlab",
    about = "Exchange-fluctuation-theorem uncertainty bounds, saturating distributions, and the two-qubit SWAP engine",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a distribution file and report every bound margin as JSON
    Check {
        /// Distribution JSON file
        input: PathBuf,
        /// Numerical tolerance for the symmetry and bound checks
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Sweep the SWAP engine over gap ratios and write the CSV report
    Sweep {
        /// Hot-to-cold inverse temperature ratio beta_A/beta_B
        #[arg(long, default_value_t = 0.5)]
        beta_ratio: f64,
        /// Gap-ratio grid, start:stop:count[:log]
        #[arg(long, default_value = "0.05:2.0:200")]
        grid: GridSpec,
        /// Dimensionless product beta_B * eps_A fixing the units
        #[arg(long, default_value_t = 2.0)]
        beta_b_eps_a: f64,
        /// Output CSV path (stdout when omitted)
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Emit the saturating two-point distribution for given moments
    Minimal {
        mean_sigma: f64,
        mean_z: f64,
        /// Output JSON path (stdout when omitted)
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Tabulate the tight bound against the two comparison bounds
    BoundTable {
        /// Evaluation grid, start:stop:count[:log]
        #[arg(long, default_value = "0.1:10.0:100")]
        grid: GridSpec,
        /// Output CSV path (stdout when omitted)
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Search for the minimum-variance distribution at fixed moments
    MinSearch {
        mean_sigma: f64,
        mean_z: f64,
        /// Symmetric support pairs to search over (at most 3)
        #[arg(long, default_value_t = 3)]
        pairs: usize,
        /// Seed for the multistart search
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output JSON path for the best distribution (stdout when omitted)
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

enum CliError {
    Input(String),
    Io(std::io::Error),
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

fn main() -> ExitCode {
    configure_threads();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(CliError::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_BAD_INPUT)
        }
        Err(CliError::Io(e)) => {
            eprintln!("io error: {e}");
            ExitCode::from(EXIT_IO)
        }
    }
}

/// TURLAB_THREADS caps the rayon pool used by the sweep.
fn configure_threads() {
    if let Ok(value) = std::env::var("TURLAB_THREADS") {
        if let Ok(n) = value.parse::<usize>() {
            if n >= 1 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
}

fn run(command: Command) -> Result<u8, CliError> {
    match command {
        Command::Check { input, tol } => cmd_check(&input, tol),
        Command::Sweep {
            beta_ratio,
            grid,
            beta_b_eps_a,
            output,
        } => cmd_sweep(beta_ratio, &grid, beta_b_eps_a, output.as_deref()),
        Command::Minimal {
            mean_sigma,
            mean_z,
            output,
        } => cmd_minimal(mean_sigma, mean_z, output.as_deref()),
        Command::BoundTable { grid, output } => cmd_bound_table(&grid, output.as_deref()),
        Command::MinSearch {
            mean_sigma,
            mean_z,
            pairs,
            seed,
            output,
        } => cmd_min_search(mean_sigma, mean_z, pairs, seed, output.as_deref()),
    }
}

fn write_output(path: Option<&Path>, content: &str) -> Result<(), CliError> {
    match path {
        Some(path) => {
            let file = std::fs::File::create(path)?;
            let mut w = std::io::BufWriter::new(file);
            w.write_all(content.as_bytes())?;
            w.flush()?;
        }
        None => {
            print!("{content}");
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct CheckReport {
    ft_validation: FtValidation,
    verdict: Option<BoundVerdict>,
    /// Set when the bound evaluation itself refused the input (for example
    /// a negative mean entropy production, impossible under the symmetry).
    verdict_error: Option<String>,
    pass: bool,
}

fn cmd_check(input: &Path, tol: f64) -> Result<u8, CliError> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(CliError::Input(format!("tolerance must be > 0, got {tol}")));
    }
    let text = std::fs::read_to_string(input)?;
    let dist = FtDistribution::from_json_str(&text).map_err(|e| CliError::Input(e.to_string()))?;

    let ft_validation = dist.validate_ft(tol);
    let moments = dist.moments();
    let (verdict, verdict_error) = match evaluate_bounds(&moments, tol) {
        Ok(v) => (Some(v), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let pass = ft_validation.passed()
        && verdict_error.is_none()
        && verdict.as_ref().is_some_and(|v| v.theorems_pass());
    let report = CheckReport {
        ft_validation,
        verdict,
        verdict_error,
        pass,
    };
    println!(
        "{}",
        serde_json::to_string_pretty(&report).expect("report serializes")
    );
    Ok(if pass { EXIT_PASS } else { EXIT_CHECK_FAILED })
}

fn cmd_sweep(
    beta_ratio: f64,
    grid: &GridSpec,
    beta_b_eps_a: f64,
    output: Option<&Path>,
) -> Result<u8, CliError> {
    let rows = sweep(beta_ratio, &grid.values(), beta_b_eps_a)
        .map_err(|e| CliError::Input(e.to_string()))?;
    let mut csv = String::with_capacity(rows.len() * 128);
    csv.push_str(SWEEP_CSV_HEADER);
    csv.push('\n');
    for row in &rows {
        csv.push_str(&row.to_csv_line());
        csv.push('\n');
    }
    write_output(output, &csv)?;
    Ok(EXIT_PASS)
}

fn cmd_minimal(mean_sigma: f64, mean_z: f64, output: Option<&Path>) -> Result<u8, CliError> {
    let md = build_minimal(mean_sigma, mean_z).map_err(|e| CliError::Input(e.to_string()))?;
    let mut json = md.to_distribution().to_json_string();
    json.push('\n');
    write_output(output, &json)?;
    Ok(EXIT_PASS)
}

fn cmd_bound_table(grid: &GridSpec, output: Option<&Path>) -> Result<u8, CliError> {
    let values = grid.values();
    if values.iter().any(|&x| x <= 0.0) {
        return Err(CliError::Input(
            "bound-table grid must be strictly positive".to_string(),
        ));
    }
    let mut csv = String::with_capacity(values.len() * 80);
    csv.push_str("x,tight_bound,classical_bound,hasegawa_bound\n");
    for &x in &values {
        let f = tight_bound(x).map_err(|e| CliError::Input(e.to_string()))?;
        let c = classical_bound(x).map_err(|e| CliError::Input(e.to_string()))?;
        let h = hasegawa_bound(x).map_err(|e| CliError::Input(e.to_string()))?;
        csv.push_str(&format!(
            "{},{},{},{}\n",
            fmt_f64(x),
            fmt_f64(f),
            fmt_f64(c),
            fmt_f64(h)
        ));
    }
    write_output(output, &csv)?;
    Ok(EXIT_PASS)
}

fn cmd_min_search(
    mean_sigma: f64,
    mean_z: f64,
    pairs: usize,
    seed: u64,
    output: Option<&Path>,
) -> Result<u8, CliError> {
    let result = numeric_min_search(mean_sigma, mean_z, pairs, seed)
        .map_err(|e| CliError::Input(e.to_string()))?;
    let mut json = result.distribution.to_json_string();
    json.push('\n');
    write_output(output, &json)?;
    println!(
        "best_var={} floor={} gap={}",
        fmt_f64(result.variance),
        fmt_f64(result.floor),
        fmt_f64(result.gap())
    );
    Ok(EXIT_PASS)
}
