//! Command-line front end: single runs, m-sweeps, and the exact-arithmetic
//! estimate audit.
//!
//! Exit codes: 0 success, 2 config error, 3 solver/scheme failure,
//! 4 estimate-check assertion failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ksflow::estimates::{standard_checks, CheckStatus};
use ksflow::{load_config, run_single, sweep_m, RunError};

const EXIT_CONFIG: u8 = 2;
const EXIT_SOLVER: u8 = 3;
const EXIT_ESTIMATES: u8 = 4;

/// Environment override for the output directory (flag takes precedence).
const OUTPUT_DIR_ENV: &str = "KSFLOW_OUTPUT_DIR";

#[derive(Parser)]
#[command(name = "ksflow", version, about = "Chemotaxis-Stokes simulator with porous-medium diffusion and an exact exponent-algebra checker")]
struct Cli {
    /// Worker threads for the data-parallel kernels (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one configured scenario; writes series.csv and report.json.
    Run {
        /// TOML or JSON run configuration.
        #[arg(long)]
        config: PathBuf,
        /// Override the config's seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the output directory (or set KSFLOW_OUTPUT_DIR).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the configured scenario once per diffusion exponent m.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated m values, e.g. --m 1.4,1.5,2.0 (all must be > 1).
        #[arg(long)]
        m: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the exact-arithmetic audit of the exponent algebra.
    CheckEstimates,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    setup_threads(cli.threads);
    match cli.command {
        Command::Run { config, seed, out } => cmd_run(&config, seed, out),
        Command::Sweep { config, m, out } => cmd_sweep(&config, &m, out),
        Command::CheckEstimates => cmd_check_estimates(),
    }
}

#[cfg(feature = "parallel")]
fn setup_threads(threads: Option<usize>) {
    if let Some(n) = threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("note: could not configure {n} threads: {e}");
        }
    }
}

#[cfg(not(feature = "parallel"))]
fn setup_threads(threads: Option<usize>) {
    if threads.is_some() {
        eprintln!("note: sequential build; --threads has no effect");
    }
}

fn exit_for(err: &RunError) -> ExitCode {
    match err {
        RunError::Config(_) => ExitCode::from(EXIT_CONFIG),
        _ => ExitCode::from(EXIT_SOLVER),
    }
}

fn resolve_out(flag: Option<PathBuf>) -> Option<PathBuf> {
    flag.or_else(|| std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from))
}

fn cmd_run(config_path: &std::path::Path, seed: Option<u64>, out: Option<PathBuf>) -> ExitCode {
    let mut config = match load_config(config_path) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    if let Some(seed) = seed {
        config.seed = seed;
    }
    if let Some(dir) = resolve_out(out) {
        config.output_dir = dir;
    }
    match run_single(&config) {
        Ok(report) => {
            println!(
                "verdict: {:?} ({})",
                report.verdict.kind, report.verdict.evidence
            );
            println!(
                "steps: {}  min dt: {:e}  wall: {:.2}s  clipped cells: {}",
                report.step_count, report.min_dt, report.wall_time_s, report.total_clipped
            );
            println!("wrote {}", config.output_dir.join("series.csv").display());
            println!("wrote {}", config.output_dir.join("report.json").display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_for(&e)
        }
    }
}

fn cmd_sweep(config_path: &std::path::Path, m_arg: &str, out: Option<PathBuf>) -> ExitCode {
    let mut config = match load_config(config_path) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    if let Some(dir) = resolve_out(out) {
        config.output_dir = dir;
    }
    let mut m_values = Vec::new();
    for tok in m_arg.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        match tok.parse::<f64>() {
            Ok(v) => m_values.push(v),
            Err(_) => {
                eprintln!("error: bad m value {tok:?}");
                return ExitCode::from(EXIT_CONFIG);
            }
        }
    }
    let summary = match sweep_m(&config, &m_values) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    print!("{}", summary.table());
    if let Err(e) = std::fs::create_dir_all(&config.output_dir)
        .and_then(|_| std::fs::write(config.output_dir.join("sweep.csv"), summary.table()))
    {
        eprintln!("error writing sweep summary: {e}");
        return ExitCode::from(EXIT_SOLVER);
    }
    if summary.rows.iter().any(|r| r.error.is_some()) {
        return ExitCode::from(EXIT_SOLVER);
    }
    ExitCode::SUCCESS
}

fn cmd_check_estimates() -> ExitCode {
    let rows = standard_checks();
    let mut failed = false;
    println!("{:<6} {:<22} {:<44} RESULT", "STATUS", "CHECK", "INPUTS");
    for row in &rows {
        let status = match row.status {
            CheckStatus::Pass => "pass",
            CheckStatus::Warn => {
                "WARN"
            }
            CheckStatus::Fail => {
                failed = true;
                "FAIL"
            }
        };
        println!("{:<6} {:<22} {:<44} {}", status, row.name, row.inputs, row.result);
        if !row.note.is_empty() {
            println!("       note: {}", row.note);
        }
    }
    if failed {
        eprintln!("error: at least one exact check failed");
        ExitCode::from(EXIT_ESTIMATES)
    } else {
        ExitCode::SUCCESS
    }
}
