use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qmchain_cli::exit;
use qmchain_cli::lattice::{run_lattice, LatticeOptions};
use qmchain_cli::report::{render_json, render_text, run_report};
use qmchain_cli::scenario::{ReportFormat, ScenarioFile};
use qmchain_cli::verify::{run_verify, VerifyOptions};

#[derive(Debug, Parser)]
#[command(name = "qmchain", version)]
#[command(
    about = "simulate and verify chains of quantum measurements with the apparatus in the quantum description"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate a scenario file and report outcome statistics, prepared
    /// states, and collapse deviations
    Run {
        /// Path to a JSON scenario file
        file: PathBuf,
        /// Report format (overrides the file's report options)
        #[arg(long, value_enum)]
        format: Option<ReportFormat>,
    },
    /// Run the randomized invariant suite over all instrument classes
    Verify {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Trials per instrument class
        #[arg(long, default_value_t = 200)]
        trials: usize,
        /// Corrupt one Kraus set to demonstrate that violations are caught
        #[arg(long)]
        inject_fault: bool,
    },
    /// Run the proposition-lattice axiom and distributivity suites
    Lattice {
        /// Hilbert dimension of the outcome basis (2 to 64)
        #[arg(long, default_value_t = 8)]
        dim: u64,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run { file, format } => cmd_run(&file, format),
        Command::Verify {
            seed,
            trials,
            inject_fault,
        } => {
            if trials == 0 {
                eprintln!("validation error: --trials must be at least 1");
                return ExitCode::from(exit::VALIDATION);
            }
            let outcome = run_verify(&VerifyOptions {
                seed,
                trials,
                inject_fault,
            });
            print!("{}", outcome.report);
            if outcome.violations == 0 {
                ExitCode::from(exit::OK)
            } else {
                ExitCode::from(exit::VIOLATION)
            }
        }
        Command::Lattice { dim, seed } => match run_lattice(&LatticeOptions {
            dim: dim as usize,
            seed,
        }) {
            Ok(outcome) => {
                print!("{}", outcome.report);
                if outcome.violations == 0 {
                    ExitCode::from(exit::OK)
                } else {
                    ExitCode::from(exit::VIOLATION)
                }
            }
            Err(message) => {
                eprintln!("validation error: {message}");
                ExitCode::from(exit::VALIDATION)
            }
        },
    }
}

fn cmd_run(path: &PathBuf, format_flag: Option<ReportFormat>) -> ExitCode {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("parse error: cannot read {}: {e}", path.display());
            return ExitCode::from(exit::PARSE);
        }
    };
    let file: ScenarioFile = match serde_json::from_str(&text) {
        Ok(f) => f,
        Err(e) => {
            eprintln!(
                "parse error in {} at line {} column {}: {e}",
                path.display(),
                e.line(),
                e.column()
            );
            return ExitCode::from(exit::PARSE);
        }
    };
    let scenario = match file.build() {
        Ok(s) => s,
        Err(e) => {
            eprintln!("validation error in {}: {e}", path.display());
            return ExitCode::from(exit::VALIDATION);
        }
    };
    let report = match run_report(&scenario) {
        Ok(r) => r,
        Err(e) => {
            eprintln!(
                "invariant violation while evaluating {}: {e}",
                path.display()
            );
            return ExitCode::from(exit::VIOLATION);
        }
    };
    let format = format_flag
        .or(file.report.format)
        .unwrap_or(ReportFormat::Text);
    match format {
        ReportFormat::Text => print!("{}", render_text(&report)),
        ReportFormat::Json => print!("{}", render_json(&report)),
    }
    if report.pass {
        ExitCode::from(exit::OK)
    } else {
        ExitCode::from(exit::VIOLATION)
    }
}
