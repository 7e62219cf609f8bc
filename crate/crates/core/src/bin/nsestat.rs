use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use nsestat::io::{cmd_report, cmd_run, cmd_verify, exit_code, VerifyOptions, EXIT_USAGE};

#[derive(Parser)]
#[command(name = "nsestat", version, about = "Build and verify Galerkin trajectory ensembles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample the initial measure, integrate every atom and write the measure files.
    Run { config: PathBuf },
    /// Run checks on a stored measure and write report.json.
    Verify {
        measure: PathBuf,
        /// Comma-separated check names; the measure's defaults when omitted.
        #[arg(long, value_delimiter = ',')]
        checks: Option<Vec<String>>,
        /// Absolute tolerance replacing the calibrated ones.
        #[arg(long)]
        tol: Option<f64>,
        /// Number of step halvings for calibration.
        #[arg(long)]
        refine: Option<u32>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Convert a report into plot data.
    Report {
        report: PathBuf,
        #[arg(long, default_value = "csv")]
        format: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE as u8 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Run { config } => cmd_run(&config).map(|out| {
            println!("wrote {} atoms and {}", out.atom_files.len(), out.measure.display());
            0
        }),
        Command::Verify {
            measure,
            checks,
            tol,
            refine,
            out,
        } => {
            let checks = checks.map(|c| c.into_iter().filter(|s| !s.is_empty()).collect());
            cmd_verify(&measure, &VerifyOptions { checks, tol, refine, out }).map(|v| {
                for row in v.report.failures() {
                    eprintln!("FAILED {} [{}] value={:e} tol={:e}", row.check, row.label, row.value, row.tol);
                }
                println!(
                    "{} rows, {} failed; report at {}",
                    v.report.rows.len(),
                    v.report.failures().count(),
                    v.path.display()
                );
                v.exit_code()
            })
        }
        Command::Report { report, format, out } => cmd_report(&report, &format, out.as_deref()).map(|p| {
            println!("wrote {}", p.display());
            0
        }),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
