//! End-to-end file workflow: run a JSON experiment, verify the stored
//! measure and convert the report to CSV, all inside a temporary directory.
//! Pass a config path to use it instead of the bundled forced Gaussian one.

use std::fs;
use std::path::PathBuf;

use nsestat::io::{cmd_report, cmd_run, cmd_verify, VerifyOptions};

fn main() -> nsestat::Result<()> {
    let config = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/configs/forced_gaussian.json"));
    let work = tempfile::tempdir()?;
    let local = work.path().join("config.json");
    let mut value: serde_json::Value = serde_json::from_slice(&fs::read(&config)?)?;
    value["output"] = serde_json::json!({ "dir": "out" });
    fs::write(&local, serde_json::to_vec_pretty(&value)?)?;

    let run = cmd_run(&local)?;
    println!("run: {} atom files, measure at {}", run.atom_files.len(), run.measure.display());
    let verified = cmd_verify(&run.measure, &VerifyOptions::default())?;
    let failed = verified.report.failures().count();
    println!("verify: {} rows, {failed} failed, exit code {}", verified.report.rows.len(), verified.exit_code());
    let csv = cmd_report(&verified.path, "csv", None)?;
    let text = fs::read_to_string(&csv)?;
    println!("report: {} CSV lines; first rows:", text.lines().count());
    for line in text.lines().take(5) {
        println!("  {line}");
    }
    Ok(())
}
