use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use serde_json::json;
use twistcohom_cli::{emit, output_dir, run, CliError, Format, RunConfig, Verb};

/// Twisted cohomology and identity checks on model geometries.
#[derive(Parser, Debug)]
#[command(version, about)]
struct Args {
    verb: Verb,
    /// JSON run configuration.
    config: PathBuf,
    /// Override a config entry, e.g. `--set mapping_torus.twist=0.5`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

fn execute(args: &Args) -> Result<bool, CliError> {
    let config = RunConfig::load(&args.config, &args.overrides)?;
    let report = run(args.verb, &config)?;
    let dir = output_dir(&config.output.dir);
    let stem = config
        .output
        .stem
        .clone()
        .unwrap_or_else(|| format!("{}_{}", args.verb.name(), config.backend.name()));
    let json_path = emit(&report, Format::Json, &dir, &stem)?;
    let csv_path = if config.output.csv {
        Some(emit(&report, Format::Csv, &dir, &stem)?)
    } else {
        None
    };
    let failed: Vec<&str> = report
        .residuals
        .iter()
        .filter(|r| !r.passed)
        .map(|r| r.name.as_str())
        .chain(report.golden.iter().filter(|g| !g.passed).map(|g| g.name.as_str()))
        .collect();
    println!(
        "{}",
        json!({
            "status": if report.passed { "passed" } else { "failed" },
            "dims": report.dims,
            "failed_checks": failed,
            "json": json_path,
            "csv": csv_path,
        })
    );
    Ok(report.passed)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args = Args::parse();
    match execute(&args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            println!("{}", e.record());
            ExitCode::from(2)
        }
    }
}
