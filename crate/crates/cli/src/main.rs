use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use tricrystal_cli::{parse_config, run, CliError, RunOptions};

/// Stationary kinks on a three-edge Josephson junction: profiles, spectra and dynamics.
#[derive(Debug, Parser)]
#[command(name = "tricrystal", version)]
struct Args {
    /// Run configuration (`key = value` lines).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `out` in the file (default `out`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write SVG plots.
    #[arg(long)]
    plot: bool,
    /// Worker threads for sweeps.
    #[arg(long)]
    jobs: Option<usize>,
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn execute(args: &Args) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&args.config).map_err(|e| CliError::io(&args.config, e))?;
    let cfg = parse_config(&text)?;
    if args.jobs == Some(0) {
        return Err(CliError::Config("--jobs must be at least 1".into()));
    }
    let out = args.out.clone().or_else(|| cfg.out.clone()).unwrap_or_else(|| PathBuf::from("out"));
    let summary = run(&cfg, &out, &RunOptions { plot: args.plot, jobs: args.jobs })?;
    for m in &summary.messages {
        println!("{m}");
    }
    println!("wrote {} files to {}", summary.files.len(), out.display());
    Ok(())
}
