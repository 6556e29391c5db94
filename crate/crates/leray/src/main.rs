use clap::Parser;
use leray::cli::{exit_code, run, table_path, ExperimentConfig};
use std::path::PathBuf;
use std::process::ExitCode;

/// Run a configured experiment and write a JSON report.
#[derive(Parser, Debug)]
#[command(name = "leray", version, about)]
struct Args {
    /// Experiment configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Report path; per-node tables go next to it with a `.csv` extension.
    /// Without it the report is printed to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for random probes, overriding the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Replace the resolution ladder by a single resolution.
    #[arg(long)]
    resolution_override: Option<usize>,
    /// Suppress the per-check summary on stderr.
    #[arg(long)]
    quiet: bool,
}

fn fail(code: i32, msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(code as u8)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let text = match std::fs::read_to_string(&args.config) {
        Ok(t) => t,
        Err(e) => return fail(2, format!("cannot read {}: {e}", args.config.display())),
    };
    let mut config = match ExperimentConfig::from_json(&text) {
        Ok(c) => c,
        Err(e) => return fail(2, e),
    };
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(r) = args.resolution_override {
        config.resolutions = vec![r];
    }
    let report = match run(&config) {
        Ok(r) => r,
        Err(e) => return fail(exit_code(&e), e),
    };
    let text = report.to_json_string();
    match args.out.or(config.output.clone()) {
        Some(path) => {
            if let Err(e) = std::fs::write(&path, &text) {
                return fail(3, format!("cannot write {}: {e}", path.display()));
            }
            if let Some(table) = &report.table {
                if let Err(e) = table.write_csv(&table_path(&path)) {
                    return fail(3, e);
                }
            }
        }
        None => print!("{text}"),
    }
    if !args.quiet {
        for ch in &report.checks {
            let status = if ch.pass { "PASS" } else { "FAIL" };
            eprintln!("{status} {} = {:?}", ch.quantity, ch.values);
        }
    }
    if report.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
