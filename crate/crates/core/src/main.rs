use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use tempered_stable::cli::{parse_config, run};

/// Tail and convolution-equivalence diagnostics for tempered stable laws.
#[derive(Parser)]
#[command(name = "tsdiag", version)]
struct Args {
    /// Config file (`key = value` lines, `[plus]`/`[minus]` sections).
    #[arg(long)]
    config: PathBuf,
    /// Directory for the CSV output [default: `output_path` from the
    /// config, else ./out].
    #[arg(long)]
    out: Option<PathBuf>,
    /// Accuracy of each point evaluation; overrides `tol` in the config.
    #[arg(long)]
    tol: Option<f64>,
    /// Do not print the summary.
    #[arg(long)]
    quiet: bool,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let text = match std::fs::read_to_string(&args.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("tsdiag: {}: {e}", args.config.display());
            return ExitCode::from(1);
        }
    };
    let mut cfg = match parse_config(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("tsdiag: {}: {e}", args.config.display());
            return ExitCode::from(1);
        }
    };
    if let Some(t) = args.tol {
        if !(t > 0.0 && t < 1e-2) {
            eprintln!("tsdiag: --tol must lie in (0, 1e-2), got {t}");
            return ExitCode::from(1);
        }
        cfg.tol = t;
    }
    let out = args
        .out
        .or_else(|| cfg.output_path.clone())
        .unwrap_or_else(|| PathBuf::from("./out"));
    match run(&cfg, &text, &out) {
        Ok(outcome) => {
            if !args.quiet {
                print!("{}", outcome.summary);
                for f in &outcome.files {
                    println!("  wrote {}", f.display());
                }
            }
            ExitCode::from(outcome.exit_code as u8)
        }
        Err(e) => {
            eprintln!("tsdiag: {e}");
            ExitCode::from(1)
        }
    }
}
