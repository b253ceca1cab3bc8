use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use opsampler::experiment::{
    exit_code, run, Command, ExperimentConfig, ExportKind, RunOptions, EXIT_ERROR,
};

#[derive(Parser)]
#[command(
    name = "opsampler",
    version,
    about = "Average sampling and reconstruction of Hilbert-Schmidt operators"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Riesz and frame verdicts for the configured system.
    Analyze(Args),
    /// Synthesize, sample and reconstruct a random element.
    Roundtrip(Args),
    /// Write CSV diagnostics.
    Export(Args),
}

#[derive(clap::Args)]
struct Args {
    /// JSON experiment configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory for the report and any CSV files.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Largest accepted relative reconstruction error.
    #[arg(long, allow_hyphen_values = true)]
    tolerance: Option<f64>,
    /// Diagnostic to export: symbols, wigner, periodization or transfer.
    #[arg(long)]
    what: Option<ExportKind>,
}

fn init_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("OPSAMPLER_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("OPSAMPLER_THREADS must be a positive integer, got {v:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_ERROR as u8)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    if let Err(e) = init_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_ERROR as u8);
    }
    let (command, args) = match cli.command {
        Cmd::Analyze(a) => (Command::Analyze, a),
        Cmd::Roundtrip(a) => (Command::Roundtrip, a),
        Cmd::Export(a) => (Command::Export, a),
    };
    if let Some(t) = args.tolerance {
        if !(t.is_finite() && t > 0.0) {
            eprintln!("error: --tolerance must be positive, got {t}");
            return ExitCode::from(EXIT_ERROR as u8);
        }
    }
    let cfg = match ExperimentConfig::from_path(&args.config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {}: {e}", args.config.display());
            return ExitCode::from(EXIT_ERROR as u8);
        }
    };
    let opts = RunOptions {
        out: args.out,
        tolerance: args.tolerance,
        what: args.what,
    };
    let result = run(command, &cfg, &opts);
    match &result {
        Ok(report) => {
            println!("{}", report.to_json());
            if let Some(f) = &report.failure {
                match &f.witness {
                    Some(w) => eprintln!(
                        "fail: {} (xi index {}, point ({}, {}))",
                        f.reason, w.index, w.x, w.omega
                    ),
                    None => eprintln!("fail: {}", f.reason),
                }
            }
        }
        Err(e) => eprintln!("error: {e}"),
    }
    ExitCode::from(exit_code(&result) as u8)
}
