use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qrfspin::scenario::{emit, load_scenario, run, OutputFormat};

/// Environment variable naming the default output directory.
const OUT_DIR_ENV: &str = "QRFSPIN_OUT_DIR";

#[derive(Parser)]
#[command(
    name = "qrfspin",
    version,
    about = "Run relativistic quantum-reference-frame scenarios"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario file; exits 0 iff every check passes.
    Run {
        scenario: PathBuf,
        /// Output directory [default: $QRFSPIN_OUT_DIR or ./qrfspin-out].
        /// Results go to a subdirectory named after the scenario file.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "both", value_parser = parse_format)]
        format: OutputFormat,
    },
}

fn parse_format(s: &str) -> Result<OutputFormat, String> {
    s.parse().map_err(|e: qrfspin::Error| e.to_string())
}

fn main() -> ExitCode {
    let Command::Run { scenario, out, format } = Cli::parse().command;
    let out = out
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("qrfspin-out"));
    let stem = scenario
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "scenario".into());

    let result = load_scenario(&scenario)
        .and_then(|s| run(&s))
        .and_then(|bundle| emit(&bundle, format, out.join(&stem)).map(|paths| (bundle, paths)));
    let (bundle, paths) = match result {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };

    for c in &bundle.checks {
        let status = if c.passed { "PASS" } else { "FAIL" };
        println!("{status} {:<40} {:.3e} (tol {:.1e})", c.name, c.value, c.tolerance);
    }
    for p in paths {
        println!("wrote {}", p.display());
    }
    if bundle.all_passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
