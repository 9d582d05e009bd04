//! Load a scenario file, run it and write the result bundle.
//!
//! `cargo run --example scenario_run -- scenarios/stern_gerlach_sweep.toml /tmp/out`

use qrfspin::scenario::{emit, load_scenario, run, OutputFormat};

fn main() -> qrfspin::Result<()> {
    let mut args = std::env::args().skip(1);
    let path = args
        .next()
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/../../scenarios/stern_gerlach_sweep.toml").into());
    let out = args
        .next()
        .unwrap_or_else(|| std::env::temp_dir().join("qrfspin-example").display().to_string());

    let scenario = load_scenario(&path)?;
    let bundle = run(&scenario)?;
    for c in &bundle.checks {
        println!(
            "{:<5} {:<36} {:.2e} ≤ {:.0e}",
            if c.passed { "ok" } else { "FAIL" },
            c.name,
            c.value,
            c.tolerance
        );
    }
    for row in &bundle.sweep {
        println!("θ = {:.4}: p+ = {:.6}, p- = {:.6}", row.theta, row.p_plus, row.p_minus);
    }
    for p in emit(&bundle, OutputFormat::Both, &out)? {
        println!("wrote {}", p.display());
    }
    Ok(())
}
