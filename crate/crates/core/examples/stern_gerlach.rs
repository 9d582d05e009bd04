//! Laboratory Stern-Gerlach run: splitting, probabilities, distinguishability.
//!
//! `cargo run --example stern_gerlach`

use std::f64::consts::PI;

use qrfspin::sterngerlach::{distinguishability, evolve_lab_frame, evolve_rest_frame, SternGerlachConfig};

fn main() -> qrfspin::Result<()> {
    let mut config = SternGerlachConfig::new(PI / 6.0, 1.0, 0.3, 2.0, 0.5, 0.0);
    config.p_x = 1.5;
    let t_sep = config.separation_time();

    println!(
        "{:>6} {:>12} {:>12} {:>12} {:>6}",
        "t/t*", "p+", "p-", "overlap", "dist."
    );
    for scaled in [0.0, 0.5, 1.0, 2.0, 5.0, 10.0] {
        config.t = scaled * t_sep;
        let r = evolve_lab_frame(&config)?;
        let (ov, flag) = distinguishability(&config)?;
        println!(
            "{scaled:>6.1} {:>12.8} {:>12.8} {ov:>12.3e} {flag:>6}",
            r.p_plus, r.p_minus
        );
    }

    config.t = 5.0 * t_sep;
    let lab = evolve_lab_frame(&config)?;
    let rest = evolve_rest_frame(&config)?;
    println!(
        "\ncos²θ = {:.8}, sin²θ = {:.8}",
        config.theta.cos().powi(2),
        config.theta.sin().powi(2)
    );
    println!(
        "half-line projectors: p+ {:.8}, p- {:.8}",
        lab.p_plus_halfline, lab.p_minus_halfline
    );
    println!("spectral vs analytic evolution: {:.2e}", lab.spectral_residual);
    println!(
        "lab run t = {:.4}, rest run t = {:.4}, both p* = {:.4} / {:.4}",
        lab.t, rest.t, lab.p_star, rest.p_star
    );
    Ok(())
}
