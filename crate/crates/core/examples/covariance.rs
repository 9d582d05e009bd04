//! How the interaction Hamiltonian changes with the frame.
//!
//! `cargo run --example covariance`

use qrfspin::lorentz::Vec3;
use qrfspin::matrix::bloch_spinor;
use qrfspin::qrf::SuperposedBoost;
use qrfspin::statekit::{Frame, SpinorField, UnitSystem};
use qrfspin::sterngerlach::{conjugation_check, deflection_check, evolve_covariance_check, SternGerlachConfig};

fn main() -> qrfspin::Result<()> {
    let units = UnitSystem::default();
    let boost = SuperposedBoost::new(1.0, 2.0, units)?;
    let e = Vec3::new(0.3, -0.2, 0.5);
    let b = Vec3::new(0.4, 0.9, -0.7);
    let momenta: Vec<f64> = (-4..=4).map(|k| k as f64).collect();

    let r = conjugation_check(&boost, &e, &b, 0.8, &momenta)?;
    println!("‖Ŝ†(γH_C)Ŝ − H_A‖     = {:.2e}", r.covariant_residual);
    println!(
        "‖Ŝ†H_C Ŝ − H_A‖       = {:.4}  (missing time dilation)",
        r.literal_residual
    );
    println!("‖μH⁰ − γH_C‖          = {:.2e}", r.h0_identity_residual);
    println!("spectrum(μH⁰) vs H_A  = {:.2e}", r.spectrum_residual);

    println!("\n{:>6} {:>8} {:>8} {:>16}", "π", "t_A", "t_C", "1 − fidelity");
    for pi in [0.0, -2.0, 1.5, 6.0] {
        let rest = SpinorField::sharp(pi, 2.0, bloch_spinor(0.7, 1.9), units, Frame::Rest)?;
        let c = evolve_covariance_check(&boost, &rest, &Vec3::new(0.2, 0.5, 1.1), 1.0, 2.5)?;
        println!("{pi:>6.1} {:>8.3} {:>8.3} {:>16.2e}", c.t_a, c.t_c, 1.0 - c.fidelity);
    }

    let mut config = SternGerlachConfig::new(0.3, 1.0, 0.2, 1.0, 1.0, 3.0);
    config.n_hat = [0.0, 0.6, 0.8];
    let d = deflection_check(&config, &[-3.0, 0.0, 3.0])?;
    println!(
        "\nkick directions agree: {} (residual {:.1e})",
        d.same_side, d.max_direction_residual
    );
    for c in d.cases.iter().take(2) {
        println!(
            "  p_x {:+.1} branch {:+}: lab {:?} rest {:?}",
            c.p_x, c.branch, c.lab_kick, c.rest_kick
        );
    }
    Ok(())
}
