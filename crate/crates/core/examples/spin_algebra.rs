//! The covariant spin field Σ_p and the relativistic spin operators Ξ.
//!
//! `cargo run --example spin_algebra`

use qrfspin::lorentz::{kinematics, Vec3};
use qrfspin::spinops::{
    covariant_constraint_at, pauli_lubanski_at, pauli_vector, su2_residual, unit_spectrum_residual, xi_at,
    xi_construction_residual,
};
use qrfspin::statekit::{MomentumGrid1D, UnitSystem};

fn main() -> qrfspin::Result<()> {
    let units = UnitSystem::default();
    let p = Vec3::new(1.2, -0.4, 0.7);
    let kin = kinematics(p, 1.0, &units)?;

    let sigma = pauli_lubanski_at(&kin);
    println!("Σ⁰ at p = {:?}:\n{:?}", p.as_slice(), sigma[0]);
    println!("‖p_μ Σ^μ‖ = {:.2e}", covariant_constraint_at(&kin).norm());

    let xi = xi_at(&kin);
    let pauli = pauli_vector();
    let collapse = (0..3).map(|i| (xi[i] - pauli[i]).norm()).fold(0.0, f64::max);
    println!("max ‖Ξ_i − σ_i‖ = {collapse:.2e}");
    println!("su(2) residual  = {:.2e}", su2_residual(&xi));
    println!(
        "spectrum        = {:.2e}",
        xi.iter().map(unit_spectrum_residual).fold(0.0, f64::max)
    );

    // Σ⃗ alone is not a spin: its components are not Pauli-normalized
    let naive = [sigma[1], sigma[2], sigma[3]];
    println!("\nsu(2) residual of Σ⃗ itself = {:.3}", su2_residual(&naive));
    println!("Σ_x spectrum: {:?}", naive[0].eigh().0);

    let grid = MomentumGrid1D::uniform(-20.0, 20.0, 801, 1.0, units, "A")?;
    println!(
        "\ncovariant vs Wigner-basis Ξ on a grid: {:.2e}",
        xi_construction_residual(&grid)?
    );
    Ok(())
}
