//! Rest-frame product state → laboratory description of A.
//!
//! `cargo run --example superposition_of_boosts`

use qrfspin::matrix::{bloch_spinor, spinor_dot, Mat2, ONE, ZERO};
use qrfspin::qrf::{factorize, spin_entropy, RestFrameState, SuperposedBoost};
use qrfspin::spinops::{classify_subspace, xi_field, Axis, OperatorField};
use qrfspin::statekit::{Frame, MomentumGrid1D, UnitSystem};

fn main() -> qrfspin::Result<()> {
    let units = UnitSystem::default();
    let boost = SuperposedBoost::new(1.0, 2.0, units)?;
    let grid = MomentumGrid1D::uniform(-12.0, 12.0, 481, 2.0, units, "C")?;

    let spin = bloch_spinor(1.1, 0.4);
    let state = RestFrameState::gaussian(spin, grid, 0.8, 1.2)?;
    let rest = state.to_field();
    let lab = boost.apply(&rest)?;
    println!("norm: rest {:.15}, lab {:.15}", rest.norm(), lab.norm());
    println!("π = {:.2} ↦ p = {:.2}", rest.grid.points()[0], lab.grid.points()[0]);

    for axis in Axis::ALL {
        let s = OperatorField::constant(&rest.grid, Frame::Rest, "sigma", axis.pauli())?.expectation(&rest)?;
        let x = xi_field(&lab.grid, axis)?.expectation(&lab)?;
        println!("⟨σ_{axis}⟩_rest = {s:+.12}   ⟨Ξ_{axis}⟩_lab = {x:+.12}");
    }

    let projector = Mat2::spin_projector([0.0, 0.0, 1.0]);
    let (before, after) = boost.probability_report(&rest, &projector)?;
    println!("P(up): {before:.12} → {after:.12}");

    // spin-momentum entanglement from opposite spins on separated packets
    let up = boost.apply_product(&RestFrameState::gaussian([ONE, ZERO], rest.grid.clone(), -4.0, 0.5)?)?;
    let down = boost.apply_product(&RestFrameState::gaussian([ZERO, ONE], rest.grid.clone(), 4.0, 0.5)?)?;
    let mix = up.add(&down)?.normalize()?;
    println!(
        "\nentangled lab state: spin entropy {:.6} (ln 2 = {:.6})",
        spin_entropy(&mix),
        2f64.ln()
    );
    println!("subspace: {:?}", classify_subspace(&mix, 1e-10)?);
    match boost.inverse_factorized(&mix, 1e-10) {
        Ok(_) => println!("pulled back to a product"),
        Err(e) => println!("pullback: {e}"),
    }
    let f = factorize(&boost.inverse(&lab)?)?;
    println!(
        "product pullback residual {:.1e}, spin fidelity {:.15}",
        f.residual,
        spinor_dot(&f.spin, &spin).norm()
    );
    Ok(())
}
