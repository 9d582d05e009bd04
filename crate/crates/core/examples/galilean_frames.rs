//! Nonrelativistic frame change: entanglement depends on the frame.
//!
//! `cargo run --example galilean_frames`

use qrfspin::matrix::C64;
use qrfspin::qrf::galilean::{
    entanglement_entropy, galilean_inverse, galilean_transform, probability_report, GalileanFrame,
    GalileanTwoParticleState, Lattice,
};

fn main() -> qrfspin::Result<()> {
    let lattice = Lattice::new(0.5, 20)?;
    let one = C64::new(1.0, 0.0);
    // relative to C: A at −2 or 3, B at 1
    let psi = GalileanTwoParticleState::from_terms(lattice, GalileanFrame::C, &[(-2.0, 1.0, one), (3.0, 1.0, one)])?;
    let phi = galilean_transform(&psi)?;

    println!("entropy relative to C: {:.3e}", entanglement_entropy(&psi)?);
    println!(
        "entropy relative to A: {:.12} (ln 2 = {:.12})",
        entanglement_entropy(&phi)?,
        2f64.ln()
    );
    for (qb, qc) in [(3.0, 2.0), (-2.0, -3.0)] {
        println!("  ⟨q_B = {qb}, q_C = {qc}|φ⟩ = {:.6}", phi.amplitude(qb, qc));
    }
    println!("round trip exact: {}", galilean_inverse(&phi)? == psi);

    let (before, after) = probability_report(&psi, |xa, xb| xb > xa)?;
    println!("P(B right of A): {before} relative to C, {after} relative to A");
    Ok(())
}
