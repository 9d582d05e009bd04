//! Pure boosts, field transformation and the sign-frozen field tensor.
//!
//! `cargo run --example boost_kinematics`

use qrfspin::lorentz::{
    boost_matrix, faraday, kinematics_x, lab_fields_from_rest, rest_fields_from_lab, transform_field, FieldConvention,
    Vec3,
};
use qrfspin::statekit::UnitSystem;

fn main() -> qrfspin::Result<()> {
    let units = UnitSystem::default();
    let mass = 1.0;

    println!(
        "{:>6} {:>10} {:>10} {:>12} {:>12}",
        "p_x", "gamma", "beta", "|LtηL-η|", "det-1"
    );
    for p in [0.0, 0.5, 1.0, 3.0, 10.0] {
        let l = boost_matrix(Vec3::new(p, 0.0, 0.0), mass, &units)?;
        let k = l.kinematics;
        println!(
            "{p:>6.2} {:>10.5} {:>10.5} {:>12.2e} {:>12.2e}",
            k.gamma,
            k.beta.x,
            l.metric_residual(),
            (l.determinant() - 1.0).abs()
        );
    }

    // L_p sends p to the rest momentum
    let l = boost_matrix(Vec3::new(1.0, 0.0, 0.0), mass, &units)?;
    println!("\nL_p p = {:?}", l.apply(&l.kinematics.four_momentum()).as_slice());

    let kin = kinematics_x(1.0, mass, &units)?;
    let e = Vec3::new(0.0, 0.4, 0.0);
    let b = Vec3::new(0.0, 0.0, 1.0);
    let s = transform_field(&e, &b, &kin);
    let (_, b_tensor) = rest_fields_from_lab(&e, &b, &kin);
    println!("\nrest-frame field S_Λ      = {:?}", s.as_slice());
    println!("via F' = L F Lᵀ            = {:?}", b_tensor.as_slice());
    let (e_back, b_back) = lab_fields_from_rest(&Vec3::zeros(), &s, &kin);
    println!(
        "back to the lab (E, B)     = {:?} {:?}",
        e_back.as_slice(),
        b_back.as_slice()
    );

    let f = faraday(&e, &b, FieldConvention::FROZEN);
    println!("\nF^{{μν}} ({}):\n{}", f.convention, f.components);
    Ok(())
}
