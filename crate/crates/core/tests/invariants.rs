use proptest::prelude::*;

use qrfspin::lorentz::{boost_matrix, kinematics, minkowski, Vec3};
use qrfspin::matrix::{bloch_spinor, C64};
use qrfspin::qrf::{RestFrameState, SuperposedBoost};
use qrfspin::spinops::{covariant_constraint_at, su2_residual, unit_spectrum_residual, xi_at, xi_field, Axis};
use qrfspin::statekit::{Frame, MomentumGrid1D, SpinorField, UnitSystem};
use qrfspin::sterngerlach::{evolve_lab_frame, SternGerlachConfig};

fn grid() -> MomentumGrid1D {
    MomentumGrid1D::uniform(-10.0, 10.0, 161, 1.0, UnitSystem::default(), "C").unwrap()
}

fn random_field(amps: &[(f64, f64, f64, f64)]) -> SpinorField {
    let g = grid();
    let n = g.len();
    let spinors = (0..n)
        .map(|i| {
            let (a, b, c, d) = amps[i % amps.len()];
            let env = (-(g.points()[i] / 3.0).powi(2)).exp();
            [C64::new(a * env, b * env), C64::new(c * env, d * env)]
        })
        .collect();
    SpinorField::new(g, spinors, Frame::Lab).unwrap()
}

fn amps() -> impl Strategy<Value = Vec<(f64, f64, f64, f64)>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64, 0.1..1.0f64), 1..8)
}

fn momentum() -> impl Strategy<Value = Vec3> {
    (-20.0..20.0f64, -20.0..20.0f64, -20.0..20.0f64).prop_map(|(x, y, z)| Vec3::new(x, y, z))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn inner_product_is_conjugate_symmetric(a in amps(), b in amps()) {
        let (u, v) = (random_field(&a), random_field(&b));
        let uv = u.inner_product(&v).unwrap();
        let vu = v.inner_product(&u).unwrap();
        prop_assert!((uv - vu.conj()).norm() < 1e-12 * (1.0 + uv.norm()));
    }

    #[test]
    fn cauchy_schwarz(a in amps(), b in amps()) {
        let (u, v) = (random_field(&a), random_field(&b));
        let uv = u.inner_product(&v).unwrap().norm();
        prop_assert!(uv <= u.norm() * v.norm() * (1.0 + 1e-12));
    }

    #[test]
    fn boost_preserves_metric(p in momentum(), mass in 0.1..5.0f64) {
        let l = boost_matrix(p, mass, &UnitSystem::default()).unwrap();
        let eta = minkowski();
        let scale = l.kinematics.gamma.powi(2);
        prop_assert!((l.matrix.transpose() * eta * l.matrix - eta).amax() < 1e-13 * scale.max(1.0));
        prop_assert!(l.metric_residual() < 1e-13 * scale.max(1.0));
        prop_assert!((l.determinant() - 1.0).abs() < 1e-9);
        let back = boost_matrix(-p, mass, &UnitSystem::default()).unwrap();
        let id = back.matrix * l.matrix;
        prop_assert!((id - nalgebra::Matrix4::identity()).amax() < 1e-9 * (1.0 + l.kinematics.gamma.powi(2)));
    }

    #[test]
    fn xi_is_a_spin(p in momentum(), mass in 0.1..5.0f64) {
        let kin = kinematics(p, mass, &UnitSystem::default()).unwrap();
        let xi = xi_at(&kin);
        prop_assert!(su2_residual(&xi) < 1e-11);
        for m in &xi {
            prop_assert!(unit_spectrum_residual(m) < 1e-12);
        }
        let scale = kin.gamma * kin.gamma;
        prop_assert!(covariant_constraint_at(&kin).norm() < 1e-13 * scale.max(1.0));
    }

    #[test]
    fn superposed_boost_preserves_norm_and_spin(
        theta in 0.0..std::f64::consts::PI,
        phi in 0.0..std::f64::consts::TAU,
        center in -2.0..2.0f64,
        std in 0.6..1.5f64,
        m_c in 0.5..3.0f64,
    ) {
        let boost = SuperposedBoost::new(1.0, m_c, UnitSystem::default()).unwrap();
        let g = MomentumGrid1D::uniform(-12.0, 12.0, 241, m_c, UnitSystem::default(), "C").unwrap();
        let rest = RestFrameState::gaussian(bloch_spinor(theta, phi), g, center, std).unwrap().to_field();
        let lab = boost.apply(&rest).unwrap();
        prop_assert!((lab.norm() - 1.0).abs() < 1e-10);
        for axis in Axis::ALL {
            let s = axis.pauli();
            let rest_val = qrfspin::spinops::OperatorField::constant(&rest.grid, Frame::Rest, "sigma", s)
                .unwrap().expectation(&rest).unwrap();
            let lab_val = xi_field(&lab.grid, axis).unwrap().expectation(&lab).unwrap();
            prop_assert!((rest_val - lab_val).abs() < 1e-10);
        }
        let back = boost.inverse(&lab).unwrap();
        prop_assert!(back.distance(&rest).unwrap() < 1e-10);
    }

    #[test]
    fn stern_gerlach_probability_law(theta in 0.0..std::f64::consts::FRAC_PI_2, p_x in -3.0..3.0f64) {
        let mut config = SternGerlachConfig::new(theta, 1.0, 0.3, 2.0, 0.5, 0.0);
        config.p_x = p_x;
        config.t = 6.0 * config.separation_time();
        let r = evolve_lab_frame(&config).unwrap();
        prop_assert!((r.p_plus - theta.cos().powi(2)).abs() < 1e-6);
        prop_assert!((r.p_minus - theta.sin().powi(2)).abs() < 1e-6);
        prop_assert!(r.p_plus + r.p_minus <= 1.0 + 1e-9);
        prop_assert!(r.spectral_residual < 1e-8);
    }
}
