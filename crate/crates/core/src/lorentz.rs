//! Relativistic kinematics, the pure boost `L_p`, and electromagnetic field
//! transformation laws.
//!
//! Index conventions: four-vectors are `(x⁰, x¹, x², x³)` with metric
//! `η = diag(1, −1, −1, −1)`. `L_p` maps the four-momentum `p` to the rest
//! momentum `k = (mc, 0⃗)`; `L_{−p}` maps `k` back to `p`.

use std::fmt;
use std::str::FromStr;

use nalgebra::{Matrix4, Vector3, Vector4};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::statekit::UnitSystem;

pub type Vec3 = Vector3<f64>;

/// `γ`, `β⃗` and energy of a particle of given momentum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Kinematics {
    pub gamma: f64,
    pub beta: Vec3,
    pub momentum: Vec3,
    pub mass: f64,
    /// `p⁰ = √(m²c² + |p⃗|²)`.
    pub p0: f64,
    pub units: UnitSystem,
}

pub fn kinematics(p: Vec3, mass: f64, units: &UnitSystem) -> Result<Kinematics> {
    if !(mass > 0.0) {
        return Err(Error::NonPositiveMass(mass));
    }
    let mc = mass * units.c;
    let p2 = p.norm_squared();
    let p0 = (mc * mc + p2).sqrt();
    Ok(Kinematics {
        gamma: (1.0 + p2 / (mc * mc)).sqrt(),
        beta: p / p0,
        momentum: p,
        mass,
        p0,
        units: *units,
    })
}

/// Momentum along the boost axis `x`.
pub fn kinematics_x(px: f64, mass: f64, units: &UnitSystem) -> Result<Kinematics> {
    kinematics(Vec3::new(px, 0.0, 0.0), mass, units)
}

impl Kinematics {
    pub fn mc(&self) -> f64 {
        self.mass * self.units.c
    }

    /// `γ²(1 − |β|²) − 1`.
    pub fn invariant_residual(&self) -> f64 {
        self.gamma * self.gamma * (1.0 - self.beta.norm_squared()) - 1.0
    }

    /// Velocity `v⃗ = c β⃗`.
    pub fn velocity(&self) -> Vec3 {
        self.beta * self.units.c
    }

    /// Four-velocity `u^μ = p^μ/(mc)`.
    pub fn four_velocity(&self) -> Vector4<f64> {
        let mc = self.mc();
        Vector4::new(
            self.p0 / mc,
            self.momentum.x / mc,
            self.momentum.y / mc,
            self.momentum.z / mc,
        )
    }

    pub fn four_momentum(&self) -> Vector4<f64> {
        Vector4::new(self.p0, self.momentum.x, self.momentum.y, self.momentum.z)
    }
}

pub fn minkowski() -> Matrix4<f64> {
    Matrix4::from_diagonal(&Vector4::new(1.0, -1.0, -1.0, -1.0))
}

/// Pure boost matrix `L_p`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoostMatrix {
    pub matrix: Matrix4<f64>,
    pub kinematics: Kinematics,
}

pub fn boost_matrix(p: Vec3, mass: f64, units: &UnitSystem) -> Result<BoostMatrix> {
    let kin = kinematics(p, mass, units)?;
    let mc = kin.mc();
    let mut m = Matrix4::zeros();
    m[(0, 0)] = kin.p0 / mc;
    for i in 0..3 {
        m[(0, i + 1)] = -p[i] / mc;
        m[(i + 1, 0)] = -p[i] / mc;
        for j in 0..3 {
            let delta = if i == j { 1.0 } else { 0.0 };
            m[(i + 1, j + 1)] = delta + p[i] * p[j] / (mc * (kin.p0 + mc));
        }
    }
    Ok(BoostMatrix {
        matrix: m,
        kinematics: kin,
    })
}

impl BoostMatrix {
    /// `max |Lᵀ η L − η|`.
    pub fn metric_residual(&self) -> f64 {
        let eta = minkowski();
        (self.matrix.transpose() * eta * self.matrix - eta).amax()
    }

    pub fn determinant(&self) -> f64 {
        self.matrix.determinant()
    }

    pub fn symmetry_residual(&self) -> f64 {
        (self.matrix - self.matrix.transpose()).amax()
    }

    pub fn apply(&self, v: &Vector4<f64>) -> Vector4<f64> {
        self.matrix * v
    }
}

/// Rest-frame magnetic field seen by a particle of the given kinematics in
/// lab fields `(E, B)`:
/// `S_Λ = γ[B − (γ/(γ+1))(β⃗·B)β⃗ + β⃗×E]`.
pub fn transform_field(e_lab: &Vec3, b_lab: &Vec3, kin: &Kinematics) -> Vec3 {
    let g = kin.gamma;
    let beta = kin.beta;
    (b_lab - beta * (g / (g + 1.0) * beta.dot(b_lab)) + beta.cross(e_lab)) * g
}

/// Sign bookkeeping for `F^{νλ}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FieldConvention {
    /// `F^{0i} = −E_i`, `F^{ij} = +ε_{ijk} B_k`. The tensor transform of the
    /// lab fields then reproduces [`transform_field`] exactly, and the
    /// covariant spin coupling equals `γ H_int^(C) / μ`. Frozen for all
    /// Hamiltonian work.
    SpinCoupling,
    /// `F^{0i} = −E_i`, `F^{ij} = −ε_{ijk} B_k` (Jackson).
    Jackson,
}

impl FieldConvention {
    pub const FROZEN: FieldConvention = FieldConvention::SpinCoupling;

    fn magnetic_sign(self) -> f64 {
        match self {
            FieldConvention::SpinCoupling => 1.0,
            FieldConvention::Jackson => -1.0,
        }
    }
}

impl FromStr for FieldConvention {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "spin-coupling" => Ok(FieldConvention::SpinCoupling),
            "jackson" => Ok(FieldConvention::Jackson),
            other => Err(Error::UnknownConvention(other.to_string())),
        }
    }
}

impl fmt::Display for FieldConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FieldConvention::SpinCoupling => "spin-coupling",
            FieldConvention::Jackson => "jackson",
        })
    }
}

/// Antisymmetric field tensor `F^{νλ}` (contravariant indices).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FaradayTensor {
    pub components: Matrix4<f64>,
    pub convention: FieldConvention,
}

pub fn faraday(e: &Vec3, b: &Vec3, convention: FieldConvention) -> FaradayTensor {
    let s = convention.magnetic_sign();
    let mut f = Matrix4::zeros();
    for i in 0..3 {
        f[(0, i + 1)] = -e[i];
        f[(i + 1, 0)] = e[i];
    }
    // F^{ij} = s ε_{ijk} B_k
    f[(1, 2)] = s * b[2];
    f[(2, 1)] = -s * b[2];
    f[(2, 3)] = s * b[0];
    f[(3, 2)] = -s * b[0];
    f[(3, 1)] = s * b[1];
    f[(1, 3)] = -s * b[1];
    FaradayTensor {
        components: f,
        convention,
    }
}

impl FaradayTensor {
    /// `(E, B)` encoded in the tensor.
    pub fn fields_of(&self) -> (Vec3, Vec3) {
        let f = &self.components;
        let s = self.convention.magnetic_sign();
        let e = Vec3::new(-f[(0, 1)], -f[(0, 2)], -f[(0, 3)]);
        let b = Vec3::new(s * f[(2, 3)], s * f[(3, 1)], s * f[(1, 2)]);
        (e, b)
    }

    pub fn antisymmetry_residual(&self) -> f64 {
        (self.components + self.components.transpose()).amax()
    }

    /// `Λ F Λᵀ`.
    pub fn transformed(&self, lambda: &Matrix4<f64>) -> FaradayTensor {
        FaradayTensor {
            components: lambda * self.components * lambda.transpose(),
            convention: self.convention,
        }
    }
}

/// Rest-frame fields from lab fields by the tensor route, `F' = L_p F L_pᵀ`.
pub fn rest_fields_from_lab(e_lab: &Vec3, b_lab: &Vec3, kin: &Kinematics) -> (Vec3, Vec3) {
    let l = boost_matrix(kin.momentum, kin.mass, &kin.units).expect("valid kinematics");
    faraday(e_lab, b_lab, FieldConvention::FROZEN)
        .transformed(&l.matrix)
        .fields_of()
}

/// Lab fields producing the given rest-frame fields, `F = L_{−p} F' L_{−p}ᵀ`.
pub fn lab_fields_from_rest(e_rest: &Vec3, b_rest: &Vec3, kin: &Kinematics) -> (Vec3, Vec3) {
    let l = boost_matrix(-kin.momentum, kin.mass, &kin.units).expect("valid kinematics");
    faraday(e_rest, b_rest, FieldConvention::FROZEN)
        .transformed(&l.matrix)
        .fields_of()
}

/// Totally antisymmetric `ε_{ρμνλ}` with `ε_{0123} = +1`.
pub fn levi_civita(idx: [usize; 4]) -> f64 {
    let mut v = idx;
    for i in 0..4 {
        for j in (i + 1)..4 {
            if v[i] == v[j] {
                return 0.0;
            }
        }
    }
    let mut sign = 1.0;
    for i in 0..4 {
        while v[i] != i {
            let t = v[i];
            v.swap(i, t);
            sign = -sign;
        }
    }
    sign
}

/// Electromagnetic field with an optional linear profile along a transverse
/// axis: `B(r) = (B⁰ − α r·n̂) n̂` on top of the uniform part.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EMField {
    pub e: [f64; 3],
    pub b: [f64; 3],
    pub gradient: Option<GradientProfile>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GradientProfile {
    pub b0: f64,
    pub alpha: f64,
    pub direction: [f64; 3],
}

impl GradientProfile {
    pub fn new(b0: f64, alpha: f64, direction: [f64; 3]) -> Result<Self> {
        if !(alpha > 0.0) {
            return Err(Error::NonPositive {
                name: "alpha",
                value: alpha,
            });
        }
        let n = Vec3::from(direction);
        if n.norm() == 0.0 {
            return Err(Error::ZeroDirection);
        }
        let n = n.normalize();
        Ok(GradientProfile {
            b0,
            alpha,
            direction: [n.x, n.y, n.z],
        })
    }
}

impl EMField {
    pub fn uniform(e: Vec3, b: Vec3) -> Self {
        EMField {
            e: e.into(),
            b: b.into(),
            gradient: None,
        }
    }

    pub fn gradient(profile: GradientProfile) -> Self {
        EMField {
            e: [0.0; 3],
            b: [0.0; 3],
            gradient: Some(profile),
        }
    }

    /// `(E, B)` at position `r`.
    pub fn at(&self, r: &Vec3) -> (Vec3, Vec3) {
        let mut b = Vec3::from(self.b);
        if let Some(g) = self.gradient {
            let n = Vec3::from(g.direction);
            b += n * (g.b0 - g.alpha * r.dot(&n));
        }
        (Vec3::from(self.e), b)
    }

    /// Spatial derivative `(∂_k E, ∂_k B)`; the profile is linear so this is exact.
    pub fn derivative(&self, k: usize) -> (Vec3, Vec3) {
        match self.gradient {
            Some(g) => {
                let n = Vec3::from(g.direction);
                (Vec3::zeros(), n * (-g.alpha * n[k]))
            }
            None => (Vec3::zeros(), Vec3::zeros()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u() -> UnitSystem {
        UnitSystem::default()
    }

    #[test]
    fn kinematics_rest_and_unit_momentum() {
        let k = kinematics(Vec3::zeros(), 2.0, &u()).unwrap();
        assert_eq!(k.gamma, 1.0);
        assert_eq!(k.beta, Vec3::zeros());
        // p_x = mc: γ = √2, β_x = 1/√2
        let k = kinematics_x(3.0, 3.0, &u()).unwrap();
        assert!((k.gamma - 2f64.sqrt()).abs() < 1e-15);
        assert!((k.beta.x - 1.0 / 2f64.sqrt()).abs() < 1e-15);
        assert!(matches!(kinematics_x(1.0, 0.0, &u()), Err(Error::NonPositiveMass(_))));
    }

    #[test]
    fn kinematics_with_explicit_c() {
        let units = UnitSystem::new(1.0, 3.0).unwrap();
        let k = kinematics_x(6.0, 2.0, &units).unwrap();
        assert!((k.gamma - 2f64.sqrt()).abs() < 1e-15);
        assert!((k.velocity().x - 3.0 / 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn boost_matrix_values() {
        let l = boost_matrix(Vec3::zeros(), 1.0, &u()).unwrap();
        assert_eq!(l.matrix, Matrix4::identity());
        let l = boost_matrix(Vec3::new(1.0, 0.0, 0.0), 1.0, &u()).unwrap();
        let r2 = 2f64.sqrt();
        assert!((l.matrix[(0, 0)] - r2).abs() < 1e-15);
        assert!((l.matrix[(0, 1)] + 1.0).abs() < 1e-15);
        assert!((l.matrix[(1, 0)] + 1.0).abs() < 1e-15);
        assert!((l.matrix[(1, 1)] - r2).abs() < 1e-15);
        assert!((l.matrix[(2, 2)] - 1.0).abs() < 1e-15);
        assert!((l.determinant() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn boost_maps_momentum_to_rest() {
        let p = Vec3::new(0.4, -1.2, 2.0);
        let l = boost_matrix(p, 1.7, &u()).unwrap();
        let k = l.apply(&l.kinematics.four_momentum());
        assert!((k[0] - 1.7).abs() < 1e-13);
        assert!(k.fixed_rows::<3>(1).amax() < 1e-13);
        let back = boost_matrix(-p, 1.7, &u()).unwrap();
        assert!((back.matrix * l.matrix - Matrix4::identity()).amax() < 1e-13);
    }

    #[test]
    fn field_transform_cases() {
        let e0 = Vec3::zeros();
        let rest = kinematics_x(0.0, 1.0, &u()).unwrap();
        let b = Vec3::new(0.3, -0.2, 0.9);
        assert_eq!(transform_field(&e0, &b, &rest), b);

        let kin = kinematics_x(1.0, 1.0, &u()).unwrap();
        let bz = Vec3::new(0.0, 0.0, 2.0);
        let s = transform_field(&e0, &bz, &kin);
        assert!((s - bz * kin.gamma).norm() < 1e-15);

        let bx = Vec3::new(2.0, 0.0, 0.0);
        let s = transform_field(&e0, &bx, &kin);
        assert!((s - bx).norm() < 1e-14);
        // 1 − γβ²/(γ+1) = 1/γ
        let g = kin.gamma;
        let b2 = kin.beta.norm_squared();
        assert!((1.0 - g * b2 / (g + 1.0) - 1.0 / g).abs() < 1e-15);
    }

    #[test]
    fn tensor_route_matches_formula() {
        let kin = kinematics(Vec3::new(0.8, 0.3, -0.5), 1.2, &u()).unwrap();
        let e = Vec3::new(0.2, -0.7, 0.4);
        let b = Vec3::new(-0.1, 0.5, 1.1);
        let (_, b_rest) = rest_fields_from_lab(&e, &b, &kin);
        assert!((b_rest - transform_field(&e, &b, &kin)).norm() < 1e-13);

        let (e_lab, b_lab) = lab_fields_from_rest(&Vec3::zeros(), &b, &kin);
        assert!((transform_field(&e_lab, &b_lab, &kin) - b).norm() < 1e-13);
    }

    #[test]
    fn faraday_round_trip_and_conventions() {
        let e = Vec3::new(1.0, 2.0, 3.0);
        let b = Vec3::new(-4.0, 5.0, -6.0);
        for conv in [FieldConvention::SpinCoupling, FieldConvention::Jackson] {
            let f = faraday(&e, &b, conv);
            assert_eq!(f.antisymmetry_residual(), 0.0);
            assert_eq!(f.fields_of(), (e, b));
        }
        assert_eq!(
            faraday(&Vec3::zeros(), &Vec3::zeros(), FieldConvention::FROZEN).components,
            Matrix4::zeros()
        );
        assert!(matches!(
            "gaussian".parse::<FieldConvention>(),
            Err(Error::UnknownConvention(_))
        ));
        assert_eq!("jackson".parse::<FieldConvention>().unwrap(), FieldConvention::Jackson);
    }

    #[test]
    fn levi_civita_signs() {
        assert_eq!(levi_civita([0, 1, 2, 3]), 1.0);
        assert_eq!(levi_civita([1, 0, 2, 3]), -1.0);
        assert_eq!(levi_civita([1, 2, 3, 0]), -1.0);
        assert_eq!(levi_civita([0, 2, 3, 1]), 1.0);
        assert_eq!(levi_civita([0, 0, 2, 3]), 0.0);
    }

    #[test]
    fn gradient_profile() {
        assert!(GradientProfile::new(1.0, 0.0, [0.0, 0.0, 1.0]).is_err());
        assert!(matches!(
            GradientProfile::new(1.0, 1.0, [0.0; 3]),
            Err(Error::ZeroDirection)
        ));
        let f = EMField::gradient(GradientProfile::new(2.0, 0.5, [0.0, 0.0, 3.0]).unwrap());
        let (_, b) = f.at(&Vec3::new(7.0, 1.0, 2.0));
        assert!((b - Vec3::new(0.0, 0.0, 1.0)).norm() < 1e-15);
        assert_eq!(f.derivative(2).1, Vec3::new(0.0, 0.0, -0.5));
    }
}
