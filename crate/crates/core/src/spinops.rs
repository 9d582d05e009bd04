//! Momentum-dependent spin operator fields.
//!
//! All fields act on spinor amplitudes in the Wigner basis. In that basis the
//! Pauli-Lubański components `Σ^μ_p` are momentum-dependent combinations of
//! Pauli matrices, while the relativistic spin `Ξ` collapses to `σ` at every
//! momentum. Both routes to `Ξ` are implemented so the collapse can be checked.
//!
//! Operators use Pauli normalization: eigenvalues are `±1` and the algebra reads
//! `[Ξ_i, Ξ_j] = 2i ε_{ijk} Ξ_k`. Multiply by `ħ/2` (see [`spin_half`]) for
//! `[S_i, S_j] = iħ ε_{ijk} S_k`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lorentz::{boost_matrix, kinematics, Kinematics, Vec3};
use crate::matrix::{spinor_dot, Mat2, I};
use crate::statekit::{Frame, MomentumGrid1D, SpinorField, UnitSystem};

const HERMITIAN_TOL: f64 = 1e-13;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }

    pub fn pauli(self) -> Mat2 {
        match self {
            Axis::X => Mat2::sigma_x(),
            Axis::Y => Mat2::sigma_y(),
            Axis::Z => Mat2::sigma_z(),
        }
    }
}

impl FromStr for Axis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "x" | "X" => Ok(Axis::X),
            "y" | "Y" => Ok(Axis::Y),
            "z" | "Z" => Ok(Axis::Z),
            other => Err(Error::InvalidAxis(other.to_string())),
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(["x", "y", "z"][self.index()])
    }
}

/// `(σ_x, σ_y, σ_z)`.
pub fn pauli_vector() -> [Mat2; 3] {
    [Mat2::sigma_x(), Mat2::sigma_y(), Mat2::sigma_z()]
}

/// `Σ_k v_k σ_k` for a real 3-vector.
pub fn dot_sigma(v: &Vec3) -> Mat2 {
    Mat2::from_pauli(0.0, [v.x, v.y, v.z])
}

/// Hermitian 2×2 matrix per grid point.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorField {
    grid: MomentumGrid1D,
    frame: Frame,
    label: String,
    matrices: Vec<Mat2>,
}

impl OperatorField {
    /// Symmetrizes each matrix after checking its anti-Hermitian residual is
    /// below `1e-13` relative to its size.
    pub fn new(grid: MomentumGrid1D, frame: Frame, label: &str, matrices: Vec<Mat2>) -> Result<Self> {
        if matrices.len() != grid.len() {
            return Err(Error::AmplitudeLength {
                expected: grid.len(),
                found: matrices.len(),
            });
        }
        let mut out = Vec::with_capacity(matrices.len());
        for m in matrices {
            let residual = m.hermitian_residual();
            if residual > HERMITIAN_TOL * m.norm().max(1.0) {
                return Err(Error::NonHermitian { residual });
            }
            out.push(m.hermitian_part());
        }
        Ok(OperatorField {
            grid,
            frame,
            label: label.to_string(),
            matrices: out,
        })
    }

    pub fn from_fn(grid: &MomentumGrid1D, frame: Frame, label: &str, f: impl Fn(f64) -> Mat2) -> Result<Self> {
        let matrices = grid.points().iter().map(|&p| f(p)).collect();
        Self::new(grid.clone(), frame, label, matrices)
    }

    pub fn constant(grid: &MomentumGrid1D, frame: Frame, label: &str, m: Mat2) -> Result<Self> {
        Self::from_fn(grid, frame, label, |_| m)
    }

    pub fn grid(&self) -> &MomentumGrid1D {
        &self.grid
    }

    pub fn frame(&self) -> Frame {
        self.frame
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn matrices(&self) -> &[Mat2] {
        &self.matrices
    }

    pub fn at(&self, i: usize) -> Mat2 {
        self.matrices[i]
    }

    /// Pointwise scaling by a real function of the momentum.
    pub fn scaled_by(&self, label: &str, f: impl Fn(f64) -> f64) -> Self {
        OperatorField {
            label: label.to_string(),
            matrices: self
                .grid
                .points()
                .iter()
                .zip(&self.matrices)
                .map(|(&p, m)| m.scale_re(f(p)))
                .collect(),
            ..self.clone()
        }
    }

    /// Largest pointwise Frobenius distance to another field on the same grid.
    pub fn max_distance(&self, other: &OperatorField) -> Result<f64> {
        if !self.grid.compatible(&other.grid) {
            return Err(Error::GridMismatch);
        }
        Ok(self
            .matrices
            .iter()
            .zip(&other.matrices)
            .map(|(a, b)| (*a - *b).norm())
            .fold(0.0, f64::max))
    }

    fn check_state(&self, state: &SpinorField) -> Result<()> {
        if state.frame != self.frame {
            return Err(Error::FrameMismatch {
                expected: self.frame,
                found: state.frame,
            });
        }
        if !self.grid.compatible(&state.grid) {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    /// `(Oψ)_λ(p_i) = Σ_μ O(p_i)_{λμ} c_μ(p_i)`.
    pub fn apply(&self, state: &SpinorField) -> Result<SpinorField> {
        self.check_state(state)?;
        Ok(SpinorField {
            amplitudes: self
                .matrices
                .iter()
                .zip(&state.amplitudes)
                .map(|(m, c)| m.apply(c))
                .collect(),
            ..state.clone()
        })
    }

    /// `Σ_i w_i c†(p_i) O(p_i) c(p_i)` for a normalized state.
    pub fn expectation(&self, state: &SpinorField) -> Result<f64> {
        self.check_state(state)?;
        state.require_normalized(1e-9)?;
        let total: crate::matrix::C64 = state
            .grid
            .weights()
            .iter()
            .zip(self.matrices.iter().zip(&state.amplitudes))
            .map(|(w, (m, c))| spinor_dot(c, &m.apply(c)) * *w)
            .sum();
        Ok(total.re)
    }
}

/// Constant Pauli field.
pub fn pauli(axis: &str, grid: &MomentumGrid1D, frame: Frame) -> Result<OperatorField> {
    let axis: Axis = axis.parse()?;
    OperatorField::constant(grid, frame, &format!("sigma_{axis}"), axis.pauli())
}

/// `(Σ⁰, Σ_x, Σ_y, Σ_z)` at a general momentum:
/// `Σ⁰ = γ β⃗·σ⃗`, `Σ⃗ = σ⃗ + (γ²/(γ+1)) (β⃗·σ⃗) β⃗`.
pub fn pauli_lubanski_at(kin: &Kinematics) -> [Mat2; 4] {
    let g = kin.gamma;
    let beta = kin.beta;
    let beta_sigma = dot_sigma(&beta);
    let sigma = pauli_vector();
    let k = g * g / (g + 1.0);
    [
        beta_sigma.scale_re(g),
        sigma[0] + beta_sigma.scale_re(k * beta.x),
        sigma[1] + beta_sigma.scale_re(k * beta.y),
        sigma[2] + beta_sigma.scale_re(k * beta.z),
    ]
}

/// `Σ^μ = (L_{−p})^μ_ν σ^ν` with `σ^ν = (0, σ⃗)`, built from the boost matrix.
pub fn pauli_lubanski_from_boost(kin: &Kinematics) -> [Mat2; 4] {
    let l = boost_matrix(-kin.momentum, kin.mass, &kin.units).expect("valid kinematics");
    let sigma = pauli_vector();
    let mut out = [Mat2::zero(); 4];
    for (mu, slot) in out.iter_mut().enumerate() {
        *slot = (0..3).map(|j| sigma[j].scale_re(l.matrix[(mu, j + 1)])).sum();
    }
    out
}

/// Pauli-Lubański fields on a grid of momenta along `x`.
pub fn pauli_lubanski(grid: &MomentumGrid1D) -> Result<[OperatorField; 4]> {
    let units = *grid.units();
    let mass = grid.mass();
    let at: Vec<[Mat2; 4]> = grid
        .points()
        .iter()
        .map(|&p| kinematics(Vec3::new(p, 0.0, 0.0), mass, &units).map(|k| pauli_lubanski_at(&k)))
        .collect::<Result<_>>()?;
    let build = |mu: usize, label: &str| {
        OperatorField::new(grid.clone(), Frame::Lab, label, at.iter().map(|s| s[mu]).collect())
    };
    Ok([
        build(0, "Sigma_0")?,
        build(1, "Sigma_x")?,
        build(2, "Sigma_y")?,
        build(3, "Sigma_z")?,
    ])
}

/// `Ξ⃗ = Σ⃗ − (γ/(γ+1)) (Σ⃗·β⃗) β⃗` from the Pauli-Lubański components.
pub fn xi_at(kin: &Kinematics) -> [Mat2; 3] {
    let sigma = pauli_lubanski_at(kin);
    let g = kin.gamma;
    let beta = kin.beta;
    let sigma_dot_beta: Mat2 = (0..3).map(|i| sigma[i + 1].scale_re(beta[i])).sum();
    let k = g / (g + 1.0);
    [
        sigma[1] - sigma_dot_beta.scale_re(k * beta.x),
        sigma[2] - sigma_dot_beta.scale_re(k * beta.y),
        sigma[3] - sigma_dot_beta.scale_re(k * beta.z),
    ]
}

/// `Ξ^i = (L_p)^i_μ Σ^μ`.
pub fn xi_from_boost(kin: &Kinematics) -> [Mat2; 3] {
    let l = boost_matrix(kin.momentum, kin.mass, &kin.units).expect("valid kinematics");
    let sigma = pauli_lubanski_at(kin);
    let mut out = [Mat2::zero(); 3];
    for (i, slot) in out.iter_mut().enumerate() {
        *slot = (0..4).map(|mu| sigma[mu].scale_re(l.matrix[(i + 1, mu)])).sum();
    }
    out
}

/// `p_μ Σ^μ = p⁰Σ⁰ − p⃗·Σ⃗`.
pub fn covariant_constraint_at(kin: &Kinematics) -> Mat2 {
    let s = pauli_lubanski_at(kin);
    let p = kin.momentum;
    s[0].scale_re(kin.p0) - s[1].scale_re(p.x) - s[2].scale_re(p.y) - s[3].scale_re(p.z)
}

/// Relativistic spin field from the covariant formula.
pub fn xi_field(grid: &MomentumGrid1D, axis: Axis) -> Result<OperatorField> {
    let units = *grid.units();
    let mass = grid.mass();
    let matrices = grid
        .points()
        .iter()
        .map(|&p| kinematics(Vec3::new(p, 0.0, 0.0), mass, &units).map(|k| xi_at(&k)[axis.index()]))
        .collect::<Result<_>>()?;
    OperatorField::new(grid.clone(), Frame::Lab, &format!("Xi_{axis}"), matrices)
}

/// Relativistic spin field from its basis action `Ξ_i Ŝ_L|λ⟩|π⟩ = Ŝ_L σ_i|λ⟩|π⟩`,
/// which in the Wigner basis is the constant Pauli matrix.
pub fn xi_field_wigner(grid: &MomentumGrid1D, axis: Axis) -> Result<OperatorField> {
    OperatorField::constant(grid, Frame::Lab, &format!("Xi_{axis}"), axis.pauli())
}

/// Largest pointwise distance between the two constructions of `Ξ`.
pub fn xi_construction_residual(grid: &MomentumGrid1D) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for axis in Axis::ALL {
        worst = worst.max(xi_field(grid, axis)?.max_distance(&xi_field_wigner(grid, axis)?)?);
    }
    Ok(worst)
}

/// `max_{i,j,k} ‖[A_i, A_j] − 2i ε_{ijk} A_k‖` for a Pauli-normalized triple.
pub fn su2_residual(ops: &[Mat2; 3]) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, j, k) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
        let r = ops[i].commutator(&ops[j]) - ops[k].scale(I * 2.0);
        worst = worst.max(r.norm());
    }
    worst
}

/// Largest deviation of the eigenvalues from `±1`.
pub fn unit_spectrum_residual(m: &Mat2) -> f64 {
    let (vals, _) = m.eigh();
    (vals[0] + 1.0).abs().max((vals[1] - 1.0).abs())
}

/// Spin-½ normalization `S = (ħ/2) σ`.
pub fn spin_half(m: &Mat2, units: &UnitSystem) -> Mat2 {
    m.scale_re(0.5 * units.hbar)
}

/// The lab-frame encoding subspaces of `Ξ_z`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Subspace {
    /// `Ξ_z = +1`.
    H0,
    /// `Ξ_z = −1`.
    H1,
    Neither,
}

/// Classifies a normalized lab state by the eigenstate residual `‖Ξ_z ψ ∓ ψ‖`.
pub fn classify_subspace(lab_state: &SpinorField, tol: f64) -> Result<Subspace> {
    lab_state.require_normalized(1e-9)?;
    let xi_z = xi_field(&lab_state.grid, Axis::Z)?;
    let image = xi_z.apply(lab_state)?;
    if image.distance(lab_state)? < tol {
        Ok(Subspace::H0)
    } else if image.distance(&lab_state.scaled(crate::matrix::C64::new(-1.0, 0.0)))? < tol {
        Ok(Subspace::H1)
    } else {
        Ok(Subspace::Neither)
    }
}
