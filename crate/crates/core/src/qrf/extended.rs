//! Tripartite form of the frame change, with explicit reference-frame registers.
//!
//! Basis states are `|k_A; σ⟩_{AÃ} |π⟩_C` in the rest frame of A. The
//! transformation first boosts A (with its spin) to momentum `−(m_A/m_C)π`
//! conditional on the laboratory momentum, then brings the laboratory to rest,
//! giving `|−(m_A/m_C)π; Σ_π⟩_{AÃ} |k_C⟩_C`. The inert registers `|k_A⟩`,
//! `|k_C⟩` are unit-dimensional tags. Four-momenta are moved with the boost
//! matrices of [`crate::lorentz`], independently of [`super::SuperposedBoost`].

use nalgebra::Vector4;

use crate::error::{Error, Result};
use crate::lorentz::{boost_matrix, kinematics_x, Vec3};
use crate::matrix::Spinor;
use crate::statekit::{Frame, MomentumGrid1D, SpinorField};

use super::SuperposedBoost;

/// External register of a particle: at rest (inert tag) or with a four-momentum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Register {
    AtRest,
    Moving(Vector4<f64>),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TripartiteTerm {
    pub particle: Register,
    /// Spin amplitudes in the Wigner basis.
    pub spin: Spinor,
    pub lab: Register,
}

/// Superposition of sharp tripartite basis states (desk scale).
#[derive(Clone, Debug, PartialEq)]
pub struct TripartiteState {
    pub terms: Vec<TripartiteTerm>,
}

impl TripartiteState {
    /// Rest-frame state `Σ_j |k_A; χ_j⟩ |π_j⟩` from a rest-frame field on a
    /// discrete grid.
    pub fn from_rest_field(field: &SpinorField) -> Result<Self> {
        if field.frame != Frame::Rest {
            return Err(Error::FrameMismatch {
                expected: Frame::Rest,
                found: field.frame,
            });
        }
        let mc = field.grid.mass() * field.grid.units().c;
        let units = *field.grid.units();
        let terms = field
            .grid
            .points()
            .iter()
            .zip(&field.amplitudes)
            .map(|(&pi, &spin)| {
                let kin = kinematics_x(pi, field.grid.mass(), &units)?;
                debug_assert!((kin.p0 - (mc * mc + pi * pi).sqrt()).abs() < 1e-12);
                Ok(TripartiteTerm {
                    particle: Register::AtRest,
                    spin,
                    lab: Register::Moving(kin.four_momentum()),
                })
            })
            .collect::<Result<_>>()?;
        Ok(TripartiteState { terms })
    }

    /// Drops the inert `|k_C⟩` register, giving the lab description of A on a
    /// discrete grid.
    pub fn drop_inert(&self, mass: f64, units: crate::statekit::UnitSystem) -> Result<SpinorField> {
        let mut pairs: Vec<(f64, Spinor)> = self
            .terms
            .iter()
            .map(|t| match (t.particle, t.lab) {
                (Register::Moving(p), Register::AtRest) => Ok((p[1], t.spin)),
                _ => Err(Error::Geometry(
                    "inert register can only be dropped after the full transformation".into(),
                )),
            })
            .collect::<Result<_>>()?;
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let grid = MomentumGrid1D::discrete(pairs.iter().map(|p| p.0).collect(), mass, units, "A")?;
        SpinorField::new(grid, pairs.into_iter().map(|p| p.1).collect(), Frame::Lab)
    }
}

/// Largest deviation of the lab register from `k_C` and of the particle's
/// four-momentum from its mass shell, after [`apply_s_ext`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExtReport {
    pub lab_rest_residual: f64,
    pub mass_shell_residual: f64,
}

/// `Ŝ_ext = Û_C†(L_{(m_C/m_A)p̂_A}) Û_{AÃ}(L_{−(m_A/m_C)π̂_C})` on sharp terms.
pub fn apply_s_ext(boost: &SuperposedBoost, state: &TripartiteState) -> Result<(TripartiteState, ExtReport)> {
    let units = boost.units;
    let k_a = Vector4::new(boost.m_a * units.c, 0.0, 0.0, 0.0);
    let mut lab_rest_residual: f64 = 0.0;
    let mut mass_shell_residual: f64 = 0.0;
    let terms = state
        .terms
        .iter()
        .map(|t| {
            let (Register::AtRest, Register::Moving(pi4)) = (t.particle, t.lab) else {
                return Err(Error::Geometry("Ŝ_ext acts on |k_A; σ⟩|π⟩ basis states".into()));
            };
            let pi = pi4[1];
            // A: rest momentum boosted to q = −(m_A/m_C)π; L_{−q} maps k_A to q
            let q = -boost.m_a / boost.m_c * pi;
            let to_q = boost_matrix(Vec3::new(-q, 0.0, 0.0), boost.m_a, &units)?;
            let p_a = to_q.apply(&k_a);
            // C: Û_C†(L_{(m_C/m_A)p_A}) with (m_C/m_A)p_A = −π, i.e. L_π, which
            // maps π to k_C
            let ctrl = boost.m_c / boost.m_a * p_a[1];
            let to_rest = boost_matrix(Vec3::new(-ctrl, 0.0, 0.0), boost.m_c, &units)?;
            let k_c = to_rest.apply(&pi4);
            lab_rest_residual = lab_rest_residual
                .max((k_c[0] - boost.m_c * units.c).abs())
                .max(k_c.fixed_rows::<3>(1).amax());
            let shell = p_a[0] * p_a[0] - p_a.fixed_rows::<3>(1).norm_squared();
            mass_shell_residual = mass_shell_residual.max((shell - (boost.m_a * units.c).powi(2)).abs());
            Ok(TripartiteTerm {
                particle: Register::Moving(p_a),
                spin: t.spin,
                lab: Register::AtRest,
            })
        })
        .collect::<Result<_>>()?;
    Ok((
        TripartiteState { terms },
        ExtReport {
            lab_rest_residual,
            mass_shell_residual,
        },
    ))
}

/// Largest disagreement (momentum labels and amplitudes) between the
/// tripartite route with `|k_C⟩` dropped and the compact transform.
pub fn compare_with_compact(boost: &SuperposedBoost, rest: &SpinorField) -> Result<f64> {
    let (ext, _) = apply_s_ext(boost, &TripartiteState::from_rest_field(rest)?)?;
    let via_ext = ext.drop_inert(boost.m_a, boost.units)?;
    let compact = boost.apply(rest)?;
    if via_ext.grid.len() != compact.grid.len() {
        return Err(Error::GridMismatch);
    }
    let mut worst: f64 = 0.0;
    for i in 0..compact.grid.len() {
        worst = worst.max((via_ext.grid.points()[i] - compact.grid.points()[i]).abs());
        for l in 0..2 {
            worst = worst.max((via_ext.amplitudes[i][l] - compact.amplitudes[i][l]).norm());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{bloch_spinor, ONE, ZERO};
    use crate::statekit::UnitSystem;

    #[test]
    fn sharp_basis_action() {
        let u = UnitSystem::default();
        let boost = SuperposedBoost::new(2.0, 3.0, u).unwrap();
        let rest = SpinorField::sharp(1.2, 3.0, [ONE, ZERO], u, Frame::Rest).unwrap();
        let (out, report) = apply_s_ext(&boost, &TripartiteState::from_rest_field(&rest).unwrap()).unwrap();
        let Register::Moving(p) = out.terms[0].particle else {
            panic!()
        };
        assert!((p[1] + 0.8).abs() < 1e-14);
        assert_eq!(out.terms[0].lab, Register::AtRest);
        assert!(report.lab_rest_residual < 1e-13, "{report:?}");
        assert!(report.mass_shell_residual < 1e-13);
    }

    #[test]
    fn zero_momentum_stays_at_rest() {
        let u = UnitSystem::default();
        let boost = SuperposedBoost::new(1.0, 1.0, u).unwrap();
        let rest = SpinorField::sharp(0.0, 1.0, bloch_spinor(0.4, 0.0), u, Frame::Rest).unwrap();
        let (out, _) = apply_s_ext(&boost, &TripartiteState::from_rest_field(&rest).unwrap()).unwrap();
        let Register::Moving(p) = out.terms[0].particle else {
            panic!()
        };
        assert_eq!(p, Vector4::new(1.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn dropping_before_transform_is_rejected() {
        let u = UnitSystem::default();
        let rest = SpinorField::sharp(0.5, 1.0, [ONE, ZERO], u, Frame::Rest).unwrap();
        let state = TripartiteState::from_rest_field(&rest).unwrap();
        assert!(matches!(state.drop_inert(1.0, u), Err(Error::Geometry(_))));
    }
}
