//! Nonrelativistic frame change between C and A for a third system B.
//!
//! Positions live on a symmetric lattice `x_k = kΔ`, `k = −K..=K`, and each
//! lattice point is a basis ket. C describes `(x_A, x_B)`; A describes
//! `(q_B, q_C)`. The frame change `Ŝ_x = 𝒫_AC e^{(i/ħ) x̂_A p̂_B}` is a
//! controlled translation followed by a parity swap:
//! `|x_A⟩|x_B⟩ ↦ |x_B − x_A⟩_B |−x_A⟩_C`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::matrix::{C64, ZERO};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Lattice {
    pub spacing: f64,
    pub half_count: usize,
}

impl Lattice {
    pub fn new(spacing: f64, half_count: usize) -> Result<Self> {
        crate::statekit::positive("spacing", spacing)?;
        Ok(Lattice { spacing, half_count })
    }

    pub fn len(&self) -> usize {
        2 * self.half_count + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn position(&self, index: usize) -> f64 {
        (index as f64 - self.half_count as f64) * self.spacing
    }

    pub fn index_of(&self, x: f64) -> Result<usize> {
        let k = x / self.spacing;
        let rounded = k.round();
        if (k - rounded).abs() > 1e-9 || rounded.abs() > self.half_count as f64 {
            return Err(Error::OffLattice(x));
        }
        Ok((rounded as i64 + self.half_count as i64) as usize)
    }

    /// Index of `x_a ± x_b` by offset arithmetic, `None` when off the lattice.
    fn offset(&self, index: usize, shift: i64) -> Option<usize> {
        let k = index as i64 + shift;
        (0..self.len() as i64).contains(&k).then_some(k as usize)
    }

    fn signed(&self, index: usize) -> i64 {
        index as i64 - self.half_count as i64
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GalileanFrame {
    /// Registers `(x_A, x_B)`.
    C,
    /// Registers `(q_B, q_C)`.
    A,
}

/// Joint position amplitudes of two registers.
#[derive(Clone, Debug, PartialEq)]
pub struct GalileanTwoParticleState {
    pub lattice: Lattice,
    /// Rows index the first register, columns the second.
    pub amplitudes: DMatrix<C64>,
    pub frame: GalileanFrame,
}

impl GalileanTwoParticleState {
    /// Superposition of sharp position pairs, normalized.
    pub fn from_terms(lattice: Lattice, frame: GalileanFrame, terms: &[(f64, f64, C64)]) -> Result<Self> {
        let n = lattice.len();
        let mut amplitudes = DMatrix::from_element(n, n, ZERO);
        for &(x1, x2, a) in terms {
            amplitudes[(lattice.index_of(x1)?, lattice.index_of(x2)?)] += a;
        }
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) {
            return Err(Error::ZeroState);
        }
        amplitudes /= C64::new(norm, 0.0);
        Ok(GalileanTwoParticleState {
            lattice,
            amplitudes,
            frame,
        })
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    fn require_normalized(&self) -> Result<()> {
        let norm = self.norm();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::NotNormalized { norm });
        }
        Ok(())
    }

    /// Amplitude at a pair of positions (zero off the lattice).
    pub fn amplitude(&self, x1: f64, x2: f64) -> C64 {
        match (self.lattice.index_of(x1), self.lattice.index_of(x2)) {
            (Ok(i), Ok(j)) => self.amplitudes[(i, j)],
            _ => ZERO,
        }
    }

    fn remap(&self, frame: GalileanFrame, map: impl Fn(i64, i64) -> (i64, i64)) -> Result<Self> {
        let n = self.lattice.len();
        let k = self.lattice.half_count as i64;
        let mut out = DMatrix::from_element(n, n, ZERO);
        let mut clipped = 0;
        for i in 0..n {
            for j in 0..n {
                let a = self.amplitudes[(i, j)];
                if a == ZERO {
                    continue;
                }
                let (s1, s2) = map(self.lattice.signed(i), self.lattice.signed(j));
                match (self.lattice.offset(k as usize, s1), self.lattice.offset(k as usize, s2)) {
                    (Some(r), Some(c)) => out[(r, c)] = a,
                    _ => clipped += 1,
                }
            }
        }
        if clipped > 0 {
            return Err(Error::Clipping { clipped });
        }
        Ok(GalileanTwoParticleState {
            lattice: self.lattice,
            amplitudes: out,
            frame,
        })
    }
}

/// `Ŝ_x`: from C's description `(x_A, x_B)` to A's `(q_B, q_C) = (x_B − x_A, −x_A)`.
pub fn galilean_transform(state: &GalileanTwoParticleState) -> Result<GalileanTwoParticleState> {
    if state.frame != GalileanFrame::C {
        return Err(Error::Geometry("Ŝ_x acts on the description relative to C".into()));
    }
    state.require_normalized()?;
    state.remap(GalileanFrame::A, |a, b| (b - a, -a))
}

/// `Ŝ_x†`: `(q_B, q_C) ↦ (x_A, x_B) = (−q_C, q_B − q_C)`.
pub fn galilean_inverse(state: &GalileanTwoParticleState) -> Result<GalileanTwoParticleState> {
    if state.frame != GalileanFrame::A {
        return Err(Error::Geometry("Ŝ_x† acts on the description relative to A".into()));
    }
    state.require_normalized()?;
    state.remap(GalileanFrame::C, |qb, qc| (-qc, qb - qc))
}

/// Von Neumann entropy of either register's reduced state.
pub fn entanglement_entropy(state: &GalileanTwoParticleState) -> Result<f64> {
    state.require_normalized()?;
    let svd = state.amplitudes.clone().svd(false, false);
    Ok(svd
        .singular_values
        .iter()
        .map(|s| s * s)
        .filter(|&p| p > 1e-300)
        .map(|p| -p * p.ln())
        .sum())
}

/// `(p_before, p_after)` for a diagonal position projector given in C's
/// registers, evaluated on the state and on its transform with the
/// transformed projector `Ŝ_x O Ŝ_x†`.
pub fn probability_report(
    state: &GalileanTwoParticleState,
    projector: impl Fn(f64, f64) -> bool,
) -> Result<(f64, f64)> {
    let transformed = galilean_transform(state)?;
    let lattice = state.lattice;
    let n = lattice.len();
    let mut before = 0.0;
    let mut after = 0.0;
    for i in 0..n {
        for j in 0..n {
            let (x1, x2) = (lattice.position(i), lattice.position(j));
            if projector(x1, x2) {
                before += state.amplitudes[(i, j)].norm_sqr();
            }
            // in A's registers (q_B, q_C) = (x1, x2) the projector reads O(−q_C, q_B − q_C)
            if projector(-x2, x1 - x2) {
                after += transformed.amplitudes[(i, j)].norm_sqr();
            }
        }
    }
    Ok((before, after))
}
