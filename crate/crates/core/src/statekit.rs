//! Discretized one-particle states.
//!
//! Momenta live on a [`MomentumGrid1D`] carrying the Lorentz-covariant
//! measure `dμ(p) = dp / ((2π)^{1/2} √(2(m²c² + p²)))` as trapezoid weights.
//! Spin amplitudes are stored in the rest-spin label (Wigner) basis
//! `{|p; Σ_p(λ)⟩}`, so the spin label of every amplitude is a rest-frame label.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{spinor_dot, Spinor, C64, ZERO};

/// Physical constants threaded through every formula. Natural units by default.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnitSystem {
    pub hbar: f64,
    pub c: f64,
}

impl Default for UnitSystem {
    fn default() -> Self {
        UnitSystem { hbar: 1.0, c: 1.0 }
    }
}

impl UnitSystem {
    pub fn new(hbar: f64, c: f64) -> Result<Self> {
        let units = UnitSystem { hbar, c };
        units.validate()?;
        Ok(units)
    }

    pub fn validate(&self) -> Result<()> {
        positive("hbar", self.hbar)?;
        positive("c", self.c)
    }
}

pub(crate) fn positive(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositive { name, value })
    }
}

/// Whose quantum reference frame a description lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Frame {
    /// Rest frame of particle A: describes the spin and the laboratory C.
    Rest,
    /// Laboratory frame C: describes the momentum and spin of A.
    Lab,
}

impl fmt::Display for Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Frame::Rest => f.write_str("rest frame (A)"),
            Frame::Lab => f.write_str("laboratory frame (C)"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Quadrature {
    /// Trapezoid rule on the covariant measure, endpoints half-weighted.
    Trapezoid,
    /// Unit point masses: each point is a sharp momentum eigenstate.
    Discrete,
}

/// Density of the covariant measure, `1 / ((2π)^{1/2} √(2(m²c² + p²)))`.
pub fn measure_density(p: f64, mass: f64, units: &UnitSystem) -> f64 {
    let mc = mass * units.c;
    1.0 / ((2.0 * PI).sqrt() * (2.0 * (mc * mc + p * p)).sqrt())
}

/// Trapezoid weights for the covariant measure.
pub fn build_measure(points: &[f64], mass: f64, units: &UnitSystem) -> Result<Vec<f64>> {
    check_points(points, 2)?;
    if !(mass > 0.0) {
        return Err(Error::NonPositiveMass(mass));
    }
    let n = points.len();
    Ok((0..n)
        .map(|i| {
            let lo = points[i.saturating_sub(1)];
            let hi = points[(i + 1).min(n - 1)];
            0.5 * (hi - lo) * measure_density(points[i], mass, units)
        })
        .collect())
}

fn check_points(points: &[f64], required: usize) -> Result<()> {
    if points.len() < required {
        return Err(Error::GridTooSmall {
            required,
            found: points.len(),
        });
    }
    for (i, w) in points.windows(2).enumerate() {
        if !(w[1] > w[0]) {
            return Err(Error::NonMonotoneGrid { index: i + 1 });
        }
    }
    Ok(())
}

/// Sampled momentum axis with mass and covariant quadrature weights.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentumGrid1D {
    points: Vec<f64>,
    weights: Vec<f64>,
    mass: f64,
    quadrature: Quadrature,
    units: UnitSystem,
    label: String,
}

impl MomentumGrid1D {
    pub fn trapezoid(points: Vec<f64>, mass: f64, units: UnitSystem, label: &str) -> Result<Self> {
        units.validate()?;
        let weights = build_measure(&points, mass, &units)?;
        Ok(MomentumGrid1D {
            points,
            weights,
            mass,
            quadrature: Quadrature::Trapezoid,
            units,
            label: label.to_string(),
        })
    }

    /// `count` equally spaced points on `[min, max]`.
    pub fn uniform(min: f64, max: f64, count: usize, mass: f64, units: UnitSystem, label: &str) -> Result<Self> {
        if count < 2 {
            return Err(Error::GridTooSmall {
                required: 2,
                found: count,
            });
        }
        let step = (max - min) / (count - 1) as f64;
        let points = (0..count).map(|i| min + step * i as f64).collect();
        Self::trapezoid(points, mass, units, label)
    }

    /// A set of sharp momenta, each carrying unit weight.
    pub fn discrete(points: Vec<f64>, mass: f64, units: UnitSystem, label: &str) -> Result<Self> {
        units.validate()?;
        check_points(&points, 1)?;
        if !(mass > 0.0) {
            return Err(Error::NonPositiveMass(mass));
        }
        Ok(MomentumGrid1D {
            weights: vec![1.0; points.len()],
            points,
            mass,
            quadrature: Quadrature::Discrete,
            units,
            label: label.to_string(),
        })
    }

    pub fn sharp(p: f64, mass: f64, units: UnitSystem, label: &str) -> Result<Self> {
        Self::discrete(vec![p], mass, units, label)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn units(&self) -> &UnitSystem {
        &self.units
    }

    pub fn quadrature(&self) -> Quadrature {
        self.quadrature
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn is_sharp(&self) -> bool {
        self.quadrature == Quadrature::Discrete && self.points.len() == 1
    }

    /// Rebuilds the grid from `(points, mass, units)` with a new label.
    pub fn relabeled(&self, label: &str) -> Self {
        MomentumGrid1D {
            label: label.to_string(),
            ..self.clone()
        }
    }

    /// Grid whose points are `scale·p` for every point `p`, reordered to stay
    /// increasing, with a new mass; weights are recomputed from scratch.
    pub fn mapped(&self, scale: f64, mass: f64, label: &str) -> Result<Self> {
        let mut points: Vec<f64> = self.points.iter().map(|p| scale * p).collect();
        if scale < 0.0 {
            points.reverse();
        }
        match self.quadrature {
            Quadrature::Trapezoid => Self::trapezoid(points, mass, self.units, label),
            Quadrature::Discrete => Self::discrete(points, mass, self.units, label),
        }
    }

    /// Same sampling up to relative rounding `1e-12`.
    pub fn compatible(&self, other: &MomentumGrid1D) -> bool {
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * (1.0 + a.abs().max(b.abs()));
        self.quadrature == other.quadrature
            && self.len() == other.len()
            && close(self.mass, other.mass)
            && self.units == other.units
            && self.points.iter().zip(&other.points).all(|(a, b)| close(*a, *b))
    }

    /// Largest deviation of the stored weights from a fresh rebuild.
    pub fn measure_residual(&self) -> f64 {
        let rebuilt = match self.quadrature {
            Quadrature::Trapezoid => build_measure(&self.points, self.mass, &self.units).expect("grid invariants hold"),
            Quadrature::Discrete => vec![1.0; self.len()],
        };
        rebuilt
            .iter()
            .zip(&self.weights)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Analytic packet shape `(2πs²)^{-1/4} exp(−(p − center)²/(4s²))`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Gaussian {
    pub center: f64,
    pub std: f64,
}

impl Gaussian {
    pub fn new(center: f64, std: f64) -> Result<Self> {
        positive("std", std)?;
        Ok(Gaussian { center, std })
    }

    pub fn eval(&self, p: f64) -> f64 {
        let d = p - self.center;
        (2.0 * PI * self.std * self.std).powf(-0.25) * (-d * d / (4.0 * self.std * self.std)).exp()
    }

    pub fn shifted(&self, by: f64) -> Gaussian {
        Gaussian {
            center: self.center + by,
            std: self.std,
        }
    }
}

/// Samples of the normalized gaussian amplitude at each point.
pub fn gaussian_packet(points: &[f64], center: f64, std: f64) -> Result<Vec<C64>> {
    let g = Gaussian::new(center, std)?;
    Ok(points.iter().map(|&p| C64::new(g.eval(p), 0.0)).collect())
}

/// Uniform nonrelativistic momentum axis (plain `dp` measure).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniformGrid {
    pub min: f64,
    pub step: f64,
    pub count: usize,
}

impl UniformGrid {
    pub fn new(min: f64, max: f64, count: usize) -> Result<Self> {
        if count < 2 {
            return Err(Error::GridTooSmall {
                required: 2,
                found: count,
            });
        }
        if !(max > min) {
            return Err(Error::NonMonotoneGrid { index: 1 });
        }
        Ok(UniformGrid {
            min,
            step: (max - min) / (count - 1) as f64,
            count,
        })
    }

    /// `count` points symmetric about zero, spanning `[−half_width, half_width]`.
    pub fn symmetric(half_width: f64, count: usize) -> Result<Self> {
        Self::new(-half_width, half_width, count)
    }

    pub fn point(&self, k: usize) -> f64 {
        self.min + self.step * k as f64
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.count).map(|k| self.point(k)).collect()
    }

    pub fn max(&self) -> f64 {
        self.point(self.count - 1)
    }
}

/// Transverse (z) momentum wavepacket, nonrelativistic and untouched by the
/// frame change except for its label.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransverseWavepacket {
    pub grid: UniformGrid,
    pub amplitudes: Vec<C64>,
    pub descriptor: Option<Gaussian>,
    pub frame: Frame,
}

impl TransverseWavepacket {
    pub fn gaussian(grid: UniformGrid, center: f64, std: f64, frame: Frame) -> Result<Self> {
        let descriptor = Gaussian::new(center, std)?;
        let amplitudes = gaussian_packet(&grid.points(), center, std)?;
        Ok(TransverseWavepacket {
            grid,
            amplitudes,
            descriptor: Some(descriptor),
            frame,
        })
    }

    pub fn norm(&self) -> f64 {
        (self.grid.step * self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>()).sqrt()
    }

    pub fn inner_product(&self, other: &TransverseWavepacket) -> Result<C64> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum::<C64>()
            * self.grid.step)
    }

    /// Largest deviation of the samples from the analytic descriptor.
    pub fn descriptor_residual(&self) -> Option<f64> {
        let g = self.descriptor?;
        Some(
            self.grid
                .points()
                .iter()
                .zip(&self.amplitudes)
                .map(|(&p, a)| (a - C64::new(g.eval(p), 0.0)).norm())
                .fold(0.0, f64::max),
        )
    }

    pub fn with_frame(&self, frame: Frame) -> Self {
        TransverseWavepacket { frame, ..self.clone() }
    }
}

/// Two-component amplitude per momentum sample.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpinorField {
    pub grid: MomentumGrid1D,
    pub amplitudes: Vec<Spinor>,
    pub frame: Frame,
    pub zpart: Option<TransverseWavepacket>,
}

impl SpinorField {
    pub fn new(grid: MomentumGrid1D, amplitudes: Vec<Spinor>, frame: Frame) -> Result<Self> {
        if amplitudes.len() != grid.len() {
            return Err(Error::AmplitudeLength {
                expected: 2 * grid.len(),
                found: 2 * amplitudes.len(),
            });
        }
        Ok(SpinorField {
            grid,
            amplitudes,
            frame,
            zpart: None,
        })
    }

    /// Flat `[c_0(p_0), c_1(p_0), c_0(p_1), …]` layout.
    pub fn from_flat(grid: MomentumGrid1D, flat: &[C64], frame: Frame) -> Result<Self> {
        if flat.len() != 2 * grid.len() {
            return Err(Error::AmplitudeLength {
                expected: 2 * grid.len(),
                found: flat.len(),
            });
        }
        let amplitudes = flat.chunks(2).map(|c| [c[0], c[1]]).collect();
        Self::new(grid, amplitudes, frame)
    }

    /// `spin ⊗ wavefunction`.
    pub fn product(grid: MomentumGrid1D, spin: Spinor, wavefunction: &[C64], frame: Frame) -> Result<Self> {
        let amplitudes = wavefunction.iter().map(|&a| [spin[0] * a, spin[1] * a]).collect();
        Self::new(grid, amplitudes, frame)
    }

    /// A sharp state `|p⟩ ⊗ |spin⟩` with unit weight.
    pub fn sharp(p: f64, mass: f64, spin: Spinor, units: UnitSystem, frame: Frame) -> Result<Self> {
        let grid = MomentumGrid1D::sharp(p, mass, units, "sharp")?;
        Self::new(grid, vec![spin], frame)
    }

    pub fn with_zpart(mut self, zpart: TransverseWavepacket) -> Self {
        self.zpart = Some(zpart);
        self
    }

    pub fn zeros_like(&self) -> Self {
        SpinorField {
            amplitudes: vec![[ZERO; 2]; self.grid.len()],
            ..self.clone()
        }
    }

    pub fn norm(&self) -> f64 {
        self.grid
            .weights()
            .iter()
            .zip(&self.amplitudes)
            .map(|(w, c)| w * (c[0].norm_sqr() + c[1].norm_sqr()))
            .sum::<f64>()
            .sqrt()
    }

    pub fn check_compatible(&self, other: &SpinorField) -> Result<()> {
        if self.frame != other.frame {
            return Err(Error::FrameMismatch {
                expected: self.frame,
                found: other.frame,
            });
        }
        if !self.grid.compatible(&other.grid) {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    /// `⟨self|other⟩` under the grid quadrature.
    pub fn inner_product(&self, other: &SpinorField) -> Result<C64> {
        self.check_compatible(other)?;
        Ok(self
            .grid
            .weights()
            .iter()
            .zip(self.amplitudes.iter().zip(&other.amplitudes))
            .map(|(w, (a, b))| spinor_dot(a, b) * *w)
            .sum())
    }

    pub fn normalize(&self) -> Result<Self> {
        let n = self.norm();
        if !(n > 0.0) {
            return Err(Error::ZeroState);
        }
        Ok(self.scaled(C64::new(1.0 / n, 0.0)))
    }

    pub fn scaled(&self, k: C64) -> Self {
        SpinorField {
            amplitudes: self.amplitudes.iter().map(|c| [c[0] * k, c[1] * k]).collect(),
            ..self.clone()
        }
    }

    pub fn add(&self, other: &SpinorField) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(SpinorField {
            amplitudes: self
                .amplitudes
                .iter()
                .zip(&other.amplitudes)
                .map(|(a, b)| [a[0] + b[0], a[1] + b[1]])
                .collect(),
            ..self.clone()
        })
    }

    pub fn require_normalized(&self, tol: f64) -> Result<()> {
        let norm = self.norm();
        if (norm - 1.0).abs() > tol {
            return Err(Error::NotNormalized { norm });
        }
        Ok(())
    }

    /// Reduced spin density matrix `Σ_i w_i c(p_i) c(p_i)†`.
    pub fn spin_density_matrix(&self) -> crate::matrix::Mat2 {
        let mut rho = [[ZERO; 2]; 2];
        for (w, c) in self.grid.weights().iter().zip(&self.amplitudes) {
            for a in 0..2 {
                for b in 0..2 {
                    rho[a][b] += c[a] * c[b].conj() * *w;
                }
            }
        }
        crate::matrix::Mat2(rho)
    }

    /// Squared distance `‖a − b‖²` between compatible fields.
    pub fn distance(&self, other: &SpinorField) -> Result<f64> {
        self.check_compatible(other)?;
        Ok(self
            .grid
            .weights()
            .iter()
            .zip(self.amplitudes.iter().zip(&other.amplitudes))
            .map(|(w, (a, b))| w * ((a[0] - b[0]).norm_sqr() + (a[1] - b[1]).norm_sqr()))
            .sum::<f64>()
            .sqrt())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::ONE;

    fn units() -> UnitSystem {
        UnitSystem::default()
    }

    #[test]
    fn measure_density_at_rest() {
        // hand evaluation: 1/((2π)^{1/2} √2)
        let expected = 1.0 / ((2.0 * PI).sqrt() * 2f64.sqrt());
        assert!((measure_density(0.0, 1.0, &units()) - expected).abs() < 1e-16);
        let w = build_measure(&[-1.0, 0.0, 1.0], 1.0, &units()).unwrap();
        assert!((w[1] - expected).abs() < 1e-16);
        assert!((w[0] - 0.5 * measure_density(-1.0, 1.0, &units())).abs() < 1e-16);
    }

    #[test]
    fn heavy_mass_flattens_measure() {
        let m = 1e8;
        let flat = 1.0 / ((2.0 * PI).sqrt() * 2f64.sqrt() * m);
        for p in [-3.0, 0.0, 2.5] {
            assert!((measure_density(p, m, &units()) / flat - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn measure_errors() {
        assert!(matches!(
            build_measure(&[0.0, 1.0, 0.5], 1.0, &units()),
            Err(Error::NonMonotoneGrid { index: 2 })
        ));
        assert!(matches!(
            build_measure(&[0.0, 1.0], 0.0, &units()),
            Err(Error::NonPositiveMass(_))
        ));
        assert!(UnitSystem::new(1.0, -1.0).is_err());
    }

    #[test]
    fn gaussian_packet_values() {
        let s = 0.7;
        let g = gaussian_packet(&[0.0, -1.3, 1.3], 0.0, s).unwrap();
        assert!((g[0].re - (2.0 * PI * s * s).powf(-0.25)).abs() < 1e-15);
        assert_eq!(g[1], g[2]);
        assert!(matches!(
            gaussian_packet(&[0.0], 0.0, 0.0),
            Err(Error::NonPositive { .. })
        ));
    }

    #[test]
    fn gaussian_packet_is_normalized_under_dp() {
        let s = 1.3;
        // independent oracle: composite Simpson on ±8s with 2001 points
        let n = 2000;
        let h = 16.0 * s / n as f64;
        let f = |p: f64| Gaussian { center: 0.0, std: s }.eval(p).powi(2);
        let mut acc = f(-8.0 * s) + f(8.0 * s);
        for k in 1..n {
            let p = -8.0 * s + h * k as f64;
            acc += if k % 2 == 1 { 4.0 } else { 2.0 } * f(p);
        }
        assert!((acc * h / 3.0 - 1.0).abs() < 1e-6);

        let packet =
            TransverseWavepacket::gaussian(UniformGrid::symmetric(8.0 * s, 401).unwrap(), 0.0, s, Frame::Lab).unwrap();
        assert!((packet.norm() - 1.0).abs() < 1e-6);
        assert!(packet.descriptor_residual().unwrap() < 1e-12);
    }

    #[test]
    fn two_point_sharp_superposition() {
        // hand quadrature: each endpoint carries half the cell width times the density
        let grid = MomentumGrid1D::trapezoid(vec![-0.5, 0.5], 2.0, units(), "two").unwrap();
        let amps: Vec<Spinor> = grid
            .weights()
            .iter()
            .map(|w| [C64::new(1.0 / (2.0 * w).sqrt(), 0.0), ZERO])
            .collect();
        let field = SpinorField::new(grid, amps, Frame::Lab).unwrap();
        assert!((field.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn normalize_and_mismatch() {
        let grid = MomentumGrid1D::uniform(-4.0, 4.0, 65, 1.0, units(), "c").unwrap();
        let psi = gaussian_packet(grid.points(), 0.0, 0.8).unwrap();
        let field = SpinorField::product(grid.clone(), [ONE, ONE], &psi, Frame::Rest).unwrap();
        let doubled = field.scaled(C64::new(2.0, 0.0)).normalize().unwrap();
        assert!((doubled.norm() - 1.0).abs() < 1e-14);
        assert!(matches!(field.zeros_like().normalize(), Err(Error::ZeroState)));

        let lab = SpinorField {
            frame: Frame::Lab,
            ..field.clone()
        };
        assert!(matches!(field.inner_product(&lab), Err(Error::FrameMismatch { .. })));
        let other = MomentumGrid1D::uniform(-4.0, 4.0, 33, 1.0, units(), "c").unwrap();
        let short = SpinorField::product(other, [ONE, ZERO], &vec![ONE; 33], Frame::Rest).unwrap();
        assert!(matches!(field.inner_product(&short), Err(Error::GridMismatch)));
        assert!(SpinorField::new(field.grid.clone(), vec![[ONE, ONE]; 3], Frame::Rest).is_err());
    }

    #[test]
    fn refinement_changes_norm_little() {
        let g = Gaussian::new(0.3, 0.9).unwrap();
        let norm_on = |count: usize| {
            let grid = MomentumGrid1D::uniform(-8.0, 8.0, count, 1.5, units(), "r").unwrap();
            let psi: Vec<C64> = grid.points().iter().map(|&p| C64::new(g.eval(p), 0.0)).collect();
            SpinorField::product(grid, [ONE, ZERO], &psi, Frame::Rest)
                .unwrap()
                .norm()
        };
        assert!((norm_on(129) - norm_on(257)).abs() < 1e-6);
    }
}
