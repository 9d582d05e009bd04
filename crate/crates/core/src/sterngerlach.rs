//! Relativistic Stern-Gerlach experiment.
//!
//! The rest-frame coupling is `H^(A) = μ B⃗^(A)·σ⃗`. In the laboratory the
//! particle moves along `x` in a superposition of momenta and the coupling
//! becomes `H^(C) = μ γ⁻¹ S⃗_Λ(E, B)·Ξ⃗`, where `S⃗_Λ` is the field in the
//! particle's rest frame. With `Ξ⃗ = σ⃗` in the Wigner basis and `t_C = γ t_A`,
//! both descriptions produce the same splitting along the gradient axis `n̂`.
//!
//! The transverse evolution is done in the interaction picture without free
//! kinetic terms: branch `±` of `n̂·Ξ⃗` picks up the phase `e^{∓iμB⁰t/ħ}` and
//! has its transverse momentum shifted by `±p*`, `p* = αμt/ħ`.

use std::f64::consts::PI;

use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lorentz::{
    faraday, kinematics, kinematics_x, lab_fields_from_rest, levi_civita, transform_field, EMField, FaradayTensor,
    FieldConvention, GradientProfile, Kinematics, Vec3,
};
use crate::matrix::{spinor_dot, Mat2, Spinor, C64, ZERO};
use crate::qrf::SuperposedBoost;
use crate::spinops::{dot_sigma, pauli_lubanski, xi_at, OperatorField};
use crate::statekit::{positive, Frame, Gaussian, MomentumGrid1D, SpinorField, UniformGrid, UnitSystem};

/// Largest tolerated norm lost off the edges of the transverse grid.
pub const CLIPPING_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZGridSpec {
    pub half_width: f64,
    pub count: usize,
}

/// One Stern-Gerlach run. `t` is laboratory time; `p_x` is the reference
/// x-momentum of A (center of its packet) in the laboratory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SternGerlachConfig {
    pub theta: f64,
    pub mu: f64,
    pub b0: f64,
    pub alpha: f64,
    pub s_z: f64,
    pub t: f64,
    pub n_hat: [f64; 3],
    pub m_a: f64,
    pub m_c: f64,
    pub p_x: f64,
    pub units: UnitSystem,
    pub z_grid: Option<ZGridSpec>,
    /// Allows `n̂` not orthogonal to the boost axis (deflection check only).
    pub exploratory: bool,
}

impl SternGerlachConfig {
    /// Main-text geometry with natural units and unit masses.
    pub fn new(theta: f64, mu: f64, b0: f64, alpha: f64, s_z: f64, t: f64) -> Self {
        SternGerlachConfig {
            theta,
            mu,
            b0,
            alpha,
            s_z,
            t,
            n_hat: [0.0, 0.0, 1.0],
            m_a: 1.0,
            m_c: 1.0,
            p_x: 0.0,
            units: UnitSystem::default(),
            z_grid: None,
            exploratory: false,
        }
    }

    /// `ħ s_z / (αμ)`, the time after which the branches separate.
    pub fn separation_time(&self) -> f64 {
        self.units.hbar * self.s_z / (self.alpha * self.mu)
    }

    pub fn p_star(&self) -> f64 {
        self.alpha * self.mu * self.t / self.units.hbar
    }

    /// Checks the invariants and returns the normalized `n̂`.
    pub fn validate(&self) -> Result<Vec3> {
        positive("alpha", self.alpha)?;
        positive("s_z", self.s_z)?;
        positive("mu", self.mu)?;
        positive("m_a", self.m_a)?;
        positive("m_c", self.m_c)?;
        self.units.validate()?;
        if !(self.t >= 0.0 && self.t.is_finite()) {
            return Err(Error::InvalidConfig {
                field: "t".into(),
                reason: format!("must be finite and non-negative, got {}", self.t),
            });
        }
        if !self.b0.is_finite() || !self.theta.is_finite() || !self.p_x.is_finite() {
            return Err(Error::InvalidConfig {
                field: "theta/b0/p_x".into(),
                reason: "must be finite".into(),
            });
        }
        let n = Vec3::from(self.n_hat);
        if !(n.norm() > 0.0) {
            return Err(Error::ZeroDirection);
        }
        let n = n.normalize();
        if n.x.abs() > 1e-12 && !self.exploratory {
            return Err(Error::Geometry(
                "n_hat must be orthogonal to the boost axis x unless exploratory = true".into(),
            ));
        }
        Ok(n)
    }

    fn grid(&self) -> Result<UniformGrid> {
        match self.z_grid {
            Some(spec) => {
                positive("z_grid.half_width", spec.half_width)?;
                UniformGrid::symmetric(spec.half_width, spec.count)
            }
            None => UniformGrid::symmetric(self.p_star().abs() + 12.0 * self.s_z, 512),
        }
    }
}

/// Rest-frame coupling `μB n̂·σ⃗` plus the linear profile along `n̂`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RestHamiltonian {
    pub spin: Mat2,
    pub direction: Vec3,
    pub strength: f64,
    pub mu: f64,
}

pub fn rest_hamiltonian(b: f64, n_hat: [f64; 3], mu: f64) -> Result<RestHamiltonian> {
    let n = Vec3::from(n_hat);
    if !(n.norm() > 0.0) {
        return Err(Error::ZeroDirection);
    }
    let n = n.normalize();
    Ok(RestHamiltonian {
        spin: dot_sigma(&n).scale_re(mu * b),
        direction: n,
        strength: b,
        mu,
    })
}

impl RestHamiltonian {
    /// `μ(B − α r·n̂) n̂·σ⃗` at position `r`.
    pub fn at_position(&self, alpha: f64, r: &Vec3) -> Mat2 {
        dot_sigma(&self.direction).scale_re(self.mu * (self.strength - alpha * r.dot(&self.direction)))
    }

    pub fn on_grid(&self, grid: &MomentumGrid1D) -> Result<OperatorField> {
        OperatorField::constant(grid, Frame::Rest, "H_A", self.spin)
    }
}

/// Coupling vector `μ γ⁻¹ S⃗_Λ` at one momentum.
fn lab_coupling(e: &Vec3, b: &Vec3, kin: &Kinematics, mu: f64) -> Vec3 {
    transform_field(e, b, kin) * (mu / kin.gamma)
}

/// `μ γ⁻¹ S⃗_Λ·Ξ⃗` at one momentum, with `Ξ⃗` from the covariant formula.
pub fn lab_hamiltonian_at(e: &Vec3, b: &Vec3, kin: &Kinematics, mu: f64) -> Mat2 {
    let v = lab_coupling(e, b, kin, mu);
    let xi = xi_at(kin);
    xi[0].scale_re(v.x) + xi[1].scale_re(v.y) + xi[2].scale_re(v.z)
}

/// `H^(C)(p) = μ γ(p)⁻¹ S⃗_Λ(p)·Ξ⃗(p)` on a laboratory grid of A.
pub fn lab_hamiltonian(e: &Vec3, b: &Vec3, grid: &MomentumGrid1D, mu: f64) -> Result<OperatorField> {
    let units = *grid.units();
    let mass = grid.mass();
    let matrices = grid
        .points()
        .iter()
        .map(|&p| kinematics_x(p, mass, &units).map(|k| lab_hamiltonian_at(e, b, &k, mu)))
        .collect::<Result<_>>()?;
    OperatorField::new(grid.clone(), Frame::Lab, "H_C", matrices)
}

/// `H^(A)(p) = μ S⃗_Λ(p)·σ⃗`: the rest-frame coupling seen by A when its lab
/// momentum is `p`, tabulated on the lab grid.
pub fn rest_field_hamiltonian(e: &Vec3, b: &Vec3, grid: &MomentumGrid1D, mu: f64) -> Result<OperatorField> {
    let units = *grid.units();
    let mass = grid.mass();
    let matrices = grid
        .points()
        .iter()
        .map(|&p| kinematics_x(p, mass, &units).map(|k| dot_sigma(&transform_field(e, b, &k)).scale_re(mu)))
        .collect::<Result<_>>()?;
    OperatorField::new(grid.clone(), Frame::Rest, "H_A", matrices)
}

fn contract_h0(f: &FaradayTensor, sigma: &[Mat2; 4], time: [f64; 4]) -> Mat2 {
    let mut out = Mat2::zero();
    for (rho, &u) in time.iter().enumerate() {
        if u == 0.0 {
            continue;
        }
        for (mu, s) in sigma.iter().enumerate() {
            for nu in 0..4 {
                for lam in 0..4 {
                    let eps = levi_civita([rho, mu, nu, lam]);
                    if eps != 0.0 {
                        out = out + s.scale_re(0.5 * eps * u * f.components[(nu, lam)]);
                    }
                }
            }
        }
    }
    out
}

fn check_frozen(f: &FaradayTensor) -> Result<()> {
    if f.convention != FieldConvention::FROZEN {
        return Err(Error::ConventionNotFrozen);
    }
    Ok(())
}

/// `H⁰ = ½ ε_{ρμνλ} u^ρ Σ^μ F^{νλ}` with the particle four-velocity
/// `u = p/(mc)` and `ε_{0123} = +1`. Equals `γ H^(C)/μ` pointwise.
pub fn covariant_h0(f: &FaradayTensor, sigma: &[OperatorField; 4]) -> Result<OperatorField> {
    check_frozen(f)?;
    let grid = sigma[0].grid();
    if sigma.iter().any(|s| !s.grid().compatible(grid)) {
        return Err(Error::GridMismatch);
    }
    let units = *grid.units();
    let matrices = (0..grid.len())
        .map(|i| {
            let kin = kinematics_x(grid.points()[i], grid.mass(), &units)?;
            let u: [f64; 4] = kin.four_velocity().into();
            let s = [sigma[0].at(i), sigma[1].at(i), sigma[2].at(i), sigma[3].at(i)];
            Ok(contract_h0(f, &s, u))
        })
        .collect::<Result<_>>()?;
    OperatorField::new(grid.clone(), Frame::Lab, "H0", matrices)
}

/// Same contraction with the laboratory time direction `η^{0ρ}`; differs from
/// [`covariant_h0`] by a factor `γ` for fields transverse to the motion.
pub fn covariant_h0_lab_time(f: &FaradayTensor, sigma: &[OperatorField; 4]) -> Result<OperatorField> {
    check_frozen(f)?;
    let grid = sigma[0].grid();
    let matrices = (0..grid.len())
        .map(|i| {
            let s = [sigma[0].at(i), sigma[1].at(i), sigma[2].at(i), sigma[3].at(i)];
            contract_h0(f, &s, [1.0, 0.0, 0.0, 0.0])
        })
        .collect();
    OperatorField::new(grid.clone(), Frame::Lab, "H0_lab_time", matrices)
}

/// Transverse amplitudes of both branches after the run, in the eigenbasis of
/// `n̂·Ξ⃗` and including the `cos θ`/`sin θ` weights and phases.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZSnapshot {
    pub p_z: Vec<f64>,
    pub up: Vec<C64>,
    pub down: Vec<C64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub frame: Frame,
    pub theta: f64,
    /// Evolution time in the frame of the run.
    pub t: f64,
    pub p_star: f64,
    /// `⟨Π±⟩` with `Π± = |ψ_z^±⟩⟨ψ_z^±|`.
    pub p_plus: f64,
    pub p_minus: f64,
    /// Probabilities of `p_z > 0` and `p_z < 0`.
    pub p_plus_halfline: f64,
    pub p_minus_halfline: f64,
    /// `|⟨ψ_z⁺|ψ_z⁻⟩|` by quadrature.
    pub overlap: f64,
    pub overlap_closed_form: f64,
    pub distinguishable: bool,
    /// Largest difference between the analytic and the spectral evolution.
    pub spectral_residual: f64,
    pub norm_loss: f64,
    pub snapshot: ZSnapshot,
}

/// Closed-form `|⟨ψ_z⁺|ψ_z⁻⟩| = exp(−p*²/(2s_z²))`.
pub fn overlap_closed_form(p_star: f64, s_z: f64) -> f64 {
    (-p_star * p_star / (2.0 * s_z * s_z)).exp()
}

/// Band-limited translation `f(p) ↦ f(p − a)` on a uniform grid: in position
/// space this is the phase `e^{−i a z/ħ}` on each Fourier mode.
pub fn spectral_shift(samples: &[C64], step: f64, shift: f64) -> Vec<C64> {
    let n = samples.len();
    let mut planner = FftPlanner::<f64>::new();
    let mut buf = samples.to_vec();
    planner.plan_fft_forward(n).process(&mut buf);
    let period = n as f64 * step;
    for (k, c) in buf.iter_mut().enumerate() {
        let signed = if 2 * k < n { k as f64 } else { k as f64 - n as f64 };
        if 2 * k == n {
            *c *= (PI * n as f64 * shift / period).cos();
        } else {
            *c *= C64::from_polar(1.0, -2.0 * PI * signed * shift / period);
        }
    }
    planner.plan_fft_inverse(n).process(&mut buf);
    buf.iter().map(|c| c / n as f64).collect()
}

struct Branches {
    grid: UniformGrid,
    plus: Vec<C64>,
    minus: Vec<C64>,
    spectral_residual: f64,
}

fn split(config: &SternGerlachConfig, p_star: f64) -> Result<Branches> {
    let grid = config.grid()?;
    let points = grid.points();
    let packet = Gaussian::new(0.0, config.s_z)?;
    let sample = |g: Gaussian| points.iter().map(|&p| C64::new(g.eval(p), 0.0)).collect::<Vec<_>>();
    let plus = sample(packet.shifted(p_star));
    let minus = sample(packet.shifted(-p_star));

    let norm_loss = |v: &[C64]| 1.0 - grid.step * v.iter().map(|a| a.norm_sqr()).sum::<f64>();
    let loss = norm_loss(&plus)
        .abs()
        .max(norm_loss(&minus).abs())
        .max(norm_loss(&sample(packet)).abs());
    if loss > CLIPPING_TOL {
        return Err(Error::InsufficientCoverage { norm_loss: loss });
    }

    let initial = sample(packet);
    let spec_plus = spectral_shift(&initial, grid.step, p_star);
    let spec_minus = spectral_shift(&initial, grid.step, -p_star);
    let spectral_residual = plus
        .iter()
        .zip(&spec_plus)
        .chain(minus.iter().zip(&spec_minus))
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    Ok(Branches {
        grid,
        plus,
        minus,
        spectral_residual,
    })
}

fn record(config: &SternGerlachConfig, frame: Frame, t: f64, phase: f64, p_star: f64) -> Result<ExperimentRecord> {
    let Branches {
        grid,
        plus,
        minus,
        spectral_residual,
    } = split(config, p_star)?;
    let h = grid.step;
    let dot = |a: &[C64], b: &[C64]| a.iter().zip(b).map(|(x, y)| x.conj() * y).sum::<C64>() * h;
    let (c, s) = (config.theta.cos(), config.theta.sin());
    let up: Vec<C64> = plus.iter().map(|a| a * C64::from_polar(c, -phase)).collect();
    let down: Vec<C64> = minus.iter().map(|a| a * C64::from_polar(s, phase)).collect();

    // spin branches are orthogonal, so Π± only sees each branch's own overlap
    let pp = dot(&plus, &plus).re;
    let mm = dot(&minus, &minus).re;
    let pm = dot(&plus, &minus).norm();
    let p_plus = c * c * pp * pp + s * s * pm * pm;
    let p_minus = c * c * pm * pm + s * s * mm * mm;

    let points = grid.points();
    let half = |sign: f64| {
        points
            .iter()
            .zip(up.iter().zip(&down))
            .map(|(&p, (u, d))| {
                let w = if p * sign > 0.0 {
                    1.0
                } else if p == 0.0 {
                    0.5
                } else {
                    0.0
                };
                w * h * (u.norm_sqr() + d.norm_sqr())
            })
            .sum::<f64>()
    };
    let norm_loss = 1.0 - (dot(&up, &up).re + dot(&down, &down).re);

    Ok(ExperimentRecord {
        frame,
        theta: config.theta,
        t,
        p_star,
        p_plus,
        p_minus,
        p_plus_halfline: half(1.0),
        p_minus_halfline: half(-1.0),
        overlap: pm,
        overlap_closed_form: overlap_closed_form(p_star, config.s_z),
        distinguishable: config.t > config.separation_time(),
        spectral_residual,
        norm_loss,
        snapshot: ZSnapshot { p_z: points, up, down },
    })
}

fn main_geometry(config: &SternGerlachConfig) -> Result<Vec3> {
    let n = config.validate()?;
    if n.x.abs() > 1e-12 {
        return Err(Error::Geometry(
            "the transverse evolution is only defined for n_hat orthogonal to x".into(),
        ));
    }
    Ok(n)
}

/// Laboratory run with `H^(C) = μ B^(C)(r) n̂·Ξ⃗`, `B^(C)(r) = B⁰ − α r·n̂`.
pub fn evolve_lab_frame(config: &SternGerlachConfig) -> Result<ExperimentRecord> {
    main_geometry(config)?;
    let phase = config.mu * config.b0 * config.t / config.units.hbar;
    record(config, Frame::Lab, config.t, phase, config.p_star())
}

/// The same experiment described in the rest frame of A at the reference
/// momentum `p_x`: fields `S_Λ = γB` (for `n̂ ⊥ x̂`), gradient `γα`, proper
/// time `t/γ`.
pub fn evolve_rest_frame(config: &SternGerlachConfig) -> Result<ExperimentRecord> {
    let n = main_geometry(config)?;
    let kin = kinematics_x(config.p_x, config.m_a, &config.units)?;
    let zero = Vec3::zeros();
    let b_rest = transform_field(&zero, &(n * config.b0), &kin).dot(&n);
    let alpha_rest = transform_field(&zero, &(n * config.alpha), &kin).dot(&n);
    let t_a = config.t / kin.gamma;
    let phase = config.mu * b_rest * t_a / config.units.hbar;
    let p_star = alpha_rest * config.mu * t_a / config.units.hbar;
    record(config, Frame::Rest, t_a, phase, p_star)
}

/// `(|⟨ψ_z⁺|ψ_z⁻⟩|, t > ħs_z/(αμ))`.
pub fn distinguishability(config: &SternGerlachConfig) -> Result<(f64, bool)> {
    config.validate()?;
    let b = split(config, config.p_star())?;
    let overlap = b
        .plus
        .iter()
        .zip(&b.minus)
        .map(|(x, y)| x.conj() * y)
        .sum::<C64>()
        .norm()
        * b.grid.step;
    Ok((overlap, config.t > config.separation_time()))
}

/// Residuals of the Hamiltonian covariance battery.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ConjugationReport {
    /// `max ‖Ŝ_L†(γ̂H^(C))Ŝ_L − H^(A)‖`.
    pub covariant_residual: f64,
    /// `max ‖Ŝ_L†H^(C)Ŝ_L − H^(A)‖`, the literal form.
    pub literal_residual: f64,
    /// `max |literal − (1 − γ⁻¹)‖H^(A)‖|`: the literal mismatch is exactly the
    /// missing time dilation.
    pub literal_dilation_residual: f64,
    /// `max ‖μH⁰ − γH^(C)‖` with `H⁰` from the tensor contraction.
    pub h0_identity_residual: f64,
    /// `max |spec(μH⁰) − spec(H^(A))|`.
    pub spectrum_residual: f64,
    pub points: usize,
}

/// Conjugation battery on sharp rest-frame momenta `π`, for uniform lab
/// fields `(E, B)`.
pub fn conjugation_check(
    boost: &SuperposedBoost,
    e: &Vec3,
    b: &Vec3,
    mu: f64,
    rest_momenta: &[f64],
) -> Result<ConjugationReport> {
    let units = boost.units;
    let f = faraday(e, b, FieldConvention::FROZEN);
    let mut report = ConjugationReport {
        points: rest_momenta.len(),
        ..Default::default()
    };
    for &pi in rest_momenta {
        let basis: [Spinor; 2] = [[C64::new(1.0, 0.0), ZERO], [ZERO, C64::new(1.0, 0.0)]];
        let p = boost.lab_momentum(pi);
        let kin = kinematics_x(p, boost.m_a, &units)?;
        let lab_grid = MomentumGrid1D::sharp(p, boost.m_a, units, "A")?;
        let h_c = lab_hamiltonian(e, b, &lab_grid, mu)?;
        let h_0 = h_c.scaled_by("gamma H_C", |_| kin.gamma);
        let h_a = rest_field_hamiltonian(e, b, &lab_grid, mu)?.at(0);

        // matrix of Ŝ_L† O Ŝ_L in the rest basis, column by column
        let conjugated = |op: &OperatorField| -> Result<Mat2> {
            let mut m = [[ZERO; 2]; 2];
            for (col, chi) in basis.iter().enumerate() {
                let rest = SpinorField::sharp(pi, boost.m_c, *chi, units, Frame::Rest)?;
                let image = boost.inverse(&op.apply(&boost.apply(&rest)?)?)?;
                for (row, e_row) in basis.iter().enumerate() {
                    m[row][col] = spinor_dot(e_row, &image.amplitudes[0]);
                }
            }
            Ok(Mat2(m))
        };
        let cov = conjugated(&h_0)?;
        let lit = conjugated(&h_c)?;
        report.covariant_residual = report.covariant_residual.max((cov - h_a).norm());
        let literal = (lit - h_a).norm();
        report.literal_residual = report.literal_residual.max(literal);
        report.literal_dilation_residual = report
            .literal_dilation_residual
            .max((literal - (1.0 - 1.0 / kin.gamma) * h_a.norm()).abs());

        let sigma = pauli_lubanski(&lab_grid)?;
        let h0 = covariant_h0(&f, &sigma)?.at(0).scale_re(mu);
        report.h0_identity_residual = report.h0_identity_residual.max((h0 - h_0.at(0)).norm());
        let (s0, _) = h0.eigh();
        let (sa, _) = h_a.eigh();
        report.spectrum_residual = report
            .spectrum_residual
            .max((s0[0] - sa[0]).abs())
            .max((s0[1] - sa[1]).abs());
    }
    Ok(report)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CovarianceReport {
    pub gamma: f64,
    pub t_a: f64,
    pub t_c: f64,
    /// `|⟨evolve-then-transform | transform-then-evolve⟩|²`.
    pub fidelity: f64,
}

/// Two-path check on a sharp rest-frame state in a uniform rest-frame field
/// `B^(A)` (no electric field in the rest frame): evolve for `t_A` then apply
/// `Ŝ_L`, versus apply `Ŝ_L` then evolve under `H^(C)` for `t_C = γ t_A`
/// with the laboratory fields that produce `B^(A)`.
pub fn evolve_covariance_check(
    boost: &SuperposedBoost,
    rest: &SpinorField,
    b_rest: &Vec3,
    mu: f64,
    t_a: f64,
) -> Result<CovarianceReport> {
    if !rest.grid.is_sharp() {
        return Err(Error::NotSharp {
            points: rest.grid.len(),
        });
    }
    if rest.frame != Frame::Rest {
        return Err(Error::FrameMismatch {
            expected: Frame::Rest,
            found: rest.frame,
        });
    }
    rest.require_normalized(1e-12)?;
    let hbar = boost.units.hbar;

    let h_a = dot_sigma(b_rest).scale_re(mu);
    let mut evolved = rest.clone();
    evolved.amplitudes[0] = h_a.unitary_evolution(t_a / hbar).apply(&rest.amplitudes[0]);
    let path_a = boost.apply(&evolved)?;

    let mut lab = boost.apply(rest)?;
    let p = lab.grid.points()[0];
    let kin = kinematics(Vec3::new(p, 0.0, 0.0), boost.m_a, &boost.units)?;
    let (e_lab, b_lab) = lab_fields_from_rest(&Vec3::zeros(), b_rest, &kin);
    let t_c = kin.gamma * t_a;
    let h_c = lab_hamiltonian_at(&e_lab, &b_lab, &kin, mu);
    lab.amplitudes[0] = h_c.unitary_evolution(t_c / hbar).apply(&lab.amplitudes[0]);

    let overlap = path_a.inner_product(&lab)?;
    Ok(CovarianceReport {
        gamma: kin.gamma,
        t_a,
        t_c,
        fidelity: overlap.norm_sqr(),
    })
}

/// Momentum kick of one branch in one frame.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeflectionCase {
    pub p_x: f64,
    /// `+1` or `−1`, the `n̂·Ξ⃗` eigenvalue of the branch.
    pub branch: i8,
    pub lab_kick: [f64; 3],
    pub rest_kick: [f64; 3],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeflectionReport {
    pub cases: Vec<DeflectionCase>,
    /// Largest distance between the unit kick directions of the two frames.
    pub max_direction_residual: f64,
    /// Whether every branch is kicked to the same side of `n̂` in both frames.
    pub same_side: bool,
    /// Also true when `n̂` is tilted; such runs carry no claim.
    pub exploratory: bool,
}

/// Branch kicks `Δp = −t ∇(s n̂·V⃗)` where `V⃗` is the coupling vector:
/// `μγ⁻¹S⃗_Λ` during laboratory time `t_C`, `μS⃗_Λ` during proper time
/// `t_A = t_C/γ`. The profile is linear, so gradients follow from the
/// linearity of the field transformation.
pub fn deflection_check(config: &SternGerlachConfig, momenta: &[f64]) -> Result<DeflectionReport> {
    let n = config.validate()?;
    let em = EMField::gradient(GradientProfile::new(config.b0, config.alpha, n.into())?);
    let mut cases = Vec::new();
    let mut worst: f64 = 0.0;
    let mut same_side = true;
    for &p in momenta {
        let kin = kinematics_x(p, config.m_a, &config.units)?;
        let t_a = config.t / kin.gamma;
        let grad = |scale: f64| -> Vec3 {
            Vec3::from_fn(|k, _| {
                let (de, db) = em.derivative(k);
                n.dot(&(transform_field(&de, &db, &kin) * (config.mu * scale)))
            })
        };
        let g_lab = grad(1.0 / kin.gamma);
        let g_rest = grad(1.0);
        for s in [1i8, -1] {
            let lab = g_lab * (-config.t * s as f64);
            let rest = g_rest * (-t_a * s as f64);
            let (ln, rn) = (lab.norm(), rest.norm());
            if ln > 0.0 && rn > 0.0 {
                worst = worst.max((lab / ln - rest / rn).norm());
            } else if ln != rn {
                worst = worst.max(1.0);
            }
            same_side &= lab.dot(&n).signum() == rest.dot(&n).signum();
            cases.push(DeflectionCase {
                p_x: p,
                branch: s,
                lab_kick: lab.into(),
                rest_kick: rest.into(),
            });
        }
    }
    Ok(DeflectionReport {
        cases,
        max_direction_residual: worst,
        same_side,
        exploratory: n.x.abs() > 1e-12,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lorentz::faraday;
    use crate::matrix::bloch_spinor;
    use std::f64::consts::FRAC_PI_4;

    fn cfg(theta: f64, t_scaled: f64) -> SternGerlachConfig {
        let mut c = SternGerlachConfig::new(theta, 1.0, 0.3, 2.0, 0.5, 0.0);
        c.t = t_scaled * c.separation_time();
        c
    }

    #[test]
    fn rest_hamiltonian_examples() {
        let h = rest_hamiltonian(2.0, [0.0, 0.0, 1.0], 0.5).unwrap();
        assert!((h.spin - Mat2::sigma_z()).norm() < 1e-15);
        let tilted = rest_hamiltonian(2.0, [1.0, 0.0, 1.0], 0.5).unwrap();
        let r = 1.0 / 2f64.sqrt();
        assert!((tilted.spin - (Mat2::sigma_x() + Mat2::sigma_z()).scale_re(r)).norm() < 1e-15);
        let (vals, _) = tilted.spin.eigh();
        assert!((vals[0] + 1.0).abs() < 1e-15 && (vals[1] - 1.0).abs() < 1e-15);
        assert!(matches!(
            rest_hamiltonian(1.0, [0.0; 3], 1.0),
            Err(Error::ZeroDirection)
        ));
    }

    #[test]
    fn lab_hamiltonian_reduces_at_rest_and_perpendicular() {
        let u = UnitSystem::default();
        let grid = MomentumGrid1D::uniform(-3.0, 3.0, 13, 1.0, u, "A").unwrap();
        let b = Vec3::new(0.0, 0.0, 1.7);
        let h = lab_hamiltonian(&Vec3::zeros(), &b, &grid, 0.4).unwrap();
        for m in h.matrices() {
            assert!((*m - Mat2::sigma_z().scale_re(0.4 * 1.7)).norm() < 1e-14);
        }
        let rest = rest_hamiltonian(1.7, [0.0, 0.0, 1.0], 0.4).unwrap();
        assert!((h.at(6) - rest.spin).norm() < 1e-15);
    }

    #[test]
    fn h0_identity_and_lab_time_discrepancy() {
        let u = UnitSystem::default();
        let grid = MomentumGrid1D::sharp(1.0, 1.0, u, "A").unwrap();
        let e = Vec3::new(0.2, -0.5, 0.3);
        let b = Vec3::new(0.7, 0.1, -1.1);
        let f = faraday(&e, &b, FieldConvention::FROZEN);
        let sigma = pauli_lubanski(&grid).unwrap();
        let h0 = covariant_h0(&f, &sigma).unwrap().at(0);
        let kin = kinematics_x(1.0, 1.0, &u).unwrap();
        let h_c = lab_hamiltonian_at(&e, &b, &kin, 1.0);
        assert!((h0 - h_c.scale_re(kin.gamma)).norm() < 1e-12);

        // transverse B only: the lab-time contraction misses one γ
        let f = faraday(&Vec3::zeros(), &Vec3::new(0.0, 0.0, 1.0), FieldConvention::FROZEN);
        let lab_time = covariant_h0_lab_time(&f, &sigma).unwrap().at(0);
        let u_form = covariant_h0(&f, &sigma).unwrap().at(0);
        assert!((u_form - lab_time.scale_re(kin.gamma)).norm() < 1e-12);

        let jackson = faraday(&e, &b, FieldConvention::Jackson);
        assert!(matches!(
            covariant_h0(&jackson, &sigma),
            Err(Error::ConventionNotFrozen)
        ));

        let zero = faraday(&Vec3::zeros(), &Vec3::zeros(), FieldConvention::FROZEN);
        assert_eq!(covariant_h0(&zero, &sigma).unwrap().at(0).norm(), 0.0);
    }

    #[test]
    fn h0_at_rest_is_rest_hamiltonian_shape() {
        let u = UnitSystem::default();
        let grid = MomentumGrid1D::sharp(0.0, 2.0, u, "A").unwrap();
        let f = faraday(&Vec3::zeros(), &Vec3::new(0.0, 0.0, 3.0), FieldConvention::FROZEN);
        let h0 = covariant_h0(&f, &pauli_lubanski(&grid).unwrap()).unwrap().at(0);
        assert!((h0 - Mat2::sigma_z().scale_re(3.0)).norm() < 1e-15);
    }

    #[test]
    fn probability_law_examples() {
        let r = evolve_lab_frame(&cfg(FRAC_PI_4, 5.0)).unwrap();
        assert!((r.p_plus - 0.5).abs() < 1e-4 && (r.p_minus - 0.5).abs() < 1e-4);
        let r = evolve_lab_frame(&cfg(PI / 6.0, 5.0)).unwrap();
        assert!((r.p_plus - 0.75).abs() < 1e-4 && (r.p_minus - 0.25).abs() < 1e-4);
        assert!((r.p_plus_halfline - 0.75).abs() < 1e-4);
        assert!(r.spectral_residual < 1e-8, "{}", r.spectral_residual);
        let r = evolve_lab_frame(&cfg(0.0, 5.0)).unwrap();
        assert!((r.p_plus - 1.0).abs() < 1e-12 && r.p_minus < 1e-10);
        assert!(r.distinguishable);
    }

    #[test]
    fn overlap_oracle() {
        let (ov, flag) = distinguishability(&cfg(0.3, 0.0)).unwrap();
        assert!((ov - 1.0).abs() < 1e-12 && !flag);
        let c = cfg(0.3, 1.0);
        let (ov, flag) = distinguishability(&c).unwrap();
        assert!((ov - (-0.5f64).exp()).abs() < 1e-8);
        assert!(!flag, "t equal to the threshold is not strictly past it");
        let (ov, flag) = distinguishability(&cfg(0.3, 10.0)).unwrap();
        assert!(ov < 1e-10 && flag);
    }

    #[test]
    fn clipping_and_validation() {
        let mut c = cfg(0.3, 5.0);
        c.z_grid = Some(ZGridSpec {
            half_width: 2.0,
            count: 256,
        });
        assert!(matches!(evolve_lab_frame(&c), Err(Error::InsufficientCoverage { .. })));
        let mut c = cfg(0.3, 1.0);
        c.alpha = 0.0;
        assert!(c.validate().is_err());
        let mut c = cfg(0.3, 1.0);
        c.n_hat = [1.0, 0.0, 1.0];
        assert!(matches!(c.validate(), Err(Error::Geometry(_))));
        c.exploratory = true;
        assert!(c.validate().is_ok());
        assert!(evolve_lab_frame(&c).is_err());
    }

    #[test]
    fn spectral_shift_matches_translation() {
        let grid = UniformGrid::symmetric(10.0, 257).unwrap();
        let g = Gaussian::new(0.0, 0.7).unwrap();
        let f: Vec<C64> = grid.points().iter().map(|&p| C64::new(g.eval(p), 0.0)).collect();
        let shifted = spectral_shift(&f, grid.step, 1.234);
        for (p, v) in grid.points().iter().zip(&shifted) {
            assert!((v.re - g.shifted(1.234).eval(*p)).abs() < 1e-12);
        }
    }

    #[test]
    fn rest_run_matches_lab_run() {
        let mut c = cfg(0.4, 5.0);
        c.p_x = 1.3;
        let lab = evolve_lab_frame(&c).unwrap();
        let rest = evolve_rest_frame(&c).unwrap();
        assert!((lab.p_star - rest.p_star).abs() < 1e-12);
        assert!((lab.p_plus - rest.p_plus).abs() < 1e-12);
        assert!(rest.t < lab.t);
    }

    #[test]
    fn conjugation_battery() {
        let u = UnitSystem::default();
        let boost = SuperposedBoost::new(1.0, 2.0, u).unwrap();
        let e = Vec3::new(0.3, 0.2, -0.4);
        let b = Vec3::new(-0.5, 0.9, 0.6);
        let rep = conjugation_check(&boost, &e, &b, 0.8, &[-3.0, -0.5, 0.0, 2.0, 5.0]).unwrap();
        assert!(rep.covariant_residual < 1e-12);
        assert!(rep.h0_identity_residual < 1e-12);
        assert!(rep.spectrum_residual < 1e-12);
        assert!(rep.literal_residual > 1e-2);
        assert!(rep.literal_dilation_residual < 1e-12);
    }

    #[test]
    fn two_path_evolution() {
        let u = UnitSystem::default();
        let boost = SuperposedBoost::new(1.0, 1.0, u).unwrap();
        let b = Vec3::new(0.2, 0.4, 1.3);
        for pi in [0.0, -1.0, 2.7] {
            let rest = SpinorField::sharp(pi, 1.0, bloch_spinor(0.9, 2.1), u, Frame::Rest).unwrap();
            let rep = evolve_covariance_check(&boost, &rest, &b, 0.7, 3.1).unwrap();
            assert!(rep.fidelity > 1.0 - 1e-12, "{rep:?}");
            if pi == -1.0 {
                assert!((rep.t_c - 2f64.sqrt() * rep.t_a).abs() < 1e-14);
            }
        }
        let grid = MomentumGrid1D::uniform(-1.0, 1.0, 5, 1.0, u, "C").unwrap();
        let spread = SpinorField::product(grid, bloch_spinor(0.1, 0.0), &[C64::new(1.0, 0.0); 5], Frame::Rest).unwrap();
        assert!(matches!(
            evolve_covariance_check(&boost, &spread, &b, 1.0, 1.0),
            Err(Error::NotSharp { points: 5 })
        ));
    }

    #[test]
    fn deflection_direction_preserved() {
        let mut c = cfg(0.3, 3.0);
        c.n_hat = [0.0, 0.6, 0.8];
        let rep = deflection_check(&c, &[-4.0, -1.0, 0.0, 0.5, 3.0]).unwrap();
        assert!(rep.same_side && !rep.exploratory);
        assert!(rep.max_direction_residual < 1e-14);
        // branch + moves toward decreasing energy, i.e. along +n̂ for α > 0
        let k = rep.cases[0].lab_kick;
        assert!(Vec3::from(k).dot(&Vec3::new(0.0, 0.6, 0.8)) > 0.0);
    }
}
