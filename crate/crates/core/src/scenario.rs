//! Scenario files, experiment dispatch and result emission.
//!
//! A scenario is a TOML document whose `kind` selects the experiment:
//!
//! ```toml
//! kind = "sterngerlach"
//! alpha = 2.0
//! t_scaled = 5.0        # αμt/(ħ s_z)
//! ```
//!
//! Omitted fields take the defaults documented on each struct; the filled-in
//! scenario is echoed in the [`ResultBundle`]. Every check in a bundle is a
//! residual compared against a tolerance (`passed = value ≤ tolerance`).

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, LN_2};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lorentz::{boost_matrix, kinematics, Vec3};
use crate::matrix::{bloch_spinor, Mat2, Spinor, C64};
use crate::qrf::extended::compare_with_compact;
use crate::qrf::galilean::{
    entanglement_entropy, galilean_inverse, galilean_transform, probability_report, GalileanFrame,
    GalileanTwoParticleState, Lattice,
};
use crate::qrf::{RestFrameState, SuperposedBoost};
use crate::spinops::{
    covariant_constraint_at, pauli_lubanski_at, pauli_lubanski_from_boost, pauli_vector, su2_residual,
    unit_spectrum_residual, xi_at, xi_field, xi_from_boost, Axis,
};
use crate::statekit::{positive, Frame, MomentumGrid1D, SpinorField, UnitSystem};
use crate::sterngerlach::{
    conjugation_check, deflection_check, distinguishability, evolve_covariance_check, evolve_lab_frame,
    evolve_rest_frame, overlap_closed_form, SternGerlachConfig, ZGridSpec,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Scenario {
    Transform(TransformScenario),
    AlgebraCheck(AlgebraScenario),
    Sterngerlach(SternGerlachScenario),
    GalileanDemo(GalileanScenario),
    CovarianceCheck(CovarianceScenario),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl GridSpec {
    fn build(&self, mass: f64, units: UnitSystem, label: &str) -> Result<MomentumGrid1D> {
        MomentumGrid1D::uniform(self.min, self.max, self.count, mass, units, label)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PacketSpec {
    pub center: f64,
    pub std: f64,
}

/// Spin direction on the Bloch sphere.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpinSpec {
    pub theta: f64,
    #[serde(default)]
    pub phi: f64,
}

fn one() -> f64 {
    1.0
}
fn two() -> f64 {
    2.0
}
fn five() -> f64 {
    5.0
}
fn sixteen() -> usize {
    16
}
fn z_axis() -> [f64; 3] {
    [0.0, 0.0, 1.0]
}

// ---------------------------------------------------------------- transform

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransformScenario {
    #[serde(default = "one")]
    pub m_a: f64,
    #[serde(default = "two")]
    pub m_c: f64,
    /// Rest-frame grid for the laboratory momentum `π`.
    #[serde(default = "TransformScenario::default_grid")]
    pub grid: GridSpec,
    /// Laboratory grid for resampling; defaults to the image of `grid`.
    #[serde(default)]
    pub target_grid: Option<GridSpec>,
    #[serde(default = "TransformScenario::default_packet")]
    pub packet: PacketSpec,
    #[serde(default = "TransformScenario::default_spin")]
    pub spin: SpinSpec,
    /// Axis of the spin projector used for the probability report.
    #[serde(default = "TransformScenario::default_axis")]
    pub projector_axis: [f64; 3],
    /// Size and momentum range of the sharp battery for the tripartite form.
    #[serde(default = "sixteen")]
    pub battery: usize,
    #[serde(default = "five")]
    pub battery_max: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub units: UnitSystem,
    #[serde(default)]
    pub tolerances: TransformTolerances,
}

impl TransformScenario {
    fn default_grid() -> GridSpec {
        GridSpec {
            min: -12.0,
            max: 12.0,
            count: 481,
        }
    }
    fn default_packet() -> PacketSpec {
        PacketSpec { center: 0.8, std: 1.2 }
    }
    fn default_spin() -> SpinSpec {
        SpinSpec { theta: 1.1, phi: 0.4 }
    }
    fn default_axis() -> [f64; 3] {
        [0.48, 0.6, 0.64]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TransformTolerances {
    pub norm: f64,
    pub transport: f64,
    pub probability: f64,
    pub extended: f64,
    pub round_trip: f64,
}

impl Default for TransformTolerances {
    fn default() -> Self {
        TransformTolerances {
            norm: 1e-8,
            transport: 1e-10,
            probability: 1e-10,
            extended: 1e-12,
            round_trip: 1e-12,
        }
    }
}

// ---------------------------------------------------------------- algebra

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraScenario {
    #[serde(default = "one")]
    pub mass: f64,
    #[serde(default = "AlgebraScenario::default_grid")]
    pub grid: GridSpec,
    /// Number of random three-momenta for the pointwise identities.
    #[serde(default = "AlgebraScenario::default_random")]
    pub random_momenta: usize,
    /// Each component is drawn uniformly from `[−scale, scale]`.
    #[serde(default = "five")]
    pub momentum_scale: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub units: UnitSystem,
    #[serde(default)]
    pub tolerances: AlgebraTolerances,
}

impl AlgebraScenario {
    fn default_grid() -> GridSpec {
        GridSpec {
            min: -10.0,
            max: 10.0,
            count: 401,
        }
    }
    fn default_random() -> usize {
        100
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AlgebraTolerances {
    pub su2: f64,
    pub spectrum: f64,
    pub constraint: f64,
    pub collapse: f64,
    pub boost: f64,
}

impl Default for AlgebraTolerances {
    fn default() -> Self {
        AlgebraTolerances {
            su2: 1e-12,
            spectrum: 1e-12,
            constraint: 1e-12,
            collapse: 1e-12,
            boost: 1e-10,
        }
    }
}

// ---------------------------------------------------------------- stern-gerlach

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SternGerlachScenario {
    /// Superposition angles; defaults to nine points on `[0, π/2]`.
    #[serde(default = "SternGerlachScenario::default_thetas")]
    pub thetas: Vec<f64>,
    /// Dimensionless time `αμt/(ħ s_z)`.
    #[serde(default = "five")]
    pub t_scaled: f64,
    #[serde(default = "one")]
    pub mu: f64,
    #[serde(default)]
    pub b0: f64,
    pub alpha: f64,
    #[serde(default = "one")]
    pub s_z: f64,
    #[serde(default = "z_axis")]
    pub n_hat: [f64; 3],
    #[serde(default = "one")]
    pub m_a: f64,
    #[serde(default = "one")]
    pub m_c: f64,
    /// Reference laboratory momentum of A (packet center along x).
    #[serde(default = "SternGerlachScenario::default_px")]
    pub p_x: f64,
    #[serde(default)]
    pub z_grid: Option<ZGridSpec>,
    #[serde(default)]
    pub exploratory: bool,
    #[serde(default = "SternGerlachScenario::default_deflection")]
    pub deflection_momenta: Vec<f64>,
    /// Index into `thetas` whose transverse packets go to the packet series.
    #[serde(default)]
    pub snapshot_index: Option<usize>,
    #[serde(default)]
    pub units: UnitSystem,
    #[serde(default)]
    pub tolerances: SternGerlachTolerances,
}

impl SternGerlachScenario {
    fn default_thetas() -> Vec<f64> {
        (0..9).map(|k| k as f64 * FRAC_PI_2 / 8.0).collect()
    }
    fn default_px() -> f64 {
        0.8
    }
    fn default_deflection() -> Vec<f64> {
        vec![-3.0, -1.0, 0.0, 1.0, 3.0]
    }

    fn config(&self, theta: f64, t_scaled: f64) -> SternGerlachConfig {
        let mut c = SternGerlachConfig::new(theta, self.mu, self.b0, self.alpha, self.s_z, 0.0);
        c.n_hat = self.n_hat;
        c.m_a = self.m_a;
        c.m_c = self.m_c;
        c.p_x = self.p_x;
        c.units = self.units;
        c.z_grid = self.z_grid;
        c.exploratory = self.exploratory;
        c.t = t_scaled * c.separation_time();
        c
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SternGerlachTolerances {
    pub probability: f64,
    pub spectral: f64,
    pub overlap_oracle: f64,
    pub separated_overlap: f64,
    pub completeness_slack: f64,
    pub frame_agreement: f64,
    pub deflection: f64,
}

impl Default for SternGerlachTolerances {
    fn default() -> Self {
        SternGerlachTolerances {
            probability: 1e-4,
            spectral: 1e-8,
            overlap_oracle: 1e-8,
            separated_overlap: 1e-10,
            completeness_slack: 1e-9,
            frame_agreement: 1e-10,
            deflection: 1e-12,
        }
    }
}

// ---------------------------------------------------------------- galilean

/// A at `x1` or `x2` in superposition, B sharp at `x0`, as seen from C.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GalileanScenario {
    #[serde(default = "one")]
    pub spacing: f64,
    #[serde(default = "GalileanScenario::default_half_count")]
    pub half_count: usize,
    #[serde(default = "one")]
    pub x0: f64,
    #[serde(default = "GalileanScenario::default_x1")]
    pub x1: f64,
    #[serde(default = "GalileanScenario::default_x2")]
    pub x2: f64,
    #[serde(default = "GalileanScenario::default_tol")]
    pub tolerance: f64,
}

impl GalileanScenario {
    fn default_half_count() -> usize {
        16
    }
    fn default_x1() -> f64 {
        -2.0
    }
    fn default_x2() -> f64 {
        3.0
    }
    fn default_tol() -> f64 {
        1e-10
    }
}

// ---------------------------------------------------------------- covariance

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CovarianceScenario {
    #[serde(default = "one")]
    pub m_a: f64,
    #[serde(default = "two")]
    pub m_c: f64,
    #[serde(default = "one")]
    pub mu: f64,
    /// Uniform laboratory fields for the conjugation battery.
    #[serde(default = "CovarianceScenario::default_e")]
    pub e_lab: [f64; 3],
    #[serde(default = "CovarianceScenario::default_b")]
    pub b_lab: [f64; 3],
    /// Rest-frame field for the two-path evolution.
    #[serde(default = "CovarianceScenario::default_b_rest")]
    pub b_rest: [f64; 3],
    #[serde(default = "CovarianceScenario::default_t_a")]
    pub t_a: f64,
    #[serde(default = "sixteen")]
    pub battery: usize,
    #[serde(default = "five")]
    pub battery_max: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub units: UnitSystem,
    #[serde(default)]
    pub tolerances: CovarianceTolerances,
}

impl CovarianceScenario {
    fn default_e() -> [f64; 3] {
        [0.3, -0.2, 0.5]
    }
    fn default_b() -> [f64; 3] {
        [0.4, 0.9, -0.7]
    }
    fn default_b_rest() -> [f64; 3] {
        [0.2, 0.5, 1.1]
    }
    fn default_t_a() -> f64 {
        2.5
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CovarianceTolerances {
    pub conjugation: f64,
    pub h0_identity: f64,
    pub spectrum: f64,
    pub fidelity: f64,
}

impl Default for CovarianceTolerances {
    fn default() -> Self {
        CovarianceTolerances {
            conjugation: 1e-10,
            h0_identity: 1e-10,
            spectrum: 1e-10,
            fidelity: 1e-10,
        }
    }
}

// ---------------------------------------------------------------- loading

impl Scenario {
    pub fn kind(&self) -> &'static str {
        match self {
            Scenario::Transform(_) => "transform",
            Scenario::AlgebraCheck(_) => "algebra-check",
            Scenario::Sterngerlach(_) => "sterngerlach",
            Scenario::GalileanDemo(_) => "galilean-demo",
            Scenario::CovarianceCheck(_) => "covariance-check",
        }
    }

    /// Range and consistency checks beyond what the schema enforces.
    pub fn validate(&self) -> Result<()> {
        let field = |name: &str, reason: &str| Error::InvalidConfig {
            field: name.into(),
            reason: reason.into(),
        };
        match self {
            Scenario::Transform(s) => {
                s.units.validate()?;
                positive("m_a", s.m_a)?;
                positive("m_c", s.m_c)?;
                positive("packet.std", s.packet.std)?;
                positive("battery_max", s.battery_max)?;
                if s.battery == 0 {
                    return Err(field("battery", "must be at least 1"));
                }
                check_tolerances(&[
                    ("tolerances.norm", s.tolerances.norm),
                    ("tolerances.transport", s.tolerances.transport),
                    ("tolerances.probability", s.tolerances.probability),
                    ("tolerances.extended", s.tolerances.extended),
                    ("tolerances.round_trip", s.tolerances.round_trip),
                ])
            }
            Scenario::AlgebraCheck(s) => {
                s.units.validate()?;
                positive("mass", s.mass)?;
                positive("momentum_scale", s.momentum_scale)?;
                check_tolerances(&[
                    ("tolerances.su2", s.tolerances.su2),
                    ("tolerances.spectrum", s.tolerances.spectrum),
                    ("tolerances.constraint", s.tolerances.constraint),
                    ("tolerances.collapse", s.tolerances.collapse),
                    ("tolerances.boost", s.tolerances.boost),
                ])
            }
            Scenario::Sterngerlach(s) => {
                if s.thetas.is_empty() {
                    return Err(field("thetas", "needs at least one angle"));
                }
                if !(s.t_scaled >= 0.0) {
                    return Err(field("t_scaled", "must be non-negative"));
                }
                if let Some(i) = s.snapshot_index {
                    if i >= s.thetas.len() {
                        return Err(field("snapshot_index", "out of range of thetas"));
                    }
                }
                s.config(s.thetas[0], s.t_scaled).validate()?;
                let t = s.tolerances;
                check_tolerances(&[
                    ("tolerances.probability", t.probability),
                    ("tolerances.spectral", t.spectral),
                    ("tolerances.overlap_oracle", t.overlap_oracle),
                    ("tolerances.separated_overlap", t.separated_overlap),
                    ("tolerances.completeness_slack", t.completeness_slack),
                    ("tolerances.frame_agreement", t.frame_agreement),
                    ("tolerances.deflection", t.deflection),
                ])
            }
            Scenario::GalileanDemo(s) => {
                Lattice::new(s.spacing, s.half_count)?;
                check_tolerances(&[("tolerance", s.tolerance)])
            }
            Scenario::CovarianceCheck(s) => {
                s.units.validate()?;
                positive("m_a", s.m_a)?;
                positive("m_c", s.m_c)?;
                positive("battery_max", s.battery_max)?;
                if !(s.t_a >= 0.0) {
                    return Err(field("t_a", "must be non-negative"));
                }
                let t = s.tolerances;
                check_tolerances(&[
                    ("tolerances.conjugation", t.conjugation),
                    ("tolerances.h0_identity", t.h0_identity),
                    ("tolerances.spectrum", t.spectrum),
                    ("tolerances.fidelity", t.fidelity),
                ])
            }
        }
    }

    /// Filled-in scenario as TOML, loadable again with [`parse_scenario`].
    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Parse {
            path: "<echo>".into(),
            message: e.to_string(),
        })
    }
}

fn check_tolerances(list: &[(&'static str, f64)]) -> Result<()> {
    for &(name, value) in list {
        positive(name, value)?;
    }
    Ok(())
}

/// Parses and validates a scenario document.
pub fn parse_scenario(text: &str, origin: &str) -> Result<Scenario> {
    let scenario: Scenario = toml::from_str(text).map_err(|e| Error::Parse {
        path: origin.into(),
        message: e.to_string(),
    })?;
    scenario.validate()?;
    Ok(scenario)
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        context: format!("reading {}", path.display()),
        source,
    })?;
    parse_scenario(&text, &path.display().to_string())
}

// ---------------------------------------------------------------- results

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub crate_name: String,
    pub version: String,
    /// Runtime environment; wall-clock time is left out so reruns are byte-identical.
    pub runtime: String,
    pub seed: Option<u64>,
}

impl Provenance {
    fn new(seed: Option<u64>) -> Self {
        Provenance {
            crate_name: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            runtime: format!("{}-{}", std::env::consts::ARCH, std::env::consts::OS),
            seed,
        }
    }
}

/// One row of the `theta,p_plus,p_minus,overlap` series.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub theta: f64,
    pub p_plus: f64,
    pub p_minus: f64,
    pub overlap: f64,
}

/// One row of the `p_z,re_up,im_up,re_down,im_down` series.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PacketRow {
    pub p_z: f64,
    pub re_up: f64,
    pub im_up: f64,
    pub re_down: f64,
    pub im_down: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultBundle {
    pub kind: String,
    pub scenario: Option<Scenario>,
    pub provenance: Provenance,
    pub checks: Vec<Check>,
    /// Informational numbers that carry no pass/fail claim.
    pub metrics: BTreeMap<String, f64>,
    #[serde(skip)]
    pub sweep: Vec<SweepRow>,
    #[serde(skip)]
    pub packets: Vec<PacketRow>,
}

impl ResultBundle {
    /// A bundle with no checks and no series.
    pub fn empty(kind: &str) -> Self {
        ResultBundle {
            kind: kind.into(),
            scenario: None,
            provenance: Provenance::new(None),
            checks: Vec::new(),
            metrics: BTreeMap::new(),
            sweep: Vec::new(),
            packets: Vec::new(),
        }
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    fn push(&mut self, name: &str, value: f64, tolerance: f64) {
        debug_assert!(self.check(name).is_none(), "duplicate check {name}");
        self.checks.push(Check {
            name: name.into(),
            value,
            tolerance,
            passed: value <= tolerance,
        });
    }

    fn metric(&mut self, name: &str, value: f64) {
        self.metrics.insert(name.into(), value);
    }
}

/// Runs a validated scenario.
pub fn run(scenario: &Scenario) -> Result<ResultBundle> {
    let kind = scenario.kind();
    let wrap = |source: Error| Error::Scenario {
        scenario: kind.into(),
        source: Box::new(source),
    };
    scenario.validate().map_err(wrap)?;
    let (result, seed) = match scenario {
        Scenario::Transform(s) => (run_transform(s), Some(s.seed)),
        Scenario::AlgebraCheck(s) => (run_algebra(s), Some(s.seed)),
        Scenario::Sterngerlach(s) => (run_sterngerlach(s), None),
        Scenario::GalileanDemo(s) => (run_galilean(s), None),
        Scenario::CovarianceCheck(s) => (run_covariance(s), Some(s.seed)),
    };
    let mut bundle = result.map_err(wrap)?;
    bundle.scenario = Some(scenario.clone());
    bundle.provenance = Provenance::new(seed);
    Ok(bundle)
}

fn random_spinor(rng: &mut ChaCha8Rng) -> Spinor {
    bloch_spinor(
        rng.gen_range(0.0..std::f64::consts::PI),
        rng.gen_range(0.0..std::f64::consts::TAU),
    )
}

fn sorted_battery(rng: &mut ChaCha8Rng, count: usize, max: f64) -> Vec<f64> {
    let mut v: Vec<f64> = (0..count).map(|_| rng.gen_range(-max..max)).collect();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

fn run_transform(s: &TransformScenario) -> Result<ResultBundle> {
    let mut out = ResultBundle::empty("transform");
    let t = s.tolerances;
    let boost = SuperposedBoost::new(s.m_a, s.m_c, s.units)?;
    let grid = s.grid.build(s.m_c, s.units, "C")?;
    let spin = bloch_spinor(s.spin.theta, s.spin.phi);
    let state = RestFrameState::gaussian(spin, grid, s.packet.center, s.packet.std)?;
    let rest = state.to_field();

    let lab = boost.apply(&rest)?;
    out.push("norm_image_grid", (lab.norm() - 1.0).abs(), t.norm);
    let target = match s.target_grid {
        Some(g) => g.build(s.m_a, s.units, "A")?,
        None => {
            let image = boost.image_grid(&rest.grid)?;
            let pts = image.points();
            MomentumGrid1D::uniform(pts[0], pts[pts.len() - 1], 2 * pts.len(), s.m_a, s.units, "A")?
        }
    };
    let (_, report) = boost.apply_onto(&state, &target)?;
    out.push("norm_target_grid", (report.raw_norm - 1.0).abs(), t.norm);
    out.metric("analytic_jacobian", report.analytic_jacobian);
    out.metric("normalization", report.normalization);

    let sigma = pauli_vector();
    let mut transport: f64 = 0.0;
    for axis in Axis::ALL {
        let before = crate::spinops::OperatorField::constant(&rest.grid, Frame::Rest, "sigma", sigma[axis.index()])?
            .expectation(&rest)?;
        let after = xi_field(&lab.grid, axis)?.expectation(&lab)?;
        transport = transport.max((before - after).abs());
    }
    out.push("xi_transport", transport, t.transport);

    let (before, after) = boost.probability_report(&rest, &Mat2::spin_projector(s.projector_axis))?;
    out.metric("projector_probability", before);
    out.push("probability_conservation", (before - after).abs(), t.probability);

    let back = boost.inverse_factorized(&lab, t.round_trip)?;
    let spin_fidelity = crate::matrix::spinor_dot(&back.spin, &spin).norm_sqr();
    out.push("inverse_round_trip", (1.0 - spin_fidelity).abs(), t.round_trip);

    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    let momenta = sorted_battery(&mut rng, s.battery, s.battery_max);
    let amplitudes: Vec<Spinor> = momenta.iter().map(|_| random_spinor(&mut rng)).collect();
    let n = amplitudes.len() as f64;
    let amplitudes = amplitudes
        .into_iter()
        .map(|a| [a[0] / n.sqrt(), a[1] / n.sqrt()])
        .collect();
    let battery = SpinorField::new(
        MomentumGrid1D::discrete(momenta, s.m_c, s.units, "C")?,
        amplitudes,
        Frame::Rest,
    )?;
    out.push(
        "extended_equivalence",
        compare_with_compact(&boost, &battery)?,
        t.extended,
    );
    Ok(out)
}

fn run_algebra(s: &AlgebraScenario) -> Result<ResultBundle> {
    let mut out = ResultBundle::empty("algebra-check");
    let t = s.tolerances;
    let grid = s.grid.build(s.mass, s.units, "A")?;
    let xi: Vec<_> = Axis::ALL.iter().map(|&a| xi_field(&grid, a)).collect::<Result<_>>()?;
    let mut su2_xi: f64 = 0.0;
    let mut spectrum: f64 = 0.0;
    let mut constraint: f64 = 0.0;
    for i in 0..grid.len() {
        let ops = [xi[0].at(i), xi[1].at(i), xi[2].at(i)];
        su2_xi = su2_xi.max(su2_residual(&ops));
        for op in &ops {
            spectrum = spectrum.max(unit_spectrum_residual(op));
        }
        let kin = kinematics(Vec3::new(grid.points()[i], 0.0, 0.0), s.mass, &s.units)?;
        constraint = constraint.max(covariant_constraint_at(&kin).norm());
    }
    out.push("su2_xi_grid", su2_xi, t.su2);
    out.push("su2_sigma", su2_residual(&pauli_vector()), t.su2);
    out.push("xi_spectrum_grid", spectrum, t.spectrum);

    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    let mut collapse: f64 = 0.0;
    let mut boost_route: f64 = 0.0;
    let mut metric: f64 = 0.0;
    let mut det: f64 = 0.0;
    let mut inverse: f64 = 0.0;
    let sigma = pauli_vector();
    for _ in 0..s.random_momenta {
        let p = Vec3::from_fn(|_, _| rng.gen_range(-s.momentum_scale..s.momentum_scale));
        let kin = kinematics(p, s.mass, &s.units)?;
        let xi = xi_at(&kin);
        let from_boost = xi_from_boost(&kin);
        for k in 0..3 {
            collapse = collapse.max((xi[k] - sigma[k]).norm());
            boost_route = boost_route.max((from_boost[k] - sigma[k]).norm());
        }
        let pl = pauli_lubanski_at(&kin);
        let pl_boost = pauli_lubanski_from_boost(&kin);
        for k in 0..4 {
            boost_route = boost_route.max((pl[k] - pl_boost[k]).norm());
        }
        constraint = constraint.max(covariant_constraint_at(&kin).norm());
        let l = boost_matrix(p, s.mass, &s.units)?;
        let l_inv = boost_matrix(-p, s.mass, &s.units)?;
        metric = metric.max(l.metric_residual());
        det = det.max((l.determinant() - 1.0).abs());
        inverse = inverse.max((l_inv.matrix * l.matrix - nalgebra::Matrix4::identity()).amax());
    }
    out.push("covariant_constraint", constraint, t.constraint);
    out.push("xi_collapse_random", collapse, t.collapse);
    out.push("xi_boost_route_random", boost_route, t.collapse);
    out.push("boost_metric", metric, t.boost);
    out.push("boost_determinant", det, t.boost);
    out.push("boost_inverse", inverse, t.boost);
    Ok(out)
}

fn run_sterngerlach(s: &SternGerlachScenario) -> Result<ResultBundle> {
    let mut out = ResultBundle::empty("sterngerlach");
    let t = s.tolerances;
    let mut law: f64 = 0.0;
    let mut projector_gap: f64 = 0.0;
    let mut worst_overlap: f64 = 0.0;
    let mut spectral: f64 = 0.0;
    let mut completeness: f64 = 0.0;
    let mut frames: f64 = 0.0;
    let mut oracle: f64 = 0.0;
    let snapshot = s.snapshot_index.unwrap_or(s.thetas.len() / 2);
    let theta0 = s.thetas[0];
    if s.config(theta0, s.t_scaled).validate()?.x.abs() > 1e-12 {
        // tilted gradient: only the kick directions are defined, and they
        // carry no claim
        let defl = deflection_check(&s.config(theta0, s.t_scaled), &s.deflection_momenta)?;
        out.metric("deflection_direction_residual", defl.max_direction_residual);
        out.metric("deflection_same_side", if defl.same_side { 1.0 } else { 0.0 });
        return Ok(out);
    }
    for (k, &theta) in s.thetas.iter().enumerate() {
        let config = s.config(theta, s.t_scaled);
        let lab = evolve_lab_frame(&config)?;
        let rest = evolve_rest_frame(&config)?;
        let (c2, s2) = (theta.cos().powi(2), theta.sin().powi(2));
        law = law.max((lab.p_plus - c2).abs()).max((lab.p_minus - s2).abs());
        projector_gap = projector_gap
            .max((lab.p_plus - lab.p_plus_halfline).abs())
            .max((lab.p_minus - lab.p_minus_halfline).abs());
        worst_overlap = worst_overlap.max(lab.overlap);
        spectral = spectral.max(lab.spectral_residual);
        completeness = completeness.max(lab.p_plus + lab.p_minus - 1.0);
        frames = frames
            .max((lab.p_plus - rest.p_plus).abs())
            .max((lab.p_minus - rest.p_minus).abs());
        oracle = oracle.max((lab.overlap - lab.overlap_closed_form).abs());
        out.sweep.push(SweepRow {
            theta,
            p_plus: lab.p_plus,
            p_minus: lab.p_minus,
            overlap: lab.overlap,
        });
        if k == snapshot {
            out.packets = (0..lab.snapshot.p_z.len())
                .map(|i| PacketRow {
                    p_z: lab.snapshot.p_z[i],
                    re_up: lab.snapshot.up[i].re,
                    im_up: lab.snapshot.up[i].im,
                    re_down: lab.snapshot.down[i].re,
                    im_down: lab.snapshot.down[i].im,
                })
                .collect();
            out.metric("snapshot_theta", theta);
            out.metric("p_star", lab.p_star);
            out.metric("t_lab", lab.t);
            out.metric("t_rest", rest.t);
        }
    }
    out.metric("max_overlap", worst_overlap);
    out.metric("max_probability_law_deviation", law);
    if s.t_scaled >= 5.0 {
        out.push("probability_law", law, t.probability);
    }
    let distinguishable = s.t_scaled > 1.0;
    if distinguishable {
        out.push("projector_agreement", projector_gap, worst_overlap.max(t.probability));
        out.push("completeness_bound", completeness.max(0.0), t.completeness_slack);
    }
    out.push("spectral_vs_analytic", spectral, t.spectral);
    out.push("rest_vs_lab_probabilities", frames, t.frame_agreement);

    // reference times t = 0 and t = 10 ħs_z/(αμ)
    for (label, scaled) in [("t0", 0.0), ("t10", 10.0)] {
        let config = s.config(theta0, scaled);
        let (ov, _) = distinguishability(&config)?;
        oracle = oracle.max((ov - overlap_closed_form(config.p_star(), config.s_z)).abs());
        out.metric(&format!("overlap_{label}"), ov);
        if scaled == 0.0 {
            out.push("overlap_at_t0", (ov - 1.0).abs(), t.overlap_oracle);
        } else {
            out.push("overlap_at_10_separation_times", ov, t.separated_overlap);
        }
    }
    out.push("overlap_closed_form", oracle, t.overlap_oracle);

    let defl = deflection_check(&s.config(theta0, s.t_scaled), &s.deflection_momenta)?;
    out.push("deflection_direction", defl.max_direction_residual, t.deflection);
    out.push("deflection_same_side", if defl.same_side { 0.0 } else { 1.0 }, 0.0);
    Ok(out)
}

fn run_galilean(s: &GalileanScenario) -> Result<ResultBundle> {
    let mut out = ResultBundle::empty("galilean-demo");
    let lattice = Lattice::new(s.spacing, s.half_count)?;
    let one = C64::new(1.0, 0.0);
    let psi = GalileanTwoParticleState::from_terms(lattice, GalileanFrame::C, &[(s.x1, s.x0, one), (s.x2, s.x0, one)])?;
    let phi = galilean_transform(&psi)?;
    let before = entanglement_entropy(&psi)?;
    let after = entanglement_entropy(&phi)?;
    out.metric("entropy_c", before);
    out.metric("entropy_a", after);
    out.push("entropy_product_in_c", before.abs(), s.tolerance);
    out.push("entropy_ln2_in_a", (after - LN_2).abs(), s.tolerance);
    let back = galilean_inverse(&phi)?;
    let round_trip = (back.amplitudes - &psi.amplitudes)
        .iter()
        .map(|a| a.norm())
        .fold(0.0, f64::max);
    out.push("round_trip", round_trip, s.tolerance);
    let (p0, p1) = probability_report(&psi, |xa, xb| xb > xa)?;
    out.metric("probability_b_right_of_a", p0);
    out.push("probability_conservation", (p0 - p1).abs(), s.tolerance);
    Ok(out)
}

fn run_covariance(s: &CovarianceScenario) -> Result<ResultBundle> {
    let mut out = ResultBundle::empty("covariance-check");
    let t = s.tolerances;
    let boost = SuperposedBoost::new(s.m_a, s.m_c, s.units)?;
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    let mut momenta = sorted_battery(&mut rng, s.battery, s.battery_max);
    // include A at rest and A at p = m_A c
    momenta.push(0.0);
    momenta.push(boost.rest_momentum(s.m_a * s.units.c));

    let report = conjugation_check(&boost, &Vec3::from(s.e_lab), &Vec3::from(s.b_lab), s.mu, &momenta)?;
    out.push("conjugation_h0", report.covariant_residual, t.conjugation);
    out.push("h0_identity", report.h0_identity_residual, t.h0_identity);
    out.push("spectrum_h0_vs_rest", report.spectrum_residual, t.spectrum);
    out.push(
        "literal_conjugation_is_time_dilation",
        report.literal_dilation_residual,
        t.conjugation,
    );
    out.metric("literal_conjugation_residual", report.literal_residual);

    let mut infidelity: f64 = 0.0;
    for &pi in &momenta {
        let rest = SpinorField::sharp(pi, s.m_c, random_spinor(&mut rng), s.units, Frame::Rest)?;
        let r = evolve_covariance_check(&boost, &rest, &Vec3::from(s.b_rest), s.mu, s.t_a)?;
        infidelity = infidelity.max(1.0 - r.fidelity);
    }
    out.push("two_path_infidelity", infidelity.max(0.0), t.fidelity);
    Ok(out)
}

// ---------------------------------------------------------------- emission

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    SummaryJson,
    SeriesCsv,
    Both,
}

impl FromStr for OutputFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "summary-json" => Ok(OutputFormat::SummaryJson),
            "series-csv" => Ok(OutputFormat::SeriesCsv),
            "both" => Ok(OutputFormat::Both),
            other => Err(Error::InvalidConfig {
                field: "format".into(),
                reason: format!("expected summary-json, series-csv or both, got `{other}`"),
            }),
        }
    }
}

pub const SUMMARY_FILE: &str = "summary.json";
pub const SCENARIO_FILE: &str = "scenario.toml";
pub const SWEEP_FILE: &str = "theta_sweep.csv";
pub const PACKETS_FILE: &str = "packets.csv";

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let io = |source| Error::Io {
        context: format!("writing {}", path.display()),
        source,
    };
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = path.with_file_name(format!(".{name}.{}.tmp", std::process::id()));
    let mut f = fs::File::create(&tmp).map_err(io)?;
    f.write_all(bytes).map_err(io)?;
    f.sync_all().map_err(io)?;
    fs::rename(&tmp, path).map_err(io)
}

fn csv_bytes<R: Serialize>(header: &[&str], rows: &[R]) -> Result<Vec<u8>> {
    let err = |e: csv::Error| Error::InvalidConfig {
        field: "series".into(),
        reason: e.to_string(),
    };
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(header).map_err(err)?;
    for r in rows {
        w.serialize(r).map_err(err)?;
    }
    w.into_inner().map_err(|e| Error::InvalidConfig {
        field: "series".into(),
        reason: e.to_string(),
    })
}

/// Writes the bundle into `dir` and returns the written paths. CSV series
/// are always written with their header, even when empty.
pub fn emit(bundle: &ResultBundle, format: OutputFormat, dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|source| Error::Io {
        context: format!("creating {}", dir.display()),
        source,
    })?;
    let mut written = Vec::new();
    if matches!(format, OutputFormat::SummaryJson | OutputFormat::Both) {
        let mut json = serde_json::to_string_pretty(bundle).map_err(|e| Error::InvalidConfig {
            field: "summary".into(),
            reason: e.to_string(),
        })?;
        json.push('\n');
        let path = dir.join(SUMMARY_FILE);
        write_atomic(&path, json.as_bytes())?;
        written.push(path);
        if let Some(s) = &bundle.scenario {
            let path = dir.join(SCENARIO_FILE);
            write_atomic(&path, s.to_toml()?.as_bytes())?;
            written.push(path);
        }
    }
    if matches!(format, OutputFormat::SeriesCsv | OutputFormat::Both) {
        let path = dir.join(SWEEP_FILE);
        write_atomic(
            &path,
            &csv_bytes(&["theta", "p_plus", "p_minus", "overlap"], &bundle.sweep)?,
        )?;
        written.push(path);
        let path = dir.join(PACKETS_FILE);
        write_atomic(
            &path,
            &csv_bytes(&["p_z", "re_up", "im_up", "re_down", "im_down"], &bundle.packets)?,
        )?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<Scenario> {
        parse_scenario(text, "inline")
    }

    #[test]
    fn minimal_sterngerlach_fills_defaults() {
        let s = parse("kind = \"sterngerlach\"\nalpha = 2.0\nthetas = [0.7853981633974483]\n").unwrap();
        let Scenario::Sterngerlach(sg) = &s else { panic!() };
        assert_eq!(sg.s_z, 1.0);
        assert_eq!(sg.t_scaled, 5.0);
        assert_eq!(sg.tolerances.probability, 1e-4);
        let echo = s.to_toml().unwrap();
        assert!(echo.contains("s_z = 1.0"));
        assert_eq!(parse(&echo).unwrap(), s);
        let bundle = run(&s).unwrap();
        assert!((bundle.sweep[0].p_plus - 0.5).abs() < 1e-4);
        assert!(bundle.all_passed(), "{:#?}", bundle.checks);
    }

    #[test]
    fn schema_errors_name_the_field() {
        let err = parse("kind = \"sterngerlach\"\nthetas = [0.1]\n")
            .unwrap_err()
            .to_string();
        assert!(err.contains("alpha"), "{err}");
        let err = parse("kind = \"sterngerlach\"\nalpha = 1.0\ns_z = -0.5\n")
            .unwrap_err()
            .to_string();
        assert!(err.contains("s_z"), "{err}");
        let err = parse("kind = \"galilean-demo\"\nbogus = 1\n").unwrap_err().to_string();
        assert!(err.contains("bogus"), "{err}");
        let err = parse("kind = \"transform\"\nunits = { hbar = 1.0, c = -1.0 }\n")
            .unwrap_err()
            .to_string();
        assert!(err.contains('c'), "{err}");
        assert!(parse("kind = \"teleport\"\n").is_err());
    }

    #[test]
    fn every_kind_runs_with_defaults() {
        for kind in ["transform", "algebra-check", "galilean-demo", "covariance-check"] {
            let s = parse(&format!("kind = \"{kind}\"\n")).unwrap();
            let b = run(&s).unwrap();
            assert!(b.all_passed(), "{kind}: {:#?}", b.checks);
            let mut names: Vec<_> = b.checks.iter().map(|c| &c.name).collect();
            names.sort();
            names.dedup();
            assert_eq!(names.len(), b.checks.len());
        }
    }

    #[test]
    fn format_parsing() {
        assert_eq!("both".parse::<OutputFormat>().unwrap(), OutputFormat::Both);
        assert!("xml".parse::<OutputFormat>().is_err());
    }
}
