use thiserror::Error;

use crate::statekit::Frame;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("grid points must be strictly increasing (violated at index {index})")]
    NonMonotoneGrid { index: usize },

    #[error("grid needs at least {required} points, got {found}")]
    GridTooSmall { required: usize, found: usize },

    #[error("mass must be positive, got {0}")]
    NonPositiveMass(f64),

    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },

    #[error("grids do not match")]
    GridMismatch,

    #[error("frame mismatch: expected {expected}, found {found}")]
    FrameMismatch { expected: Frame, found: Frame },

    #[error("amplitude array has length {found}, expected {expected}")]
    AmplitudeLength { expected: usize, found: usize },

    #[error("cannot normalize the zero state")]
    ZeroState,

    #[error("state is not normalized (norm = {norm})")]
    NotNormalized { norm: f64 },

    #[error("unknown axis `{0}` (expected x, y or z)")]
    InvalidAxis(String),

    #[error("direction vector must be nonzero")]
    ZeroDirection,

    #[error("operator is not Hermitian (residual {residual:e})")]
    NonHermitian { residual: f64 },

    #[error("operator is not a projector (residual {residual:e})")]
    NotProjector { residual: f64 },

    #[error("unknown field-tensor convention `{0}`")]
    UnknownConvention(String),

    #[error("covariant H0 requires the frozen field-tensor convention")]
    ConventionNotFrozen,

    #[error("target grid does not cover the transformed packet (norm loss {norm_loss:e})")]
    InsufficientCoverage { norm_loss: f64 },

    #[error("translated support falls outside the lattice ({clipped} amplitudes clipped)")]
    Clipping { clipped: usize },

    #[error("position {0} is not on the lattice")]
    OffLattice(f64),

    #[error("state does not factorize into spin and wavefunction (residual {residual:e})")]
    NotFactorizable { residual: f64 },

    #[error("this check requires a sharp-momentum state, got {points} grid points")]
    NotSharp { points: usize },

    #[error("geometry not allowed: {0}")]
    Geometry(String),

    #[error("invalid value for `{field}`: {reason}")]
    InvalidConfig { field: String, reason: String },

    #[error("{path}: {message}")]
    Parse { path: String, message: String },

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },

    #[error("scenario `{scenario}`: {source}")]
    Scenario {
        scenario: String,
        #[source]
        source: Box<Error>,
    },
}
