// `!(x > 0.0)` is used on purpose throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod lorentz;
pub mod matrix;
pub mod qrf;
pub mod scenario;
pub mod spinops;
pub mod statekit;
pub mod sterngerlach;

pub use error::{Error, Result};
