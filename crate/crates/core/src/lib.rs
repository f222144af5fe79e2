//! Stochastic orders under distortion, and coherent systems built on
//! exchangeable copulas.

// `!(a < b)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod catalog;
pub mod copulas;
pub mod distortions;
pub mod distributions;
pub mod error;
pub mod fixtures;
pub mod forms;
pub mod funcalc;
pub mod numerics;
pub mod orders;
pub mod sweep;
pub mod systems;

pub use catalog::CatalogDistortion;
pub use copulas::CopulaHandle;
pub use distortions::{Distortion, ShapeReport};
pub use distributions::{Distribution, DistributionSpec};
pub use error::{Error, Result};
pub use funcalc::Expr;
pub use numerics::{Grid, GridSpec, Tolerance};
pub use orders::{OrderKind, OrderVerdict};
pub use sweep::{SweepConfig, SweepSummary};
pub use systems::{MinimalSignature, Scalar, ShapeVerdict};
