//! Bootstrap estimation of the number of factors in high-dimensional panels.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bootstrap;
pub mod config;
pub mod error;
pub mod exec;
pub mod linalg;
pub mod nonspiked;
pub mod rng;
pub mod spiked;
pub mod simulation;
pub mod stats;
pub mod theory;
pub mod trace;

pub use bootstrap::{BootstrapWeights, WeightScheme};
pub use config::TestConfig;
pub use error::{Error, Result};
pub use exec::Exec;
pub use linalg::DataMatrix;
pub use trace::{DecisionTrace, Method};
