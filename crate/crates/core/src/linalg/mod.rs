//! Data preparation and symmetric eigen-decompositions.

mod data;
mod eigen;
pub mod lanczos;

pub use data::{prepare, DataMatrix};
pub use eigen::{
    full_spectrum, sample_covariance_eigs, svd_deflate, weighted_covariance_eigs, EigenSystem,
    WeightedSpectrum,
};
