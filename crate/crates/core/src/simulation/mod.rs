//! Simulation design, baselines and the replication harness.

mod baselines;
mod dgp;
mod monte_carlo;
mod phase;

pub use baselines::{baseline_er, baseline_ic};
pub use dgp::{
    draw_loadings, generate_dgp, population_eigenvalues, DgpParams, DgpVariant, BURN_IN, N_FACTORS,
};
pub use monte_carlo::{estimate_r, replication_seed, run_monte_carlo, Scenario, SummaryRow};
pub use phase::{phase_scan, PhasePoint, PhaseScan};
