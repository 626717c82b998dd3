use serde::Serialize;

use super::dgp::{generate_dgp, DgpParams, DgpVariant, N_FACTORS};
use crate::bootstrap::WeightScheme;
use crate::config::TestConfig;
use crate::error::Result;
use crate::exec::Exec;
use crate::nonspiked::estimate_r_nonspiked;
use crate::rng::{self, child_seed, Domain};

/// Detection rate of the thresholding method at one signal strength.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhasePoint {
    pub scheme: WeightScheme,
    pub vartheta: f64,
    pub exact: f64,
    pub reps: usize,
}

/// Outcome of an ascending scan for one weight scheme.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseScan {
    pub scheme: WeightScheme,
    pub points: Vec<PhasePoint>,
    /// Smallest grid value reaching the target rate, if any.
    pub boundary: Option<f64>,
}

/// Scans `grid` in ascending order on the orthonormal-loading design and
/// stops at the first strength where exact recovery reaches `target`.
/// The same panels are reused for every scheme at a given strength.
#[allow(clippy::too_many_arguments)]
pub fn phase_scan(
    scheme: WeightScheme,
    grid: &[f64],
    p: usize,
    n: usize,
    reps: usize,
    target: f64,
    cfg: &TestConfig,
    master_seed: u64,
    exec: Exec,
) -> Result<PhaseScan> {
    let mut sorted = grid.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut points = Vec::new();
    let mut boundary = None;
    for (gi, &vartheta) in sorted.iter().enumerate() {
        let params = DgpParams {
            beta_f: 0.0,
            variant: DgpVariant::Orthonormal,
            ..DgpParams::new(p, n, vartheta, 0.0, 0.0)
        };
        params.validate()?;
        let hits = exec.try_map(reps, |rep| {
            let seed = child_seed(master_seed, gi as u64, rep as u64);
            let x = generate_dgp(&params, &mut rng::stream(seed, Domain::Data, 0))?;
            let c = TestConfig { scheme, seed: child_seed(seed, 1, 0), exec: Exec::Serial, ..cfg.clone() };
            estimate_r_nonspiked(&x, &c).map(|t| t.r_hat == N_FACTORS)
        })?;
        let exact = hits.iter().filter(|&&h| h).count() as f64 / reps as f64;
        points.push(PhasePoint { scheme, vartheta, exact, reps });
        if exact >= target {
            boundary = Some(vartheta);
            break;
        }
    }
    Ok(PhaseScan { scheme, points, boundary })
}
