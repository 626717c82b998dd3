use serde::{Deserialize, Serialize};

use super::baselines::{baseline_er, ic_from_spectrum};
use super::dgp::{generate_dgp, DgpParams};
use crate::config::TestConfig;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::linalg::{full_spectrum, DataMatrix};
use crate::nonspiked::estimate_r_nonspiked;
use crate::rng::{self, child_seed, Domain};
use crate::spiked::estimate_r_spiked;
use crate::trace::Method;

/// One design point of a simulation study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub dgp: DgpParams,
    pub config: TestConfig,
}

/// Aggregate accuracy of one method on one scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub vartheta: f64,
    pub rho: f64,
    pub a: f64,
    pub n: usize,
    pub p: usize,
    pub method: Method,
    pub truth: usize,
    /// Replications that produced an estimate.
    pub reps: usize,
    pub skipped: usize,
    pub mean: f64,
    pub exact: f64,
    pub under: f64,
    pub over: f64,
    /// Per-replication estimates; `None` marks a skipped replication.
    #[serde(skip)]
    pub estimates: Vec<Option<usize>>,
}

/// Estimate of `r` by any method, bootstrap or baseline.
pub fn estimate_r(method: Method, x: &DataMatrix, cfg: &TestConfig) -> Result<usize> {
    match method {
        Method::Smd | Method::Ssd => estimate_r_spiked(x, method, cfg).map(|t| t.r_hat),
        Method::Etmd => estimate_r_nonspiked(x, cfg).map(|t| t.r_hat),
        Method::Er => baseline_er(&full_spectrum(x)?, cfg.r_max),
        Method::Ic => {
            if cfg.r_max >= x.min_dim() {
                return Err(Error::Dimension(format!("r_max = {} must be below min(p, n)", cfg.r_max)));
            }
            ic_from_spectrum(&full_spectrum(x)?, x.p(), x.n(), cfg.r_max)
        }
    }
}

/// Data seed of replication `rep` in scenario `scenario`.
pub fn replication_seed(master_seed: u64, scenario: usize, rep: usize) -> u64 {
    child_seed(master_seed, scenario as u64, rep as u64)
}

/// Runs every method on the same simulated panels. Replications run on
/// `exec`; each estimate inside runs serially.
pub fn run_monte_carlo(
    scenarios: &[Scenario],
    methods: &[Method],
    reps: usize,
    master_seed: u64,
    exec: Exec,
) -> Result<Vec<SummaryRow>> {
    if reps == 0 {
        return Err(Error::Config("reps must be at least 1".into()));
    }
    if methods.is_empty() {
        return Err(Error::Config("no methods selected".into()));
    }
    let mut rows = Vec::with_capacity(scenarios.len() * methods.len());
    for (si, sc) in scenarios.iter().enumerate() {
        sc.dgp.validate()?;
        sc.config.validate()?;
        let per_rep: Vec<Vec<Option<usize>>> = exec.map(reps, |rep| {
            let seed = replication_seed(master_seed, si, rep);
            let x = match generate_dgp(&sc.dgp, &mut rng::stream(seed, Domain::Data, 0)) {
                Ok(x) => x,
                Err(e) => {
                    log::warn!("scenario {si} replicate {rep}: {e}");
                    return vec![None; methods.len()];
                }
            };
            let cfg = TestConfig { seed: child_seed(seed, 1, 0), exec: Exec::Serial, ..sc.config.clone() };
            methods
                .iter()
                .map(|&m| match estimate_r(m, &x, &cfg) {
                    Ok(r) => Some(r),
                    Err(e) => {
                        log::warn!("scenario {si} replicate {rep} {m}: {}", e.in_replicate(rep));
                        None
                    }
                })
                .collect()
        });
        let truth = sc.dgp.true_r();
        for (mi, &method) in methods.iter().enumerate() {
            let estimates: Vec<Option<usize>> = per_rep.iter().map(|r| r[mi]).collect();
            rows.push(summarise(&sc.dgp, method, truth, estimates));
        }
    }
    Ok(rows)
}

fn summarise(d: &DgpParams, method: Method, truth: usize, estimates: Vec<Option<usize>>) -> SummaryRow {
    let done: Vec<usize> = estimates.iter().flatten().copied().collect();
    let m = done.len();
    let frac = |pred: &dyn Fn(usize) -> bool| {
        if m == 0 {
            f64::NAN
        } else {
            done.iter().filter(|&&r| pred(r)).count() as f64 / m as f64
        }
    };
    SummaryRow {
        vartheta: d.vartheta,
        rho: d.rho,
        a: d.a,
        n: d.n,
        p: d.p,
        method,
        truth,
        reps: m,
        skipped: estimates.len() - m,
        mean: if m == 0 { f64::NAN } else { done.iter().sum::<usize>() as f64 / m as f64 },
        exact: frac(&|r| r == truth),
        under: frac(&|r| r < truth),
        over: frac(&|r| r > truth),
        estimates,
    }
}
