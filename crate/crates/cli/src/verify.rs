use std::fs::File;
use std::path::Path;

use factorboot::rng::{child_seed, stream, Domain};
use factorboot::simulation::{generate_dgp, phase_scan, DgpParams, PhaseScan};
use factorboot::stats::normal_cdf;
use factorboot::theory::verify::{grid, verify_bias, verify_gaussian_limit, verify_gumbel, BiasCurves, BiasSetup};
use factorboot::{Exec, TestConfig, WeightScheme};

use crate::args::{VerifyArgs, VerifyKind};
use crate::error::{CliError, CliResult};

/// Result of one check: a headline distance against its tolerance plus the
/// table behind it.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub kind: &'static str,
    pub distance: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub detail: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Outcome {
    pub fn summary(&self) -> String {
        format!(
            "{}: distance = {:.4} (tolerance {}) {}{}",
            self.kind,
            self.distance,
            self.tolerance,
            if self.passed { "PASS" } else { "FAIL" },
            if self.detail.is_empty() { String::new() } else { format!(" [{}]", self.detail) }
        )
    }

    pub fn write_curve(&self, path: &Path) -> CliResult<()> {
        let mut w = csv::Writer::from_writer(File::create(path)?);
        w.write_record(&self.header).map_err(|e| CliError::Input(e.to_string()))?;
        for r in &self.rows {
            w.write_record(r).map_err(|e| CliError::Input(e.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }
}

fn fmt(v: f64) -> String {
    format!("{v:.6}")
}

/// Spiked statistics of index `index` on `panels` independent draws.
#[derive(Debug, Clone)]
pub struct GaussianStudy {
    pub dgp: DgpParams,
    pub index: usize,
    pub scheme: WeightScheme,
    pub panels: usize,
    pub b: usize,
}

/// Mean KS distance over panels and the panel-averaged CDF on `s_grid`.
pub fn gaussian_study(st: &GaussianStudy, s_grid: &[f64], seed: u64) -> CliResult<(f64, Vec<f64>)> {
    if st.b == 0 || st.panels == 0 {
        return Err(CliError::Input("B and reps must be at least 1".into()));
    }
    st.dgp.validate()?;
    let mut ks = 0.0;
    let mut curve = vec![0.0; s_grid.len()];
    for rep in 0..st.panels {
        let s = child_seed(seed, rep as u64, 0);
        let x = generate_dgp(&st.dgp, &mut stream(s, Domain::Data, 0))?;
        let g = verify_gaussian_limit(&x, st.index, st.scheme, st.b, child_seed(s, 1, 0), Exec::Parallel)?;
        ks += g.ks / st.panels as f64;
        for (acc, v) in curve.iter_mut().zip(g.tail_curve(s_grid)) {
            *acc += v / st.panels as f64;
        }
    }
    Ok((ks, curve))
}

pub fn gaussian(st: &GaussianStudy, tol: f64, seed: u64) -> CliResult<Outcome> {
    let s_grid = grid(-3.0, 3.0, 61);
    let (ks, curve) = gaussian_study(st, &s_grid, seed)?;
    Ok(Outcome {
        kind: "gaussian",
        distance: ks,
        tolerance: tol,
        passed: ks <= tol,
        detail: format!("index {}, {} panels, B = {}", st.index, st.panels, st.b),
        header: vec!["s".into(), "empirical".into(), "theoretical".into()],
        rows: s_grid.iter().zip(&curve).map(|(&s, &e)| vec![fmt(s), fmt(e), fmt(normal_cdf(s))]).collect(),
    })
}

/// Factor-free design with identity noise covariance.
pub fn gumbel(p: usize, n: usize, draws: usize, tol: f64, seed: u64) -> CliResult<Outcome> {
    if draws == 0 {
        return Err(CliError::Input("need at least one bootstrap draw".into()));
    }
    let dgp = DgpParams::new(p, n, 0.0, 0.0, 0.0);
    dgp.validate()?;
    let x = generate_dgp(&dgp, &mut stream(seed, Domain::Data, 0))?;
    let bulk = vec![1.0; p];
    let g = verify_gumbel(&x, &bulk, draws, child_seed(seed, 1, 0), Exec::Parallel)?;
    let s_grid = grid(-3.0, 6.0, 91);
    let emp = factorboot::stats::empirical_cdf(&g.transforms, &s_grid);
    Ok(Outcome {
        kind: "gumbel",
        distance: g.ks,
        tolerance: tol,
        passed: g.ks <= tol,
        detail: format!("p = {p}, n = {n}, {draws} draws"),
        header: vec!["s".into(), "empirical".into(), "theoretical".into()],
        rows: s_grid
            .iter()
            .zip(&emp)
            .map(|(&s, &e)| vec![fmt(s), fmt(e), fmt(factorboot::stats::gumbel_cdf(s))])
            .collect(),
    })
}

fn sup_gap(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Largest gap between each empirical curve and its limit.
pub fn bias(setup: &BiasSetup, tol: f64, seed: u64) -> CliResult<(Outcome, BiasCurves)> {
    let c = verify_bias(setup, seed, Exec::Parallel)?;
    let gap_boot = sup_gap(&c.bootstrap, &c.theory_bootstrap);
    let gap_bench = sup_gap(&c.benchmark, &c.theory_benchmark);
    let d = gap_boot.max(gap_bench);
    let monotone = [&c.bootstrap, &c.benchmark].iter().all(|v| v.windows(2).all(|w| w[1] >= w[0]));
    let rows = (0..c.grid.len())
        .map(|k| {
            vec![fmt(c.grid[k]), fmt(c.bootstrap[k]), fmt(c.benchmark[k]), fmt(c.theory_bootstrap[k]), fmt(c.theory_benchmark[k])]
        })
        .collect();
    let out = Outcome {
        kind: "bias",
        distance: d,
        tolerance: tol,
        passed: d <= tol && monotone,
        detail: format!(
            "bootstrap gap {gap_boot:.4}, benchmark gap {gap_bench:.4}, scheme {}{}",
            setup.scheme,
            if monotone { "" } else { ", empirical curve not monotone" }
        ),
        header: ["s", "bootstrap", "benchmark", "theory_bootstrap", "theory_benchmark"].map(String::from).to_vec(),
        rows,
    };
    Ok((out, c))
}

/// Schemes in the order their detection boundaries should increase.
pub const PHASE_ORDER: [WeightScheme; 4] =
    [WeightScheme::Uniform, WeightScheme::Poisson, WeightScheme::Multiplier, WeightScheme::ChiSquare];

/// Counts adjacent pairs whose boundaries decrease; a missing boundary
/// sits above the whole grid.
pub fn phase_violations(scans: &[PhaseScan]) -> usize {
    let key = |s: &PhaseScan| s.boundary.unwrap_or(f64::INFINITY);
    scans.windows(2).filter(|w| key(&w[1]) < key(&w[0])).count()
}

pub fn weights(p: usize, n: usize, reps: usize, cfg: &TestConfig, seed: u64) -> CliResult<(Outcome, Vec<PhaseScan>)> {
    if reps == 0 {
        return Err(CliError::Input("reps must be at least 1".into()));
    }
    let g: Vec<f64> = (1..=8).map(|k| 0.5 * k as f64).collect();
    let scans = PHASE_ORDER
        .iter()
        .map(|&s| phase_scan(s, &g, p, n, reps, 0.8, cfg, seed, Exec::Parallel))
        .collect::<factorboot::Result<Vec<_>>>()?;
    let bad = phase_violations(&scans);
    let detail = scans
        .iter()
        .map(|s| format!("{}={}", s.scheme, s.boundary.map_or("none".into(), |b| b.to_string())))
        .collect::<Vec<_>>()
        .join(" ");
    let rows = scans
        .iter()
        .flat_map(|s| s.points.iter().map(|pt| vec![pt.scheme.to_string(), fmt(pt.vartheta), fmt(pt.exact), pt.reps.to_string()]))
        .collect();
    let out = Outcome {
        kind: "weights",
        distance: bad as f64,
        tolerance: 0.0,
        passed: bad == 0,
        detail,
        header: ["scheme", "vartheta", "exact", "reps"].map(String::from).to_vec(),
        rows,
    };
    Ok((out, scans))
}

pub fn run(args: &VerifyArgs) -> CliResult<Outcome> {
    if args.b == Some(0) {
        return Err(CliError::Input("B must be at least 1".into()));
    }
    let scheme: Option<WeightScheme> = args.scheme.map(Into::into);
    let out = match args.kind {
        VerifyKind::Gaussian => {
            let n = args.n.unwrap_or(400);
            let st = GaussianStudy {
                dgp: DgpParams::new(args.p.unwrap_or(n), n, args.vartheta.unwrap_or(1.0), args.a.unwrap_or(0.4), 0.0),
                index: args.index.unwrap_or(1),
                scheme: scheme.unwrap_or(WeightScheme::Multiplier),
                panels: args.reps.unwrap_or(20),
                b: args.b.unwrap_or(400),
            };
            gaussian(&st, args.tol.unwrap_or(0.08), args.seed)?
        }
        VerifyKind::Gumbel => {
            let n = args.n.unwrap_or(300);
            gumbel(args.p.unwrap_or(n), n, args.reps.unwrap_or(500), args.tol.unwrap_or(0.15), args.seed)?
        }
        VerifyKind::Bias => {
            let n = args.n.unwrap_or(200);
            let a = args.a.unwrap_or(0.0);
            let setup = BiasSetup {
                dgp: DgpParams { beta_f: 0.0, ..DgpParams::new(args.p.unwrap_or(n), n, args.vartheta.unwrap_or(1.0), a, 0.0) },
                index: args.index.unwrap_or(3),
                scheme: scheme.unwrap_or(WeightScheme::Standard),
                reps: args.reps.unwrap_or(100),
                b: args.b.unwrap_or(200),
                grid: grid(-3.0, 50.0, 54),
            };
            bias(&setup, args.tol.unwrap_or(0.2), args.seed)?.0
        }
        VerifyKind::Weights => {
            let n = args.n.unwrap_or(200);
            let mut cfg = TestConfig::default();
            if let Some(b) = args.b {
                cfg.b = b;
            }
            weights(args.p.unwrap_or(n), n, args.reps.unwrap_or(30), &cfg, args.seed)?.0
        }
    };
    if let Some(path) = &args.curve {
        out.write_curve(path)?;
    }
    Ok(out)
}
