use std::fs;
use std::io::Write;

use factorboot::simulation::{run_monte_carlo, DgpParams, Scenario, SummaryRow};
use factorboot::{Method, TestConfig, WeightScheme};
use serde::{Deserialize, Serialize};

use crate::args::SimulateArgs;
use crate::error::{CliError, CliResult};

/// Study description as read from TOML. Every key is optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyFile {
    pub vartheta: Option<Vec<f64>>,
    pub rho: Option<Vec<f64>>,
    pub a: Option<Vec<f64>>,
    pub n: Option<Vec<usize>>,
    pub p: Option<Vec<usize>>,
    pub reps: Option<usize>,
    pub methods: Option<Vec<String>>,
    pub seed: Option<u64>,
    pub beta_f: Option<f64>,
    pub alpha: Option<f64>,
    #[serde(rename = "B")]
    pub b: Option<usize>,
    #[serde(rename = "R")]
    pub r: Option<usize>,
    pub rmax: Option<usize>,
    pub c_th: Option<f64>,
    pub scheme: Option<WeightScheme>,
}

#[derive(Debug, Serialize)]
pub struct StudyReport {
    pub schema_version: u32,
    pub seed: u64,
    pub reps: usize,
    pub methods: Vec<Method>,
    pub tuning: TestConfig,
    pub rows: Vec<SummaryRow>,
}

fn parse_methods(names: &[String]) -> CliResult<Vec<Method>> {
    let mut out: Vec<Method> = Vec::new();
    for s in names {
        let m: Method = s.parse().map_err(|e: factorboot::Error| CliError::Input(e.to_string()))?;
        if !out.contains(&m) {
            out.push(m);
        }
    }
    if out.is_empty() {
        return Err(CliError::Input("method list is empty".into()));
    }
    Ok(out)
}

/// Merges file and flags into scenarios. Designs without factors ignore
/// the sparsity exponent, so only one of them is kept per (rho, n).
pub fn plan(args: &SimulateArgs) -> CliResult<(Vec<Scenario>, Vec<Method>, usize, u64)> {
    let file: StudyFile = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
            toml::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?
        }
        None => StudyFile::default(),
    };
    let varthetas = args.vartheta.clone().or(file.vartheta).unwrap_or_else(|| vec![0.0, 1.0]);
    let rhos = args.rho.clone().or(file.rho).unwrap_or_else(|| vec![0.0]);
    let a_s = args.a.clone().or(file.a).unwrap_or_else(|| vec![0.0]);
    let ns = args.n.clone().or(file.n).unwrap_or_else(|| vec![100]);
    let ps = args.p.clone().or(file.p).unwrap_or_else(|| ns.clone());
    if ps.len() != ns.len() {
        return Err(CliError::Input(format!("p has {} entries but n has {}", ps.len(), ns.len())));
    }
    for (name, len) in [("vartheta", varthetas.len()), ("rho", rhos.len()), ("a", a_s.len()), ("n", ns.len())] {
        if len == 0 {
            return Err(CliError::Input(format!("{name} grid is empty")));
        }
    }
    let reps = args.reps.or(file.reps).unwrap_or(100);
    if reps == 0 {
        return Err(CliError::Input("reps must be at least 1".into()));
    }
    let names = args
        .methods
        .clone()
        .or(file.methods)
        .unwrap_or_else(|| Method::ALL.iter().map(|m| m.name().to_string()).collect());
    let methods = parse_methods(&names)?;
    let seed = args.seed.or(file.seed).unwrap_or(0);

    let mut cfg = TestConfig::default();
    let t = &args.tuning;
    if let Some(alpha) = t.alpha.or(file.alpha) {
        cfg = cfg.with_alpha(alpha);
    }
    if let Some(c) = t.c_th.or(file.c_th) {
        cfg.c_th = c;
    }
    cfg.b = t.b.or(file.b).unwrap_or(cfg.b);
    cfg.r = t.r.or(file.r).unwrap_or(cfg.r);
    cfg.r_max = t.rmax.or(file.rmax).unwrap_or(cfg.r_max);
    cfg.scheme = t.scheme.map(Into::into).or(file.scheme).unwrap_or(cfg.scheme);
    cfg.validate()?;

    let mut scenarios = Vec::new();
    for (&n, &p) in ns.iter().zip(&ps) {
        for &rho in &rhos {
            for &vartheta in &varthetas {
                for (ai, &a) in a_s.iter().enumerate() {
                    if vartheta == 0.0 && ai > 0 {
                        continue;
                    }
                    let mut dgp = DgpParams::new(p, n, vartheta, if vartheta == 0.0 { 0.0 } else { a }, rho);
                    if let Some(b) = file.beta_f {
                        dgp.beta_f = b;
                    }
                    dgp.validate()?;
                    scenarios.push(Scenario { dgp, config: cfg.clone() });
                }
            }
        }
    }
    Ok((scenarios, methods, reps, seed))
}

pub fn write_csv<W: Write>(rows: &[SummaryRow], out: W) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r).map_err(|e| CliError::Input(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

pub fn run(args: &SimulateArgs) -> CliResult<()> {
    let (scenarios, methods, reps, seed) = plan(args)?;
    log::info!("{} scenarios x {reps} replications", scenarios.len());
    let rows = run_monte_carlo(&scenarios, &methods, reps, seed, factorboot::Exec::Parallel)?;
    match &args.out_dir {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            write_csv(&rows, fs::File::create(dir.join("summary.csv"))?)?;
            let report = StudyReport {
                schema_version: crate::estimate::SCHEMA_VERSION,
                seed,
                reps,
                methods,
                tuning: scenarios[0].config.clone(),
                rows,
            };
            let json = serde_json::to_string_pretty(&report).map_err(|e| CliError::Input(e.to_string()))?;
            fs::write(dir.join("summary.json"), json + "\n")?;
            eprintln!("wrote {}", dir.display());
        }
        None => write_csv(&rows, std::io::stdout().lock())?,
    }
    Ok(())
}
