use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, Read};
use std::time::Instant;

use factorboot::linalg::sample_covariance_eigs;
use factorboot::nonspiked::estimate_r_nonspiked;
use factorboot::spiked::estimate_r_spiked;
use factorboot::{DecisionTrace, Method, TestConfig};
use serde::Serialize;

use crate::args::{EstimateArgs, MethodArg, TuningArgs};
use crate::error::{CliError, CliResult};
use crate::input::{read_panel, to_matrix};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Serialize)]
pub struct InputSummary {
    pub p: usize,
    pub n: usize,
    pub missing_cells: usize,
    pub standardized: bool,
}

#[derive(Debug, Serialize)]
pub struct EstimateReport {
    pub schema_version: u32,
    pub tool: &'static str,
    pub version: &'static str,
    pub seed: u64,
    pub input: InputSummary,
    pub tuning: TestConfig,
    /// Top `r_max` eigenvalues of the sample covariance.
    pub eigenvalues: Vec<f64>,
    pub methods: BTreeMap<Method, DecisionTrace>,
}

pub fn build_config(t: &TuningArgs, seed: u64) -> CliResult<TestConfig> {
    let mut cfg = TestConfig::default();
    if let Some(a) = t.alpha {
        cfg = cfg.with_alpha(a);
    }
    if let Some(c) = t.c_th {
        cfg.c_th = c;
    }
    if let Some(b) = t.b {
        cfg.b = b;
    }
    if let Some(r) = t.r {
        cfg.r = r;
    }
    if let Some(k) = t.rmax {
        cfg.r_max = k;
    }
    if let Some(s) = t.scheme {
        cfg.scheme = s.into();
    }
    cfg.seed = seed;
    cfg.validate()?;
    Ok(cfg)
}

fn selected(methods: &[MethodArg]) -> Vec<Method> {
    let mut out = Vec::new();
    for m in methods {
        let add: &[Method] = match m {
            MethodArg::Smd => &[Method::Smd],
            MethodArg::Ssd => &[Method::Ssd],
            MethodArg::Etmd => &[Method::Etmd],
            MethodArg::All => &Method::BOOTSTRAP,
        };
        for &x in add {
            if !out.contains(&x) {
                out.push(x);
            }
        }
    }
    out
}

pub fn run(args: &EstimateArgs) -> CliResult<EstimateReport> {
    let seed = args.seed.unwrap_or_else(|| {
        let s = rand::random::<u64>();
        eprintln!("seed: {s}");
        s
    });
    let cfg = build_config(&args.tuning, seed)?;
    let raw = if args.input.as_os_str() == "-" {
        let mut buf = Vec::new();
        io::stdin().read_to_end(&mut buf)?;
        read_panel(buf.as_slice(), args.transpose)?
    } else {
        let f = File::open(&args.input)
            .map_err(|e| CliError::Input(format!("{}: {e}", args.input.display())))?;
        read_panel(f, args.transpose)?
    };
    let x = to_matrix(&raw, args.standardize, args.impute)?;
    if cfg.r_max >= x.min_dim() {
        return Err(CliError::Numerical(format!(
            "rmax = {} must be below min(p, n) = {} (p = {}, n = {})",
            cfg.r_max,
            x.min_dim(),
            x.p(),
            x.n()
        )));
    }
    log::info!("panel p = {}, n = {}", x.p(), x.n());
    let eigenvalues = if cfg.r_max == 0 { Vec::new() } else { sample_covariance_eigs(&x, cfg.r_max, false)?.eigenvalues };

    let mut methods = BTreeMap::new();
    for m in selected(&args.method) {
        let start = Instant::now();
        let mut trace = match m {
            Method::Etmd => estimate_r_nonspiked(&x, &cfg)?,
            _ => estimate_r_spiked(&x, m, &cfg)?,
        };
        if args.timings {
            trace.runtime_seconds = Some(start.elapsed().as_secs_f64());
        }
        log::info!("{m}: r_hat = {}", trace.r_hat);
        methods.insert(m, trace);
    }
    Ok(EstimateReport {
        schema_version: SCHEMA_VERSION,
        tool: "factorboot",
        version: env!("CARGO_PKG_VERSION"),
        seed,
        input: InputSummary { p: x.p(), n: x.n(), missing_cells: raw.missing(), standardized: args.standardize },
        tuning: cfg,
        eigenvalues,
        methods,
    })
}
