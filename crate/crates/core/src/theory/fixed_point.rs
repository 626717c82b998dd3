//! Solvers for the spiked centring `theta`, its bootstrap analogue `zeta`,
//! and the edge location `lambda_0` of the largest bootstrapped bulk
//! eigenvalue.

use super::roots::bracketed_root;
use super::PopulationSpectrum;
use crate::bootstrap::BootstrapWeights;
use crate::error::{Error, Result};

fn spike(spec: &PopulationSpectrum, i: usize) -> Result<f64> {
    spec.spikes().get(i).copied().ok_or_else(|| {
        Error::Dimension(format!("spike index {i} out of range for {} spikes", spec.spikes().len()))
    })
}

fn bulk_sum(bulk: &[f64], lambda: f64) -> f64 {
    bulk.iter().map(|&l| l / (1.0 - l / lambda)).sum()
}

/// `theta / lambda_i - [1 - (n theta)^{-1} sum_k l_k / (1 - l_k / lambda_i)]^{-1}`.
pub fn theta_residual(spec: &PopulationSpectrum, i: usize, n: usize, theta: f64) -> Result<f64> {
    let lambda = spike(spec, i)?;
    let s = bulk_sum(spec.bulk(), lambda);
    Ok(theta / lambda - 1.0 / (1.0 - s / (n as f64 * theta)))
}

/// `theta_i` on `[lambda_i, 2 lambda_i]` for the 0-based spike `i`.
pub fn solve_theta(spec: &PopulationSpectrum, i: usize, n: usize) -> Result<f64> {
    let lambda = spike(spec, i)?;
    let top_bulk = spec.bulk().first().copied().unwrap_or(0.0);
    if !(lambda > top_bulk) {
        return Err(Error::NoRoot { what: "theta", lo: lambda, hi: 2.0 * lambda });
    }
    let s = bulk_sum(spec.bulk(), lambda);
    let nf = n as f64;
    bracketed_root(|t| t / lambda - 1.0 / (1.0 - s / (nf * t)), lambda, 2.0 * lambda, "theta")
}

fn zeta_rhs(bulk: &[f64], theta: f64, w: &[f64], zeta: f64) -> f64 {
    let n = w.len() as f64;
    let inner: f64 = bulk.iter().map(|&l| l / (1.0 - l * zeta / theta)).sum();
    let scale = inner / (n * theta);
    w.iter().map(|&wj| wj / (1.0 - wj * scale)).sum::<f64>() / n
}

pub fn zeta_residual(spec: &PopulationSpectrum, theta: f64, w: &BootstrapWeights, zeta: f64) -> f64 {
    zeta - zeta_rhs(spec.bulk(), theta, w.values(), zeta)
}

/// `zeta_hat_i` on `[tr W / n, 2 tr W / n]` given `theta_i`.
pub fn solve_zeta_hat(spec: &PopulationSpectrum, theta: f64, w: &BootstrapWeights) -> Result<f64> {
    if w.is_empty() {
        return Err(Error::Dimension("empty weight vector".into()));
    }
    let lo = w.trace() / w.len() as f64;
    let bulk = spec.bulk();
    let ws = w.values();
    bracketed_root(|z| z - zeta_rhs(bulk, theta, ws, z), lo, 2.0 * lo, "zeta_hat")
}

/// Order-statistic summary of the weights entering the edge equation.
#[derive(Debug, Clone, Copy, PartialEq)]
struct EdgeWeights {
    w1: f64,
    /// `sum_{j >= 2} w_(j) / (1 - w_(j) / w_(1))`
    t: f64,
    n: f64,
}

fn edge_weights(w: &BootstrapWeights) -> Result<EdgeWeights> {
    let sorted = w.sorted_values();
    if sorted.len() < 2 {
        return Err(Error::Dimension("need at least two weights".into()));
    }
    let w1 = sorted[0];
    if !(w1 > sorted[1]) {
        return Err(Error::DegenerateTop);
    }
    let t = sorted[1..].iter().map(|&wj| wj / (1.0 - wj / w1)).sum();
    Ok(EdgeWeights { w1, t, n: sorted.len() as f64 })
}

#[inline]
fn pole(l: f64, e: &EdgeWeights) -> f64 {
    l * e.t / e.n
}

fn lambda0_equation(bulk: &[f64], e: &EdgeWeights, x: f64) -> f64 {
    bulk.iter().map(|&l| l / (x - pole(l, e))).sum::<f64>() / e.n - 1.0 / e.w1
}

/// `n^{-1} sum_i l_i / (lambda_0 - l_i T / n) - 1 / w_(1)` over `bulk[deflate_k..]`.
pub fn lambda0_residual(bulk: &[f64], w: &BootstrapWeights, deflate_k: usize, lambda0: f64) -> Result<f64> {
    let e = edge_weights(w)?;
    let b = bulk
        .get(deflate_k..)
        .ok_or_else(|| Error::Dimension(format!("cannot deflate {deflate_k} of {}", bulk.len())))?;
    Ok(lambda0_equation(b, &e, lambda0))
}

/// `lambda_0^{(k)}` with the leading `deflate_k` bulk values removed; the
/// search starts at the pole of the largest remaining value and the right
/// end doubles until the equation changes sign.
pub fn solve_lambda0(bulk: &[f64], w: &BootstrapWeights, deflate_k: usize) -> Result<f64> {
    let e = edge_weights(w)?;
    let rest = bulk
        .get(deflate_k..)
        .filter(|b| !b.is_empty())
        .ok_or_else(|| Error::Dimension(format!("cannot deflate {deflate_k} of {} bulk values", bulk.len())))?;
    lambda0_on(rest, &e)
}

fn lambda0_on(bulk: &[f64], e: &EdgeWeights) -> Result<f64> {
    let top = bulk.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = pole(top, e);
    let mass: f64 = bulk.iter().sum::<f64>() / e.n;
    if !(mass > 0.0) {
        return Err(Error::NoRoot { what: "lambda_0", lo, hi: f64::INFINITY });
    }
    let f = |x: f64| lambda0_equation(bulk, e, x);
    // f(lo + w1 * mass) <= 0 always, so the doubling stops by then
    let mut step = e.w1 * mass / 1024.0;
    let mut hi = lo + step;
    while f(hi) > 0.0 {
        step *= 2.0;
        hi = lo + step;
        if !hi.is_finite() {
            return Err(Error::NoRoot { what: "lambda_0", lo, hi });
        }
    }
    bracketed_root(f, lo, hi, "lambda_0")
}
