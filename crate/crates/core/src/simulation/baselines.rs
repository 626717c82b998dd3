use crate::error::{Error, Result};
use crate::linalg::{full_spectrum, DataMatrix};

/// Eigenvalue-ratio estimate `argmax_k lambda_k / lambda_{k+1}` over
/// `k = 0..=r_max`, smallest index on ties. The `k = 0` ratio uses the mock
/// eigenvalue `sum(lambda) / ln(m)`, so pure noise can return 0.
pub fn baseline_er(eigs: &[f64], r_max: usize) -> Result<usize> {
    let needed = r_max + 1;
    let positive = eigs.iter().take_while(|&&v| v > 0.0).count();
    if positive < needed || eigs.len() < 2 {
        return Err(Error::InsufficientEigenvalues { needed, available: positive });
    }
    let mock = eigs.iter().sum::<f64>() / (eigs.len() as f64).ln();
    let mut best = (0, mock / eigs[0]);
    for k in 1..=r_max {
        let ratio = eigs[k - 1] / eigs[k];
        if ratio > best.1 {
            best = (k, ratio);
        }
    }
    Ok(best.0)
}

/// `IC_p2`: `argmin_k ln V(k) + k (n + p) / (n p) ln min(n, p)` over
/// `k = 0..=r_max`, with `V(k)` the mean squared residual after `k`
/// principal components.
pub fn baseline_ic(x: &DataMatrix, r_max: usize) -> Result<usize> {
    let (p, n) = (x.p(), x.n());
    if r_max >= p.min(n) {
        return Err(Error::Dimension(format!("r_max = {r_max} must be below min(p, n) = {}", p.min(n))));
    }
    let eigs = full_spectrum(x)?;
    ic_from_spectrum(&eigs, p, n, r_max)
}

pub(crate) fn ic_from_spectrum(eigs: &[f64], p: usize, n: usize, r_max: usize) -> Result<usize> {
    let (pf, nf) = (p as f64, n as f64);
    let penalty = (nf + pf) / (nf * pf) * pf.min(nf).ln();
    let mut tail: f64 = eigs.iter().sum();
    let mut best = (0, f64::INFINITY);
    for k in 0..=r_max {
        if k > 0 {
            tail -= eigs[k - 1];
        }
        let v = tail.max(0.0) / pf;
        let ic = v.ln() + k as f64 * penalty;
        if ic < best.1 {
            best = (k, ic);
        }
    }
    Ok(best.0)
}
