use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::data::DataMatrix;
use super::lanczos::{self, CompanionOp, PrimalOp};
use crate::bootstrap::BootstrapWeights;
use crate::error::{Error, Result};

/// Eigenvalues at or above `-NEGATIVE_TOL * lambda_max` are rounding noise.
pub const NEGATIVE_TOL: f64 = 1e-10;
/// Eigenvalues below `ZERO_TOL * lambda_max` are reported as exactly zero.
pub const ZERO_TOL: f64 = 1e-12;

/// Operators up to this dimension are always decomposed densely.
const DENSE_MAX_DIM: usize = 64;

/// Leading eigenvalues of a covariance-type matrix, optionally with the
/// matching unit eigenvectors of the n×n companion `n^{-1} X^T X`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSystem {
    /// Descending, non-negative.
    pub eigenvalues: Vec<f64>,
    /// n×k; column `i` pairs with `eigenvalues[i]`.
    pub companion_vectors: Option<DMatrix<f64>>,
}

impl EigenSystem {
    pub fn companion_vector(&self, i: usize) -> Option<DVector<f64>> {
        self.companion_vectors.as_ref().map(|v| v.column(i).into_owned())
    }
}

/// Clamps rounding noise and checks for genuinely negative eigenvalues.
pub(crate) fn clean_spectrum(vals: &mut [f64]) -> Result<()> {
    if let Some(v) = vals.iter().find(|v| !v.is_finite()) {
        return Err(Error::Solver(format!("non-finite eigenvalue {v}")));
    }
    let top = vals.iter().copied().fold(0.0f64, f64::max);
    for v in vals.iter_mut() {
        if *v < -NEGATIVE_TOL * top.max(f64::MIN_POSITIVE) {
            return Err(Error::Solver(format!(
                "eigenvalue {v} is negative beyond tolerance (largest {top})"
            )));
        }
        if *v <= ZERO_TOL * top {
            *v = 0.0;
        }
    }
    Ok(())
}

/// Full symmetric decomposition, eigenvalues descending.
pub(crate) fn dense_eigen(
    m: DMatrix<f64>,
    want_vectors: bool,
) -> Result<(Vec<f64>, Option<DMatrix<f64>>)> {
    let dim = m.nrows();
    if !want_vectors {
        let mut vals: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
        vals.sort_by(|a, b| b.total_cmp(a));
        clean_spectrum(&mut vals)?;
        return Ok((vals, None));
    }
    let eig = SymmetricEigen::try_new(m, f64::EPSILON, 1000 * dim.max(1))
        .ok_or_else(|| Error::Solver(format!("no convergence for a {dim}×{dim} matrix")))?;
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let mut vals: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    clean_spectrum(&mut vals)?;
    let vecs = DMatrix::from_fn(dim, dim, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok((vals, Some(vecs)))
}

/// Flips `v` so its first coordinate that is not numerically zero is positive.
pub(crate) fn orient(v: &mut DVector<f64>) {
    if let Some(first) = v.iter().find(|x| x.abs() > 1e-10) {
        if *first < 0.0 {
            v.neg_mut();
        }
    }
}

/// Top-`k` eigenvalues of `n^{-1} X X^T`, decomposing whichever of the p×p
/// and n×n Gram forms is smaller.
///
/// With `want_vectors`, the unit eigenvectors of the companion
/// `n^{-1} X^T X` come back with their first non-negligible coordinate made
/// positive.
pub fn sample_covariance_eigs(x: &DataMatrix, k: usize, want_vectors: bool) -> Result<EigenSystem> {
    let (p, n) = (x.p(), x.n());
    if k < 1 || k > p.min(n) {
        return Err(Error::Dimension(format!("k = {k} outside 1..={}", p.min(n))));
    }
    let xm = x.values();
    let inv_n = 1.0 / n as f64;

    if p < n {
        let primal = (xm * xm.transpose()) * inv_n;
        let (vals, vecs) = dense_eigen(primal, want_vectors)?;
        let eigenvalues = vals[..k].to_vec();
        if !want_vectors {
            return Ok(EigenSystem { eigenvalues, companion_vectors: None });
        }
        if eigenvalues.iter().all(|&v| v > 0.0) {
            // u_i = X^T g_i / sqrt(n lambda_i)
            let g = vecs.expect("requested");
            let mut u = DMatrix::zeros(n, k);
            for i in 0..k {
                let mut col = xm.transpose() * g.column(i);
                let norm = col.norm();
                col /= norm;
                orient(&mut col);
                u.set_column(i, &col);
            }
            return Ok(EigenSystem { eigenvalues, companion_vectors: Some(u) });
        }
        // Zero eigenvalues leave the companion vectors undetermined by the
        // primal side; fall through to the companion decomposition.
    }

    let companion = (xm.transpose() * xm) * inv_n;
    let (vals, vecs) = dense_eigen(companion, want_vectors)?;
    let eigenvalues = vals[..k].to_vec();
    let companion_vectors = vecs.map(|v| {
        let mut u = v.columns(0, k).into_owned();
        for mut col in u.column_iter_mut() {
            let mut c = col.clone_owned();
            orient(&mut c);
            col.copy_from(&c);
        }
        u
    });
    Ok(EigenSystem { eigenvalues, companion_vectors })
}

#[derive(Debug, Clone)]
enum Repr {
    /// p×n data; the operator is `n^{-1} X W X^T`.
    Primal(DMatrix<f64>),
    /// n×n Gram `X^T X`; the operator is `n^{-1} W^{1/2} G W^{1/2}`.
    Companion(DMatrix<f64>),
}

/// Reusable state for extracting bootstrapped eigenvalues of one data set.
///
/// Holds whichever of the data (when p < n) or its n×n Gram matrix gives
/// the smaller symmetric form, so each replicate costs one eigenvalue
/// extraction.
#[derive(Debug, Clone)]
pub struct WeightedSpectrum {
    repr: Repr,
    n: usize,
}

impl WeightedSpectrum {
    pub fn new(x: &DataMatrix) -> Self {
        let (p, n) = (x.p(), x.n());
        let xm = x.values();
        let repr = if p < n {
            Repr::Primal(xm.clone())
        } else {
            Repr::Companion(xm.transpose() * xm)
        };
        Self { repr, n }
    }

    /// Wraps a precomputed n×n Gram matrix `X^T X`.
    pub fn from_gram(gram: DMatrix<f64>) -> Result<Self> {
        let n = gram.nrows();
        if n != gram.ncols() || n < 2 {
            return Err(Error::Dimension(format!("gram must be square with n >= 2, got {:?}", gram.shape())));
        }
        let scale = gram.amax().max(f64::MIN_POSITIVE);
        for i in 0..n {
            for j in 0..i {
                if (gram[(i, j)] - gram[(j, i)]).abs() > 1e-12 * scale {
                    return Err(Error::Dimension("gram is not symmetric".into()));
                }
            }
        }
        Ok(Self { repr: Repr::Companion(gram), n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Dimension of the symmetric form that gets decomposed.
    pub fn dim(&self) -> usize {
        match &self.repr {
            Repr::Primal(x) => x.nrows(),
            Repr::Companion(g) => g.nrows(),
        }
    }

    /// Top-`k` eigenvalues of `n^{-1} X W X^T` for weights `w`.
    pub fn top_eigenvalues(&self, w: &[f64], k: usize) -> Result<Vec<f64>> {
        if w.len() != self.n {
            return Err(Error::Dimension(format!("{} weights for {} observations", w.len(), self.n)));
        }
        if let Some((index, &value)) = w.iter().enumerate().find(|(_, v)| !(**v >= 0.0)) {
            return Err(Error::NegativeWeight { index, value });
        }
        let dim = self.dim();
        if k > dim {
            return Err(Error::Dimension(format!("k = {k} exceeds {dim}")));
        }
        if k == 0 {
            return Ok(Vec::new());
        }
        let inv_n = 1.0 / self.n as f64;
        let dense = dim <= DENSE_MAX_DIM || 4 * k > dim;
        let mut vals = match &self.repr {
            Repr::Primal(x) => {
                if dense {
                    let mut y = x.clone();
                    for (mut col, &wj) in y.column_iter_mut().zip(w) {
                        col *= wj.sqrt();
                    }
                    dense_eigen((&y * y.transpose()) * inv_n, false)?.0
                } else {
                    let op = PrimalOp { x, w: DVector::from_column_slice(w), inv_n };
                    lanczos::top_eigenvalues(&op, k)?
                }
            }
            Repr::Companion(g) => {
                let sqrt_w = DVector::from_iterator(self.n, w.iter().map(|v| v.sqrt()));
                if dense {
                    let mut m = g.clone();
                    for j in 0..self.n {
                        for i in 0..self.n {
                            m[(i, j)] *= sqrt_w[i] * sqrt_w[j] * inv_n;
                        }
                    }
                    dense_eigen(m, false)?.0
                } else {
                    let op = CompanionOp { gram: g, sqrt_w, inv_n };
                    lanczos::top_eigenvalues(&op, k)?
                }
            }
        };
        vals.truncate(k);
        clean_spectrum(&mut vals)?;
        Ok(vals)
    }
}

/// Top-`k` eigenvalues of the bootstrapped covariance `n^{-1} X W X^T`.
pub fn weighted_covariance_eigs(x: &DataMatrix, w: &BootstrapWeights, k: usize) -> Result<EigenSystem> {
    let k_max = x.min_dim();
    if k > k_max {
        return Err(Error::Dimension(format!("k = {k} exceeds min(p, n) = {k_max}")));
    }
    let eigenvalues = WeightedSpectrum::new(x).top_eigenvalues(w.values(), k)?;
    Ok(EigenSystem { eigenvalues, companion_vectors: None })
}

/// Subtracts the rank-`k` truncated SVD from `X`.
///
/// The leading singular subspace is taken from the eigenvectors of the
/// smaller Gram matrix and projected out of the data.
pub fn svd_deflate(x: &DataMatrix, k: usize) -> Result<DataMatrix> {
    let m = x.min_dim();
    if k >= m {
        return Err(Error::Dimension(format!("cannot deflate {k} of {m} singular values")));
    }
    if k == 0 {
        return Ok(x.clone());
    }
    let xm = x.values();
    let deflated = if x.p() <= x.n() {
        let (_, vecs) = dense_eigen(xm * xm.transpose(), true)?;
        let u = vecs.expect("requested").columns(0, k).into_owned();
        xm - &u * (u.transpose() * xm)
    } else {
        let (_, vecs) = dense_eigen(xm.transpose() * xm, true)?;
        let v = vecs.expect("requested").columns(0, k).into_owned();
        xm - (xm * &v) * v.transpose()
    };
    DataMatrix::new(deflated)
}

/// All `min(p, n)` eigenvalues of `n^{-1} X X^T`, descending.
pub fn full_spectrum(x: &DataMatrix) -> Result<Vec<f64>> {
    sample_covariance_eigs(x, x.min_dim(), false).map(|e| e.eigenvalues)
}
