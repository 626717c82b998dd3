//! Lanczos iteration with full reorthogonalization for the leading
//! eigenvalues of a symmetric positive semidefinite operator.
//!
//! Only a handful of top eigenvalues are needed per bootstrap replicate, so
//! this replaces an O(d^3) dense decomposition with O(m d^2) matrix-vector
//! work, m being the Krylov dimension at convergence (typically 3k + 20).

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Symmetric linear operator `y = A x`.
pub(crate) trait SymOp {
    fn dim(&self) -> usize;
    fn apply(&self, x: &DVector<f64>, y: &mut DVector<f64>);
}

/// `n^{-1} D G D` with `D = diag(sqrt(w))` and `G` a symmetric n×n Gram matrix.
pub(crate) struct CompanionOp<'a> {
    pub gram: &'a DMatrix<f64>,
    pub sqrt_w: DVector<f64>,
    pub inv_n: f64,
}

impl SymOp for CompanionOp<'_> {
    fn dim(&self) -> usize {
        self.gram.nrows()
    }

    fn apply(&self, x: &DVector<f64>, y: &mut DVector<f64>) {
        let t = x.component_mul(&self.sqrt_w);
        y.gemv(self.inv_n, self.gram, &t, 0.0);
        y.component_mul_assign(&self.sqrt_w);
    }
}

/// `n^{-1} X W X^T` applied through the p×n factor `X`.
pub(crate) struct PrimalOp<'a> {
    pub x: &'a DMatrix<f64>,
    pub w: DVector<f64>,
    pub inv_n: f64,
}

impl SymOp for PrimalOp<'_> {
    fn dim(&self) -> usize {
        self.x.nrows()
    }

    fn apply(&self, v: &DVector<f64>, y: &mut DVector<f64>) {
        let mut t = DVector::zeros(self.x.ncols());
        t.gemv_tr(1.0, self.x, v, 0.0);
        t.component_mul_assign(&self.w);
        y.gemv(self.inv_n, self.x, &t, 0.0);
    }
}

// eigenvalue error is bounded by the residual; 1e-10 relative is far below
// any decision threshold
const RESIDUAL_TOL: f64 = 1e-10;

/// Returns the `k` largest eigenvalues of `op`, descending.
pub(crate) fn top_eigenvalues(op: &dyn SymOp, k: usize) -> Result<Vec<f64>> {
    let dim = op.dim();
    if k == 0 {
        return Ok(Vec::new());
    }
    if k > dim {
        return Err(Error::Dimension(format!("requested {k} eigenvalues of a {dim}-dimensional operator")));
    }

    let mut basis: Vec<DVector<f64>> = Vec::with_capacity(dim.min(4 * k + 64));
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut seed = 0x5DEE_CE66_D1CE_5EEDu64;

    let mut q = start_vector(dim, &mut seed);
    let mut w = DVector::zeros(dim);
    let mut scale = 0.0f64;

    for step in 0..dim {
        debug_assert_eq!(beta.len(), step);
        op.apply(&q, &mut w);
        let a = q.dot(&w);
        w.axpy(-a, &q, 1.0);
        if let (Some(&b), Some(prev)) = (beta.last(), basis.last()) {
            w.axpy(-b, prev, 1.0);
        }
        basis.push(q.clone());
        alpha.push(a);
        reorthogonalize(&mut w, &basis);
        reorthogonalize(&mut w, &basis);
        let b = w.norm();
        scale = scale.max(a.abs() + b);

        let m = step + 1;
        if m == dim {
            break;
        }

        let invariant = b <= 1e-12 * scale.max(f64::MIN_POSITIVE);
        if invariant {
            if m >= k {
                break;
            }
            // Krylov space is invariant; continue from a fresh direction
            // orthogonal to everything found so far.
            let mut fresh = start_vector(dim, &mut seed);
            reorthogonalize(&mut fresh, &basis);
            reorthogonalize(&mut fresh, &basis);
            let norm = fresh.norm();
            if norm <= 1e-10 {
                break;
            }
            beta.push(0.0);
            q = fresh / norm;
            continue;
        }
        if m >= k {
            let (vals, last) = tridiagonal_eigen(&alpha, &beta)?;
            let mut order: Vec<usize> = (0..m).collect();
            order.sort_by(|&i, &j| vals[j].total_cmp(&vals[i]));
            let top = vals[order[0]].abs().max(f64::MIN_POSITIVE);
            if order.iter().take(k).all(|&i| (b * last[i]).abs() <= RESIDUAL_TOL * top) {
                return Ok(order.iter().take(k).map(|&i| vals[i]).collect());
            }
        }
        beta.push(b);
        q = &w / b;
    }

    // Either the full space was spanned or no fresh direction remains:
    // the tridiagonal spectrum is the operator's spectrum.
    let (mut vals, _) = tridiagonal_eigen(&alpha, &beta)?;
    vals.sort_by(|a, b| b.total_cmp(a));
    if vals.len() < k {
        // The operator had fewer independent directions than requested; the
        // missing ones lie in a space orthogonal to all fresh starts, i.e.
        // the numerical null space.
        vals.resize(k, 0.0);
    }
    vals.truncate(k);
    Ok(vals)
}

fn reorthogonalize(w: &mut DVector<f64>, basis: &[DVector<f64>]) {
    for v in basis {
        let c = v.dot(w);
        w.axpy(-c, v, 1.0);
    }
}

fn start_vector(dim: usize, state: &mut u64) -> DVector<f64> {
    let v = DVector::from_fn(dim, |_, _| {
        *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = *state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^= z >> 31;
        (z >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    });
    let norm = v.norm();
    v / norm
}

/// Eigenvalues of the symmetric tridiagonal matrix with diagonal `diag` and
/// off-diagonal `off` (`off[i]` couples `i` and `i + 1`), together with the
/// last component of each eigenvector. Implicit QL with Wilkinson shifts,
/// rotating only the last row of the eigenvector matrix.
pub(crate) fn tridiagonal_eigen(diag: &[f64], off: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = diag.len();
    debug_assert!(off.len() + 1 >= n);
    let mut d = diag.to_vec();
    let mut e = vec![0.0; n];
    e[..n.saturating_sub(1)].copy_from_slice(&off[..n.saturating_sub(1)]);
    let mut z = vec![0.0; n];
    if n == 0 {
        return Ok((d, z));
    }
    z[n - 1] = 1.0;

    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1 = 0.0f64;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > 60 {
                    return Err(Error::Solver("tridiagonal QL did not converge".into()));
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    let zh = z[i + 1];
                    z[i + 1] = s * z[i] + c * zh;
                    z[i] = c * z[i] - s * zh;
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    if d.iter().any(|v| !v.is_finite()) {
        return Err(Error::Solver("non-finite tridiagonal eigenvalue".into()));
    }
    Ok((d, z))
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Dense(DMatrix<f64>);

    impl SymOp for Dense {
        fn dim(&self) -> usize {
            self.0.nrows()
        }
        fn apply(&self, x: &DVector<f64>, y: &mut DVector<f64>) {
            y.gemv(1.0, &self.0, x, 0.0);
        }
    }

    fn lcg(state: &mut u64) -> f64 {
        *state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (*state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    }

    #[test]
    fn tridiagonal_matches_dense_solver() {
        let mut s = 11u64;
        for n in [1usize, 2, 3, 7, 20] {
            let diag: Vec<f64> = (0..n).map(|_| lcg(&mut s) * 4.0).collect();
            let off: Vec<f64> = (0..n.saturating_sub(1)).map(|_| lcg(&mut s)).collect();
            let t = DMatrix::from_fn(n, n, |i, j| {
                if i == j {
                    diag[i]
                } else if i + 1 == j {
                    off[i]
                } else if j + 1 == i {
                    off[j]
                } else {
                    0.0
                }
            });
            let eig = nalgebra::SymmetricEigen::new(t.clone());
            let (vals, last) = tridiagonal_eigen(&diag, &off).unwrap();
            let mut a: Vec<f64> = vals.clone();
            let mut b: Vec<f64> = eig.eigenvalues.iter().copied().collect();
            a.sort_by(f64::total_cmp);
            b.sort_by(f64::total_cmp);
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).abs() < 1e-12, "{x} vs {y}");
            }
            // last components: |z_i| must match |v_i[n-1]| of the dense eigenvectors
            for (i, &lam) in vals.iter().enumerate() {
                let j = (0..n)
                    .min_by(|&p, &q| {
                        (eig.eigenvalues[p] - lam).abs().total_cmp(&(eig.eigenvalues[q] - lam).abs())
                    })
                    .unwrap();
                assert!((last[i].abs() - eig.eigenvectors[(n - 1, j)].abs()).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn lanczos_matches_dense_on_psd_matrix() {
        let mut s = 3u64;
        let x = DMatrix::from_fn(120, 90, |_, _| lcg(&mut s));
        let a = &x * x.transpose();
        let mut dense: Vec<f64> = a.clone().symmetric_eigenvalues().iter().copied().collect();
        dense.sort_by(|a, b| b.total_cmp(a));
        let top = top_eigenvalues(&Dense(a), 8).unwrap();
        for (x, y) in top.iter().zip(&dense) {
            assert!((x - y).abs() <= 1e-10 * dense[0], "{x} vs {y}");
        }
    }

    #[test]
    fn lanczos_handles_low_rank_and_zero() {
        let mut s = 5u64;
        let u = DMatrix::from_fn(80, 2, |_, _| lcg(&mut s));
        let a = &u * u.transpose();
        let mut dense: Vec<f64> = a.clone().symmetric_eigenvalues().iter().copied().collect();
        dense.sort_by(|a, b| b.total_cmp(a));
        let top = top_eigenvalues(&Dense(a), 5).unwrap();
        assert!((top[0] - dense[0]).abs() < 1e-10 * dense[0]);
        assert!((top[1] - dense[1]).abs() < 1e-10 * dense[0]);
        for v in &top[2..] {
            assert!(v.abs() < 1e-10 * dense[0]);
        }
        let zero = top_eigenvalues(&Dense(DMatrix::zeros(70, 70)), 3).unwrap();
        assert_eq!(zero, vec![0.0; 3]);
    }
}
