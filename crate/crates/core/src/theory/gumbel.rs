/// Centring `(n phi_n lambda_bar)^{-1} sum l^2`, which reduces to
/// `sum l^2 / sum l`.
pub fn gumbel_center(bulk: &[f64]) -> f64 {
    bulk.iter().map(|l| l * l).sum::<f64>() / bulk.iter().sum::<f64>()
}

/// Scale `phi_n lambda_bar = n^{-1} sum l`.
pub fn gumbel_scale(bulk: &[f64], n: usize) -> f64 {
    bulk.iter().sum::<f64>() / n as f64
}

/// Standardises the largest bootstrapped bulk eigenvalue so that its limit
/// law is the standard Gumbel.
pub fn gumbel_transform(lambda_hat_top: f64, bulk: &[f64], n: usize) -> f64 {
    (lambda_hat_top - gumbel_center(bulk)) / gumbel_scale(bulk, n) - (n as f64).ln()
}

pub fn gumbel_inverse(x: f64, bulk: &[f64], n: usize) -> f64 {
    gumbel_center(bulk) + gumbel_scale(bulk, n) * (x + (n as f64).ln())
}

/// First-order approximation of `lambda_0` driven by the largest weight.
pub fn lambda0_approx(bulk: &[f64], w_top: f64, n: usize) -> f64 {
    gumbel_scale(bulk, n) * w_top + gumbel_center(bulk)
}

/// `xi_i` for Gaussian data: the kurtosis term vanishes.
pub fn xi_gaussian() -> f64 {
    2.0
}

/// `xi_i = sum_k gamma_k^4 (nu_k - 3) + 2` for a population eigenvector
/// `gamma` and per-coordinate kurtoses `nu`.
pub fn xi_iid(gamma: &[f64], kurtosis: &[f64]) -> f64 {
    gamma.iter().zip(kurtosis).map(|(g, nu)| g.powi(4) * (nu - 3.0)).sum::<f64>() + 2.0
}
