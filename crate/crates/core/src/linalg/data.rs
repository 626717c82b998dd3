use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// A p×n panel: row `i` is variable `i`, column `j` is observation `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    values: DMatrix<f64>,
}

impl DataMatrix {
    pub fn new(values: DMatrix<f64>) -> Result<Self> {
        let (p, n) = values.shape();
        if p < 1 || n < 2 {
            return Err(Error::Dimension(format!(
                "need p >= 1 and n >= 2, got p = {p}, n = {n}"
            )));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            // column-major storage
            return Err(Error::NonFinite { row: k % p, col: k / p });
        }
        Ok(Self { values })
    }

    /// Builds a panel from variable rows of equal length.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let p = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Dimension("rows have unequal lengths".into()));
        }
        Self::new(DMatrix::from_fn(p, n, |i, j| rows[i][j]))
    }

    pub fn p(&self) -> usize {
        self.values.nrows()
    }

    pub fn n(&self) -> usize {
        self.values.ncols()
    }

    pub fn min_dim(&self) -> usize {
        self.p().min(self.n())
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn into_values(self) -> DMatrix<f64> {
        self.values
    }

    /// Squared Frobenius norm.
    pub fn frobenius_sq(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self { values: &self.values * c }
    }

    /// Reorders observations so that new column `j` is old column `perm[j]`.
    pub fn permute_columns(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.n());
        Self { values: DMatrix::from_fn(self.p(), self.n(), |i, j| self.values[(i, perm[j])]) }
    }
}

/// Fills missing cells by linear interpolation along the observation axis and
/// optionally standardizes every variable.
///
/// `raw[i][j]` is observation `j` of variable `i`; `None` marks a missing
/// cell. Gaps before the first or after the last observed value take that
/// nearest observed value. Standardization uses the sample variance with an
/// `n - 1` denominator.
pub fn prepare(raw: &[Vec<Option<f64>>], standardize: bool) -> Result<DataMatrix> {
    let p = raw.len();
    let n = raw.first().map_or(0, Vec::len);
    if p == 0 || n < 2 {
        return Err(Error::Dimension(format!("need p >= 1 and n >= 2, got p = {p}, n = {n}")));
    }
    let mut values = DMatrix::zeros(p, n);
    for (i, row) in raw.iter().enumerate() {
        if row.len() != n {
            return Err(Error::Dimension(format!("variable {i} has {} cells, expected {n}", row.len())));
        }
        for (j, cell) in row.iter().enumerate() {
            if let Some(v) = cell {
                if !v.is_finite() {
                    return Err(Error::NonFinite { row: i, col: j });
                }
            }
        }
        let filled = interpolate_row(row).map_err(|e| match e {
            RowGap::Empty => Error::AllMissingRow { row: i },
            RowGap::Single => Error::TooFewObservations { row: i },
        })?;
        if standardize {
            let mean = filled.iter().sum::<f64>() / n as f64;
            let var = filled.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            let scale = mean.abs().max(1.0);
            if var.sqrt() <= 1e-14 * scale {
                return Err(Error::ZeroVarianceRow { row: i });
            }
            let sd = var.sqrt();
            for (j, v) in filled.iter().enumerate() {
                values[(i, j)] = (v - mean) / sd;
            }
        } else {
            for (j, v) in filled.iter().enumerate() {
                values[(i, j)] = *v;
            }
        }
    }
    DataMatrix::new(values)
}

enum RowGap {
    Empty,
    Single,
}

fn interpolate_row(row: &[Option<f64>]) -> Result<Vec<f64>, RowGap> {
    let observed: Vec<(usize, f64)> =
        row.iter().enumerate().filter_map(|(j, v)| v.map(|v| (j, v))).collect();
    match observed.len() {
        0 => return Err(RowGap::Empty),
        1 => return Err(RowGap::Single),
        _ => {}
    }
    let mut out = vec![0.0; row.len()];
    let (first_j, first_v) = observed[0];
    let (last_j, last_v) = observed[observed.len() - 1];
    out[..=first_j].fill(first_v);
    out[last_j..].fill(last_v);
    for pair in observed.windows(2) {
        let (a, va) = pair[0];
        let (b, vb) = pair[1];
        out[a] = va;
        for (j, slot) in out.iter_mut().enumerate().take(b).skip(a + 1) {
            let t = (j - a) as f64 / (b - a) as f64;
            *slot = va + t * (vb - va);
        }
        out[b] = vb;
    }
    Ok(out)
}
