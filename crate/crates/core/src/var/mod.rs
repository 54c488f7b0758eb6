//! Time-invariant VAR(q): lag selection, estimation, HAC errors, parameter
//! constancy and the efficiency degree.

mod efficiency;
mod hansen;
mod newey_west;

pub use efficiency::{
    efficiency_degree, lag_polynomial_at_one, long_run_multiplier, LongRunMultiplier,
    MAX_CONDITION,
};
pub use hansen::{
    hansen_critical_values, hansen_lc, hansen_lc_regression, simulate_hansen_critical_values,
    ConstancyTest, CriticalValueSource, HansenCriticalValues,
};
pub use newey_west::{auto_bandwidth, newey_west_cov, Bandwidth, NeweyWest};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::least_squares;
use crate::series::ReturnMatrix;

/// Constant-coefficient VAR(q) estimated equation by equation.
#[derive(Debug, Clone, PartialEq)]
pub struct VarFit {
    pub q: usize,
    pub n: usize,
    pub nu: DVector<f64>,
    /// `a[l]` is the lag-(l+1) matrix; row i belongs to equation i.
    pub a: Vec<DMatrix<f64>>,
    /// (1 + n·q) × n, column i holds equation i as `[ν_i, A_1[i,:], …, A_q[i,:]]`.
    pub coefficients: DMatrix<f64>,
    /// (T−q) × (1 + n·q) regressor matrix `(1, x'_{t-1}, …, x'_{t-q})`.
    pub design: DMatrix<f64>,
    /// (T−q) × n targets.
    pub targets: DMatrix<f64>,
    pub residuals: DMatrix<f64>,
    /// Residual covariance with divisor T − q.
    pub sigma: DMatrix<f64>,
    /// (X'X)^{-1}, shared by every equation.
    pub xtx_inv: DMatrix<f64>,
}

impl VarFit {
    pub fn n_obs(&self) -> usize {
        self.design.nrows()
    }

    pub fn n_regressors(&self) -> usize {
        self.design.ncols()
    }

    pub fn adjusted_r2(&self) -> Vec<f64> {
        let (t, p) = self.design.shape();
        (0..self.n)
            .map(|i| {
                let y = self.targets.column(i);
                let mean = y.mean();
                let sst: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
                let ssr = self.residuals.column(i).norm_squared();
                if sst == 0.0 {
                    return 0.0;
                }
                1.0 - (ssr / (t - p) as f64) / (sst / (t - 1) as f64)
            })
            .collect()
    }

    pub fn long_run_multiplier(&self) -> Result<LongRunMultiplier> {
        long_run_multiplier(&self.a)
    }

    pub fn efficiency_degree(&self) -> Result<f64> {
        efficiency_degree(&self.a)
    }
}

/// Stacks `(1, x'_{t-1}, …, x'_{t-q})` for rows `t = start..T` (0-based).
pub fn lagged_design(x: &DMatrix<f64>, q: usize, start: usize) -> (DMatrix<f64>, DMatrix<f64>) {
    let (t_len, n) = x.shape();
    let rows = t_len - start;
    let mut design = DMatrix::zeros(rows, 1 + n * q);
    let mut targets = DMatrix::zeros(rows, n);
    for (r, t) in (start..t_len).enumerate() {
        design[(r, 0)] = 1.0;
        for l in 1..=q {
            for j in 0..n {
                design[(r, 1 + (l - 1) * n + j)] = x[(t - l, j)];
            }
        }
        for j in 0..n {
            targets[(r, j)] = x[(t, j)];
        }
    }
    (design, targets)
}

fn fit_on_sample(x: &DMatrix<f64>, q: usize, start: usize) -> Result<VarFit> {
    let n = x.ncols();
    let (design, targets) = lagged_design(x, q, start);
    let rows = design.nrows();
    let p = design.ncols();
    let mut coefficients = DMatrix::zeros(p, n);
    let mut residuals = DMatrix::zeros(rows, n);
    let xtx_inv;
    if x.iter().all(|v| *v == 0.0) {
        // All-zero data: the minimum-norm solution is zero everywhere.
        xtx_inv = DMatrix::zeros(p, p);
    } else {
        let mut shared = None;
        for i in 0..n {
            let y = targets.column(i).into_owned();
            let fit = least_squares(&design, &y, "VAR estimation")?;
            coefficients.set_column(i, &fit.coefficients);
            residuals.set_column(i, &fit.residuals);
            shared.get_or_insert(fit.xtx_inv);
        }
        xtx_inv = shared.unwrap_or_else(|| DMatrix::zeros(p, p));
    }
    let nu = coefficients.row(0).transpose();
    let a = (0..q)
        .map(|l| {
            DMatrix::from_fn(n, n, |i, j| coefficients[(1 + l * n + j, i)])
        })
        .collect();
    let sigma = residuals.transpose() * &residuals / rows as f64;
    Ok(VarFit {
        q,
        n,
        nu,
        a,
        coefficients,
        design,
        targets,
        residuals,
        sigma,
        xtx_inv,
    })
}

/// Least-squares VAR(q) with intercept on the sample `t = q+1..T`.
pub fn fit_var(x: &ReturnMatrix, q: usize) -> Result<VarFit> {
    fit_var_matrix(x.values(), q)
}

pub fn fit_var_matrix(x: &DMatrix<f64>, q: usize) -> Result<VarFit> {
    let (t, n) = x.shape();
    if q == 0 {
        return Err(Error::invalid("VAR lag order must be at least 1"));
    }
    if t <= q + 1 + n * q {
        return Err(Error::invalid(format!(
            "VAR({q}) with {n} series needs more than {} observations, got {t}",
            q + 1 + n * q
        )));
    }
    fit_on_sample(x, q, q)
}

/// Schwarz criterion `ln det Σ̂(q) + (ln T*/T*)·q·n²` for `q = 1..=q_max`,
/// every candidate estimated on the common sample `T* = T − q_max`.
pub fn sbic_table(x: &ReturnMatrix, q_max: usize) -> Result<Vec<f64>> {
    let values = x.values();
    let (t, n) = values.shape();
    if q_max == 0 {
        return Err(Error::invalid("q_max must be at least 1"));
    }
    if t < q_max + 10 * (1 + n * q_max) {
        return Err(Error::invalid(format!(
            "{t} observations too few for lag search up to {q_max} with {n} series"
        )));
    }
    let t_star = (t - q_max) as f64;
    (1..=q_max)
        .map(|q| {
            let fit = fit_on_sample(values, q, q_max)?;
            let sigma = fit.residuals.transpose() * &fit.residuals / t_star;
            let det = sigma.determinant();
            if !(det > 0.0) {
                return Err(Error::Singular {
                    context: format!("SBIC residual covariance at q = {q}"),
                    condition: crate::linalg::condition_number(&sigma),
                });
            }
            Ok(det.ln() + t_star.ln() / t_star * (q * n * n) as f64)
        })
        .collect()
}

pub fn select_lag_sbic(x: &ReturnMatrix, q_max: usize) -> Result<usize> {
    let table = sbic_table(x, q_max)?;
    Ok(crate::unitroot::argmin(&table) + 1)
}
