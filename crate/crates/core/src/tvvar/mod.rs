//! Time-varying VAR with random-walk slope coefficients and a constant
//! intercept, estimated as one penalised least-squares problem per equation,
//! and the per-period efficiency degree ζₜ.

mod block;
mod path;
mod system;

pub use path::{tv_efficiency_path, EfficiencyPath};
pub use system::{build_stacked_system, StackedSystem};

use std::io::Write;
use std::time::Instant;

use chrono::NaiveDate;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::ReturnMatrix;

pub const DEFAULT_LAMBDA: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverDiagnostics {
    /// Ratio of extreme Cholesky pivots; a cheap lower bound on the condition number.
    pub condition_estimate: f64,
    pub solve_seconds: f64,
}

#[derive(Debug, Clone)]
pub struct TvVarFit {
    pub q: usize,
    pub n: usize,
    pub lambda: f64,
    pub labels: Vec<String>,
    /// Dates of periods `t = q+1..T`; empty when fitted from a bare matrix.
    pub dates: Vec<NaiveDate>,
    pub nu: DVector<f64>,
    /// `a_path[t][l]` is `A_{l+1}` at period t (row = equation).
    pub a_path: Vec<Vec<DMatrix<f64>>>,
    pub residuals: DMatrix<f64>,
    pub diagnostics: SolverDiagnostics,
}

impl PartialEq for TvVarFit {
    /// Compares estimates only; wall-clock timings are ignored.
    fn eq(&self, other: &Self) -> bool {
        self.q == other.q
            && self.n == other.n
            && self.lambda == other.lambda
            && self.labels == other.labels
            && self.dates == other.dates
            && self.nu == other.nu
            && self.a_path == other.a_path
            && self.residuals == other.residuals
    }
}

impl TvVarFit {
    pub fn n_periods(&self) -> usize {
        self.a_path.len()
    }

    /// Slope vector of equation `i` at period `t`, ordered like the regressors.
    pub fn beta(&self, t: usize, i: usize) -> DVector<f64> {
        let n = self.n;
        DVector::from_fn(n * self.q, |idx, _| self.a_path[t][idx / n][(i, idx % n)])
    }

    /// `Σ_i Σ_t ‖β_t − β_{t-1}‖²`
    pub fn roughness(&self) -> f64 {
        let mut total = 0.0;
        for t in 1..self.n_periods() {
            for l in 0..self.q {
                total += (&self.a_path[t][l] - &self.a_path[t - 1][l]).norm_squared();
            }
        }
        total
    }

    /// Penalised objective summed over equations.
    pub fn objective(&self) -> f64 {
        self.residuals.norm_squared() + self.lambda * self.lambda * self.roughness()
    }

    /// Time average of `A_l` over all periods.
    pub fn mean_coefficients(&self, lag: usize) -> DMatrix<f64> {
        let mut acc = DMatrix::zeros(self.n, self.n);
        for mats in &self.a_path {
            acc += &mats[lag];
        }
        acc / self.n_periods() as f64
    }

    /// Long-format coefficient paths: `date, equation, lag, regressor, value`.
    pub fn write_coefficients_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["date", "equation", "lag", "regressor", "value"])?;
        for (t, mats) in self.a_path.iter().enumerate() {
            let date = self
                .dates
                .get(t)
                .map(|d| d.to_string())
                .unwrap_or_else(|| t.to_string());
            for (l, m) in mats.iter().enumerate() {
                for i in 0..self.n {
                    for j in 0..self.n {
                        w.write_record([
                            date.clone(),
                            self.labels[i].clone(),
                            (l + 1).to_string(),
                            self.labels[j].clone(),
                            format!("{}", m[(i, j)]),
                        ])?;
                    }
                }
            }
        }
        w.flush().map_err(|e| Error::io("<csv writer>", e))?;
        Ok(())
    }
}

/// Fits the TV-VAR(q) with smoothness ratio `lambda` on dated returns.
pub fn solve_tvvar(x: &ReturnMatrix, q: usize, lambda: f64) -> Result<TvVarFit> {
    let mut fit = solve_tvvar_matrix(x.values(), q, lambda)?;
    fit.labels = x.labels().to_vec();
    fit.dates = x.dates()[q..].to_vec();
    Ok(fit)
}

pub fn solve_tvvar_matrix(x: &DMatrix<f64>, q: usize, lambda: f64) -> Result<TvVarFit> {
    system::check_inputs(x, q, lambda)?;
    let started = Instant::now();
    let n = x.ncols();
    let k = n * q;
    let sys = system::assemble(x, q, lambda);
    let periods = sys.n_periods();

    let (beta, nu, condition_estimate) = if sys.border.iter().all(|z| z.iter().all(|v| *v == 0.0)) {
        // No regressor information: the minimum-norm slope path is zero.
        let beta = vec![vec![DVector::zeros(k); periods]; n];
        let nu = sys.rhs_nu.iter().map(|s| s / periods as f64).collect();
        (beta, nu, 1.0)
    } else {
        let sol = block::solve_bordered(&sys)?;
        (sol.beta, sol.nu, sol.condition_estimate)
    };

    let a_path: Vec<Vec<DMatrix<f64>>> = (0..periods)
        .map(|t| {
            (0..q)
                .map(|l| DMatrix::from_fn(n, n, |i, j| beta[i][t][l * n + j]))
                .collect()
        })
        .collect();
    let mut residuals = DMatrix::zeros(periods, n);
    for t in 0..periods {
        for i in 0..n {
            residuals[(t, i)] = x[(t + q, i)] - nu[i] - sys.border[t].dot(&beta[i][t]);
        }
    }
    Ok(TvVarFit {
        q,
        n,
        lambda,
        labels: (0..n).map(|j| format!("x{}", j + 1)).collect(),
        dates: Vec::new(),
        nu: DVector::from_vec(nu),
        a_path,
        residuals,
        diagnostics: SolverDiagnostics {
            condition_estimate,
            solve_seconds: started.elapsed().as_secs_f64(),
        },
    })
}
