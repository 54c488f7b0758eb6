//! Small dense linear-algebra helpers shared by the estimators.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Relative threshold on the diagonal of R below which a design is treated as rank deficient.
const RANK_TOL: f64 = 1e-12;

/// Least-squares fit of `y` on the columns of `x`.
#[derive(Debug, Clone)]
pub struct LeastSquares {
    pub coefficients: DVector<f64>,
    pub residuals: DVector<f64>,
    /// (X'X)^{-1}
    pub xtx_inv: DMatrix<f64>,
}

impl LeastSquares {
    pub fn ssr(&self) -> f64 {
        self.residuals.norm_squared()
    }
}

/// Ordinary least squares through a Householder QR of the design.
pub fn least_squares(x: &DMatrix<f64>, y: &DVector<f64>, context: &str) -> Result<LeastSquares> {
    let (rows, cols) = x.shape();
    if rows < cols || cols == 0 {
        return Err(Error::invalid(format!(
            "{context}: {rows} observations for {cols} regressors"
        )));
    }
    let qr = x.clone().qr();
    let r = qr.r();
    let diag_max = r.diagonal().iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let diag_min = r.diagonal().iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
    if diag_max == 0.0 || diag_min <= RANK_TOL * diag_max {
        let condition = if diag_min > 0.0 {
            diag_max / diag_min
        } else {
            f64::INFINITY
        };
        return Err(Error::Singular {
            context: format!("{context}: rank-deficient regressor matrix"),
            condition,
        });
    }
    let qty = qr.q().transpose() * y;
    let coefficients = r
        .solve_upper_triangular(&qty)
        .ok_or_else(|| Error::Numerical(format!("{context}: triangular solve failed")))?;
    let residuals = y - x * &coefficients;
    let identity = DMatrix::<f64>::identity(cols, cols);
    let r_inv = r
        .solve_upper_triangular(&identity)
        .ok_or_else(|| Error::Numerical(format!("{context}: triangular inverse failed")))?;
    let xtx_inv = &r_inv * r_inv.transpose();
    Ok(LeastSquares {
        coefficients,
        residuals,
        xtx_inv,
    })
}

/// Largest singular value.
pub fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().max()
}

/// Ratio of extreme singular values (infinite for exactly singular input).
pub fn condition_number(m: &DMatrix<f64>) -> f64 {
    let sv = m.singular_values();
    let max = sv.max();
    let min = sv.min();
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Spectral radius of a square real matrix.
pub fn spectral_radius(m: &DMatrix<f64>) -> f64 {
    m.complex_eigenvalues()
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}
