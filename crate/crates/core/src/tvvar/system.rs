use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Normal equations of the penalised TV-VAR regression.
///
/// For equation `i` the unknowns are `β_1..β_N` (β_t stacks the i-th rows of
/// `A_{1..q,t}`, length `k = n·q`) and the constant `ν_i`; the objective is
///
/// ```text
/// Σ_t (y_t − ν_i − z_t'β_t)² + λ² Σ_{t≥2} ‖β_t − β_{t-1}‖²
/// ```
///
/// Every equation shares the same regressors, so the block-tridiagonal matrix,
/// its border and corner are stored once; only the right-hand sides differ.
#[derive(Debug, Clone, PartialEq)]
pub struct StackedSystem {
    pub k: usize,
    pub lambda: f64,
    /// `z_t z_t' + λ²·c_t·I` with `c_t` the number of neighbours of period t.
    pub diag_blocks: Vec<DMatrix<f64>>,
    /// Every off-diagonal block equals `coupling · I`, i.e. `−λ²·I`.
    pub coupling: f64,
    /// Border column coupling `β_t` to the intercept: `z_t`.
    pub border: Vec<DVector<f64>>,
    /// Intercept diagonal entry, the number of periods.
    pub corner: f64,
    /// Per equation: `z_t y_t` for each period.
    pub rhs_beta: Vec<Vec<DVector<f64>>>,
    /// Per equation: `Σ_t y_t`.
    pub rhs_nu: Vec<f64>,
}

impl StackedSystem {
    pub fn n_periods(&self) -> usize {
        self.diag_blocks.len()
    }

    pub fn n_equations(&self) -> usize {
        self.rhs_nu.len()
    }

    /// Dense `(N·k + 1)²` matrix with the intercept in the last row/column.
    pub fn dense_matrix(&self) -> DMatrix<f64> {
        let (n, k) = (self.n_periods(), self.k);
        let dim = n * k + 1;
        let mut h = DMatrix::zeros(dim, dim);
        for t in 0..n {
            h.view_mut((t * k, t * k), (k, k)).copy_from(&self.diag_blocks[t]);
            if t + 1 < n {
                for j in 0..k {
                    h[(t * k + j, (t + 1) * k + j)] = self.coupling;
                    h[((t + 1) * k + j, t * k + j)] = self.coupling;
                }
            }
            for j in 0..k {
                h[(t * k + j, dim - 1)] = self.border[t][j];
                h[(dim - 1, t * k + j)] = self.border[t][j];
            }
        }
        h[(dim - 1, dim - 1)] = self.corner;
        h
    }

    /// Dense right-hand side for one equation, matching [`Self::dense_matrix`].
    pub fn dense_rhs(&self, equation: usize) -> DVector<f64> {
        let (n, k) = (self.n_periods(), self.k);
        let mut r = DVector::zeros(n * k + 1);
        for t in 0..n {
            r.rows_mut(t * k, k).copy_from(&self.rhs_beta[equation][t]);
        }
        r[n * k] = self.rhs_nu[equation];
        r
    }
}

/// Regressors `z_t = (x'_{t-1}, …, x'_{t-q})'` and targets `x_t` for `t = q..T`.
pub(crate) fn regressors(x: &DMatrix<f64>, q: usize) -> (Vec<DVector<f64>>, DMatrix<f64>) {
    let (t_len, n) = x.shape();
    let k = n * q;
    let z = (q..t_len)
        .map(|t| DVector::from_fn(k, |idx, _| x[(t - 1 - idx / n, idx % n)]))
        .collect();
    let y = x.rows(q, t_len - q).into_owned();
    (z, y)
}

pub(crate) fn check_inputs(x: &DMatrix<f64>, q: usize, lambda: f64) -> Result<()> {
    let (t, n) = x.shape();
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::invalid(format!(
            "smoothness ratio must be positive and finite, got {lambda}"
        )));
    }
    if q == 0 || n == 0 {
        return Err(Error::invalid("TV-VAR needs q ≥ 1 and at least one series"));
    }
    if t < q || t - q < 5 * n * q {
        return Err(Error::invalid(format!(
            "TV-VAR({q}) with {n} series needs T − q ≥ {}, got T = {t}",
            5 * n * q
        )));
    }
    Ok(())
}

/// Assembles the per-equation normal equations for a TV-VAR(q).
pub fn build_stacked_system(x: &DMatrix<f64>, q: usize, lambda: f64) -> Result<StackedSystem> {
    check_inputs(x, q, lambda)?;
    Ok(assemble(x, q, lambda))
}

pub(crate) fn assemble(x: &DMatrix<f64>, q: usize, lambda: f64) -> StackedSystem {
    let n = x.ncols();
    let k = n * q;
    let (z, y) = regressors(x, q);
    let periods = z.len();
    let pen = lambda * lambda;
    let diag_blocks = z
        .iter()
        .enumerate()
        .map(|(t, zt)| {
            let neighbours = usize::from(t > 0) + usize::from(t + 1 < periods);
            let mut d = zt * zt.transpose();
            for j in 0..k {
                d[(j, j)] += pen * neighbours as f64;
            }
            d
        })
        .collect();
    let rhs_beta = (0..n)
        .map(|i| z.iter().enumerate().map(|(t, zt)| zt * y[(t, i)]).collect())
        .collect();
    let rhs_nu = (0..n).map(|i| y.column(i).sum()).collect();
    StackedSystem {
        k,
        lambda,
        diag_blocks,
        coupling: -pen,
        border: z,
        corner: periods as f64,
        rhs_beta,
        rhs_nu,
    }
}
