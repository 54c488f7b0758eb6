//! Block-tridiagonal Cholesky with a bordered intercept.
//!
//! `H = L L'` with lower-bidiagonal block factor: `L_t L_t' = D_t − M_t M_t'`,
//! `M_t = C L_{t-1}^{-T}`. The intercept is eliminated through the Schur
//! complement `s = N − B'H⁻¹B`. Cost is `O(N·k³)` time and `O(N·k²)` memory.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use super::system::StackedSystem;
use crate::error::{Error, Result};

pub(crate) struct BlockFactor {
    chol: Vec<Cholesky<f64, Dyn>>,
    /// `sub[t]` couples period t+1 to period t.
    sub: Vec<DMatrix<f64>>,
    pub condition_estimate: f64,
}

impl BlockFactor {
    pub fn new(system: &StackedSystem) -> Result<Self> {
        let k = system.k;
        let periods = system.n_periods();
        let mut chol: Vec<Cholesky<f64, Dyn>> = Vec::with_capacity(periods);
        let mut sub = Vec::with_capacity(periods.saturating_sub(1));
        let mut pivot_max = 0.0_f64;
        let mut pivot_min = f64::INFINITY;
        for t in 0..periods {
            let mut block = system.diag_blocks[t].clone();
            if t > 0 {
                // M_t = C · L_{t-1}^{-T}, with C = coupling·I
                let prev_l = chol[t - 1].l();
                let lt_inv = prev_l
                    .solve_lower_triangular(&DMatrix::<f64>::identity(k, k))
                    .ok_or_else(|| singular(pivot_max, pivot_min))?
                    .transpose();
                let m = lt_inv * system.coupling;
                block -= &m * m.transpose();
                sub.push(m);
            }
            let factor = block
                .cholesky()
                .ok_or_else(|| singular(pivot_max, 0.0))?;
            for d in factor.l_dirty().diagonal().iter() {
                let p = d * d;
                pivot_max = pivot_max.max(p);
                pivot_min = pivot_min.min(p);
            }
            chol.push(factor);
        }
        Ok(Self {
            chol,
            sub,
            condition_estimate: pivot_max / pivot_min,
        })
    }

    /// Solves `H u = r` for one stacked right-hand side.
    pub fn solve(&self, rhs: &[DVector<f64>]) -> Vec<DVector<f64>> {
        let periods = self.chol.len();
        let mut w: Vec<DVector<f64>> = Vec::with_capacity(periods);
        for t in 0..periods {
            let mut r = rhs[t].clone();
            if t > 0 {
                r -= &self.sub[t - 1] * &w[t - 1];
            }
            let l = self.chol[t].l();
            w.push(
                l.solve_lower_triangular(&r)
                    .expect("cholesky factor has a positive diagonal"),
            );
        }
        let mut u = vec![DVector::zeros(0); periods];
        for t in (0..periods).rev() {
            let mut r = w[t].clone();
            if t + 1 < periods {
                r -= self.sub[t].transpose() * &u[t + 1];
            }
            let l = self.chol[t].l();
            u[t] = l
                .tr_solve_lower_triangular(&r)
                .expect("cholesky factor has a positive diagonal");
        }
        u
    }
}

fn singular(pivot_max: f64, pivot_min: f64) -> Error {
    let condition = if pivot_min > 0.0 {
        pivot_max / pivot_min
    } else {
        f64::INFINITY
    };
    Error::Singular {
        context: "TV-VAR normal matrix is not positive definite".into(),
        condition,
    }
}

/// Per-equation solution: coefficient path and intercept.
pub(crate) struct BorderedSolution {
    pub beta: Vec<Vec<DVector<f64>>>,
    pub nu: Vec<f64>,
    pub condition_estimate: f64,
}

pub(crate) fn solve_bordered(system: &StackedSystem) -> Result<BorderedSolution> {
    let factor = BlockFactor::new(system)?;
    let v = factor.solve(&system.border);
    let btv: f64 = system.border.iter().zip(&v).map(|(b, vt)| b.dot(vt)).sum();
    let schur = system.corner - btv;
    if !(schur > 1e-12 * system.corner) {
        return Err(Error::Singular {
            context: "TV-VAR intercept is not identified (Schur complement vanishes)".into(),
            condition: if schur > 0.0 { system.corner / schur } else { f64::INFINITY },
        });
    }
    let mut beta = Vec::with_capacity(system.n_equations());
    let mut nu = Vec::with_capacity(system.n_equations());
    for eq in 0..system.n_equations() {
        let u = factor.solve(&system.rhs_beta[eq]);
        let btu: f64 = system.border.iter().zip(&u).map(|(b, ut)| b.dot(ut)).sum();
        let nu_eq = (system.rhs_nu[eq] - btu) / schur;
        beta.push(u.iter().zip(&v).map(|(ut, vt)| ut - vt * nu_eq).collect());
        nu.push(nu_eq);
    }
    Ok(BorderedSolution {
        beta,
        nu,
        condition_estimate: factor.condition_estimate,
    })
}
