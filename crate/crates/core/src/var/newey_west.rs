//! Bartlett-kernel HAC covariance of the VAR coefficients.
//!
//! ```text
//! S   = Γ_0 + Σ_{l=1}^{L} (1 − l/(L+1)) (Γ_l + Γ_l')
//! Γ_l = Σ_t g_t g_{t-l}',   g_t = w_t ê_t
//! V   = (W'W)^{-1} S (W'W)^{-1}
//! ```

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::VarFit;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bandwidth {
    /// `floor(4·(T/100)^{2/9})`
    Auto,
    Fixed(usize),
}

pub fn auto_bandwidth(t: usize) -> usize {
    (4.0 * (t as f64 / 100.0).powf(2.0 / 9.0)).floor() as usize
}

#[derive(Debug, Clone, PartialEq)]
pub struct NeweyWest {
    pub bandwidth: usize,
    /// One p×p coefficient covariance per equation.
    pub covariances: Vec<DMatrix<f64>>,
    /// p×n, laid out like `VarFit::coefficients`.
    pub std_errors: DMatrix<f64>,
}

pub fn newey_west_cov(fit: &VarFit, bandwidth: Bandwidth) -> Result<NeweyWest> {
    let (t, p) = fit.design.shape();
    let lags = match bandwidth {
        Bandwidth::Auto => auto_bandwidth(t),
        Bandwidth::Fixed(l) => l,
    };
    if lags >= t {
        return Err(Error::invalid(format!(
            "bandwidth {lags} must be smaller than the {t} observations"
        )));
    }
    let mut covariances = Vec::with_capacity(fit.n);
    let mut std_errors = DMatrix::zeros(p, fit.n);
    for i in 0..fit.n {
        let scores: Vec<DVector<f64>> = (0..t)
            .map(|r| fit.design.row(r).transpose() * fit.residuals[(r, i)])
            .collect();
        let mut meat = DMatrix::<f64>::zeros(p, p);
        for g in &scores {
            meat += g * g.transpose();
        }
        for l in 1..=lags {
            let w = 1.0 - l as f64 / (lags as f64 + 1.0);
            let mut gamma = DMatrix::<f64>::zeros(p, p);
            for r in l..t {
                gamma += &scores[r] * scores[r - l].transpose();
            }
            meat += (&gamma + gamma.transpose()) * w;
        }
        let cov = &fit.xtx_inv * meat * &fit.xtx_inv;
        for k in 0..p {
            std_errors[(k, i)] = cov[(k, k)].max(0.0).sqrt();
        }
        covariances.push(cov);
    }
    Ok(NeweyWest {
        bandwidth: lags,
        covariances,
        std_errors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::var::fit_var_matrix;

    #[test]
    fn auto_rule() {
        assert_eq!(auto_bandwidth(100), 4);
        assert_eq!(auto_bandwidth(1000), 6);
    }

    #[test]
    fn bandwidth_must_be_below_sample() {
        let x = DMatrix::from_fn(20, 1, |i, _| ((i * 7 % 5) as f64) - 2.0);
        let fit = fit_var_matrix(&x, 1).unwrap();
        assert!(newey_west_cov(&fit, Bandwidth::Fixed(19)).is_err());
        assert!(newey_west_cov(&fit, Bandwidth::Fixed(18)).is_ok());
    }
}
