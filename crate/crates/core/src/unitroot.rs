//! ADF-GLS unit-root pretest with modified information-criterion lag choice.
//!
//! The series is GLS-detrended by quasi-differencing with `ᾱ = 1 + c̄/T`, the
//! augmentation lag is chosen by the modified BIC (or AIC) on a common sample
//! `t = k_max+2..T`, and the test regression
//! `Δỹ_t = β₀ ỹ_{t-1} + Σ_j b_j Δỹ_{t-j} + e_t` is re-estimated on its full
//! available sample for the reported t-ratio.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::least_squares;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeterministicModel {
    Constant,
    ConstantTrend,
}

impl DeterministicModel {
    /// Local-to-unity constant used for quasi-differencing.
    pub fn default_c_bar(self) -> f64 {
        match self {
            DeterministicModel::Constant => -7.0,
            DeterministicModel::ConstantTrend => -13.5,
        }
    }

    /// Asymptotic critical values (1%, 5%, 10%).
    pub fn critical_values(self) -> CriticalValues {
        match self {
            DeterministicModel::Constant => CriticalValues {
                one: -2.58,
                five: -1.98,
                ten: -1.62,
            },
            DeterministicModel::ConstantTrend => CriticalValues {
                one: -3.42,
                five: -2.91,
                ten: -2.62,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InformationCriterion {
    /// Penalty weight `ln(T − k_max)`.
    Mbic,
    /// Penalty weight 2.
    Maic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalValues {
    pub one: f64,
    pub five: f64,
    pub ten: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdfGlsResult {
    pub statistic: f64,
    pub selected_lag: usize,
    pub k_max: usize,
    /// Sum of the estimated lagged-difference coefficients, b(1).
    pub phi_hat: f64,
    pub model: DeterministicModel,
    pub critical_values: CriticalValues,
    /// Observations in the final test regression.
    pub n_obs: usize,
    pub reject_1pct: bool,
}

/// `floor(12·(T/100)^{1/4})`
pub fn default_k_max(t: usize) -> usize {
    (12.0 * (t as f64 / 100.0).powf(0.25)).floor() as usize
}

/// Removes the GLS-estimated deterministic component from `y`.
pub fn gls_detrend(y: &[f64], model: DeterministicModel, c_bar: f64) -> Result<Vec<f64>> {
    let t = y.len();
    if t < 10 {
        return Err(Error::invalid(format!(
            "GLS detrending needs at least 10 observations, got {t}"
        )));
    }
    if !(c_bar < 0.0) {
        return Err(Error::invalid(format!("c_bar must be negative, got {c_bar}")));
    }
    let alpha = 1.0 + c_bar / t as f64;
    let n_det = match model {
        DeterministicModel::Constant => 1,
        DeterministicModel::ConstantTrend => 2,
    };
    let det = |i: usize| -> [f64; 2] { [1.0, (i + 1) as f64] };

    let mut z_qd = DMatrix::zeros(t, n_det);
    let mut y_qd = DVector::zeros(t);
    y_qd[0] = y[0];
    for c in 0..n_det {
        z_qd[(0, c)] = det(0)[c];
    }
    for i in 1..t {
        y_qd[i] = y[i] - alpha * y[i - 1];
        let (cur, prev) = (det(i), det(i - 1));
        for c in 0..n_det {
            z_qd[(i, c)] = cur[c] - alpha * prev[c];
        }
    }
    let fit = least_squares(&z_qd, &y_qd, "GLS detrending")?;
    Ok((0..t)
        .map(|i| {
            let d = det(i);
            let fitted: f64 = (0..n_det).map(|c| d[c] * fit.coefficients[c]).sum();
            y[i] - fitted
        })
        .collect())
}

/// Design for `Δỹ_t` on `ỹ_{t-1}, Δỹ_{t-1..t-k}` over 0-based `t ∈ [start, T)`.
fn adf_design(ydt: &[f64], k: usize, start: usize) -> (DMatrix<f64>, DVector<f64>) {
    let t_len = ydt.len();
    let rows = t_len - start;
    let dy = |i: usize| ydt[i] - ydt[i - 1];
    let mut x = DMatrix::zeros(rows, k + 1);
    let mut y = DVector::zeros(rows);
    for (r, t) in (start..t_len).enumerate() {
        y[r] = dy(t);
        x[(r, 0)] = ydt[t - 1];
        for j in 1..=k {
            x[(r, j)] = dy(t - j);
        }
    }
    (x, y)
}

/// Modified information criterion for every `k ∈ 0..=k_max` on the common sample.
pub fn modified_criteria(
    ydt: &[f64],
    k_max: usize,
    criterion: InformationCriterion,
) -> Result<Vec<f64>> {
    let t = ydt.len();
    if t < k_max + 20 {
        return Err(Error::invalid(format!(
            "k_max = {k_max} too large for {t} observations (need T − k_max ≥ 20)"
        )));
    }
    let denom = (t - k_max) as f64;
    let c_t = match criterion {
        InformationCriterion::Mbic => denom.ln(),
        InformationCriterion::Maic => 2.0,
    };
    let start = k_max + 1;
    let sum_y_lag_sq: f64 = (start..t).map(|i| ydt[i - 1] * ydt[i - 1]).sum();
    (0..=k_max)
        .map(|k| {
            let (x, y) = adf_design(ydt, k, start);
            let fit = least_squares(&x, &y, "ADF lag selection")?;
            let sigma2 = fit.ssr() / denom;
            if !(sigma2 > 0.0) {
                return Err(Error::Degenerate(
                    "zero residual variance in ADF lag selection".into(),
                ));
            }
            let b0 = fit.coefficients[0];
            let tau = b0 * b0 * sum_y_lag_sq / sigma2;
            Ok(sigma2.ln() + c_t * (tau + k as f64) / denom)
        })
        .collect()
}

/// Lag minimising the modified information criterion (first minimiser on ties).
pub fn mbic_lag_select(ydt: &[f64], k_max: usize) -> Result<usize> {
    select_lag(ydt, k_max, InformationCriterion::Mbic)
}

pub fn select_lag(ydt: &[f64], k_max: usize, criterion: InformationCriterion) -> Result<usize> {
    let mic = modified_criteria(ydt, k_max, criterion)?;
    Ok(argmin(&mic))
}

pub(crate) fn argmin(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v < values[best] {
            best = i;
        }
    }
    best
}

/// Settings for [`adf_gls_with`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdfGlsConfig {
    pub model: DeterministicModel,
    /// `None` uses [`default_k_max`].
    pub k_max: Option<usize>,
    pub criterion: InformationCriterion,
    /// `None` uses the model's default c̄.
    pub c_bar: Option<f64>,
}

impl Default for AdfGlsConfig {
    fn default() -> Self {
        Self {
            model: DeterministicModel::ConstantTrend,
            k_max: None,
            criterion: InformationCriterion::Mbic,
            c_bar: None,
        }
    }
}

pub fn adf_gls(y: &[f64], model: DeterministicModel, k_max: Option<usize>) -> Result<AdfGlsResult> {
    adf_gls_with(
        y,
        &AdfGlsConfig {
            model,
            k_max,
            ..AdfGlsConfig::default()
        },
    )
}

pub fn adf_gls_with(y: &[f64], config: &AdfGlsConfig) -> Result<AdfGlsResult> {
    let model = config.model;
    let k_max = config.k_max.unwrap_or_else(|| default_k_max(y.len()));
    let c_bar = config.c_bar.unwrap_or_else(|| model.default_c_bar());
    let ydt = gls_detrend(y, model, c_bar)?;
    let scale = y.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let spread = ydt.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if spread <= 1e-12 * scale.max(f64::MIN_POSITIVE) || spread == 0.0 {
        return Err(Error::Degenerate(
            "series is fully explained by its deterministic component".into(),
        ));
    }
    let lag = select_lag(&ydt, k_max, config.criterion)?;

    let (x, dy) = adf_design(&ydt, lag, lag + 1);
    let fit = least_squares(&x, &dy, "ADF-GLS regression")?;
    let n_obs = x.nrows();
    let dof = n_obs - x.ncols();
    let sigma2 = fit.ssr() / dof as f64;
    if !(sigma2 > 0.0) {
        return Err(Error::Degenerate("zero residual variance in ADF regression".into()));
    }
    let se = (sigma2 * fit.xtx_inv[(0, 0)]).sqrt();
    let statistic = fit.coefficients[0] / se;
    let phi_hat = fit.coefficients.iter().skip(1).sum();
    let critical_values = model.critical_values();
    Ok(AdfGlsResult {
        statistic,
        selected_lag: lag,
        k_max,
        phi_hat,
        model,
        critical_values,
        n_obs,
        reject_1pct: statistic < critical_values.one,
    })
}
