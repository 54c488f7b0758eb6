//! Joint parameter-constancy statistic against random-walk parameter variation.
//!
//! Per equation the moment sequence is `f_t = (w_t ê_t, ê_t² − σ̂²)`; the joint
//! statistic stacks every equation's moments, so a VAR with `n` equations and
//! `p` regressors each has `n·(p+1)` degrees of freedom:
//!
//! ```text
//! Lc = (1/T) Σ_t s_t' V⁻¹ s_t,   s_t = Σ_{j≤t} f_j,   V = Σ_t f_t f_t'
//! ```
//!
//! Under the null Lc converges to a sum of `dof` independent integrated squared
//! Brownian bridges.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Mutex, OnceLock};

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{ChiSquared, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::VarFit;
use crate::error::{Error, Result};
use crate::linalg::{condition_number, least_squares};

/// Asymptotic critical values (1%, 5%, 10%) for dof = 1..=20.
const TABLE: [[f64; 3]; 20] = [
    [0.748, 0.470, 0.353],
    [1.07, 0.749, 0.610],
    [1.35, 1.01, 0.846],
    [1.60, 1.24, 1.07],
    [1.88, 1.47, 1.28],
    [2.12, 1.68, 1.49],
    [2.35, 1.90, 1.69],
    [2.59, 2.11, 1.89],
    [2.82, 2.32, 2.10],
    [3.05, 2.54, 2.29],
    [3.27, 2.75, 2.49],
    [3.51, 2.96, 2.69],
    [3.69, 3.15, 2.89],
    [3.90, 3.34, 3.08],
    [4.07, 3.54, 3.26],
    [4.30, 3.75, 3.46],
    [4.51, 3.95, 3.64],
    [4.73, 4.14, 3.83],
    [4.92, 4.33, 4.03],
    [5.13, 4.52, 4.22],
];

const SIM_DRAWS: usize = 50_000;
const SIM_TERMS: usize = 1_000;
const SIM_SEED: u64 = 0x4c43_5f43_5249_54;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CriticalValueSource {
    Table,
    Simulated,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HansenCriticalValues {
    pub one: f64,
    pub five: f64,
    pub ten: f64,
    pub source: CriticalValueSource,
}

impl HansenCriticalValues {
    /// Critical value for a level of 0.01, 0.05 or 0.10.
    pub fn at(&self, level: f64) -> Result<f64> {
        match level {
            l if (l - 0.01).abs() < 1e-12 => Ok(self.one),
            l if (l - 0.05).abs() < 1e-12 => Ok(self.five),
            l if (l - 0.10).abs() < 1e-12 => Ok(self.ten),
            l => Err(Error::invalid(format!(
                "significance level {l} not tabulated (use 0.01, 0.05 or 0.10)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstancyTest {
    pub lc_statistic: f64,
    pub dof: usize,
    pub level: f64,
    pub critical_values: HansenCriticalValues,
    pub reject: bool,
}

/// Joint statistic for a fitted VAR, decided at the 5% level.
pub fn hansen_lc(fit: &VarFit) -> Result<ConstancyTest> {
    hansen_lc_at(fit, 0.05)
}

pub fn hansen_lc_at(fit: &VarFit, level: f64) -> Result<ConstancyTest> {
    lc_from_residuals(&fit.design, &fit.residuals, level)
}

/// Statistic for a single OLS regression of `y` on `design`.
pub fn hansen_lc_regression(design: &DMatrix<f64>, y: &DVector<f64>, level: f64) -> Result<ConstancyTest> {
    let fit = least_squares(design, y, "constancy-test regression")?;
    let resid = DMatrix::from_column_slice(y.len(), 1, fit.residuals.as_slice());
    lc_from_residuals(design, &resid, level)
}

fn lc_from_residuals(design: &DMatrix<f64>, residuals: &DMatrix<f64>, level: f64) -> Result<ConstancyTest> {
    let (t, p) = design.shape();
    let n = residuals.ncols();
    let m = p + 1;
    let dof = n * m;
    let sigma2: Vec<f64> = (0..n)
        .map(|i| residuals.column(i).norm_squared() / t as f64)
        .collect();

    let mut scores = DMatrix::<f64>::zeros(t, dof);
    for r in 0..t {
        for i in 0..n {
            let e = residuals[(r, i)];
            for k in 0..p {
                scores[(r, i * m + k)] = design[(r, k)] * e;
            }
            scores[(r, i * m + p)] = e * e - sigma2[i];
        }
    }
    let v = scores.transpose() * &scores;
    let chol = v.clone().cholesky().ok_or_else(|| Error::Singular {
        context: "constancy-test moment covariance".into(),
        condition: condition_number(&v),
    })?;

    let mut cumulative = DVector::<f64>::zeros(dof);
    let mut total = 0.0;
    for r in 0..t {
        for k in 0..dof {
            cumulative[k] += scores[(r, k)];
        }
        let solved = chol.solve(&cumulative);
        total += cumulative.dot(&solved);
    }
    let lc_statistic = (total / t as f64).max(0.0);
    let critical_values = hansen_critical_values(dof);
    let threshold = critical_values.at(level)?;
    Ok(ConstancyTest {
        lc_statistic,
        dof,
        level,
        critical_values,
        reject: lc_statistic > threshold,
    })
}

/// Tabulated values up to 20 degrees of freedom, simulated (and cached) beyond.
pub fn hansen_critical_values(dof: usize) -> HansenCriticalValues {
    assert!(dof > 0, "degrees of freedom must be positive");
    if dof <= TABLE.len() {
        let row = TABLE[dof - 1];
        return HansenCriticalValues {
            one: row[0],
            five: row[1],
            ten: row[2],
            source: CriticalValueSource::Table,
        };
    }
    static CACHE: OnceLock<Mutex<HashMap<usize, HansenCriticalValues>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(cv) = cache.lock().expect("critical value cache poisoned").get(&dof) {
        return *cv;
    }
    let cv = simulate_hansen_critical_values(dof, SIM_DRAWS, SIM_TERMS, SIM_SEED);
    cache
        .lock()
        .expect("critical value cache poisoned")
        .insert(dof, cv);
    cv
}

/// Quantiles of `Σ_{j=1}^{dof} ∫₀¹ B_j(r)² dr` for independent Brownian bridges,
/// drawn from the series `∫B² = Σ_k Z_k²/(k²π²)` truncated at `terms` with the
/// tail replaced by its mean.
pub fn simulate_hansen_critical_values(
    dof: usize,
    draws: usize,
    terms: usize,
    seed: u64,
) -> HansenCriticalValues {
    const CHUNK: usize = 1_000;
    let weights: Vec<f64> = (1..=terms)
        .map(|k| 1.0 / ((k * k) as f64 * PI * PI))
        .collect();
    let tail = dof as f64 * (1.0 / 6.0 - weights.iter().sum::<f64>());
    let chi2 = ChiSquared::new(dof as f64).expect("positive degrees of freedom");
    let n_chunks = draws.div_ceil(CHUNK);
    let mut values: Vec<f64> = (0..n_chunks)
        .into_par_iter()
        .flat_map_iter(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let count = CHUNK.min(draws - c * CHUNK);
            (0..count)
                .map(|_| weights.iter().map(|w| w * chi2.sample(&mut rng)).sum::<f64>() + tail)
                .collect::<Vec<_>>()
        })
        .collect();
    values.sort_by(f64::total_cmp);
    let quantile = |p: f64| values[((p * draws as f64).ceil() as usize).clamp(1, draws) - 1];
    HansenCriticalValues {
        one: quantile(0.99),
        five: quantile(0.95),
        ten: quantile(0.90),
        source: CriticalValueSource::Simulated,
    }
}
