//! Seeded synthetic return generators with known coefficient paths.

use std::f64::consts::PI;
use std::io::Write;

use chrono::NaiveDate;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::spectral_radius;
use crate::series::{write_prices_csv, ReturnMatrix, DEFAULT_DATE_FORMAT};
use crate::var::efficiency_degree;

pub const BURN_IN: usize = 200;
pub const MAX_SPECTRAL_RADIUS: f64 = 0.98;
pub const MAX_RESAMPLE_ATTEMPTS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    /// No dynamics: the efficient-market null.
    Iid,
    /// Constant `A_l = coefficients[l]`.
    ConstantVar,
    /// `A_{l,t} = sin(2πt/period)·coefficients[l]`.
    SinusoidalTv,
    /// `A_{l,t} = A_{l,t-1} + V_{l,t}`, started at `coefficients`, `vec V ~ N(0, σ_v² I)`.
    RandomwalkTv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScenarioSpec {
    pub kind: ScenarioKind,
    pub t: usize,
    pub n: usize,
    pub q: usize,
    pub noise_sd: f64,
    /// One n×n matrix per lag, as rows. Empty means zero matrices.
    pub coefficients: Vec<Vec<Vec<f64>>>,
    /// Sinusoid period in observations.
    pub period: f64,
    /// Random-walk innovation SD for each coefficient.
    pub state_sd: f64,
    pub intercept: Vec<f64>,
    pub seed: u64,
}

impl Default for ScenarioSpec {
    fn default() -> Self {
        Self {
            kind: ScenarioKind::Iid,
            t: 500,
            n: 2,
            q: 1,
            noise_sd: 1.0,
            coefficients: Vec::new(),
            period: 500.0,
            state_sd: 0.01,
            intercept: Vec::new(),
            seed: 0,
        }
    }
}

impl ScenarioSpec {
    pub fn iid(t: usize, n: usize, seed: u64) -> Self {
        Self {
            t,
            n,
            seed,
            ..Self::default()
        }
    }

    pub fn constant_var(t: usize, a: &[DMatrix<f64>], seed: u64) -> Self {
        Self {
            kind: ScenarioKind::ConstantVar,
            t,
            n: a.first().map_or(1, |m| m.nrows()),
            q: a.len(),
            coefficients: a.iter().map(matrix_rows).collect(),
            seed,
            ..Self::default()
        }
    }

    pub fn sinusoidal(t: usize, amplitude: &DMatrix<f64>, period: f64, seed: u64) -> Self {
        Self {
            kind: ScenarioKind::SinusoidalTv,
            t,
            n: amplitude.nrows(),
            q: 1,
            coefficients: vec![matrix_rows(amplitude)],
            period,
            seed,
            ..Self::default()
        }
    }

    pub fn random_walk(t: usize, n: usize, state_sd: f64, seed: u64) -> Self {
        Self {
            kind: ScenarioKind::RandomwalkTv,
            t,
            n,
            state_sd,
            seed,
            ..Self::default()
        }
    }

    fn base_matrices(&self) -> Result<Vec<DMatrix<f64>>> {
        if self.coefficients.is_empty() {
            return Ok(vec![DMatrix::zeros(self.n, self.n); self.q]);
        }
        if self.coefficients.len() != self.q {
            return Err(Error::invalid(format!(
                "{} coefficient matrices for q = {}",
                self.coefficients.len(),
                self.q
            )));
        }
        self.coefficients
            .iter()
            .map(|rows| {
                if rows.len() != self.n || rows.iter().any(|r| r.len() != self.n) {
                    return Err(Error::invalid(format!(
                        "coefficient matrices must be {n}×{n}",
                        n = self.n
                    )));
                }
                Ok(DMatrix::from_fn(self.n, self.n, |i, j| rows[i][j]))
            })
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.t < 2 || self.n == 0 || self.q == 0 {
            return Err(Error::invalid("scenario needs T ≥ 2, n ≥ 1, q ≥ 1"));
        }
        if !(self.noise_sd > 0.0 && self.noise_sd.is_finite()) {
            return Err(Error::invalid("noise SD must be positive"));
        }
        if self.kind == ScenarioKind::SinusoidalTv && !(self.period > 0.0) {
            return Err(Error::invalid("sinusoid period must be positive"));
        }
        if self.kind == ScenarioKind::RandomwalkTv && !(self.state_sd >= 0.0) {
            return Err(Error::invalid("state SD must be non-negative"));
        }
        if !self.intercept.is_empty() && self.intercept.len() != self.n {
            return Err(Error::invalid("intercept length must equal n"));
        }
        self.base_matrices().map(|_| ())
    }
}

fn matrix_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| m.row(i).iter().copied().collect())
        .collect()
}

/// True `A_{l,t}` for every retained observation `t = 0..T`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientPath {
    pub a_path: Vec<Vec<DMatrix<f64>>>,
}

impl CoefficientPath {
    pub fn len(&self) -> usize {
        self.a_path.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a_path.is_empty()
    }

    /// The periods a TV-VAR(q) fit estimates, `t = q..T`.
    pub fn aligned(&self, q: usize) -> CoefficientPath {
        CoefficientPath {
            a_path: self.a_path[q.min(self.len())..].to_vec(),
        }
    }
}

/// Companion matrix of a VAR with lag matrices `a`.
pub fn companion(a: &[DMatrix<f64>]) -> DMatrix<f64> {
    let n = a[0].nrows();
    let q = a.len();
    let mut c = DMatrix::zeros(n * q, n * q);
    for (l, m) in a.iter().enumerate() {
        c.view_mut((0, l * n), (n, n)).copy_from(m);
    }
    for i in n..n * q {
        c[(i, i - n)] = 1.0;
    }
    c
}

fn is_stable(a: &[DMatrix<f64>]) -> bool {
    spectral_radius(&companion(a)) < MAX_SPECTRAL_RADIUS
}

fn coefficient_path(spec: &ScenarioSpec, rng: &mut ChaCha8Rng) -> Result<Option<Vec<Vec<DMatrix<f64>>>>> {
    let base = spec.base_matrices()?;
    let total = BURN_IN + spec.t;
    let path: Vec<Vec<DMatrix<f64>>> = match spec.kind {
        ScenarioKind::Iid => vec![vec![DMatrix::zeros(spec.n, spec.n); spec.q]; total],
        ScenarioKind::ConstantVar => vec![base; total],
        ScenarioKind::SinusoidalTv => (0..total)
            .map(|tau| {
                let t = tau as f64 - BURN_IN as f64;
                let s = (2.0 * PI * t / spec.period).sin();
                base.iter().map(|m| m * s).collect()
            })
            .collect(),
        ScenarioKind::RandomwalkTv => {
            let step = Normal::new(0.0, spec.state_sd)
                .map_err(|e| Error::invalid(format!("state SD: {e}")))?;
            let mut current = base;
            let mut path = Vec::with_capacity(total);
            for _ in 0..total {
                for m in current.iter_mut() {
                    for v in m.iter_mut() {
                        *v += step.sample(rng);
                    }
                }
                path.push(current.clone());
            }
            path
        }
    };
    Ok(path.iter().all(|a| is_stable(a)).then_some(path))
}

/// Simulates `x_t = ν + Σ_l A_{l,t} x_{t-l} + ε_t` with Gaussian noise,
/// discarding a fixed burn-in. Random-walk paths that leave the stability
/// region are redrawn.
pub fn gen_returns(spec: &ScenarioSpec) -> Result<(ReturnMatrix, CoefficientPath)> {
    spec.validate()?;
    let mut path = None;
    for attempt in 0..MAX_RESAMPLE_ATTEMPTS {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        rng.set_stream(1 + attempt as u64);
        path = coefficient_path(spec, &mut rng)?;
        if path.is_some() || spec.kind != ScenarioKind::RandomwalkTv {
            break;
        }
    }
    let path = path.ok_or_else(|| {
        Error::Numerical(format!(
            "coefficient path not stable (spectral radius ≥ {MAX_SPECTRAL_RADIUS}){}",
            if spec.kind == ScenarioKind::RandomwalkTv {
                format!(" after {MAX_RESAMPLE_ATTEMPTS} attempts")
            } else {
                String::new()
            }
        ))
    })?;

    let (n, q) = (spec.n, spec.q);
    let total = BURN_IN + spec.t;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(0);
    let nu: Vec<f64> = if spec.intercept.is_empty() {
        vec![0.0; n]
    } else {
        spec.intercept.clone()
    };
    let mut x = DMatrix::<f64>::zeros(total, n);
    for tau in 0..total {
        for i in 0..n {
            let e: f64 = rng.sample(StandardNormal);
            let mut v = nu[i] + spec.noise_sd * e;
            for l in 1..=q.min(tau) {
                let a = &path[tau][l - 1];
                for j in 0..n {
                    v += a[(i, j)] * x[(tau - l, j)];
                }
            }
            x[(tau, i)] = v;
        }
    }
    let values = x.rows(BURN_IN, spec.t).into_owned();
    let labels = (1..=n).map(|j| format!("x{j}")).collect();
    let start = NaiveDate::from_ymd_opt(2000, 1, 3).expect("valid start date");
    let returns = ReturnMatrix::with_daily_dates(start, labels, values)?;
    Ok((
        returns,
        CoefficientPath {
            a_path: path[BURN_IN..].to_vec(),
        },
    ))
}

/// ζₜ of the true coefficients; singular periods are `None`.
pub fn true_zeta_path(path: &CoefficientPath) -> Vec<Option<f64>> {
    path.a_path
        .iter()
        .map(|a| efficiency_degree(a).ok())
        .collect()
}

/// Writes the scenario as a price CSV (`100·exp(cumsum r)`) readable by
/// [`crate::series::load_csv`].
pub fn write_scenario_csv<W: Write>(returns: &ReturnMatrix, out: W) -> Result<()> {
    let prices = returns.to_prices(100.0)?;
    write_prices_csv(&prices, out, DEFAULT_DATE_FORMAT)
}
