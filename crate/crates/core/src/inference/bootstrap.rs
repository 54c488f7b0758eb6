//! Residual bootstrap of ζₜ under the efficient-market null.
//!
//! Under the null every slope coefficient is zero, so returns are the mean plus
//! iid innovations. Each replication draws whole return vectors (keeping the
//! cross-sectional correlation) from the centred sample, re-fits the TV-VAR
//! with the same `q` and `λ`, and records ζ*ₜ. Bands are per-period order
//! statistics. Replication `r` draws from ChaCha stream `r` of the master seed,
//! so results do not depend on scheduling.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::ReturnMatrix;
use crate::tvvar::{solve_tvvar, solve_tvvar_matrix, tv_efficiency_path, EfficiencyPath};
use crate::var::efficiency_degree;

pub const MIN_REPLICATIONS: usize = 100;
/// Fewest replications allowed in each tail beyond the band.
pub const MIN_TAIL_COUNT: f64 = 5.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BootstrapSpec {
    pub replications: usize,
    pub coverage: f64,
    pub seed: u64,
    pub lambda: f64,
    pub q: usize,
}

impl Default for BootstrapSpec {
    fn default() -> Self {
        Self {
            replications: 5000,
            coverage: 0.95,
            seed: 0,
            lambda: crate::tvvar::DEFAULT_LAMBDA,
            q: 1,
        }
    }
}

impl BootstrapSpec {
    pub fn validate(&self) -> Result<()> {
        if self.replications < MIN_REPLICATIONS {
            return Err(Error::invalid(format!(
                "at least {MIN_REPLICATIONS} bootstrap replications required, got {}",
                self.replications
            )));
        }
        if !(self.coverage > 0.0 && self.coverage < 1.0) {
            return Err(Error::invalid(format!(
                "coverage must lie in (0, 1), got {}",
                self.coverage
            )));
        }
        let tail = self.replications as f64 * (1.0 - self.coverage) / 2.0;
        if tail < MIN_TAIL_COUNT {
            return Err(Error::invalid(format!(
                "{} replications leave {tail:.2} draws per tail at coverage {}; need at least {MIN_TAIL_COUNT}",
                self.replications, self.coverage
            )));
        }
        Ok(())
    }

    /// 1-based order statistics used for the lower and upper band.
    pub fn band_ranks(&self) -> (usize, usize) {
        let b = self.replications as f64;
        let tail = (1.0 - self.coverage) / 2.0;
        let lower = ((b * tail).round() as usize).clamp(1, self.replications);
        let upper = ((b * (1.0 - tail)).round() as usize).clamp(1, self.replications);
        (lower, upper)
    }
}

/// Draws one null pseudo-sample `x̄ + ε*` with `ε*` resampled from the centred returns.
pub fn null_resample(x: &DMatrix<f64>, mean: &DVector<f64>, rng: &mut impl Rng) -> DMatrix<f64> {
    let (t, n) = x.shape();
    let mut out = DMatrix::zeros(t, n);
    for r in 0..t {
        let src = rng.random_range(0..t);
        for j in 0..n {
            out[(r, j)] = mean[j] + (x[(src, j)] - mean[j]);
        }
    }
    out
}

/// ζ*ₜ for replication `rep`; singular periods count as +∞.
pub fn replicate_zeta(x: &DMatrix<f64>, spec: &BootstrapSpec, rep: usize) -> Result<Vec<f64>> {
    let mean = x.row_mean().transpose();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(rep as u64);
    let sample = null_resample(x, &mean, &mut rng);
    let fit = solve_tvvar_matrix(&sample, spec.q, spec.lambda)
        .map_err(|e| Error::Numerical(format!("bootstrap replication {rep}: {e}")))?;
    Ok(fit
        .a_path
        .iter()
        .map(|a| efficiency_degree(a).unwrap_or(f64::INFINITY))
        .collect())
}

/// Observed ζₜ path with pointwise equal-tail null bands and efficiency flags.
pub fn bootstrap_bands(x: &ReturnMatrix, spec: &BootstrapSpec) -> Result<EfficiencyPath> {
    spec.validate()?;
    let fit = solve_tvvar(x, spec.q, spec.lambda)?;
    let observed = tv_efficiency_path(&fit);
    let values = x.values();
    let periods = observed.len();

    let draws: Vec<Vec<f64>> = (0..spec.replications)
        .into_par_iter()
        .map(|rep| replicate_zeta(values, spec, rep))
        .collect::<Result<_>>()?;

    let (lo_rank, hi_rank) = spec.band_ranks();
    let mut lower = Vec::with_capacity(periods);
    let mut upper = Vec::with_capacity(periods);
    let mut column = vec![0.0; spec.replications];
    for t in 0..periods {
        for (slot, d) in column.iter_mut().zip(&draws) {
            *slot = d[t];
        }
        column.sort_unstable_by(f64::total_cmp);
        lower.push(column[lo_rank - 1]);
        upper.push(column[hi_rank - 1]);
    }
    observed.with_bands(lower, upper)
}
