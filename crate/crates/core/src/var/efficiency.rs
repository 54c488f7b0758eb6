//! Long-run multiplier Φ(1) and the efficiency degree ζ.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{condition_number, spectral_norm};

/// Condition number of `I − ΣA` above which the multiplier is treated as undefined.
pub const MAX_CONDITION: f64 = 1e12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LongRunMultiplier {
    pub phi1: DMatrix<f64>,
}

/// `I − A₁ − … − A_q`
pub fn lag_polynomial_at_one(a: &[DMatrix<f64>]) -> Result<DMatrix<f64>> {
    let n = a
        .first()
        .map(|m| m.nrows())
        .ok_or_else(|| Error::invalid("no coefficient matrices"))?;
    let mut poly = DMatrix::<f64>::identity(n, n);
    for m in a {
        if m.shape() != (n, n) {
            return Err(Error::invalid("coefficient matrices must be square and equal-sized"));
        }
        poly -= m;
    }
    Ok(poly)
}

/// `Φ(1) = (I − ΣA)⁻¹`; a near-singular lag polynomial is a near-unit-root error.
pub fn long_run_multiplier(a: &[DMatrix<f64>]) -> Result<LongRunMultiplier> {
    let poly = lag_polynomial_at_one(a)?;
    let condition = condition_number(&poly);
    if !(condition < MAX_CONDITION) {
        return Err(Error::Singular {
            context: "long-run multiplier (near unit root)".into(),
            condition,
        });
    }
    let phi1 = poly.try_inverse().ok_or(Error::Singular {
        context: "long-run multiplier (near unit root)".into(),
        condition,
    })?;
    Ok(LongRunMultiplier { phi1 })
}

impl LongRunMultiplier {
    /// Spectral norm of `Φ(1) − I`.
    pub fn zeta(&self) -> f64 {
        let n = self.phi1.nrows();
        spectral_norm(&(&self.phi1 - DMatrix::<f64>::identity(n, n)))
    }
}

/// ζ: largest singular value of `Φ(1) − I`. Zero exactly when every `A` vanishes.
pub fn efficiency_degree(a: &[DMatrix<f64>]) -> Result<f64> {
    Ok(long_run_multiplier(a)?.zeta())
}
