use std::io::Write;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tvvar::EfficiencyPath;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Regime {
    pub start_date: NaiveDate,
    pub end_date: NaiveDate,
    pub n: usize,
    pub mean: f64,
    /// Sample (N − 1) standard deviation of ζₜ.
    pub sd: f64,
    pub efficient_share: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeSummary {
    pub breakpoints: Vec<NaiveDate>,
    pub regimes: Vec<Regime>,
}

/// Splits the path at regime start dates and summarises ζₜ within each regime.
///
/// Regime `i` spans `[breakpoints[i], breakpoints[i+1])`; observations before
/// the first breakpoint are folded into the first regime so the regimes
/// partition the path.
pub fn regime_volatility(path: &EfficiencyPath, breakpoints: &[NaiveDate]) -> Result<RegimeSummary> {
    if breakpoints.is_empty() {
        return Err(Error::invalid("at least one breakpoint is required"));
    }
    if path.dates.len() != path.len() || path.is_empty() {
        return Err(Error::invalid("regime summaries need a dated, non-empty path"));
    }
    if breakpoints.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("breakpoints must be strictly increasing"));
    }
    let (first, last) = (path.dates[0], path.dates[path.len() - 1]);
    if let Some(b) = breakpoints.iter().find(|b| **b < first || **b > last) {
        return Err(Error::invalid(format!(
            "breakpoint {b} outside the sample {first}..{last}"
        )));
    }

    let mut regimes = Vec::with_capacity(breakpoints.len());
    for (i, start) in breakpoints.iter().enumerate() {
        let from = if i == 0 {
            0
        } else {
            path.dates.partition_point(|d| d < start)
        };
        let to = breakpoints
            .get(i + 1)
            .map(|next| path.dates.partition_point(|d| d < next))
            .unwrap_or(path.len());
        let values: Vec<f64> = path.zeta[from..to].iter().flatten().copied().collect();
        if values.len() < 2 {
            return Err(Error::invalid(format!(
                "regime starting {start} has {} defined values; need at least 2",
                values.len()
            )));
        }
        let n = values.len();
        let mean = values.iter().sum::<f64>() / n as f64;
        // shifted by the first value so constant regimes give exactly zero
        let shift = values[0];
        let shifted_mean = values.iter().map(|v| v - shift).sum::<f64>() / n as f64;
        let var = values
            .iter()
            .map(|v| (v - shift - shifted_mean).powi(2))
            .sum::<f64>()
            / (n - 1) as f64;
        let efficient_share = path.efficient_flag.as_ref().map(|f| {
            f[from..to].iter().filter(|x| **x).count() as f64 / (to - from) as f64
        });
        regimes.push(Regime {
            start_date: path.dates[from],
            end_date: path.dates[to - 1],
            n,
            mean,
            sd: var.sqrt(),
            efficient_share,
        });
    }
    Ok(RegimeSummary {
        breakpoints: breakpoints.to_vec(),
        regimes,
    })
}

impl RegimeSummary {
    /// `regime, start, end, n, mean_zeta, sd_zeta, efficient_share`
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["regime", "start", "end", "n", "mean_zeta", "sd_zeta", "efficient_share"])?;
        for (i, r) in self.regimes.iter().enumerate() {
            w.write_record([
                (i + 1).to_string(),
                r.start_date.to_string(),
                r.end_date.to_string(),
                r.n.to_string(),
                format!("{}", r.mean),
                format!("{}", r.sd),
                r.efficient_share.map(|s| format!("{s}")).unwrap_or_default(),
            ])?;
        }
        w.flush().map_err(|e| Error::io("<csv writer>", e))?;
        Ok(())
    }
}
