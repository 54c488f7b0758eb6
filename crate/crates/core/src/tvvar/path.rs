use std::io::{Read, Write};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::TvVarFit;
use crate::error::{Error, Result};
use crate::var::efficiency_degree;

/// Per-period efficiency degree, optionally with null bands.
///
/// `zeta[t]` is `None` where `I − Σ_l A_{l,t}` is numerically singular; such
/// periods are classified as inefficient.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyPath {
    pub dates: Vec<NaiveDate>,
    pub zeta: Vec<Option<f64>>,
    pub band_lower: Option<Vec<f64>>,
    pub band_upper: Option<Vec<f64>>,
    pub efficient_flag: Option<Vec<bool>>,
}

/// ζₜ for every period of a fit; singular periods are flagged, not fatal.
pub fn tv_efficiency_path(fit: &TvVarFit) -> EfficiencyPath {
    let zeta = fit
        .a_path
        .iter()
        .map(|mats| efficiency_degree(mats).ok())
        .collect();
    let dates = if fit.dates.len() == fit.n_periods() {
        fit.dates.clone()
    } else {
        Vec::new()
    };
    EfficiencyPath {
        dates,
        zeta,
        band_lower: None,
        band_upper: None,
        efficient_flag: None,
    }
}

impl EfficiencyPath {
    pub fn len(&self) -> usize {
        self.zeta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zeta.is_empty()
    }

    pub fn has_bands(&self) -> bool {
        self.band_lower.is_some() && self.band_upper.is_some()
    }

    /// Attaches bands and derives the efficiency flags.
    pub fn with_bands(mut self, lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != self.len() || upper.len() != self.len() {
            return Err(Error::invalid("band length differs from the path length"));
        }
        let flags = self
            .zeta
            .iter()
            .zip(lower.iter().zip(&upper))
            .map(|(z, (lo, hi))| matches!(z, Some(v) if *v >= *lo && *v <= *hi))
            .collect();
        self.band_lower = Some(lower);
        self.band_upper = Some(upper);
        self.efficient_flag = Some(flags);
        Ok(self)
    }

    pub fn defined_values(&self) -> Vec<f64> {
        self.zeta.iter().flatten().copied().collect()
    }

    fn date_label(&self, t: usize) -> String {
        self.dates
            .get(t)
            .map(|d| d.to_string())
            .unwrap_or_else(|| t.to_string())
    }

    /// `date, zeta, lower, upper, efficient_flag`; absent values are empty cells.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["date", "zeta", "lower", "upper", "efficient_flag"])?;
        let opt = |v: Option<f64>| v.map(|x| format!("{x}")).unwrap_or_default();
        for t in 0..self.len() {
            w.write_record([
                self.date_label(t),
                opt(self.zeta[t]),
                opt(self.band_lower.as_ref().map(|b| b[t])),
                opt(self.band_upper.as_ref().map(|b| b[t])),
                self.efficient_flag
                    .as_ref()
                    .map(|f| f[t].to_string())
                    .unwrap_or_default(),
            ])?;
        }
        w.flush().map_err(|e| Error::io("<csv writer>", e))?;
        Ok(())
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(input);
        let mut dates = Vec::new();
        let mut zeta = Vec::new();
        let mut lower = Vec::new();
        let mut upper = Vec::new();
        let mut flags = Vec::new();
        let parse_opt = |s: &str, line: usize| -> Result<Option<f64>> {
            if s.is_empty() {
                Ok(None)
            } else {
                s.parse::<f64>().map(Some).map_err(|e| Error::Row {
                    row: line,
                    message: format!("bad number `{s}`: {e}"),
                })
            }
        };
        for (k, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let line = k + 2;
            let field = |i: usize| rec.get(i).unwrap_or("");
            dates.push(
                NaiveDate::parse_from_str(field(0), "%Y-%m-%d").map_err(|e| Error::Row {
                    row: line,
                    message: format!("bad date `{}`: {e}", field(0)),
                })?,
            );
            zeta.push(parse_opt(field(1), line)?);
            lower.push(parse_opt(field(2), line)?);
            upper.push(parse_opt(field(3), line)?);
            flags.push(match field(4) {
                "" => None,
                "true" => Some(true),
                "false" => Some(false),
                other => {
                    return Err(Error::Row {
                        row: line,
                        message: format!("bad flag `{other}`"),
                    })
                }
            });
        }
        let collect_all = |v: Vec<Option<f64>>| -> Option<Vec<f64>> {
            if v.is_empty() {
                None
            } else {
                v.into_iter().collect()
            }
        };
        let efficient_flag = if flags.is_empty() {
            None
        } else {
            flags.into_iter().collect()
        };
        Ok(Self {
            dates,
            zeta,
            band_lower: collect_all(lower),
            band_upper: collect_all(upper),
            efficient_flag,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}
