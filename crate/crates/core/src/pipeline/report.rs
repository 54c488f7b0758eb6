use std::fmt::Write as _;
use std::fs::File;
use std::path::Path;

use serde::de::DeserializeOwned;

use super::{Table1, Table2, REGIMES_JSON, TABLE1_JSON, TABLE2_JSON, ZETA_CSV};
use crate::error::{Error, Result};
use crate::inference::RegimeSummary;
use crate::tvvar::EfficiencyPath;
use crate::unitroot::DeterministicModel;

const LABEL: usize = 14;
const CELL: usize = 11;

/// The artifacts a report is rendered from.
#[derive(Debug, Clone)]
pub struct ArtifactSet {
    pub table1: Table1,
    pub table2: Table2,
    /// `None` when no TV-VAR stage has run.
    pub path: Option<EfficiencyPath>,
    pub regimes: Option<RegimeSummary>,
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_reader(std::io::BufReader::new(file))?)
}

impl ArtifactSet {
    /// Loads both tables (required) and the ζ path and regimes (optional) from `dir`.
    pub fn load(dir: &Path) -> Result<Self> {
        let table1 = read_json(&dir.join(TABLE1_JSON))?;
        let table2 = read_json(&dir.join(TABLE2_JSON))?;
        let zeta = dir.join(ZETA_CSV);
        let path = if zeta.exists() {
            let file = File::open(&zeta).map_err(|e| Error::io(&zeta, e))?;
            Some(EfficiencyPath::read_csv(file)?)
        } else {
            None
        };
        let regimes_path = dir.join(REGIMES_JSON);
        let regimes = if regimes_path.exists() {
            Some(read_json(&regimes_path)?)
        } else {
            None
        };
        Ok(Self {
            table1,
            table2,
            path,
            regimes,
        })
    }
}

fn num(v: f64) -> String {
    let text = format!("{v:.4}");
    let text = if text == "-0.0000" { "0.0000".to_string() } else { text };
    format!("{text:>CELL$}")
}

fn label(s: &str) -> String {
    let short: String = s.chars().take(LABEL - 1).collect();
    format!("{short:<LABEL$}")
}

fn table1_block(out: &mut String, t: &Table1) {
    let _ = writeln!(out, "Table 1. Descriptive statistics and unit root tests");
    let _ = writeln!(
        out,
        "{}{:>CELL$}{:>CELL$}{:>CELL$}{:>CELL$}{:>8}{:>CELL$}{:>6}{:>CELL$}",
        label("Series"),
        "Mean",
        "SD",
        "Max",
        "Min",
        "N",
        "ADF-GLS",
        "Lags",
        "phi_hat"
    );
    for (s, u) in t.stats.columns.iter().zip(&t.unit_root) {
        let stat = format!(
            "{:.4}{}",
            u.result.statistic,
            if u.result.reject_1pct { "*" } else { "" }
        );
        let _ = writeln!(
            out,
            "{}{}{}{}{}{:>8}{:>CELL$}{:>6}{}",
            label(&s.label),
            num(s.mean),
            num(s.sd),
            num(s.max),
            num(s.min),
            s.n,
            stat,
            u.result.selected_lag,
            num(u.result.phi_hat)
        );
    }
    if let Some(first) = t.unit_root.first() {
        let model = match first.result.model {
            DeterministicModel::Constant => "constant",
            DeterministicModel::ConstantTrend => "constant and trend",
        };
        let _ = writeln!(
            out,
            "Note: ADF-GLS with {model}, lag chosen up to {} by the modified information criterion; \
             * rejects a unit root at the 1% critical value {:.2}. SD uses the N-1 denominator.",
            first.result.k_max, first.result.critical_values.one
        );
    }
}

fn table2_block(out: &mut String, t: &Table2) {
    let _ = writeln!(
        out,
        "Table 2. Time-invariant VAR({}) estimates, Newey-West standard errors in brackets",
        t.q
    );
    let mut header = label("");
    for l in &t.labels {
        let _ = write!(header, "{:>CELL$}", l.chars().take(CELL - 1).collect::<String>());
    }
    let _ = writeln!(out, "{header}");
    for (k, term) in t.terms.iter().enumerate() {
        let mut est = label(term);
        let mut se = label("");
        for i in 0..t.labels.len() {
            est.push_str(&num(t.estimates[i][k]));
            let _ = write!(se, "{:>CELL$}", format!("[{:.4}]", t.std_errors[i][k]));
        }
        let _ = writeln!(out, "{est}");
        let _ = writeln!(out, "{se}");
    }
    let mut r2 = label("Adj. R2");
    for v in &t.adjusted_r2 {
        r2.push_str(&num(*v));
    }
    let _ = writeln!(out, "{r2}");
    let h = &t.hansen;
    let _ = writeln!(
        out,
        "Hansen Lc (joint) {:.4}, {} dof, 5% critical value {:.4}{}",
        h.lc_statistic,
        h.dof,
        h.critical_values.five,
        if h.reject { ", constancy rejected" } else { "" }
    );
    match t.zeta {
        Some(z) => {
            let _ = writeln!(out, "Efficiency degree zeta {z:.4}");
        }
        None => {
            let _ = writeln!(out, "Efficiency degree zeta undefined (I - sum A singular)");
        }
    }
    let _ = writeln!(out, "N = {}, Newey-West bandwidth {}", t.n_obs, t.nw_bandwidth);
}

fn path_block(out: &mut String, path: Option<&EfficiencyPath>, regimes: Option<&RegimeSummary>) {
    let _ = writeln!(out, "Efficiency path");
    let Some(path) = path.filter(|p| !p.is_empty()) else {
        let _ = writeln!(out, "  no TV-VAR run");
        return;
    };
    let values = path.defined_values();
    let _ = writeln!(
        out,
        "  periods {}, zeta defined in {}",
        path.len(),
        values.len()
    );
    if !values.is_empty() {
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        let _ = writeln!(out, "  min {min:.4}  max {max:.4}  mean {mean:.4}");
    }
    match &path.efficient_flag {
        Some(flags) => {
            let share = flags.iter().filter(|f| **f).count() as f64 / flags.len() as f64;
            let _ = writeln!(out, "  share efficient {share:.4}");
        }
        None => {
            let _ = writeln!(out, "  no bootstrap bands");
        }
    }
    let Some(regimes) = regimes else {
        let _ = writeln!(out, "  no regime breakpoints supplied");
        return;
    };
    let _ = writeln!(
        out,
        "  {:<8}{:<12}{:<12}{:>7}{:>CELL$}{:>CELL$}",
        "Regime", "Start", "End", "N", "Mean", "SD"
    );
    for (i, r) in regimes.regimes.iter().enumerate() {
        let _ = writeln!(
            out,
            "  {:<8}{:<12}{:<12}{:>7}{}{}",
            i + 1,
            r.start_date.to_string(),
            r.end_date.to_string(),
            r.n,
            num(r.mean),
            num(r.sd)
        );
    }
}

/// Fixed-width text report: Table 1, Table 2 and a ζₜ summary, numbers to 4 decimals.
pub fn emit_report(artifacts: &ArtifactSet) -> String {
    let mut out = String::new();
    table1_block(&mut out, &artifacts.table1);
    out.push('\n');
    table2_block(&mut out, &artifacts.table2);
    out.push('\n');
    path_block(&mut out, artifacts.path.as_ref(), artifacts.regimes.as_ref());
    out
}
