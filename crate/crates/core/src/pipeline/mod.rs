//! End-to-end run: prices → returns → Table 1 → Table 2 → ζₜ with bands →
//! segments and regime summaries, plus a manifest that reproduces the run.
//!
//! Every stage is a public function so the binary can expose them one at a
//! time; chaining them gives the same artifacts as [`run_pipeline`].

mod config;
mod plot;
mod report;

pub use config::{
    BootstrapConfig, InputConfig, PipelineConfig, RegimeConfig, SegmentConfig, TvVarConfig,
    UnitRootConfig, VarConfig, MAX_Q,
};
pub use plot::{plot_csv, plot_data, plot_svg, PLOT_HEIGHT, PLOT_WIDTH};
pub use report::{emit_report, ArtifactSet};

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inference::{
    bootstrap_bands, classify_segments, regime_volatility, write_segments_csv, RegimeSummary,
    Segment,
};
use crate::series::{
    descriptive_stats, interpolate_missing, load_csv, log_returns, PriceSeries, ReturnMatrix,
    StatsSummary,
};
use crate::tvvar::{solve_tvvar, tv_efficiency_path, EfficiencyPath, TvVarFit};
use crate::unitroot::{adf_gls_with, AdfGlsConfig, AdfGlsResult};
use crate::var::{
    fit_var, hansen_lc, newey_west_cov, sbic_table, Bandwidth, ConstancyTest, VarFit,
};

pub const RETURNS_CSV: &str = "returns.csv";
pub const STATS_CSV: &str = "stats.csv";
pub const STATS_JSON: &str = "stats.json";
pub const TABLE1_CSV: &str = "table1.csv";
pub const TABLE1_JSON: &str = "table1.json";
pub const TABLE2_CSV: &str = "table2.csv";
pub const TABLE2_JSON: &str = "table2.json";
pub const COEFFICIENTS_CSV: &str = "tvvar_coefficients.csv";
pub const ZETA_CSV: &str = "zeta_path.csv";
pub const PLOT_CSV: &str = "zeta_plot.csv";
pub const PLOT_SVG: &str = "zeta_plot.svg";
pub const SEGMENTS_CSV: &str = "segments.csv";
pub const REGIMES_CSV: &str = "regimes.csv";
pub const REGIMES_JSON: &str = "regimes.json";
pub const REPORT_TXT: &str = "report.txt";
pub const MANIFEST_JSON: &str = "manifest.json";

fn staged<T>(stage: &'static str, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Stage { .. } => e,
        other => Error::Stage {
            stage,
            source: Box::new(other),
        },
    })
}

/// One Table 1 row: descriptive statistics and the unit-root test of a series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitRootRow {
    pub series: String,
    #[serde(flatten)]
    pub result: AdfGlsResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table1 {
    pub stats: StatsSummary,
    pub unit_root: Vec<UnitRootRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table2 {
    pub q: usize,
    /// SBIC for `q = 1..=q_max`; absent when the lag order was fixed.
    pub sbic: Option<Vec<f64>>,
    pub labels: Vec<String>,
    /// Regressor names, in the row order of `estimates`.
    pub terms: Vec<String>,
    /// `estimates[i][k]`: equation i, term k.
    pub estimates: Vec<Vec<f64>>,
    pub std_errors: Vec<Vec<f64>>,
    pub nw_bandwidth: usize,
    pub adjusted_r2: Vec<f64>,
    pub n_obs: usize,
    pub hansen: ConstancyTest,
    /// Efficiency degree of the constant-coefficient fit; absent if `I − ΣA` is singular.
    pub zeta: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct Ingested {
    /// Prices after gap filling.
    pub prices: PriceSeries,
    pub returns: ReturnMatrix,
    pub interpolated_cells: usize,
}

/// Reads prices, fills interior gaps when enabled, and forms log returns.
pub fn ingest(input: &InputConfig) -> Result<Ingested> {
    let raw = staged("ingest", load_csv(&input.path, &input.schema()))?;
    let interpolated_cells = if input.interpolate { raw.missing_count() } else { 0 };
    let prices = if interpolated_cells > 0 {
        staged("interpolate", interpolate_missing(&raw))?
    } else {
        raw
    };
    let returns = staged("returns", log_returns(&prices))?;
    Ok(Ingested {
        prices,
        returns,
        interpolated_cells,
    })
}

pub fn stats_stage(returns: &ReturnMatrix) -> Result<StatsSummary> {
    staged("stats", descriptive_stats(returns))
}

/// Descriptive statistics plus an ADF-GLS test on each return series.
pub fn table1(returns: &ReturnMatrix, config: &UnitRootConfig) -> Result<Table1> {
    let stats = stats_stage(returns)?;
    let adf = AdfGlsConfig {
        model: config.model,
        k_max: config.k_max,
        criterion: config.criterion,
        c_bar: None,
    };
    let unit_root = returns
        .labels()
        .iter()
        .enumerate()
        .map(|(j, label)| {
            adf_gls_with(&returns.column(j), &adf)
                .map(|result| UnitRootRow {
                    series: label.clone(),
                    result,
                })
                .map_err(|e| Error::Stage {
                    stage: "unitroot",
                    source: Box::new(Error::Numerical(format!("series `{label}`: {e}"))),
                })
        })
        .collect::<Result<_>>()?;
    Ok(Table1 { stats, unit_root })
}

/// The configured lag order, or the SBIC choice with its criterion table.
pub fn resolve_q(returns: &ReturnMatrix, config: &VarConfig) -> Result<(usize, Option<Vec<f64>>)> {
    match config.q {
        Some(q) => Ok((q, None)),
        None => {
            let table = staged("lag_selection", sbic_table(returns, config.q_max))?;
            Ok((crate::unitroot::argmin(&table) + 1, Some(table)))
        }
    }
}

fn term_names(labels: &[String], q: usize) -> Vec<String> {
    let mut terms = vec!["const".to_string()];
    for l in 1..=q {
        terms.extend(labels.iter().map(|s| format!("{s}(-{l})")));
    }
    terms
}

/// Constant-coefficient VAR with Newey–West errors, Hansen Lc and ζ.
pub fn table2(returns: &ReturnMatrix, config: &VarConfig) -> Result<(Table2, VarFit)> {
    let (q, sbic) = resolve_q(returns, config)?;
    let fit = staged("var", fit_var(returns, q))?;
    let bandwidth = config.nw_bandwidth.map_or(Bandwidth::Auto, Bandwidth::Fixed);
    let nw = staged("var", newey_west_cov(&fit, bandwidth))?;
    let hansen = staged("var", hansen_lc(&fit))?;
    let column = |m: &nalgebra::DMatrix<f64>, i: usize| m.column(i).iter().copied().collect();
    let table = Table2 {
        q,
        sbic,
        labels: returns.labels().to_vec(),
        terms: term_names(returns.labels(), q),
        estimates: (0..fit.n).map(|i| column(&fit.coefficients, i)).collect(),
        std_errors: (0..fit.n).map(|i| column(&nw.std_errors, i)).collect(),
        nw_bandwidth: nw.bandwidth,
        adjusted_r2: fit.adjusted_r2(),
        n_obs: fit.n_obs(),
        hansen,
        zeta: fit.efficiency_degree().ok(),
    };
    Ok((table, fit))
}

pub fn tvvar_stage(returns: &ReturnMatrix, q: usize, lambda: f64) -> Result<(TvVarFit, EfficiencyPath)> {
    let fit = staged("tvvar", solve_tvvar(returns, q, lambda))?;
    let path = tv_efficiency_path(&fit);
    Ok((fit, path))
}

pub fn bootstrap_stage(returns: &ReturnMatrix, config: &PipelineConfig, q: usize) -> Result<EfficiencyPath> {
    staged("bootstrap", bootstrap_bands(returns, &config.bootstrap_spec(q)))
}

pub fn segments_stage(path: &EfficiencyPath, min_run: usize) -> Result<Vec<Segment>> {
    staged("segments", classify_segments(path, min_run))
}

pub fn regimes_stage(path: &EfficiencyPath, breakpoints: &[NaiveDate]) -> Result<Option<RegimeSummary>> {
    if breakpoints.is_empty() {
        return Ok(None);
    }
    staged("regimes", regime_volatility(path, breakpoints)).map(Some)
}

/// Series whose unit-root null survives at 1%; the bootstrap treats returns as
/// stationary, so these deserve a warning.
pub fn pretest_warnings(t1: &Table1) -> Vec<String> {
    t1.unit_root
        .iter()
        .filter(|r| !r.result.reject_1pct)
        .map(|r| {
            format!(
                "unit root not rejected at 1% for `{}` (ADF-GLS {:.4}); bootstrap bands assume stationary returns",
                r.series, r.result.statistic
            )
        })
        .collect()
}

impl Table1 {
    /// `series, mean, sd, max, min, n, adf_gls, lags, phi_hat, k_max, reject_1pct`
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "series", "mean", "sd", "max", "min", "n", "adf_gls", "lags", "phi_hat", "k_max",
            "reject_1pct",
        ])?;
        for (s, u) in self.stats.columns.iter().zip(&self.unit_root) {
            w.write_record([
                s.label.clone(),
                format!("{}", s.mean),
                format!("{}", s.sd),
                format!("{}", s.max),
                format!("{}", s.min),
                s.n.to_string(),
                format!("{}", u.result.statistic),
                u.result.selected_lag.to_string(),
                format!("{}", u.result.phi_hat),
                u.result.k_max.to_string(),
                u.result.reject_1pct.to_string(),
            ])?;
        }
        w.flush().map_err(|e| Error::io("<csv writer>", e))?;
        Ok(())
    }
}

impl Table2 {
    /// `equation, term, estimate, nw_se`
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["equation", "term", "estimate", "nw_se"])?;
        for (i, label) in self.labels.iter().enumerate() {
            for (k, term) in self.terms.iter().enumerate() {
                w.write_record([
                    label.clone(),
                    term.clone(),
                    format!("{}", self.estimates[i][k]),
                    format!("{}", self.std_errors[i][k]),
                ])?;
            }
        }
        w.flush().map_err(|e| Error::io("<csv writer>", e))?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputSummary {
    pub rows: usize,
    pub labels: Vec<String>,
    pub first_date: Option<NaiveDate>,
    pub last_date: Option<NaiveDate>,
    pub interpolated_cells: usize,
}

/// Everything needed to reproduce a run, written last.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub config: PipelineConfig,
    pub seed: u64,
    pub input: InputSummary,
    pub selected_q: usize,
    pub warnings: Vec<String>,
    pub artifacts: Vec<String>,
}

/// In-memory results of a complete run.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub table1: Table1,
    pub table2: Table2,
    pub path: EfficiencyPath,
    pub segments: Vec<Segment>,
    pub regimes: Option<RegimeSummary>,
    pub manifest: Manifest,
    /// File name → contents, in name order.
    pub files: BTreeMap<String, Vec<u8>>,
}

fn render<F: FnOnce(&mut Vec<u8>) -> Result<()>>(f: F) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    f(&mut buf)?;
    Ok(buf)
}

fn json_bytes<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    Ok(text.into_bytes())
}

/// Runs every stage in memory without touching the output directory.
pub fn compute_pipeline(config: &PipelineConfig) -> Result<RunOutput> {
    staged("config", config.validate())?;
    let mut config = config.clone();
    config.input.path = staged(
        "ingest",
        std::fs::canonicalize(&config.input.path).map_err(|e| Error::io(&config.input.path, e)),
    )?;
    match config.threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
            pool.install(|| compute_stages(config))
        }
        None => compute_stages(config),
    }
}

fn compute_stages(config: PipelineConfig) -> Result<RunOutput> {
    let Ingested {
        prices,
        returns,
        interpolated_cells,
    } = ingest(&config.input)?;
    let stats = stats_stage(&returns)?;
    let t1 = table1(&returns, &config.unitroot)?;
    let (t2, _) = table2(&returns, &config.var)?;
    let (fit, _) = tvvar_stage(&returns, t2.q, config.tvvar.lambda)?;
    let path = bootstrap_stage(&returns, &config, t2.q)?;
    let segments = segments_stage(&path, config.segments.min_run)?;
    let regimes = regimes_stage(&path, &config.regimes.breakpoints)?;
    let warnings = pretest_warnings(&t1);

    let mut files = BTreeMap::new();
    let mut put = |name: &str, bytes: Vec<u8>| {
        files.insert(name.to_string(), bytes);
    };
    put(RETURNS_CSV, render(|b| returns.write_csv(b))?);
    put(STATS_CSV, render(|b| stats.write_csv(b))?);
    put(STATS_JSON, json_bytes(&stats)?);
    put(TABLE1_CSV, render(|b| t1.write_csv(b))?);
    put(TABLE1_JSON, json_bytes(&t1)?);
    put(TABLE2_CSV, render(|b| t2.write_csv(b))?);
    put(TABLE2_JSON, json_bytes(&t2)?);
    put(COEFFICIENTS_CSV, render(|b| fit.write_coefficients_csv(b))?);
    put(ZETA_CSV, render(|b| path.write_csv(b))?);
    put(PLOT_CSV, render(|b| plot_csv(&path, b))?);
    put(PLOT_SVG, plot_svg(&path)?.into_bytes());
    put(SEGMENTS_CSV, render(|b| write_segments_csv(&segments, b))?);
    put(REGIMES_CSV, render(|b| write_regimes_csv(regimes.as_ref(), b))?);
    if let Some(r) = &regimes {
        put(REGIMES_JSON, json_bytes(r)?);
    }
    let artifacts = ArtifactSet {
        table1: t1.clone(),
        table2: t2.clone(),
        path: Some(path.clone()),
        regimes: regimes.clone(),
    };
    put(REPORT_TXT, emit_report(&artifacts).into_bytes());

    let mut names: Vec<String> = files.keys().cloned().collect();
    names.push(MANIFEST_JSON.to_string());
    names.sort();
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME").to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        seed: config.bootstrap.seed,
        input: InputSummary {
            rows: prices.len(),
            labels: prices.labels().to_vec(),
            first_date: prices.dates().first().copied(),
            last_date: prices.dates().last().copied(),
            interpolated_cells,
        },
        selected_q: t2.q,
        warnings,
        artifacts: names,
        config,
    };
    files.insert(MANIFEST_JSON.to_string(), json_bytes(&manifest)?);

    Ok(RunOutput {
        table1: t1,
        table2: t2,
        path,
        segments,
        regimes,
        manifest,
        files,
    })
}

/// Header-only output when no breakpoints were configured.
pub fn write_regimes_csv<W: Write>(regimes: Option<&RegimeSummary>, out: W) -> Result<()> {
    match regimes {
        Some(r) => r.write_csv(out),
        None => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["regime", "start", "end", "n", "mean_zeta", "sd_zeta", "efficient_share"])?;
            w.flush().map_err(|e| Error::io("<csv writer>", e))?;
            Ok(())
        }
    }
}

/// Writes named artifacts into `dir`. On failure, files written so far are removed.
pub fn write_artifacts(dir: &Path, files: &BTreeMap<String, Vec<u8>>) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::with_capacity(files.len());
    for (name, bytes) in files {
        let target = dir.join(name);
        if let Err(e) = std::fs::write(&target, bytes) {
            for p in &written {
                let _ = std::fs::remove_file(p);
            }
            return Err(Error::Stage {
                stage: "write",
                source: Box::new(Error::io(&target, e)),
            });
        }
        written.push(target);
    }
    Ok(written)
}

/// Runs the pipeline and writes its artifacts to `config.output_dir`.
///
/// Nothing is written unless every stage succeeds.
pub fn run_pipeline(config: &PipelineConfig) -> Result<RunOutput> {
    let output = compute_pipeline(config)?;
    write_artifacts(&config.output_dir, &output.files)?;
    Ok(output)
}
