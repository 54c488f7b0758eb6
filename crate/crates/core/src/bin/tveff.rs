//! Command-line front end. Each pipeline stage is a subcommand reading and
//! writing files in one output directory; `run` does everything at once.
//!
//! Exit status: 0 success, 1 usage, 2 data error, 3 numerical failure.

use std::collections::BTreeMap;
use std::fs::File;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand, ValueEnum};

use tvvar_efficiency::inference::write_segments_csv;
use tvvar_efficiency::pipeline::{self, ArtifactSet, PipelineConfig};
use tvvar_efficiency::series::{read_returns_csv, write_prices_csv, ReturnMatrix, DEFAULT_DATE_FORMAT};
use tvvar_efficiency::synth::{gen_returns, true_zeta_path, ScenarioKind, ScenarioSpec};
use tvvar_efficiency::tvvar::EfficiencyPath;
use tvvar_efficiency::unitroot::{DeterministicModel, InformationCriterion};
use tvvar_efficiency::{Error, ErrorKind, Result};

#[derive(Parser)]
#[command(name = "tveff", version, about = "Time-varying market efficiency from TV-VAR estimates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// TOML pipeline config; command-line flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory for artifacts.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for parallel stages (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args, Clone, Default)]
struct InputArgs {
    /// Price CSV.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    date_column: Option<String>,
    /// Comma-separated price columns (default: all but the date).
    #[arg(long, value_delimiter = ',')]
    columns: Option<Vec<String>>,
    #[arg(long)]
    date_format: Option<String>,
    /// Leave gaps unfilled (returns then fail on missing prices).
    #[arg(long)]
    no_interpolate: bool,
}

#[derive(Args, Clone, Default)]
struct UnitRootArgs {
    #[arg(long, value_enum)]
    model: Option<ModelArg>,
    #[arg(long)]
    k_max: Option<usize>,
    #[arg(long, value_enum)]
    criterion: Option<CriterionArg>,
}

#[derive(Args, Clone, Default)]
struct VarArgs {
    /// Fixed lag order (skips SBIC).
    #[arg(long)]
    q: Option<usize>,
    #[arg(long)]
    q_max: Option<usize>,
    #[arg(long)]
    nw_bandwidth: Option<usize>,
}

#[derive(Args, Clone, Default)]
struct LambdaArg {
    /// Smoothness ratio λ of the TV-VAR.
    #[arg(long, allow_negative_numbers = true)]
    lambda: Option<f64>,
}

#[derive(Args, Clone, Default)]
struct BootstrapArgs {
    #[arg(long)]
    replications: Option<usize>,
    #[arg(long)]
    coverage: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Clone, Default)]
struct SegmentArgs {
    #[arg(long)]
    min_run: Option<usize>,
    /// Comma-separated regime start dates (YYYY-MM-DD).
    #[arg(long, value_delimiter = ',')]
    breakpoints: Option<Vec<NaiveDate>>,
}

#[derive(Args, Clone)]
struct ReturnsArg {
    /// Returns CSV written by `ingest` (default: <out>/returns.csv).
    #[arg(long)]
    returns: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Constant,
    Trend,
}

#[derive(Clone, Copy, ValueEnum)]
enum CriterionArg {
    Mbic,
    Maic,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Iid,
    ConstantVar,
    SinusoidalTv,
    RandomwalkTv,
}

#[derive(Subcommand)]
enum Command {
    /// Load prices, fill gaps and write log returns.
    Ingest {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        input: InputArgs,
    },
    /// Descriptive statistics of the returns.
    Stats {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        returns: ReturnsArg,
    },
    /// Table 1: statistics plus ADF-GLS tests.
    Unitroot {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        returns: ReturnsArg,
        #[command(flatten)]
        unitroot: UnitRootArgs,
    },
    /// Table 2: constant-coefficient VAR with HAC errors and Hansen Lc.
    Var {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        returns: ReturnsArg,
        #[command(flatten)]
        var: VarArgs,
    },
    /// TV-VAR coefficient paths and the unbanded ζ path.
    Tvvar {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        returns: ReturnsArg,
        #[command(flatten)]
        var: VarArgs,
        #[command(flatten)]
        lambda: LambdaArg,
    },
    /// ζ path with residual-bootstrap bands and plot files.
    Bootstrap {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        returns: ReturnsArg,
        #[command(flatten)]
        var: VarArgs,
        #[command(flatten)]
        lambda: LambdaArg,
        #[command(flatten)]
        bootstrap: BootstrapArgs,
    },
    /// Efficient/inefficient segments and regime summaries of a banded path.
    Segments {
        #[command(flatten)]
        common: Common,
        /// Banded path (default: <out>/zeta_path.csv).
        #[arg(long)]
        path: Option<PathBuf>,
        #[command(flatten)]
        segments: SegmentArgs,
    },
    /// Render the text report from the artifacts in <out>.
    Report {
        #[command(flatten)]
        common: Common,
    },
    /// Write a seeded synthetic price file.
    Synth {
        #[arg(long, value_enum, default_value = "iid")]
        kind: KindArg,
        #[arg(long, default_value_t = 500)]
        t: usize,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.01)]
        noise_sd: f64,
        /// Lag-1 matrix (constant-var, start of randomwalk-tv) or sinusoid
        /// amplitude, row-major and comma-separated; n×n values.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        coefficients: Option<Vec<f64>>,
        #[arg(long, default_value_t = 500.0)]
        period: f64,
        #[arg(long, default_value_t = 0.01)]
        state_sd: f64,
        /// Initial price level.
        #[arg(long, default_value_t = 100.0)]
        p0: f64,
        /// Price CSV to write.
        #[arg(long)]
        output: PathBuf,
        /// Optional CSV of the true ζ path (`date, zeta`).
        #[arg(long)]
        truth: Option<PathBuf>,
    },
    /// Full pipeline from a config (or a previous run's manifest).
    Run {
        #[command(flatten)]
        common: Common,
        /// Re-run the settings recorded in a manifest.json.
        #[arg(long, conflicts_with = "config")]
        manifest: Option<PathBuf>,
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        unitroot: UnitRootArgs,
        #[command(flatten)]
        var: VarArgs,
        #[command(flatten)]
        lambda: LambdaArg,
        #[command(flatten)]
        bootstrap: BootstrapArgs,
        #[command(flatten)]
        segments: SegmentArgs,
    },
}

fn base_config(common: &Common) -> Result<PipelineConfig> {
    let mut config = match &common.config {
        Some(path) => PipelineConfig::from_toml_file(path)?,
        None => PipelineConfig::default(),
    };
    if let Some(out) = &common.out {
        config.output_dir = out.clone();
    }
    if common.threads.is_some() {
        config.threads = common.threads;
    }
    Ok(config)
}

impl InputArgs {
    fn apply(&self, c: &mut PipelineConfig) {
        if let Some(p) = &self.input {
            c.input.path = p.clone();
        }
        if let Some(d) = &self.date_column {
            c.input.date_column = d.clone();
        }
        if let Some(cols) = &self.columns {
            c.input.price_columns = cols.clone();
        }
        if let Some(f) = &self.date_format {
            c.input.date_format = f.clone();
        }
        if self.no_interpolate {
            c.input.interpolate = false;
        }
    }
}

impl UnitRootArgs {
    fn apply(&self, c: &mut PipelineConfig) {
        if let Some(m) = self.model {
            c.unitroot.model = match m {
                ModelArg::Constant => DeterministicModel::Constant,
                ModelArg::Trend => DeterministicModel::ConstantTrend,
            };
        }
        if self.k_max.is_some() {
            c.unitroot.k_max = self.k_max;
        }
        if let Some(k) = self.criterion {
            c.unitroot.criterion = match k {
                CriterionArg::Mbic => InformationCriterion::Mbic,
                CriterionArg::Maic => InformationCriterion::Maic,
            };
        }
    }
}

impl VarArgs {
    fn apply(&self, c: &mut PipelineConfig) {
        if self.q.is_some() {
            c.var.q = self.q;
        }
        if let Some(q) = self.q_max {
            c.var.q_max = q;
        }
        if self.nw_bandwidth.is_some() {
            c.var.nw_bandwidth = self.nw_bandwidth;
        }
    }
}

impl LambdaArg {
    fn apply(&self, c: &mut PipelineConfig) {
        if let Some(l) = self.lambda {
            c.tvvar.lambda = l;
        }
    }
}

impl BootstrapArgs {
    fn apply(&self, c: &mut PipelineConfig) {
        if let Some(b) = self.replications {
            c.bootstrap.replications = b;
        }
        if let Some(a) = self.coverage {
            c.bootstrap.coverage = a;
        }
        if let Some(s) = self.seed {
            c.bootstrap.seed = s;
        }
    }
}

impl SegmentArgs {
    fn apply(&self, c: &mut PipelineConfig) {
        if let Some(m) = self.min_run {
            c.segments.min_run = m;
        }
        if let Some(b) = &self.breakpoints {
            c.regimes.breakpoints = b.clone();
        }
    }
}

fn load_returns(arg: &ReturnsArg, config: &PipelineConfig) -> Result<ReturnMatrix> {
    let path = arg
        .returns
        .clone()
        .unwrap_or_else(|| config.output_dir.join(pipeline::RETURNS_CSV));
    let file = File::open(&path).map_err(|e| Error::Io { path: path.clone(), source: e })?;
    read_returns_csv(file)
}

fn load_path(path: &Path) -> Result<EfficiencyPath> {
    let file = File::open(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    EfficiencyPath::read_csv(file)
}

fn bytes<F: FnOnce(&mut Vec<u8>) -> Result<()>>(f: F) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    f(&mut buf)?;
    Ok(buf)
}

fn json<T: serde::Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    Ok(text.into_bytes())
}

fn write(config: &PipelineConfig, files: Vec<(&str, Vec<u8>)>) -> Result<()> {
    let map: BTreeMap<String, Vec<u8>> = files.into_iter().map(|(k, v)| (k.to_string(), v)).collect();
    for path in pipeline::write_artifacts(&config.output_dir, &map)? {
        println!("wrote {}", path.display());
    }
    Ok(())
}

/// Runs `f` on a pool with the configured thread count.
fn with_threads<T: Send>(config: &PipelineConfig, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    match config.threads {
        Some(0) => Err(Error::Config("threads must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?
            .install(f),
        None => f(),
    }
}

fn synth_spec(
    kind: KindArg,
    t: usize,
    n: usize,
    seed: u64,
    noise_sd: f64,
    coefficients: Option<Vec<f64>>,
    period: f64,
    state_sd: f64,
) -> Result<ScenarioSpec> {
    let kind = match kind {
        KindArg::Iid => ScenarioKind::Iid,
        KindArg::ConstantVar => ScenarioKind::ConstantVar,
        KindArg::SinusoidalTv => ScenarioKind::SinusoidalTv,
        KindArg::RandomwalkTv => ScenarioKind::RandomwalkTv,
    };
    let coefficients = match coefficients {
        None => Vec::new(),
        Some(v) if v.len() == n * n => vec![v.chunks(n).map(<[f64]>::to_vec).collect()],
        Some(v) => {
            return Err(Error::InvalidArgument(format!(
                "--coefficients needs {} values for n = {n}, got {}",
                n * n,
                v.len()
            )))
        }
    };
    if kind != ScenarioKind::Iid && kind != ScenarioKind::RandomwalkTv && coefficients.is_empty() {
        return Err(Error::InvalidArgument(
            "--coefficients is required for this scenario kind".into(),
        ));
    }
    Ok(ScenarioSpec {
        kind,
        t,
        n,
        q: 1,
        noise_sd,
        coefficients,
        period,
        state_sd,
        intercept: Vec::new(),
        seed,
    })
}

fn execute(command: Command) -> Result<()> {
    match command {
        Command::Ingest { common, input } => {
            let mut config = base_config(&common)?;
            input.apply(&mut config);
            config.validate()?;
            let ingested = pipeline::ingest(&config.input)?;
            if ingested.interpolated_cells > 0 {
                eprintln!("filled {} missing prices by spline interpolation", ingested.interpolated_cells);
            }
            write(
                &config,
                vec![(pipeline::RETURNS_CSV, bytes(|b| ingested.returns.write_csv(b))?)],
            )
        }
        Command::Stats { common, returns } => {
            let config = base_config(&common)?;
            let r = load_returns(&returns, &config)?;
            let stats = pipeline::stats_stage(&r)?;
            write(
                &config,
                vec![
                    (pipeline::STATS_CSV, bytes(|b| stats.write_csv(b))?),
                    (pipeline::STATS_JSON, json(&stats)?),
                ],
            )
        }
        Command::Unitroot { common, returns, unitroot } => {
            let mut config = base_config(&common)?;
            unitroot.apply(&mut config);
            let r = load_returns(&returns, &config)?;
            let t1 = pipeline::table1(&r, &config.unitroot)?;
            for w in pipeline::pretest_warnings(&t1) {
                eprintln!("warning: {w}");
            }
            write(
                &config,
                vec![
                    (pipeline::TABLE1_CSV, bytes(|b| t1.write_csv(b))?),
                    (pipeline::TABLE1_JSON, json(&t1)?),
                ],
            )
        }
        Command::Var { common, returns, var } => {
            let mut config = base_config(&common)?;
            var.apply(&mut config);
            config.validate_settings()?;
            let r = load_returns(&returns, &config)?;
            let (t2, _) = pipeline::table2(&r, &config.var)?;
            write(
                &config,
                vec![
                    (pipeline::TABLE2_CSV, bytes(|b| t2.write_csv(b))?),
                    (pipeline::TABLE2_JSON, json(&t2)?),
                ],
            )
        }
        Command::Tvvar { common, returns, var, lambda } => {
            let mut config = base_config(&common)?;
            var.apply(&mut config);
            lambda.apply(&mut config);
            config.validate_settings()?;
            let r = load_returns(&returns, &config)?;
            let (q, _) = pipeline::resolve_q(&r, &config.var)?;
            let (fit, path) = pipeline::tvvar_stage(&r, q, config.tvvar.lambda)?;
            eprintln!(
                "TV-VAR({q}) with lambda {}: condition estimate {:.3e}",
                config.tvvar.lambda, fit.diagnostics.condition_estimate
            );
            write(
                &config,
                vec![
                    (pipeline::COEFFICIENTS_CSV, bytes(|b| fit.write_coefficients_csv(b))?),
                    (pipeline::ZETA_CSV, bytes(|b| path.write_csv(b))?),
                ],
            )
        }
        Command::Bootstrap { common, returns, var, lambda, bootstrap } => {
            let mut config = base_config(&common)?;
            var.apply(&mut config);
            lambda.apply(&mut config);
            bootstrap.apply(&mut config);
            config.validate_settings()?;
            let r = load_returns(&returns, &config)?;
            if let Ok(t1) = pipeline::table1(&r, &config.unitroot) {
                for w in pipeline::pretest_warnings(&t1) {
                    eprintln!("warning: {w}");
                }
            }
            let (q, _) = pipeline::resolve_q(&r, &config.var)?;
            let path = with_threads(&config, || pipeline::bootstrap_stage(&r, &config, q))?;
            write(
                &config,
                vec![
                    (pipeline::ZETA_CSV, bytes(|b| path.write_csv(b))?),
                    (pipeline::PLOT_CSV, bytes(|b| pipeline::plot_csv(&path, b))?),
                    (pipeline::PLOT_SVG, pipeline::plot_svg(&path)?.into_bytes()),
                ],
            )
        }
        Command::Segments { common, path, segments } => {
            let mut config = base_config(&common)?;
            segments.apply(&mut config);
            config.validate_settings()?;
            let source = path.unwrap_or_else(|| config.output_dir.join(pipeline::ZETA_CSV));
            let p = load_path(&source)?;
            let segs = pipeline::segments_stage(&p, config.segments.min_run)?;
            let regimes = pipeline::regimes_stage(&p, &config.regimes.breakpoints)?;
            let mut files = vec![
                (pipeline::SEGMENTS_CSV, bytes(|b| write_segments_csv(&segs, b))?),
                (
                    pipeline::REGIMES_CSV,
                    bytes(|b| pipeline::write_regimes_csv(regimes.as_ref(), b))?,
                ),
            ];
            if let Some(r) = &regimes {
                files.push((pipeline::REGIMES_JSON, json(r)?));
            }
            write(&config, files)
        }
        Command::Report { common } => {
            let config = base_config(&common)?;
            let artifacts = ArtifactSet::load(&config.output_dir)?;
            let text = pipeline::emit_report(&artifacts);
            print!("{text}");
            let target = config.output_dir.join(pipeline::REPORT_TXT);
            std::fs::write(&target, text).map_err(|e| Error::Io { path: target, source: e })
        }
        Command::Synth {
            kind,
            t,
            n,
            seed,
            noise_sd,
            coefficients,
            period,
            state_sd,
            p0,
            output,
            truth,
        } => {
            let spec = synth_spec(kind, t, n, seed, noise_sd, coefficients, period, state_sd)?;
            if !(p0 > 0.0 && p0.is_finite()) {
                return Err(Error::InvalidArgument("--p0 must be a positive price".into()));
            }
            let (returns, path) = gen_returns(&spec)?;
            let prices = returns.to_prices(p0)?;
            let file = File::create(&output).map_err(|e| Error::Io { path: output.clone(), source: e })?;
            write_prices_csv(&prices, file, DEFAULT_DATE_FORMAT)?;
            println!("wrote {}", output.display());
            if let Some(truth) = truth {
                let zeta = true_zeta_path(&path);
                let mut w = csv::Writer::from_path(&truth)?;
                w.write_record(["date", "zeta"])?;
                for (d, z) in returns.dates().iter().zip(&zeta) {
                    w.write_record([d.to_string(), z.map(|v| format!("{v}")).unwrap_or_default()])?;
                }
                w.flush().map_err(|e| Error::Io { path: truth.clone(), source: e })?;
                println!("wrote {}", truth.display());
            }
            Ok(())
        }
        Command::Run {
            common,
            manifest,
            input,
            unitroot,
            var,
            lambda,
            bootstrap,
            segments,
        } => {
            let mut config = match &manifest {
                Some(m) => {
                    let mut c = PipelineConfig::from_manifest_file(m)?;
                    if let Some(out) = &common.out {
                        c.output_dir = out.clone();
                    }
                    c.threads = common.threads;
                    c
                }
                None => base_config(&common)?,
            };
            input.apply(&mut config);
            unitroot.apply(&mut config);
            var.apply(&mut config);
            lambda.apply(&mut config);
            bootstrap.apply(&mut config);
            segments.apply(&mut config);
            let output = pipeline::run_pipeline(&config)?;
            for w in &output.manifest.warnings {
                eprintln!("warning: {w}");
            }
            for name in output.files.keys() {
                println!("wrote {}", config.output_dir.join(name).display());
            }
            Ok(())
        }
    }
}

fn exit_code(kind: ErrorKind) -> u8 {
    match kind {
        ErrorKind::Usage => 1,
        ErrorKind::Data => 2,
        ErrorKind::Numerical => 3,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(e.kind()))
        }
    }
}
