use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inference::{BootstrapSpec, DEFAULT_MIN_RUN};
use crate::series::CsvSchema;
use crate::tvvar::DEFAULT_LAMBDA;
use crate::unitroot::{DeterministicModel, InformationCriterion};

pub const MAX_Q: usize = 24;

/// Complete settings for one pipeline run.
///
/// Read from TOML; every section and field is optional. Relative input paths
/// are resolved against the config file's directory. `output_dir` and
/// `threads` affect where and how fast a run happens, not what it produces,
/// so they are left out of the run manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub input: InputConfig,
    pub unitroot: UnitRootConfig,
    pub var: VarConfig,
    pub tvvar: TvVarConfig,
    pub bootstrap: BootstrapConfig,
    pub segments: SegmentConfig,
    pub regimes: RegimeConfig,
    #[serde(skip_serializing)]
    pub output_dir: PathBuf,
    #[serde(skip_serializing)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InputConfig {
    pub path: PathBuf,
    pub date_column: String,
    /// Empty selects every column except the date.
    pub price_columns: Vec<String>,
    pub date_format: String,
    pub interpolate: bool,
}

impl InputConfig {
    pub fn schema(&self) -> CsvSchema {
        CsvSchema {
            date_column: self.date_column.clone(),
            price_columns: self.price_columns.clone(),
            date_format: self.date_format.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct UnitRootConfig {
    pub model: DeterministicModel,
    pub k_max: Option<usize>,
    pub criterion: InformationCriterion,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VarConfig {
    /// Largest lag order searched by SBIC.
    pub q_max: usize,
    /// Fixed lag order; skips SBIC when set.
    pub q: Option<usize>,
    /// Newey–West truncation lag; automatic when unset.
    pub nw_bandwidth: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TvVarConfig {
    pub lambda: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BootstrapConfig {
    pub replications: usize,
    pub coverage: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SegmentConfig {
    pub min_run: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RegimeConfig {
    /// Start date of each regime.
    pub breakpoints: Vec<NaiveDate>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            input: InputConfig::default(),
            unitroot: UnitRootConfig::default(),
            var: VarConfig::default(),
            tvvar: TvVarConfig::default(),
            bootstrap: BootstrapConfig::default(),
            segments: SegmentConfig::default(),
            regimes: RegimeConfig::default(),
            output_dir: PathBuf::from("out"),
            threads: None,
        }
    }
}

impl Default for InputConfig {
    fn default() -> Self {
        let schema = CsvSchema::default();
        Self {
            path: PathBuf::new(),
            date_column: schema.date_column,
            price_columns: schema.price_columns,
            date_format: schema.date_format,
            interpolate: true,
        }
    }
}

impl Default for UnitRootConfig {
    fn default() -> Self {
        Self {
            model: DeterministicModel::ConstantTrend,
            k_max: None,
            criterion: InformationCriterion::Mbic,
        }
    }
}

impl Default for VarConfig {
    fn default() -> Self {
        Self {
            q_max: 8,
            q: None,
            nw_bandwidth: None,
        }
    }
}

impl Default for TvVarConfig {
    fn default() -> Self {
        Self {
            lambda: DEFAULT_LAMBDA,
        }
    }
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        let spec = BootstrapSpec::default();
        Self {
            replications: spec.replications,
            coverage: spec.coverage,
            seed: spec.seed,
        }
    }
}

impl Default for SegmentConfig {
    fn default() -> Self {
        Self {
            min_run: DEFAULT_MIN_RUN,
        }
    }
}

impl PipelineConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// Parses a TOML file and resolves a relative input path against its directory.
    pub fn from_toml_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut config = Self::from_toml_str(&text)?;
        if config.input.path.is_relative() && !config.input.path.as_os_str().is_empty() {
            if let Some(dir) = path.parent() {
                config.input.path = dir.join(&config.input.path);
            }
        }
        Ok(config)
    }

    /// Recovers the settings recorded in a run manifest.
    pub fn from_manifest_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let manifest: super::Manifest = serde_json::from_str(&text)?;
        Ok(manifest.config)
    }

    pub fn bootstrap_spec(&self, q: usize) -> BootstrapSpec {
        BootstrapSpec {
            replications: self.bootstrap.replications,
            coverage: self.bootstrap.coverage,
            seed: self.bootstrap.seed,
            lambda: self.tvvar.lambda,
            q,
        }
    }

    /// Range checks on every numeric setting. Paths are checked by [`validate`](Self::validate).
    pub fn validate_settings(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if !(1..=MAX_Q).contains(&self.var.q_max) {
            return bad(format!("var.q_max must lie in 1..={MAX_Q}, got {}", self.var.q_max));
        }
        if let Some(q) = self.var.q {
            if !(1..=MAX_Q).contains(&q) {
                return bad(format!("var.q must lie in 1..={MAX_Q}, got {q}"));
            }
        }
        if !(self.tvvar.lambda > 0.0 && self.tvvar.lambda.is_finite()) {
            return bad(format!("tvvar.lambda must be positive, got {}", self.tvvar.lambda));
        }
        if self.segments.min_run == 0 {
            return bad("segments.min_run must be at least 1".into());
        }
        if self.regimes.breakpoints.windows(2).any(|w| w[1] <= w[0]) {
            return bad("regimes.breakpoints must be strictly increasing".into());
        }
        if self.threads == Some(0) {
            return bad("threads must be at least 1".into());
        }
        self.bootstrap_spec(1)
            .validate()
            .map_err(|e| Error::Config(format!("bootstrap: {e}")))
    }

    /// Full validation: settings in range and the input file present.
    pub fn validate(&self) -> Result<()> {
        self.validate_settings()?;
        if self.input.path.as_os_str().is_empty() {
            return Err(Error::Config("input.path is not set".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        let c = PipelineConfig::from_toml_str("").unwrap();
        assert_eq!(c, PipelineConfig::default());
        assert!(c.validate_settings().is_ok());
    }

    #[test]
    fn parses_all_sections() {
        let c = PipelineConfig::from_toml_str(
            r#"
            [input]
            path = "prices.csv"
            date_column = "day"
            price_columns = ["near", "far"]
            interpolate = false

            [unitroot]
            model = "constant"
            k_max = 6
            criterion = "maic"

            [var]
            q = 2

            [tvvar]
            lambda = 0.5

            [bootstrap]
            replications = 999
            seed = 42

            [regimes]
            breakpoints = ["1900-01-01", "1910-06-30"]
            "#,
        )
        .unwrap();
        assert_eq!(c.input.date_column, "day");
        assert_eq!(c.input.price_columns, vec!["near", "far"]);
        assert!(!c.input.interpolate);
        assert_eq!(c.unitroot.model, DeterministicModel::Constant);
        assert_eq!(c.var.q, Some(2));
        assert_eq!(c.bootstrap.replications, 999);
        assert_eq!(c.bootstrap.coverage, 0.95);
        assert_eq!(c.regimes.breakpoints.len(), 2);
        assert!(c.validate_settings().is_ok());
    }

    #[test]
    fn rejects_unknown_keys_and_bad_ranges() {
        assert!(PipelineConfig::from_toml_str("[tvvar]\nlamda = 1.0").is_err());
        for text in [
            "[tvvar]\nlambda = 0.0",
            "[var]\nq_max = 0",
            "[bootstrap]\nreplications = 50",
            "[segments]\nmin_run = 0",
            "[regimes]\nbreakpoints = [\"1901-01-01\", \"1900-01-01\"]",
        ] {
            let c = PipelineConfig::from_toml_str(text).unwrap();
            assert!(c.validate_settings().is_err(), "{text}");
        }
    }
}
