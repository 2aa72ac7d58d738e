//! Job configuration: JSON schema, defaults, and validation with field
//! paths in every error message.

use std::path::PathBuf;

use serde::Deserialize;

use qpspectra::symbols::SymbolSpec;

/// Schema or semantic violation, carrying the offending field path.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    pub alpha: f64,
    pub symbol: SymbolField,
    #[serde(default = "default_p")]
    pub p: f64,
    #[serde(default)]
    pub series: SeriesConfig,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub range: RangeConfig,
    #[serde(default)]
    pub spectrum: SpectrumConfig,
    #[serde(default)]
    pub outputs: OutputsConfig,
}

fn default_p() -> f64 {
    1.0
}

/// Inline symbol coefficients or a path to a boundary-samples CSV
/// (`x,re,im` per line).
#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum SymbolField {
    Spec(SymbolSpec),
    SamplesFile { samples: PathBuf },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesConfig {
    #[serde(default = "default_eps_target")]
    pub eps_target: f64,
}

fn default_eps_target() -> f64 {
    1e-6
}

impl Default for SeriesConfig {
    fn default() -> Self {
        Self {
            eps_target: default_eps_target(),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default = "default_t_count")]
    pub t_count: usize,
    #[serde(default)]
    pub t_max: TMax,
}

fn default_t_count() -> usize {
    400
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            t_count: default_t_count(),
            t_max: TMax::default(),
        }
    }
}

/// Either a number or the string "auto" (grid extent from the plan's decay
/// rate).
#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum TMax {
    Value(f64),
    Keyword(String),
}

impl Default for TMax {
    fn default() -> Self {
        TMax::Keyword("auto".into())
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RangeConfig {
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default = "default_schedule")]
    pub n_schedule: Vec<f64>,
}

fn default_epsilon() -> f64 {
    0.02
}

fn default_schedule() -> Vec<f64> {
    vec![10.0, 100.0, 1000.0, 5000.0]
}

impl Default for RangeConfig {
    fn default() -> Self {
        Self {
            epsilon: default_epsilon(),
            n_schedule: default_schedule(),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumConfig {
    /// Internal-parameter extent of the curve grid; when absent it is chosen
    /// so the curve tails reach 0 at working precision.
    #[serde(default)]
    pub t_max: Option<f64>,
    #[serde(default = "default_spectrum_count")]
    pub t_count: usize,
}

fn default_spectrum_count() -> usize {
    2000
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        Self {
            t_max: None,
            t_count: default_spectrum_count(),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputsConfig {
    #[serde(default = "default_dir")]
    pub dir: PathBuf,
    #[serde(default = "default_formats")]
    pub formats: Vec<OutputFormat>,
}

fn default_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_formats() -> Vec<OutputFormat> {
    vec![OutputFormat::Csv, OutputFormat::Svg, OutputFormat::Json]
}

impl Default for OutputsConfig {
    fn default() -> Self {
        Self {
            dir: default_dir(),
            formats: default_formats(),
        }
    }
}

#[derive(Debug, Deserialize, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Svg,
    Json,
}

/// Parses and validates a configuration document. Unknown keys are rejected
/// by the schema; value checks report the offending field path.
pub fn parse_config(text: &str) -> Result<JobConfig, ConfigError> {
    let cfg: JobConfig = serde_json::from_str(text).map_err(|e| ConfigError(e.to_string()))?;
    validate(&cfg)?;
    Ok(cfg)
}

fn validate(cfg: &JobConfig) -> Result<(), ConfigError> {
    if !(cfg.alpha > -1.0) {
        return Err(ConfigError(format!(
            "alpha: must be greater than -1, got {}",
            cfg.alpha
        )));
    }
    if !(cfg.p > 0.0) {
        return Err(ConfigError(format!("p: must be positive, got {}", cfg.p)));
    }
    if !(cfg.series.eps_target > 0.0) {
        return Err(ConfigError(format!(
            "series.eps_target: must be positive, got {}",
            cfg.series.eps_target
        )));
    }
    if cfg.grid.t_count < 2 {
        return Err(ConfigError(format!(
            "grid.t_count: needs at least 2 nodes, got {}",
            cfg.grid.t_count
        )));
    }
    match &cfg.grid.t_max {
        TMax::Value(v) if !(*v > 0.0) => {
            return Err(ConfigError(format!("grid.t_max: must be positive, got {v}")));
        }
        TMax::Keyword(k) if k != "auto" => {
            return Err(ConfigError(format!(
                "grid.t_max: expected a number or \"auto\", got \"{k}\""
            )));
        }
        _ => {}
    }
    if !(cfg.range.epsilon > 0.0) {
        return Err(ConfigError(format!(
            "range.epsilon: must be positive, got {}",
            cfg.range.epsilon
        )));
    }
    if cfg.range.n_schedule.is_empty() {
        return Err(ConfigError("range.n_schedule: must be nonempty".into()));
    }
    for (i, w) in cfg.range.n_schedule.windows(2).enumerate() {
        if w[1] <= w[0] {
            return Err(ConfigError(format!(
                "range.n_schedule[{}]: schedule must be strictly increasing",
                i + 1
            )));
        }
    }
    if !(cfg.range.n_schedule[0] > 0.0) {
        return Err(ConfigError(
            "range.n_schedule[0]: windows must be positive".into(),
        ));
    }
    if cfg.spectrum.t_count < 2 {
        return Err(ConfigError(format!(
            "spectrum.t_count: needs at least 2 points, got {}",
            cfg.spectrum.t_count
        )));
    }
    if let Some(tm) = cfg.spectrum.t_max {
        if !(tm > 0.0) {
            return Err(ConfigError(format!(
                "spectrum.t_max: must be positive, got {tm}"
            )));
        }
    }
    if let SymbolField::Spec(spec) = &cfg.symbol {
        for (k, term) in spec.terms.iter().enumerate() {
            if !(term.gamma > 0.0) {
                return Err(ConfigError(format!(
                    "symbol.terms[{k}].gamma: frequency must be positive, got {}",
                    term.gamma
                )));
            }
        }
    }
    Ok(())
}

impl OutputsConfig {
    pub fn wants(&self, f: OutputFormat) -> bool {
        self.formats.contains(&f)
    }
}
