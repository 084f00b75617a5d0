use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::graph::MetricsOptions;
use crate::ingest::time::parse_utc_offset;
use crate::ingest::{CampConfig, CampSpec, ColumnMap, InputFormat, NoiseConfig};
use crate::textnet::TermNetworkOptions;
use crate::topics::LdaParams;

use super::ReportError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LdaSettings {
    pub topics: usize,
    /// Defaults to 50 / topics.
    pub alpha: Option<f64>,
    pub beta: f64,
    pub iters: usize,
    pub burn_in: usize,
    pub top_terms: usize,
}

impl Default for LdaSettings {
    fn default() -> Self {
        LdaSettings {
            topics: 5,
            alpha: None,
            beta: 0.01,
            iters: 1000,
            burn_in: 200,
            top_terms: 10,
        }
    }
}

impl LdaSettings {
    pub fn params(&self, seed: u64) -> LdaParams {
        LdaParams {
            alpha: self.alpha.unwrap_or(50.0 / self.topics.max(1) as f64),
            beta: self.beta,
            iters: self.iters,
            burn_in: self.burn_in,
            seed,
            ..LdaParams::with_topics(self.topics)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DynamicsSettings {
    pub window_hours: i64,
    /// Each window's graph includes all earlier windows.
    pub cumulative: bool,
}

impl Default for DynamicsSettings {
    fn default() -> Self {
        DynamicsSettings {
            window_hours: 24,
            cumulative: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TextnetSettings {
    #[serde(flatten)]
    pub network: TermNetworkOptions,
    pub top_relations: usize,
}

impl Default for TextnetSettings {
    fn default() -> Self {
        TextnetSettings {
            network: TermNetworkOptions::default(),
            top_relations: 20,
        }
    }
}

fn default_timezone() -> String {
    "+07:00".into()
}

fn default_output() -> PathBuf {
    PathBuf::from("polarscope-out")
}

/// Everything a full run needs. Only `inputs`, `camps` and `seed` are
/// required in the JSON form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub inputs: Vec<PathBuf>,
    #[serde(default)]
    pub format: InputFormat,
    #[serde(default)]
    pub columns: ColumnMap,
    pub camps: Vec<CampSpec>,
    #[serde(default)]
    pub allow_overlap: bool,
    /// UTC offset for naive timestamps and day boundaries.
    #[serde(default = "default_timezone")]
    pub timezone: String,
    /// Replacement stopword list; the bundled Indonesian list otherwise.
    #[serde(default)]
    pub stoplist: Option<PathBuf>,
    /// Replacement `from,to` normalization CSV.
    #[serde(default)]
    pub normalization: Option<PathBuf>,
    /// Replacement known-stem list.
    #[serde(default)]
    pub root_words: Option<PathBuf>,
    #[serde(default)]
    pub noise: NoiseConfig,
    #[serde(default)]
    pub lda: LdaSettings,
    #[serde(default)]
    pub graph: MetricsOptions,
    #[serde(default)]
    pub dynamics: DynamicsSettings,
    #[serde(default)]
    pub textnet: TextnetSettings,
    pub seed: u64,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
}

impl PipelineConfig {
    /// A config with defaults for everything but the required fields.
    pub fn new(inputs: Vec<PathBuf>, camps: Vec<CampSpec>, seed: u64) -> Self {
        PipelineConfig {
            inputs,
            format: InputFormat::default(),
            columns: ColumnMap::default(),
            camps,
            allow_overlap: false,
            timezone: default_timezone(),
            stoplist: None,
            normalization: None,
            root_words: None,
            noise: NoiseConfig::default(),
            lda: LdaSettings::default(),
            graph: MetricsOptions::default(),
            dynamics: DynamicsSettings::default(),
            textnet: TextnetSettings::default(),
            seed,
            output_dir: default_output(),
        }
    }

    /// Reads a JSON config; relative paths are resolved against the
    /// config file's directory.
    pub fn from_file(path: &Path) -> Result<Self, ReportError> {
        let file = File::open(path).map_err(|e| ReportError::Config(vec![format!("{}: {e}", path.display())]))?;
        let mut cfg: PipelineConfig = serde_json::from_reader(BufReader::new(file))
            .map_err(|e| ReportError::Config(vec![format!("{}: {e}", path.display())]))?;
        let base = path.parent().unwrap_or(Path::new(""));
        cfg.resolve_paths(base);
        Ok(cfg)
    }

    pub fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        self.inputs.iter_mut().for_each(fix);
        self.stoplist.iter_mut().for_each(fix);
        self.normalization.iter_mut().for_each(fix);
        self.root_words.iter_mut().for_each(fix);
        fix(&mut self.output_dir);
    }

    pub fn camp_config(&self) -> CampConfig {
        CampConfig {
            camps: self.camps.clone(),
            allow_overlap: self.allow_overlap,
        }
    }
}

fn safe_label(label: &str) -> bool {
    !label.is_empty() && label.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

/// Every problem with `cfg`, in a stable order; empty when valid.
pub fn config_problems(cfg: &PipelineConfig) -> Vec<String> {
    let mut out = Vec::new();
    if cfg.inputs.is_empty() {
        out.push("at least one input file is required".to_string());
    }
    for p in &cfg.inputs {
        if !p.is_file() {
            out.push(format!("input file {} does not exist", p.display()));
        }
    }
    for (name, p) in [
        ("stoplist", &cfg.stoplist),
        ("normalization", &cfg.normalization),
        ("root_words", &cfg.root_words),
    ] {
        if let Some(p) = p {
            if !p.is_file() {
                out.push(format!("{name} file {} does not exist", p.display()));
            }
        }
    }
    out.extend(cfg.camp_config().problems());
    for camp in &cfg.camps {
        if !camp.label.trim().is_empty() && !safe_label(&camp.label) {
            out.push(format!(
                "camp label `{}` may only use ASCII letters, digits, `_` and `-`",
                camp.label
            ));
        }
    }
    if parse_utc_offset(&cfg.timezone).is_err() {
        out.push(format!("invalid time zone `{}`", cfg.timezone));
    }

    let lda = &cfg.lda;
    if lda.topics < 1 {
        out.push("K must be ≥ 1".to_string());
    }
    if let Some(a) = lda.alpha {
        if !(a.is_finite() && a > 0.0) {
            out.push(format!("alpha must be > 0, got {a}"));
        }
    }
    if !(lda.beta.is_finite() && lda.beta > 0.0) {
        out.push(format!("beta must be > 0, got {}", lda.beta));
    }
    if lda.iters <= lda.burn_in {
        out.push(format!("iters ({}) must exceed burn_in ({})", lda.iters, lda.burn_in));
    }
    if lda.top_terms < 1 {
        out.push("lda.top_terms must be ≥ 1".to_string());
    }

    if cfg.noise.repeat_threshold < 1 {
        out.push("noise.repeat_threshold must be ≥ 1".to_string());
    }
    if !(0.0..=1.0).contains(&cfg.noise.duplicate_ratio) {
        out.push(format!("noise.duplicate_ratio must be in [0, 1], got {}", cfg.noise.duplicate_ratio));
    }
    if cfg.dynamics.window_hours < 1 {
        out.push(format!("dynamics.window_hours must be ≥ 1, got {}", cfg.dynamics.window_hours));
    }
    if cfg.textnet.network.min_term_freq < 1 {
        out.push("textnet.min_term_freq must be ≥ 1".to_string());
    }
    if cfg.textnet.network.max_terms < 1 {
        out.push("textnet.max_terms must be ≥ 1".to_string());
    }
    if cfg.output_dir.as_os_str().is_empty() {
        out.push("output_dir must not be empty".to_string());
    }
    out
}

/// Checks file existence, parameter ranges and camp labels, returning all
/// problems at once.
pub fn validate_config(cfg: &PipelineConfig) -> Result<(), ReportError> {
    let problems = config_problems(cfg);
    if problems.is_empty() {
        Ok(())
    } else {
        Err(ReportError::Config(problems))
    }
}
