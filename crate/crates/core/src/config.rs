//! Pipeline configuration file.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::corpus::DEFAULT_MIN_TOKEN_LEN;
use crate::distinctiveness::{ForestConfig, LabelKind};
use crate::representativeness::ClusterConfig;
use crate::scoring::TfidfConfig;
use crate::strategy::{StandardizeMode, ThresholdMode};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("invalid config {path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("invalid config: {0}")]
    Invalid(String),
}

/// Inclusive year filter, written `A..B` (or a single year).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct YearRange {
    pub start: i32,
    pub end: i32,
}

impl YearRange {
    pub fn contains(&self, year: i32) -> bool {
        (self.start..=self.end).contains(&year)
    }

    pub fn years(&self) -> Vec<i32> {
        (self.start..=self.end).collect()
    }
}

impl FromStr for YearRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parse = |v: &str| v.trim().parse::<i32>().map_err(|_| format!("bad year `{v}` in range `{s}`"));
        let (start, end) = match s.split_once("..") {
            Some((a, b)) => (parse(a)?, parse(b)?),
            None => {
                let y = parse(s)?;
                (y, y)
            }
        };
        if start > end {
            return Err(format!("year range `{s}` is empty"));
        }
        Ok(YearRange { start, end })
    }
}

impl TryFrom<String> for YearRange {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<YearRange> for String {
    fn from(r: YearRange) -> String {
        r.to_string()
    }
}

impl fmt::Display for YearRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

/// Input and output locations. Relative paths are taken relative to the
/// config file's directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathsConfig {
    pub manifest: PathBuf,
    /// Bundled default lexicon when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lexicon: Option<PathBuf>,
    /// Bundled default acronym map when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub acronyms: Option<PathBuf>,
    /// One word per line, removed after tokenization. Empty when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stopwords: Option<PathBuf>,
    /// CSV `company_id,label`, required for the `custom` label kind.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub custom_labels: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

fn default_min_token_len() -> usize {
    DEFAULT_MIN_TOKEN_LEN
}

fn default_top_n() -> usize {
    5
}

fn default_seed() -> u64 {
    42
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub paths: PathsConfig,
    #[serde(default = "default_min_token_len")]
    pub min_token_len: usize,
    #[serde(default)]
    pub tfidf: TfidfConfig,
    #[serde(default)]
    pub cluster: ClusterConfig,
    #[serde(default)]
    pub forest: ForestConfig,
    #[serde(default)]
    pub label_kind: LabelKind,
    #[serde(default)]
    pub threshold_mode: ThresholdMode,
    #[serde(default)]
    pub standardize: StandardizeMode,
    /// Heatmaps use per-year quantile scores instead of raw weights.
    #[serde(default)]
    pub quantile_heatmaps: bool,
    #[serde(default)]
    pub svg: bool,
    /// Also cluster full topic vectors and report the overall silhouette.
    #[serde(default)]
    pub matrix_mode: bool,
    #[serde(default = "default_top_n")]
    pub top_n: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub years: Option<YearRange>,
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl PipelineConfig {
    /// Config with defaults everywhere except the manifest location.
    pub fn new(manifest: impl Into<PathBuf>) -> Self {
        let json = serde_json::json!({ "paths": { "manifest": manifest.into() } });
        serde_json::from_value(json).expect("minimal config is valid")
    }

    pub fn from_json(text: &str, base_dir: &Path) -> Result<Self, ConfigError> {
        let mut config: PipelineConfig = serde_json::from_str(text)
            .map_err(|e| ConfigError::Parse { path: base_dir.to_path_buf(), message: e.to_string() })?;
        config.base_dir = base_dir.to_path_buf();
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.to_path_buf(), source })?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        let mut config: PipelineConfig = serde_json::from_str(&text)
            .map_err(|e| ConfigError::Parse { path: path.to_path_buf(), message: e.to_string() })?;
        config.base_dir = base;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.min_token_len == 0 {
            return Err(ConfigError::Invalid("min_token_len must be at least 1".into()));
        }
        if self.top_n == 0 {
            return Err(ConfigError::Invalid("top_n must be at least 1".into()));
        }
        self.cluster.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        self.forest.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        if self.label_kind == LabelKind::Custom && self.paths.custom_labels.is_none() {
            return Err(ConfigError::Invalid("label_kind `custom` needs paths.custom_labels".into()));
        }
        if self.paths.output_dir.is_none() {
            return Err(ConfigError::Invalid("no output directory (set paths.output_dir or pass --out)".into()));
        }
        Ok(())
    }

    pub fn resolve(&self, path: &Path) -> PathBuf {
        if path.is_absolute() {
            path.to_path_buf()
        } else {
            self.base_dir.join(path)
        }
    }

    pub fn manifest_path(&self) -> PathBuf {
        self.resolve(&self.paths.manifest)
    }

    pub fn lexicon_path(&self) -> Option<PathBuf> {
        self.paths.lexicon.as_deref().map(|p| self.resolve(p))
    }

    pub fn acronyms_path(&self) -> Option<PathBuf> {
        self.paths.acronyms.as_deref().map(|p| self.resolve(p))
    }

    pub fn stopwords_path(&self) -> Option<PathBuf> {
        self.paths.stopwords.as_deref().map(|p| self.resolve(p))
    }

    pub fn custom_labels_path(&self) -> Option<PathBuf> {
        self.paths.custom_labels.as_deref().map(|p| self.resolve(p))
    }

    pub fn output_dir(&self) -> Option<PathBuf> {
        self.paths.output_dir.as_deref().map(|p| self.resolve(p))
    }

    pub fn cluster_config(&self) -> ClusterConfig {
        ClusterConfig { seed: self.seed, ..self.cluster.clone() }
    }

    pub fn forest_config(&self) -> ForestConfig {
        ForestConfig { seed: self.seed, ..self.forest.clone() }
    }

    /// SHA-256 over the serialized settings. The output location is left
    /// out, so the same analysis written to two places hashes the same.
    pub fn hash(&self) -> String {
        let mut settings = self.clone();
        settings.paths.output_dir = None;
        let bytes = serde_json::to_vec(&settings).expect("config serializes");
        hex::encode(Sha256::digest(bytes))
    }
}
