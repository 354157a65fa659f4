//! Run configuration: a flat `key = value` file whose keys are all optional.
//! Command-line flags are applied on top by the caller.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::analysis::{AnalysisConfig, AssessConfig};
use crate::error::{Error, Result};
use crate::ingest::{ExtractOptions, SourceFilter, DEFAULT_EXTENSIONS};
use crate::labeling::KeywordSet;
use crate::metrics::HcmConfig;
use crate::stats::ScottKnottConfig;

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub extensions: Vec<String>,
    pub keyword_file: Option<PathBuf>,
    /// Keyword file stems are added to the defaults instead of replacing them.
    pub extend: bool,
    pub post_days: u32,
    pub period_days: u32,
    pub decay_rate: f64,
    pub min_files: usize,
    pub min_observations: usize,
    pub alpha: f64,
    pub support_threshold: f64,
    pub trend_threshold: f64,
    pub bootstrap_iterations: usize,
    pub a12_threshold: f64,
    pub seed: u64,
    pub replication_mode: bool,
    pub all_commits: bool,
    pub follow_renames: bool,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            extensions: DEFAULT_EXTENSIONS.iter().map(|e| e.to_string()).collect(),
            keyword_file: None,
            extend: false,
            post_days: 182,
            period_days: 14,
            decay_rate: std::f64::consts::LN_2,
            min_files: 3,
            min_observations: 4,
            alpha: 0.01,
            support_threshold: 0.4,
            trend_threshold: 0.4,
            bootstrap_iterations: 512,
            a12_threshold: 0.56,
            seed: 0,
            replication_mode: false,
            all_commits: false,
            follow_renames: false,
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::config(key, format!("cannot parse {value:?}")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(Error::config(key, format!("expected a boolean, got {value:?}"))),
    }
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        let mut c = Config::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::config(
                    format!("line {}", i + 1),
                    "expected key = value",
                ));
            };
            let (key, value) = (key.trim(), value.trim());
            match key {
                "extensions" => {
                    c.extensions = value
                        .split(',')
                        .map(|e| e.trim().trim_start_matches('.').to_ascii_lowercase())
                        .filter(|e| !e.is_empty())
                        .collect()
                }
                "keyword_file" => c.keyword_file = Some(PathBuf::from(value)),
                "extend" => c.extend = parse_bool(key, value)?,
                "post_days" => c.post_days = parse(key, value)?,
                "period_days" => c.period_days = parse(key, value)?,
                "decay_rate" => c.decay_rate = parse(key, value)?,
                "min_files" => c.min_files = parse(key, value)?,
                "min_observations" => c.min_observations = parse(key, value)?,
                "alpha" => c.alpha = parse(key, value)?,
                "support_threshold" => c.support_threshold = parse(key, value)?,
                "trend_threshold" => c.trend_threshold = parse(key, value)?,
                "bootstrap_iterations" => c.bootstrap_iterations = parse(key, value)?,
                "a12_threshold" => c.a12_threshold = parse(key, value)?,
                "seed" => c.seed = parse(key, value)?,
                "replication_mode" => c.replication_mode = parse_bool(key, value)?,
                "all_commits" => c.all_commits = parse_bool(key, value)?,
                "follow_renames" => c.follow_renames = parse_bool(key, value)?,
                other => return Err(Error::config(other, "unknown key")),
            }
        }
        c.validate()?;
        Ok(c)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Config::parse(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("post_days", f64::from(self.post_days)),
            ("period_days", f64::from(self.period_days)),
            ("decay_rate", self.decay_rate),
            ("min_files", self.min_files as f64),
            ("min_observations", self.min_observations as f64),
            ("support_threshold", self.support_threshold),
            ("trend_threshold", self.trend_threshold),
            ("bootstrap_iterations", self.bootstrap_iterations as f64),
            ("a12_threshold", self.a12_threshold),
        ];
        for (key, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::config(key, "must be positive"));
            }
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::config("alpha", "must lie in (0, 1)"));
        }
        if self.a12_threshold > 1.0 {
            return Err(Error::config("a12_threshold", "must not exceed 1"));
        }
        if self.extensions.is_empty() {
            return Err(Error::config("extensions", "must list at least one extension"));
        }
        Ok(())
    }

    pub fn keywords(&self) -> Result<KeywordSet> {
        match &self.keyword_file {
            Some(path) => KeywordSet::from_file(path, self.extend),
            None => Ok(KeywordSet::default()),
        }
    }

    pub fn extract_options(&self) -> Result<ExtractOptions> {
        Ok(ExtractOptions {
            first_parent: !self.all_commits,
            follow_renames: self.follow_renames,
            keywords: self.keywords()?,
        })
    }

    pub fn assess(&self) -> AssessConfig {
        AssessConfig {
            filter: SourceFilter::new(&self.extensions),
            post_days: self.post_days,
            min_files: self.min_files,
            hcm: HcmConfig {
                period_days: self.period_days,
                decay_rate: self.decay_rate,
            },
            alpha: self.alpha,
            min_observations: self.min_observations,
            exact_p: true,
        }
    }

    pub fn analysis(&self) -> AnalysisConfig {
        AnalysisConfig {
            support_threshold: self.support_threshold,
            trend_threshold: self.trend_threshold,
            min_trend_scores: self.min_observations,
            replication_mode: self.replication_mode,
            scott_knott: ScottKnottConfig {
                bootstrap_iterations: self.bootstrap_iterations,
                a12_threshold: self.a12_threshold,
                seed: self.seed,
            },
        }
    }
}
