//! Benchmark profile: the single JSON configuration that determines a run.
//!
//! The schema is strict. Unknown keys anywhere except under `report` are
//! rejected, and every omitted optional setting is filled with its default so
//! that a loaded profile is fully expanded.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scan::PatternSet;

fn yes() -> bool {
    true
}

fn default_label_attributes() -> Vec<String> {
    vec!["name".to_string()]
}

fn default_timeout_s() -> f64 {
    30.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchmarkProfile {
    pub name: String,
    pub version: String,
    pub output_path: PathBuf,
    pub scan: ScanConfig,
    pub parse: ParseConfig,
    #[serde(default)]
    pub measure: MeasureConfig,
    #[serde(default)]
    pub report: ReportConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    pub dataset_path: PathBuf,
    pub include: Vec<String>,
    #[serde(default)]
    pub exclude: Vec<String>,
    #[serde(default)]
    pub size_limit_mb: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParseConfig {
    pub parser_language: String,
    /// Map legacy and regional ArchiMate type spellings to canonical names.
    #[serde(default)]
    pub normalize_types: bool,
    /// Per-file parser timeout in seconds.
    #[serde(default = "default_timeout_s")]
    pub timeout_s: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureConfig {
    #[serde(default)]
    pub parse: ParseMeasures,
    #[serde(default)]
    pub lexical: LexicalMeasures,
    #[serde(default)]
    pub constructs: ConstructMeasures,
    #[serde(default)]
    pub size: SizeMeasures,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParseMeasures {
    #[serde(default = "yes")]
    pub enabled: bool,
    #[serde(default = "yes")]
    pub enable_d1_m1: bool,
    #[serde(default = "yes")]
    pub enable_d1_m2: bool,
    #[serde(default = "yes")]
    pub enable_d1_m3: bool,
    #[serde(default = "yes")]
    pub enable_d1_m4: bool,
    #[serde(default = "yes")]
    pub enable_d1_m5: bool,
}

impl Default for ParseMeasures {
    fn default() -> Self {
        ParseMeasures {
            enabled: true,
            enable_d1_m1: true,
            enable_d1_m2: true,
            enable_d1_m3: true,
            enable_d1_m4: true,
            enable_d1_m5: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LexicalMeasures {
    #[serde(default = "yes")]
    pub enabled: bool,
    #[serde(default = "yes")]
    pub include_nodes: bool,
    #[serde(default)]
    pub include_edges: bool,
    #[serde(default = "default_label_attributes")]
    pub label_attributes: Vec<String>,
    #[serde(default)]
    pub tokenizer: TokenizerConfig,
    #[serde(default = "yes")]
    pub enable_d2_m1: bool,
    #[serde(default = "yes")]
    pub enable_d2_m2: bool,
    #[serde(default = "yes")]
    pub enable_d2_m3: bool,
    #[serde(default = "yes")]
    pub enable_d2_m4: bool,
    #[serde(default = "yes")]
    pub enable_d2_m5: bool,
}

impl Default for LexicalMeasures {
    fn default() -> Self {
        LexicalMeasures {
            enabled: true,
            include_nodes: true,
            include_edges: false,
            label_attributes: default_label_attributes(),
            tokenizer: TokenizerConfig::default(),
            enable_d2_m1: true,
            enable_d2_m2: true,
            enable_d2_m3: true,
            enable_d2_m4: true,
            enable_d2_m5: true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TokenizerConfig {
    #[serde(default = "yes")]
    pub split_camel_case: bool,
    #[serde(default = "yes")]
    pub split_punctuation: bool,
    #[serde(default = "yes")]
    pub trim_whitespace: bool,
    #[serde(default = "yes")]
    pub keep_numbers: bool,
    #[serde(default = "yes")]
    pub lowercase: bool,
}

impl Default for TokenizerConfig {
    fn default() -> Self {
        TokenizerConfig {
            split_camel_case: true,
            split_punctuation: true,
            trim_whitespace: true,
            keep_numbers: true,
            lowercase: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstructMeasures {
    #[serde(default = "yes")]
    pub enabled: bool,
    #[serde(default)]
    pub catalog_path: Option<PathBuf>,
    #[serde(default = "yes")]
    pub enable_d3_m1: bool,
    #[serde(default = "yes")]
    pub enable_d3_m2: bool,
}

impl Default for ConstructMeasures {
    fn default() -> Self {
        ConstructMeasures {
            enabled: true,
            catalog_path: None,
            enable_d3_m1: true,
            enable_d3_m2: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SizeMeasures {
    #[serde(default = "yes")]
    pub enabled: bool,
    #[serde(default = "yes")]
    pub enable_d4_m1: bool,
    #[serde(default = "yes")]
    pub enable_d4_m2: bool,
    #[serde(default = "yes")]
    pub enable_d4_m3: bool,
    #[serde(default = "yes")]
    pub enable_d4_m4: bool,
}

impl Default for SizeMeasures {
    fn default() -> Self {
        SizeMeasures {
            enabled: true,
            enable_d4_m1: true,
            enable_d4_m2: true,
            enable_d4_m3: true,
            enable_d4_m4: true,
        }
    }
}

/// Report settings. Keys other than `top_n` are kept verbatim for frontends.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ReportConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub top_n: Option<usize>,
    #[serde(flatten)]
    pub extra: BTreeMap<String, serde_json::Value>,
}

pub const DEFAULT_TOP_N: usize = 25;

impl ReportConfig {
    pub fn top_n(&self) -> usize {
        self.top_n.unwrap_or(DEFAULT_TOP_N)
    }
}

impl MeasureConfig {
    /// Whether a measure (e.g. `"d2.m4"`) runs: its group and its own toggle are on.
    pub fn is_enabled(&self, measure_id: &str) -> bool {
        let p = &self.parse;
        let l = &self.lexical;
        let c = &self.constructs;
        let s = &self.size;
        match measure_id {
            "d1.m1" => p.enabled && p.enable_d1_m1,
            "d1.m2" => p.enabled && p.enable_d1_m2,
            "d1.m3" => p.enabled && p.enable_d1_m3,
            "d1.m4" => p.enabled && p.enable_d1_m4,
            "d1.m5" => p.enabled && p.enable_d1_m5,
            "d2.m1" => l.enabled && l.enable_d2_m1,
            "d2.m2" => l.enabled && l.enable_d2_m2,
            "d2.m3" => l.enabled && l.enable_d2_m3,
            "d2.m4" => l.enabled && l.enable_d2_m4,
            "d2.m5" => l.enabled && l.enable_d2_m5,
            "d3.m1" => c.enabled && c.enable_d3_m1,
            "d3.m2" => c.enabled && c.enable_d3_m2,
            "d4.m1" => s.enabled && s.enable_d4_m1,
            "d4.m2" => s.enabled && s.enable_d4_m2,
            "d4.m3" => s.enabled && s.enable_d4_m3,
            "d4.m4" => s.enabled && s.enable_d4_m4,
            _ => false,
        }
    }
}

fn violation(path: &str, message: impl Into<String>) -> Error {
    Error::SchemaViolation {
        path: path.to_string(),
        message: message.into(),
    }
}

/// Extracts the backticked field name from serde's "missing field" / "unknown field" messages.
fn field_in_message(message: &str) -> Option<&str> {
    let rest = message
        .strip_prefix("missing field `")
        .or_else(|| message.strip_prefix("unknown field `"))?;
    rest.split('`').next()
}

impl BenchmarkProfile {
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let profile: BenchmarkProfile = match serde_path_to_error::deserialize(de) {
            Ok(p) => p,
            Err(err) => {
                let location = err.path().to_string();
                let inner = err.into_inner();
                if !inner.is_data() {
                    return Err(Error::Decode {
                        path: PathBuf::from("<profile>"),
                        line: inner.line(),
                        column: inner.column(),
                        message: inner.to_string(),
                    });
                }
                let message = inner.to_string();
                let mut path = if location == "." { String::new() } else { location };
                if let Some(field) = field_in_message(&message).filter(|f| !path.ends_with(f)) {
                    if !path.is_empty() {
                        path.push('.');
                    }
                    path.push_str(field);
                }
                return Err(violation(&path, message));
            }
        };
        profile.validate()?;
        Ok(profile)
    }

    pub fn validate(&self) -> Result<()> {
        if self.name.trim().is_empty() {
            return Err(violation("name", "must be non-empty"));
        }
        if self.output_path.as_os_str().is_empty() {
            return Err(violation("output_path", "must be non-empty"));
        }
        if self.scan.dataset_path.as_os_str().is_empty() {
            return Err(violation("scan.dataset_path", "must be non-empty"));
        }
        if self.scan.include.is_empty() {
            return Err(violation("scan.include", "at least one include pattern is required"));
        }
        if let Some(limit) = self.scan.size_limit_mb {
            if !(limit > 0.0 && limit.is_finite()) {
                return Err(violation("scan.size_limit_mb", "must be a positive number"));
            }
        }
        if self.parse.parser_language.trim().is_empty() {
            return Err(violation("parse.parser_language", "must be non-empty"));
        }
        if !(self.parse.timeout_s > 0.0 && self.parse.timeout_s.is_finite()) {
            return Err(violation("parse.timeout_s", "must be a positive number"));
        }
        if self.measure.lexical.label_attributes.is_empty() {
            return Err(violation(
                "measure.lexical.label_attributes",
                "at least one label attribute is required",
            ));
        }
        PatternSet::new(&self.scan.include)?;
        PatternSet::new(&self.scan.exclude)?;
        Ok(())
    }
}

/// Reads and validates a profile file.
pub fn load_profile(path: &Path) -> Result<BenchmarkProfile> {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
            return Err(Error::FileNotFound(path.to_path_buf()))
        }
        Err(e) => return Err(Error::io(path, e)),
    };
    BenchmarkProfile::from_json(&text).map_err(|e| match e {
        Error::Decode {
            line,
            column,
            message,
            ..
        } => Error::Decode {
            path: path.to_path_buf(),
            line,
            column,
            message,
        },
        other => other,
    })
}
