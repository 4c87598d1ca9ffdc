//! Stage orchestration shared by the CLI and the HTTP service.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::measures::{self};
use crate::parsing::{self, IrTotals};
use crate::profile::{load_profile, BenchmarkProfile};
use crate::report;
use crate::scan::{self, ScanTotals};

/// Environment variable overriding the profile's `output_path`.
pub const OUTPUT_ENV: &str = "MODELBENCH_OUT";

/// A profile bound to the directory its relative paths are resolved against.
#[derive(Clone, Debug)]
pub struct RunContext {
    pub profile: BenchmarkProfile,
    pub base_dir: PathBuf,
    pub output_dir: PathBuf,
}

impl RunContext {
    pub fn new(profile: BenchmarkProfile, base_dir: &Path, output_override: Option<PathBuf>) -> Self {
        let output_dir = match output_override {
            Some(p) => p,
            None => resolve_against(base_dir, &profile.output_path),
        };
        RunContext {
            profile,
            base_dir: base_dir.to_path_buf(),
            output_dir,
        }
    }

    /// Loads a profile file; relative paths inside it are taken relative to its directory.
    pub fn load(profile_path: &Path, output_override: Option<PathBuf>) -> Result<Self> {
        let profile = load_profile(profile_path)?;
        let base = profile_path
            .parent()
            .filter(|p| !p.as_os_str().is_empty())
            .unwrap_or(Path::new("."));
        Ok(RunContext::new(profile, base, output_override))
    }

    pub fn resolve(&self, path: &Path) -> PathBuf {
        resolve_against(&self.base_dir, path)
    }

    pub fn dataset_root(&self) -> PathBuf {
        self.resolve(&self.profile.scan.dataset_path)
    }
}

fn resolve_against(base: &Path, path: &Path) -> PathBuf {
    if path.is_absolute() {
        path.to_path_buf()
    } else {
        base.join(path)
    }
}

/// Output directory override with precedence flag > environment > profile.
pub fn output_override(flag: Option<PathBuf>) -> Option<PathBuf> {
    flag.or_else(|| {
        std::env::var_os(OUTPUT_ENV)
            .filter(|v| !v.is_empty())
            .map(PathBuf::from)
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Scan,
    Parse,
    Measure,
    Report,
    Run,
}

impl Stage {
    pub fn as_str(self) -> &'static str {
        match self {
            Stage::Scan => "scan",
            Stage::Parse => "parse",
            Stage::Measure => "measure",
            Stage::Report => "report",
            Stage::Run => "run",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Stage {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "scan" => Ok(Stage::Scan),
            "parse" => Ok(Stage::Parse),
            "measure" => Ok(Stage::Measure),
            "report" => Ok(Stage::Report),
            "run" => Ok(Stage::Run),
            other => Err(format!(
                "unknown stage `{other}` (expected scan, parse, measure, report or run)"
            )),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureSummary {
    pub measures: Vec<String>,
    pub dimension_scores: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportSummary {
    pub objects: usize,
}

/// What a stage execution produced, for display and for API responses.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StageSummary {
    pub stages: Vec<Stage>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scan: Option<ScanTotals>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parse: Option<IrTotals>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub measure: Option<MeasureSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<ReportSummary>,
}

impl fmt::Display for StageSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(t) = &self.scan {
            writeln!(
                f,
                "scan: {} files seen, {} candidates ({} excluded, {} unreadable, {} too large, {} duplicates in {} groups)",
                t.files_seen, t.candidates, t.excluded, t.unreadable, t.too_large, t.duplicate_files, t.duplicate_groups
            )?;
        }
        if let Some(t) = &self.parse {
            writeln!(
                f,
                "parse: {} models, {} success, {} partial, {} failed; {} elements loaded, {} skipped, {} warnings",
                t.n_models, t.n_success, t.n_partial, t.n_failed, t.elements_loaded, t.elements_skipped, t.warnings_total
            )?;
        }
        if let Some(m) = &self.measure {
            let scores: Vec<String> = m
                .dimension_scores
                .iter()
                .map(|(d, s)| format!("{d}={s:.1}"))
                .collect();
            writeln!(
                f,
                "measure: {} measures computed; dimension scores: {}",
                m.measures.len(),
                if scores.is_empty() { "none".to_string() } else { scores.join(", ") }
            )?;
        }
        if let Some(r) = &self.report {
            writeln!(f, "report: {} report objects", r.objects)?;
        }
        Ok(())
    }
}

pub fn run_stage(ctx: &RunContext, stage: Stage) -> Result<StageSummary> {
    let mut summary = StageSummary::default();
    let stages: &[Stage] = match stage {
        Stage::Run => &[Stage::Scan, Stage::Parse, Stage::Measure, Stage::Report],
        Stage::Scan => &[Stage::Scan],
        Stage::Parse => &[Stage::Parse],
        Stage::Measure => &[Stage::Measure],
        Stage::Report => &[Stage::Report],
    };
    for s in stages {
        match s {
            Stage::Scan => summary.scan = Some(scan::run_scan(ctx)?.totals),
            Stage::Parse => summary.parse = Some(parsing::run_parse(ctx)?.totals),
            Stage::Measure => {
                let store = measures::run_measure(ctx)?;
                summary.measure = Some(MeasureSummary {
                    measures: store.dataset.keys().cloned().collect(),
                    dimension_scores: store.dimension_scores.clone(),
                });
            }
            Stage::Report => {
                let r = report::run_report(ctx)?;
                summary.report = Some(ReportSummary {
                    objects: r.objects.len(),
                });
            }
            Stage::Run => unreachable!("run expands to concrete stages"),
        }
        summary.stages.push(*s);
    }
    Ok(summary)
}
