#![allow(dead_code)]

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use modelbench_core::parsing::IrInfo;
use modelbench_core::{run_stage, RunContext, Stage};
use serde::Deserialize;

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

#[derive(Debug, Deserialize, PartialEq)]
pub struct Expected {
    pub nodes: usize,
    pub edges: usize,
    pub warnings: usize,
    pub skipped: u64,
    pub status: String,
}

pub fn expected(language: &str) -> BTreeMap<String, Expected> {
    let text = fs::read_to_string(fixtures().join(language).join("expected.json")).unwrap();
    serde_json::from_str(&text).unwrap()
}

/// Fixture profile with its output redirected to `out`.
pub fn context(language: &str, out: &Path) -> RunContext {
    let profile = fixtures().join("profiles").join(format!("{language}.json"));
    RunContext::load(&profile, Some(out.to_path_buf())).unwrap()
}

pub fn run_all(ctx: &RunContext) {
    run_stage(ctx, Stage::Run).unwrap();
}

pub fn ir_info(out: &Path) -> IrInfo {
    let text = fs::read_to_string(out.join("ir_info.json")).unwrap();
    serde_json::from_str(&text).unwrap()
}

pub fn read_json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

/// Observed counts per source file, with node and edge counts read back from the IR files.
pub fn observed(out: &Path) -> BTreeMap<String, Expected> {
    ir_info(out)
        .index
        .values()
        .map(|r| {
            let ir = out.join("ir").join(format!("{}.json", r.model_id));
            let (nodes, edges) = if ir.is_file() {
                let g = read_json(&ir);
                (g["nodes"].as_array().unwrap().len(), g["edges"].as_array().unwrap().len())
            } else {
                (0, 0)
            };
            (
                r.source_path.clone(),
                Expected {
                    nodes,
                    edges,
                    warnings: r.warnings.len(),
                    skipped: r.n_skipped,
                    status: r.status.as_str().to_string(),
                },
            )
        })
        .collect()
}

/// Replaces every `parse_time_ms` value with 0 so run-dependent timings compare equal.
pub fn mask_times(v: &mut serde_json::Value) {
    match v {
        serde_json::Value::Object(map) => {
            for (k, x) in map.iter_mut() {
                if k == "parse_time_ms" {
                    *x = serde_json::Value::from(0);
                } else {
                    mask_times(x);
                }
            }
        }
        serde_json::Value::Array(items) => items.iter_mut().for_each(mask_times),
        _ => {}
    }
}

/// Artifact bytes keyed by path relative to `out`.
pub fn artifacts(out: &Path) -> BTreeMap<String, Vec<u8>> {
    walkdir::WalkDir::new(out)
        .into_iter()
        .map(Result::unwrap)
        .filter(|e| e.file_type().is_file())
        .map(|e| {
            let rel = e.path().strip_prefix(out).unwrap().to_string_lossy().replace('\\', "/");
            (rel, fs::read(e.path()).unwrap())
        })
        .collect()
}
