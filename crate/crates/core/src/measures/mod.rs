//! The sixteen benchmark measures over parse records and IR graphs.

pub mod d1;
pub mod d2;
pub mod d3;
pub mod d4;
pub mod lang;
pub mod stats;
pub mod tokenize;

use std::collections::BTreeMap;
use std::fs;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::artifact;
use crate::error::{Error, Result};
use crate::model::{ConstructCatalog, IrGraph, MetricValue, ParseStatus};
use crate::artifact::{IR_INFO, MEASURES, MEASURES_PER_MODEL};
use crate::parsing::{self, IrInfo};
use crate::pipeline::RunContext;
use lang::{LanguageDetector, LinguaDetector};

pub const NO_ELIGIBLE_MODELS: &str = "no eligible models";

pub const MEASURE_IDS: [&str; 16] = [
    "d1.m1", "d1.m2", "d1.m3", "d1.m4", "d1.m5", "d2.m1", "d2.m2", "d2.m3", "d2.m4", "d2.m5", "d3.m1", "d3.m2",
    "d4.m1", "d4.m2", "d4.m3", "d4.m4",
];

const ECORE_CATALOG: &str = include_str!("../../catalogs/ecore.json");
const ARCHIMATE_CATALOG: &str = include_str!("../../catalogs/archimate.json");

pub type Metrics = BTreeMap<String, MetricValue>;

type InfoMeasure = fn(&IrInfo) -> MeasureOutput;
type GraphMeasure = fn(&[&IrGraph]) -> MeasureOutput;

pub(crate) fn metrics<const N: usize>(pairs: [(&str, MetricValue); N]) -> Metrics {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

/// Dataset-level result of one measure.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MeasureEntry {
    pub metrics: Metrics,
    pub score: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub notice: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct MeasureOutput {
    pub dataset: MeasureEntry,
    pub per_model: BTreeMap<String, Metrics>,
}

/// Contents of `measures.json`; per-model metrics go to their own file.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MeasureStore {
    pub dataset: BTreeMap<String, MeasureEntry>,
    pub dimension_scores: BTreeMap<String, f64>,
    #[serde(skip)]
    pub per_model: BTreeMap<String, BTreeMap<String, Metrics>>,
}

impl MeasureStore {
    fn insert(&mut self, id: &str, out: MeasureOutput) {
        for (model, m) in out.per_model {
            self.per_model.entry(model).or_default().insert(id.to_string(), m);
        }
        self.dataset.insert(id.to_string(), out.dataset);
    }

    pub fn score(&self, id: &str) -> Option<f64> {
        self.dataset.get(id).and_then(|e| e.score)
    }
}

/// Mean of the scored measures of a dimension.
pub fn dimension_score(scores: &[f64]) -> Option<f64> {
    stats::mean(scores)
}

pub fn aggregate_dimension_scores(dataset: &BTreeMap<String, MeasureEntry>) -> BTreeMap<String, f64> {
    let mut by_dim: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
    for (id, entry) in dataset {
        if let (Some(score), Some((dim, _))) = (entry.score, id.split_once('.')) {
            by_dim.entry(dim).or_default().push(score);
        }
    }
    by_dim
        .into_iter()
        .filter_map(|(d, s)| Some((d.to_string(), dimension_score(&s)?)))
        .collect()
}

/// Built-in catalog for a parser key or language name.
pub fn builtin_catalog(language: &str) -> Option<ConstructCatalog> {
    let text = match language.to_ascii_lowercase().as_str() {
        "ecore" => ECORE_CATALOG,
        "archimate" | "archimate-archi" => ARCHIMATE_CATALOG,
        _ => return None,
    };
    Some(ConstructCatalog::from_json(text).expect("built-in catalogs are valid"))
}

fn load_catalog(ctx: &RunContext) -> Result<ConstructCatalog> {
    if let Some(path) = &ctx.profile.measure.constructs.catalog_path {
        let path = ctx.resolve(path);
        let text = fs::read_to_string(&path)
            .map_err(|e| Error::MissingCatalog(format!("{}: {e}", path.display())))?;
        return ConstructCatalog::from_json(&text);
    }
    let key = &ctx.profile.parse.parser_language;
    let language = parsing::select_parser(key).map(|p| p.descriptor().language.clone());
    builtin_catalog(key)
        .or_else(|| language.ok().and_then(|l| builtin_catalog(&l)))
        .ok_or_else(|| Error::MissingCatalog(format!("no catalog_path set and no built-in catalog for `{key}`")))
}

fn no_eligible() -> MeasureOutput {
    MeasureOutput {
        dataset: MeasureEntry {
            metrics: Metrics::new(),
            score: None,
            notice: Some(NO_ELIGIBLE_MODELS.to_string()),
        },
        per_model: BTreeMap::new(),
    }
}

/// Computes every enabled measure from parse records and non-failed graphs.
pub fn compute_measures(
    ctx: &RunContext,
    info: &IrInfo,
    graphs: &[IrGraph],
    detector: &dyn LanguageDetector,
) -> Result<MeasureStore> {
    let cfg = &ctx.profile.measure;
    let on = |id: &str| cfg.is_enabled(id);
    let mut store = MeasureStore::default();

    let d1: [(&str, InfoMeasure); 5] = [
        ("d1.m1", d1::parse_status),
        ("d1.m2", d1::loaded_vs_skipped),
        ("d1.m3", d1::parse_time),
        ("d1.m4", d1::file_size),
        ("d1.m5", d1::warnings),
    ];
    for (id, f) in d1 {
        if on(id) {
            store.insert(id, f(info));
        }
    }

    let later: Vec<&str> = MEASURE_IDS[5..].iter().copied().filter(|id| on(id)).collect();
    if graphs.is_empty() {
        for id in later {
            store.insert(id, no_eligible());
        }
        store.dimension_scores = aggregate_dimension_scores(&store.dataset);
        return Ok(store);
    }

    if later.iter().any(|id| id.starts_with("d2.")) {
        let labels: Vec<(String, d2::ModelLabels)> = graphs
            .par_iter()
            .map(|g| (g.id.clone(), d2::collect_labels(g, &cfg.lexical)))
            .collect();
        let trim = cfg.lexical.tokenizer.trim_whitespace;
        for id in &later {
            let out = match *id {
                "d2.m1" => d2::label_presence(&labels),
                "d2.m2" => d2::label_length(&labels, trim),
                "d2.m3" => d2::word_mix(&labels),
                "d2.m4" => d2::lexical_diversity(&labels),
                "d2.m5" => d2::language_usage(&labels, detector),
                _ => continue,
            };
            store.insert(id, out);
        }
    }

    if later.iter().any(|id| id.starts_with("d3.")) {
        let catalog = load_catalog(ctx)?;
        let matched: Vec<(String, d3::ModelConstructs)> = graphs
            .par_iter()
            .map(|g| (g.id.clone(), d3::match_constructs(g, &catalog)))
            .collect();
        if on("d3.m1") {
            store.insert("d3.m1", d3::construct_presence(&matched, &catalog));
        }
        if on("d3.m2") {
            store.insert("d3.m2", d3::construct_frequency(&matched, &catalog));
        }
    }

    let refs: Vec<&IrGraph> = graphs.iter().collect();
    let d4: [(&str, GraphMeasure); 4] = [
        ("d4.m1", d4::model_size),
        ("d4.m2", d4::degree),
        ("d4.m3", d4::connectivity_measure),
        ("d4.m4", d4::containment_measure),
    ];
    for (id, f) in d4 {
        if on(id) {
            store.insert(id, f(&refs));
        }
    }

    store.dimension_scores = aggregate_dimension_scores(&store.dataset);
    Ok(store)
}

/// Loads the IR of every non-failed model, sorted by model id.
pub fn load_graphs(ctx: &RunContext, info: &IrInfo) -> Result<Vec<IrGraph>> {
    info.index
        .values()
        .filter(|r| r.status != ParseStatus::Failure)
        .collect::<Vec<_>>()
        .par_iter()
        .map(|r| {
            let path = parsing::ir_path(&ctx.output_dir, &r.model_id);
            if !path.is_file() {
                return Err(Error::MissingParseArtifact(path));
            }
            artifact::read_artifact::<IrGraph>(&path)
        })
        .collect()
}

pub fn run_measure(ctx: &RunContext) -> Result<MeasureStore> {
    run_measure_with(ctx, &LinguaDetector)
}

pub fn run_measure_with(ctx: &RunContext, detector: &dyn LanguageDetector) -> Result<MeasureStore> {
    let info_path = ctx.output_dir.join(IR_INFO);
    if !info_path.is_file() {
        return Err(Error::MissingParseArtifact(info_path));
    }
    let info: IrInfo = artifact::read_artifact(&info_path)?;
    let graphs = load_graphs(ctx, &info)?;
    let store = compute_measures(ctx, &info, &graphs, detector)?;
    artifact::write_artifact(&ctx.output_dir.join(MEASURES), &store)?;
    artifact::write_artifact(&ctx.output_dir.join(MEASURES_PER_MODEL), &store.per_model)?;
    Ok(store)
}
