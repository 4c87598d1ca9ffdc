//! Visualization-ready projections of the measure artifacts.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::artifact::{self, MEASURES, MEASURES_PER_MODEL, REPORT};
use crate::error::{Error, Result};
use crate::measures::stats::quantile;
use crate::measures::{MeasureStore, Metrics};
use crate::model::MetricValue;
use crate::pipeline::RunContext;

pub const MIN_BINS: usize = 5;
pub const MAX_BINS: usize = 50;

pub type PerModel = BTreeMap<String, BTreeMap<String, Metrics>>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportKind {
    Kpi,
    ScoreBadge,
    Bar,
    Histogram,
    Scatter,
    Table,
    Matrix,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportObject {
    pub measure_id: String,
    pub kind: ReportKind,
    pub title: String,
    pub payload: Value,
}

/// Contents of `report.json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub objects: Vec<ReportObject>,
    pub generated_for: String,
    pub profile_version: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub bin_edges: Vec<f64>,
    pub counts: Vec<u64>,
}

/// Equal-width bins over `[min, max]`; the last bin is closed on the right.
pub fn histogram_with_bins(values: &[f64], bins: usize) -> Histogram {
    let (Some(min), Some(max)) = (
        values.iter().copied().reduce(f64::min),
        values.iter().copied().reduce(f64::max),
    ) else {
        return Histogram { bin_edges: vec![], counts: vec![] };
    };
    if max == min || bins == 0 {
        return Histogram { bin_edges: vec![min, max], counts: vec![values.len() as u64] };
    }
    let width = (max - min) / bins as f64;
    let mut bin_edges: Vec<f64> = (0..bins).map(|i| min + width * i as f64).collect();
    bin_edges.push(max);
    let mut counts = vec![0u64; bins];
    for v in values {
        let i = (((v - min) / width) as usize).min(bins - 1);
        counts[i] += 1;
    }
    Histogram { bin_edges, counts }
}

/// Freedman–Diaconis bin count clamped to `[MIN_BINS, MAX_BINS]`.
pub fn fd_bins(values: &[f64]) -> usize {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let (Some(lo), Some(hi)) = (sorted.first(), sorted.last()) else {
        return MIN_BINS;
    };
    let iqr = quantile(&sorted, 0.75).unwrap_or(0.0) - quantile(&sorted, 0.25).unwrap_or(0.0);
    let width = 2.0 * iqr / (sorted.len() as f64).cbrt();
    if width <= 0.0 {
        return MIN_BINS;
    }
    (((hi - lo) / width).ceil() as usize).clamp(MIN_BINS, MAX_BINS)
}

pub fn histogram(values: &[f64]) -> Histogram {
    histogram_with_bins(values, fd_bins(values))
}

/// Frequency rows sorted by count descending, then key.
pub fn top_n(freq: &BTreeMap<String, f64>, n: usize) -> Vec<(String, f64)> {
    let mut rows: Vec<(String, f64)> = freq.iter().map(|(k, v)| (k.clone(), *v)).collect();
    rows.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    rows.truncate(n);
    rows
}

struct Builder<'a> {
    store: &'a MeasureStore,
    per_model: &'a PerModel,
    objects: Vec<ReportObject>,
}

impl<'a> Builder<'a> {
    fn push(&mut self, measure_id: &str, kind: ReportKind, title: &str, payload: Value) {
        self.objects.push(ReportObject {
            measure_id: measure_id.to_string(),
            kind,
            title: title.to_string(),
            payload,
        });
    }

    fn metric(&self, measure: &str, key: &str) -> Option<&'a MetricValue> {
        self.store.dataset.get(measure)?.metrics.get(key)
    }

    fn num(&self, measure: &str, key: &str) -> Option<f64> {
        self.metric(measure, key).and_then(MetricValue::as_f64)
    }

    fn map(&self, measure: &str, key: &str) -> Option<BTreeMap<String, f64>> {
        let m = self.metric(measure, key)?.as_map()?;
        Some(m.iter().map(|(k, v)| (k.clone(), v.as_f64())).collect())
    }

    fn model_metric(&self, model: &str, measure: &str, key: &str) -> Option<&'a MetricValue> {
        self.per_model.get(model)?.get(measure)?.get(key)
    }

    /// `(model_id, value)` for every model carrying a numeric `key` under `measure`.
    fn per_model_values(&self, measure: &str, key: &str, stat: Option<&str>) -> Vec<(String, f64)> {
        self.per_model
            .iter()
            .filter_map(|(id, ms)| {
                let v = ms.get(measure)?.get(key)?;
                let x = match stat {
                    None => v.as_f64()?,
                    Some("median") => v.as_distribution()?.median?,
                    Some(_) => None?,
                };
                Some((id.clone(), x))
            })
            .collect()
    }

    fn has(&self, measure: &str) -> bool {
        self.store.dataset.contains_key(measure)
    }

    fn bar(&mut self, measure: &str, title: &str, categories: Vec<String>, values: Vec<f64>) {
        self.push(measure, ReportKind::Bar, title, json!({ "categories": categories, "values": values }));
    }

    fn map_bar(&mut self, measure: &str, key: &str, title: &str) {
        if let Some(m) = self.map(measure, key) {
            let (c, v) = m.into_iter().unzip();
            self.bar(measure, title, c, v);
        }
    }

    fn hist(&mut self, measure: &str, key: &str, stat: Option<&str>, title: &str) {
        if !self.has(measure) {
            return;
        }
        let values: Vec<f64> = self.per_model_values(measure, key, stat).into_iter().map(|(_, v)| v).collect();
        let h = histogram(&values);
        let field = match stat {
            Some(s) => format!("{key}.{s}"),
            None => key.to_string(),
        };
        self.push(
            measure,
            ReportKind::Histogram,
            title,
            json!({ "field": field, "bin_edges": h.bin_edges, "counts": h.counts, "sample_count": values.len() }),
        );
    }

    fn scatter(&mut self, measure: &str, (xm, xk): (&str, &str), (ym, yk): (&str, &str), title: &str) {
        if !self.has(xm) || !self.has(ym) {
            return;
        }
        let points: Vec<Value> = self
            .per_model
            .keys()
            .filter_map(|id| {
                let x = self.model_metric(id, xm, xk)?.as_f64()?;
                let y = self.model_metric(id, ym, yk)?.as_f64()?;
                Some(json!({ "model_id": id, "x": x, "y": y }))
            })
            .collect();
        self.push(measure, ReportKind::Scatter, title, json!({ "x_label": xk, "y_label": yk, "points": points }));
    }

    fn kpi(&mut self, measure: &str, key: &str, title: &str) {
        if let Some(v) = self.metric(measure, key) {
            if !matches!(v, MetricValue::Null) {
                let value = serde_json::to_value(v).unwrap_or(Value::Null);
                self.push(measure, ReportKind::Kpi, title, json!({ "metric": key, "value": value }));
            }
        }
    }
}

fn display_score(measure_id: &str, score: f64) -> String {
    if measure_id.starts_with("d1") {
        format!("{score:.0}")
    } else {
        format!("{score:.1}")
    }
}

/// Builds the report objects from the two measure artifacts; deterministic in its inputs.
pub fn build_report(store: &MeasureStore, per_model: &PerModel, top: usize) -> Vec<ReportObject> {
    let mut b = Builder { store, per_model, objects: Vec::new() };

    b.kpi("d1.m1", "n_models", "Models");
    b.kpi("d1.m1", "n_failed", "Failed models");
    b.kpi("d1.m2", "elements_loaded", "Elements loaded");
    b.kpi("d2.m4", "ttr", "Type-token ratio");
    b.kpi("d2.m5", "distinct_languages", "Distinct languages");
    b.kpi("d3.m1", "observed_constructs", "Observed constructs");
    b.kpi("d3.m1", "catalog_size", "Catalog size");

    for (dim, score) in &store.dimension_scores {
        b.push(
            dim,
            ReportKind::ScoreBadge,
            &format!("{} score", dim.to_uppercase()),
            json!({ "score": score, "display": display_score(dim, *score) }),
        );
    }
    for (id, entry) in &store.dataset {
        if let Some(score) = entry.score {
            b.push(
                id,
                ReportKind::ScoreBadge,
                &format!("{} score", id.to_uppercase()),
                json!({ "score": score, "display": display_score(id, score) }),
            );
        }
    }

    if b.has("d1.m1") {
        let values = ["n_success", "n_partial", "n_failed"]
            .iter()
            .map(|k| b.num("d1.m1", k).unwrap_or(0.0))
            .collect();
        b.bar("d1.m1", "Parse status", vec!["success".into(), "partial".into(), "failure".into()], values);

        let rows: Vec<Value> = per_model
            .iter()
            .filter_map(|(id, ms)| {
                let status = ms.get("d1.m1")?.get("parse_status")?.as_str()?;
                (status != "success").then(|| {
                    let get = |m: &str, k: &str| {
                        ms.get(m).and_then(|x| x.get(k)).map_or(Value::Null, |v| serde_json::to_value(v).unwrap_or(Value::Null))
                    };
                    json!([
                        id,
                        get("d1.m1", "source_path"),
                        status,
                        get("d1.m1", "parse_error_msg"),
                        get("d1.m5", "n_warnings"),
                        get("d1.m2", "n_skipped"),
                    ])
                })
            })
            .collect();
        b.push(
            "d1.m1",
            ReportKind::Table,
            "Models not parsed cleanly",
            json!({
                "columns": ["model_id", "source_path", "parse_status", "parse_error_msg", "n_warnings", "n_skipped"],
                "rows": rows,
            }),
        );
    }
    b.map_bar("d1.m5", "warnings_by_type", "Warnings by type");
    b.hist("d1.m3", "parse_time_ms", None, "Parse time per model (ms)");
    b.scatter("d1.m4", ("d1.m4", "source_bytes"), ("d1.m4", "ir_bytes"), "Source size vs IR size (bytes)");

    b.hist("d2.m2", "chars", Some("median"), "Median label length per model (characters)");
    b.hist("d2.m2", "tokens", Some("median"), "Median label length per model (tokens)");
    b.map_bar("d2.m5", "models_by_language", "Models by predominant language");

    if let Some(presence) = b.map("d3.m1", "construct_presence") {
        let rows: Vec<&String> = presence.keys().collect();
        let cells: Vec<[f64; 1]> = presence.values().map(|v| [*v]).collect();
        b.push(
            "d3.m1",
            ReportKind::Matrix,
            "Construct presence",
            json!({ "row_labels": rows, "col_labels": ["present"], "cells": cells }),
        );
    }
    b.map_bar("d3.m1", "coverage_by_group", "Coverage by construct group");
    if let Some(freq) = b.map("d3.m2", "frequency_by_construct") {
        let rows: Vec<Value> = top_n(&freq, top).into_iter().map(|(k, v)| json!([k, v])).collect();
        b.push(
            "d3.m2",
            ReportKind::Table,
            &format!("Top {top} constructs by frequency"),
            json!({ "columns": ["construct", "frequency"], "rows": rows }),
        );
    }

    b.hist("d4.m1", "n_elements", None, "Elements per model");
    b.hist("d4.m2", "mean_degree", None, "Mean degree per model");
    b.hist("d4.m3", "n_components", None, "Components per model");
    b.hist("d4.m4", "max_depth", None, "Maximum containment depth per model");
    b.scatter("d4.m1", ("d4.m1", "n_elements"), ("d4.m1", "n_edges"), "Elements vs edges");

    b.objects
}

pub fn run_report(ctx: &RunContext) -> Result<Report> {
    let measures_path = ctx.output_dir.join(MEASURES);
    let per_model_path = ctx.output_dir.join(MEASURES_PER_MODEL);
    for p in [&measures_path, &per_model_path] {
        if !p.is_file() {
            return Err(Error::MissingMeasureArtifact(p.clone()));
        }
    }
    let store: MeasureStore = artifact::read_artifact(&measures_path)?;
    let per_model: PerModel = artifact::read_artifact(&per_model_path)?;
    let report = Report {
        objects: build_report(&store, &per_model, ctx.profile.report.top_n()),
        generated_for: ctx.profile.name.clone(),
        profile_version: ctx.profile.version.clone(),
    };
    artifact::write_artifact(&ctx.output_dir.join(REPORT), &report)?;
    Ok(report)
}
