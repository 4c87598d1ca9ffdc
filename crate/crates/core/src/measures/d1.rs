//! D1 Parsing: status, loaded vs skipped content, timing, file size, warnings.

use std::collections::BTreeMap;

use super::stats::describe;
use super::{metrics, MeasureEntry, MeasureOutput};
use crate::model::{count_map, MetricValue};
use crate::parsing::IrInfo;

/// `((n_success + 0.5 n_partial) / n_models) * 100`; undefined for an empty dataset.
pub fn parse_status_score(n_models: u64, n_success: u64, n_partial: u64) -> Option<f64> {
    (n_models > 0).then(|| (n_success as f64 + 0.5 * n_partial as f64) / n_models as f64 * 100.0)
}

/// `100 * loaded / (loaded + skipped)`, or 100 when nothing was encountered.
pub fn loaded_score(loaded: u64, skipped: u64) -> f64 {
    if loaded + skipped == 0 {
        100.0
    } else {
        100.0 * loaded as f64 / (loaded + skipped) as f64
    }
}

/// `100 * (1 - warned / n_models)`.
pub fn warning_score(n_models: u64, models_with_warnings: u64) -> Option<f64> {
    (n_models > 0).then(|| 100.0 * (1.0 - models_with_warnings as f64 / n_models as f64))
}

fn share(part: u64, whole: u64) -> MetricValue {
    MetricValue::opt_float((whole > 0).then(|| part as f64 / whole as f64))
}

pub fn parse_status(info: &IrInfo) -> MeasureOutput {
    let t = &info.totals;
    let score = parse_status_score(t.n_models, t.n_success, t.n_partial);
    let dataset = MeasureEntry {
        metrics: metrics([
            ("n_models", t.n_models.into()),
            ("n_success", t.n_success.into()),
            ("n_partial", t.n_partial.into()),
            ("n_failed", t.n_failed.into()),
            ("share_success", share(t.n_success, t.n_models)),
            ("share_partial", share(t.n_partial, t.n_models)),
            ("share_failed", share(t.n_failed, t.n_models)),
            ("score", MetricValue::opt_float(score)),
        ]),
        score,
        notice: (t.n_models == 0).then(|| "empty dataset".to_string()),
    };
    let per_model = info
        .index
        .iter()
        .map(|(id, r)| {
            (
                id.clone(),
                metrics([
                    ("source_path", r.source_path.as_str().into()),
                    ("parse_status", r.status.as_str().into()),
                    ("parse_error_msg", r.error_msg.clone().into()),
                ]),
            )
        })
        .collect();
    MeasureOutput { dataset, per_model }
}

pub fn loaded_vs_skipped(info: &IrInfo) -> MeasureOutput {
    let t = &info.totals;
    let with_skips = info.index.values().filter(|r| r.n_skipped > 0).count() as u64;
    let score = loaded_score(t.elements_loaded, t.elements_skipped);
    let dataset = MeasureEntry {
        metrics: metrics([
            ("elements_loaded", t.elements_loaded.into()),
            ("elements_skipped", t.elements_skipped.into()),
            ("models_with_skips", with_skips.into()),
            ("share_models_with_skips", share(with_skips, t.n_models)),
            ("score", score.into()),
        ]),
        score: Some(score),
        notice: None,
    };
    let per_model = info
        .index
        .iter()
        .map(|(id, r)| {
            (
                id.clone(),
                metrics([("n_loaded", r.n_loaded.into()), ("n_skipped", r.n_skipped.into())]),
            )
        })
        .collect();
    MeasureOutput { dataset, per_model }
}

pub fn parse_time(info: &IrInfo) -> MeasureOutput {
    let times: Vec<f64> = info.index.values().map(|r| r.parse_time_ms).collect();
    let dataset = MeasureEntry {
        metrics: metrics([("parse_time_ms", describe(&times).into())]),
        score: None,
        notice: None,
    };
    let per_model = info
        .index
        .iter()
        .map(|(id, r)| (id.clone(), metrics([("parse_time_ms", r.parse_time_ms.into())])))
        .collect();
    MeasureOutput { dataset, per_model }
}

/// Source sizes cover every model, including failures; IR sizes only those with an IR.
pub fn file_size(info: &IrInfo) -> MeasureOutput {
    let source: Vec<f64> = info.index.values().map(|r| r.source_bytes as f64).collect();
    let ir: Vec<f64> = info.index.values().filter_map(|r| r.ir_bytes.map(|b| b as f64)).collect();
    let ratios: Vec<f64> = info
        .index
        .values()
        .filter(|r| r.source_bytes > 0)
        .filter_map(|r| r.ir_bytes.map(|b| b as f64 / r.source_bytes as f64))
        .collect();
    let dataset = MeasureEntry {
        metrics: metrics([
            ("source_bytes", describe(&source).into()),
            ("ir_bytes", describe(&ir).into()),
            ("ir_to_source_ratio", describe(&ratios).into()),
        ]),
        score: None,
        notice: None,
    };
    let per_model = info
        .index
        .iter()
        .map(|(id, r)| {
            (
                id.clone(),
                metrics([("source_bytes", r.source_bytes.into()), ("ir_bytes", r.ir_bytes.into())]),
            )
        })
        .collect();
    MeasureOutput { dataset, per_model }
}

pub fn warnings(info: &IrInfo) -> MeasureOutput {
    let t = &info.totals;
    let warned = info.index.values().filter(|r| !r.warnings.is_empty()).count() as u64;
    // Ties go to the lexicographically smallest type.
    let dominant = t
        .warnings_by_type
        .iter()
        .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0)))
        .map(|(k, _)| k.clone());
    let score = warning_score(t.n_models, warned);
    let dataset = MeasureEntry {
        metrics: metrics([
            ("models_with_warnings", warned.into()),
            ("share_models_with_warnings", share(warned, t.n_models)),
            ("warnings_total", t.warnings_total.into()),
            ("warnings_by_type", count_map(&t.warnings_by_type)),
            ("dominant_type", dominant.into()),
            ("score", MetricValue::opt_float(score)),
        ]),
        score,
        notice: (t.n_models == 0).then(|| "empty dataset".to_string()),
    };
    let per_model = info
        .index
        .iter()
        .map(|(id, r)| {
            let mut by_type: BTreeMap<String, u64> = BTreeMap::new();
            for w in &r.warnings {
                *by_type.entry(w.kind.to_string()).or_insert(0) += 1;
            }
            let skipped_by_warning = r.warnings.iter().filter(|w| w.led_to_skip).count() as u64;
            (
                id.clone(),
                metrics([
                    ("n_warnings", (r.warnings.len() as u64).into()),
                    ("warnings_by_type", count_map(&by_type)),
                    ("warnings_with_skip", skipped_by_warning.into()),
                ]),
            )
        })
        .collect();
    MeasureOutput { dataset, per_model }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formulas() {
        assert_eq!(parse_status_score(4, 4, 0), Some(100.0));
        assert_eq!(parse_status_score(4, 2, 1), Some(62.5));
        assert_eq!(parse_status_score(0, 0, 0), None);
        assert_eq!(loaded_score(90, 10), 90.0);
        assert_eq!(loaded_score(5, 0), 100.0);
        assert_eq!(loaded_score(0, 0), 100.0);
        assert_eq!(warning_score(4, 1), Some(75.0));
        assert_eq!(warning_score(10, 0), Some(100.0));
    }
}
