//! D2 Lexical quality: label presence, length, word mix, diversity, language.

use std::collections::{BTreeMap, BTreeSet};

use super::lang::LanguageDetector;
use super::stats::describe;
use super::tokenize::{tokenize, TokenList};
use super::{metrics, MeasureEntry, MeasureOutput};
use crate::model::{count_map, IrGraph, MetricValue, Properties, Scalar};
use crate::profile::LexicalMeasures;

/// Labels with fewer characters or tokens than this are short.
pub const SHORT_CHARS: usize = 5;
pub const SHORT_TOKENS: usize = 2;
/// Labels with more characters or tokens than this are long.
pub const LONG_CHARS: usize = 30;
pub const LONG_TOKENS: usize = 8;
/// Label text below this many characters is not handed to the detector.
pub const MIN_DETECT_CHARS: usize = 20;
pub const UNKNOWN_LANGUAGE: &str = "unknown";

/// Label-eligible elements of one model and the labels they carry.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ModelLabels {
    pub eligible: u64,
    pub labels: Vec<TokenList>,
}

impl ModelLabels {
    pub fn labeled(&self) -> u64 {
        self.labels.len() as u64
    }
}

/// `None` when the element has none of the label attributes, else its first non-blank value.
fn element_label(name: &Option<String>, data: &Properties, attrs: &[String]) -> Option<Option<String>> {
    let mut eligible = false;
    for attr in attrs {
        let value = if attr == "name" {
            name.as_deref()
        } else {
            match data.get(attr) {
                Some(Scalar::Str(s)) => Some(s.as_str()),
                Some(_) => Some(""),
                None => None,
            }
        };
        if let Some(v) = value {
            eligible = true;
            if !v.trim().is_empty() {
                return Some(Some(v.to_string()));
            }
        }
    }
    eligible.then_some(None)
}

pub fn collect_labels(graph: &IrGraph, cfg: &LexicalMeasures) -> ModelLabels {
    let mut out = ModelLabels::default();
    let mut visit = |label: Option<Option<String>>| {
        if let Some(label) = label {
            out.eligible += 1;
            if let Some(text) = label {
                out.labels.push(tokenize(&text, &cfg.tokenizer));
            }
        }
    };
    if cfg.include_nodes {
        for n in &graph.nodes {
            visit(element_label(&n.name, &n.data, &cfg.label_attributes));
        }
    }
    if cfg.include_edges {
        for e in &graph.edges {
            visit(element_label(&e.name, &e.data, &cfg.label_attributes));
        }
    }
    out
}

fn char_len(label: &TokenList, trim: bool) -> usize {
    if trim {
        label.label.trim().chars().count()
    } else {
        label.label.chars().count()
    }
}

fn ratio(part: u64, whole: u64) -> Option<f64> {
    (whole > 0).then(|| part as f64 / whole as f64)
}

pub fn label_presence(models: &[(String, ModelLabels)]) -> MeasureOutput {
    let eligible: u64 = models.iter().map(|(_, m)| m.eligible).sum();
    let labeled: u64 = models.iter().map(|(_, m)| m.labeled()).sum();
    let presence = ratio(labeled, eligible);
    let score = presence.map(|p| p * 100.0);
    let dataset = MeasureEntry {
        metrics: metrics([
            ("eligible", eligible.into()),
            ("labeled", labeled.into()),
            ("missing", (eligible - labeled).into()),
            ("presence_share", MetricValue::opt_float(presence)),
            ("score", MetricValue::opt_float(score)),
        ]),
        score,
        notice: (eligible == 0).then(|| "no label-eligible elements".to_string()),
    };
    let per_model = models
        .iter()
        .map(|(id, m)| {
            (
                id.clone(),
                metrics([
                    ("eligible", m.eligible.into()),
                    ("labeled", m.labeled().into()),
                    ("missing", (m.eligible - m.labeled()).into()),
                    ("missing_share", MetricValue::opt_float(ratio(m.eligible - m.labeled(), m.eligible))),
                ]),
            )
        })
        .collect();
    MeasureOutput { dataset, per_model }
}

pub fn is_short(chars: usize, tokens: usize) -> bool {
    chars < SHORT_CHARS || tokens < SHORT_TOKENS
}

pub fn is_long(chars: usize, tokens: usize) -> bool {
    chars > LONG_CHARS || tokens > LONG_TOKENS
}

pub fn label_length(models: &[(String, ModelLabels)], trim: bool) -> MeasureOutput {
    let mut per_model = BTreeMap::new();
    let (mut medians_c, mut means_c, mut medians_t, mut means_t) = (vec![], vec![], vec![], vec![]);
    let (mut shorts, mut longs, mut all_c, mut all_t) = (vec![], vec![], vec![], vec![]);
    for (id, m) in models {
        let chars: Vec<f64> = m.labels.iter().map(|l| char_len(l, trim) as f64).collect();
        let tokens: Vec<f64> = m.labels.iter().map(|l| l.tokens.len() as f64).collect();
        let n = m.labeled();
        let short = m.labels.iter().filter(|l| is_short(char_len(l, trim), l.tokens.len())).count() as u64;
        let long = m.labels.iter().filter(|l| is_long(char_len(l, trim), l.tokens.len())).count() as u64;
        let (cd, td) = (describe(&chars), describe(&tokens));
        if n > 0 {
            medians_c.extend(cd.median);
            means_c.extend(cd.mean);
            medians_t.extend(td.median);
            means_t.extend(td.mean);
            shorts.push(short as f64 / n as f64);
            longs.push(long as f64 / n as f64);
        }
        all_c.extend_from_slice(&chars);
        all_t.extend_from_slice(&tokens);
        per_model.insert(
            id.clone(),
            metrics([
                ("n_labels", n.into()),
                ("chars", cd.into()),
                ("tokens", td.into()),
                ("short_share", MetricValue::opt_float(ratio(short, n))),
                ("long_share", MetricValue::opt_float(ratio(long, n))),
            ]),
        );
    }
    let dataset = MeasureEntry {
        metrics: metrics([
            ("n_labels", (all_c.len() as u64).into()),
            ("models_with_labels", (medians_c.len() as u64).into()),
            ("model_median_chars", describe(&medians_c).into()),
            ("model_mean_chars", describe(&means_c).into()),
            ("model_median_tokens", describe(&medians_t).into()),
            ("model_mean_tokens", describe(&means_t).into()),
            ("model_short_share", describe(&shorts).into()),
            ("model_long_share", describe(&longs).into()),
            ("label_chars", describe(&all_c).into()),
            ("label_tokens", describe(&all_t).into()),
        ]),
        score: None,
        notice: all_c.is_empty().then(|| "no labels".to_string()),
    };
    MeasureOutput { dataset, per_model }
}

pub fn word_mix(models: &[(String, ModelLabels)]) -> MeasureOutput {
    let mut per_model = BTreeMap::new();
    let mut shares = Vec::new();
    let (mut single_total, mut labels_total) = (0u64, 0u64);
    for (id, m) in models {
        let single = m.labels.iter().filter(|l| l.tokens.len() == 1).count() as u64;
        let share = ratio(single, m.labeled());
        shares.extend(share);
        single_total += single;
        labels_total += m.labeled();
        per_model.insert(
            id.clone(),
            metrics([
                ("single_word_labels", single.into()),
                ("multi_word_labels", m.labels.iter().filter(|l| l.tokens.len() > 1).count().into()),
                ("single_word_share", MetricValue::opt_float(share)),
            ]),
        );
    }
    let dataset = MeasureEntry {
        metrics: metrics([
            ("model_single_word_share", describe(&shares).into()),
            ("single_word_labels", single_total.into()),
            ("pooled_single_word_share", MetricValue::opt_float(ratio(single_total, labels_total))),
        ]),
        score: None,
        notice: (labels_total == 0).then(|| "no labels".to_string()),
    };
    MeasureOutput { dataset, per_model }
}

/// Total tokens, vocabulary size and `vocab / tokens`.
pub fn diversity<'a>(labels: impl IntoIterator<Item = &'a TokenList>) -> (u64, u64, Option<f64>) {
    let mut total = 0u64;
    let mut vocab = BTreeSet::new();
    for l in labels {
        total += l.tokens.len() as u64;
        vocab.extend(l.tokens.iter().map(String::as_str));
    }
    let v = vocab.len() as u64;
    (total, v, ratio(v, total))
}

pub fn lexical_diversity(models: &[(String, ModelLabels)]) -> MeasureOutput {
    let mut per_model = BTreeMap::new();
    for (id, m) in models {
        let (t, v, ttr) = diversity(&m.labels);
        per_model.insert(
            id.clone(),
            metrics([
                ("total_tokens", t.into()),
                ("vocab_size", v.into()),
                ("ttr", MetricValue::opt_float(ttr)),
            ]),
        );
    }
    let (t, v, ttr) = diversity(models.iter().flat_map(|(_, m)| &m.labels));
    let dataset = MeasureEntry {
        metrics: metrics([
            ("total_tokens", t.into()),
            ("vocab_size", v.into()),
            ("ttr", MetricValue::opt_float(ttr)),
        ]),
        score: None,
        notice: (t == 0).then(|| "no tokens".to_string()),
    };
    MeasureOutput { dataset, per_model }
}

/// Tokens of all labels joined by spaces; camel-case identifiers become words.
pub fn detection_text(m: &ModelLabels) -> String {
    m.labels
        .iter()
        .flat_map(|l| l.tokens.iter().map(String::as_str))
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn predominant_language(m: &ModelLabels, detector: &dyn LanguageDetector) -> String {
    let text = detection_text(m);
    if m.labels.is_empty() || text.chars().count() < MIN_DETECT_CHARS {
        return UNKNOWN_LANGUAGE.to_string();
    }
    detector.detect(&text).unwrap_or_else(|| UNKNOWN_LANGUAGE.to_string())
}

pub fn language_usage(models: &[(String, ModelLabels)], detector: &dyn LanguageDetector) -> MeasureOutput {
    if !detector.available() {
        return MeasureOutput {
            dataset: MeasureEntry {
                metrics: BTreeMap::new(),
                score: None,
                notice: Some(format!("language detector `{}` unavailable; measure skipped", detector.name())),
            },
            per_model: BTreeMap::new(),
        };
    }
    let mut per_model = BTreeMap::new();
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    for (id, m) in models {
        let lang = predominant_language(m, detector);
        *counts.entry(lang.clone()).or_insert(0) += 1;
        per_model.insert(id.clone(), metrics([("predominant_language", lang.into())]));
    }
    let known: Vec<(&String, &u64)> = counts.iter().filter(|(k, _)| *k != UNKNOWN_LANGUAGE).collect();
    let dominant = known
        .iter()
        .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0)))
        .map(|(k, v)| ((*k).clone(), **v));
    let n = models.len() as u64;
    let dataset = MeasureEntry {
        metrics: metrics([
            ("detector", detector.name().into()),
            ("models_by_language", count_map(&counts)),
            ("distinct_languages", known.len().into()),
            ("dominant_language", dominant.as_ref().map(|d| d.0.clone()).into()),
            (
                "dominant_share",
                MetricValue::opt_float(dominant.and_then(|d| ratio(d.1, n))),
            ),
        ]),
        score: None,
        notice: None,
    };
    MeasureOutput { dataset, per_model }
}
