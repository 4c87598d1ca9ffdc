//! D3 Construct coverage: catalog presence and frequency balance.

use std::collections::{BTreeMap, BTreeSet};

use super::stats::describe;
use super::{metrics, MeasureEntry, MeasureOutput};
use crate::model::{count_map, ConstructCatalog, ConstructKind, IrGraph, MetricValue, Num, Properties};

/// Proxy nodes stand in for relationships and are not language constructs.
pub fn is_proxy(data: &Properties) -> bool {
    data.contains_key("proxy_for_edge")
}

/// Construct matches of one model.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ModelConstructs {
    /// Instances per catalog index (an element may match several constructs).
    pub frequency: Vec<u64>,
    pub elements: u64,
    pub unknown_nodes: BTreeMap<String, u64>,
    pub unknown_edges: BTreeMap<String, u64>,
}

impl ModelConstructs {
    pub fn unknown(&self) -> u64 {
        self.unknown_nodes.values().sum::<u64>() + self.unknown_edges.values().sum::<u64>()
    }

    pub fn distinct(&self) -> usize {
        self.frequency.iter().filter(|f| **f > 0).count()
    }
}

pub fn match_constructs(graph: &IrGraph, catalog: &ConstructCatalog) -> ModelConstructs {
    let mut out = ModelConstructs {
        frequency: vec![0; catalog.len()],
        ..Default::default()
    };
    let elements = graph
        .nodes
        .iter()
        .filter(|n| !is_proxy(&n.data))
        .map(|n| (ConstructKind::NodeType, &n.node_type, &n.data))
        .chain(graph.edges.iter().map(|e| (ConstructKind::EdgeType, &e.edge_type, &e.data)));
    for (kind, ty, data) in elements {
        out.elements += 1;
        let mut matched = false;
        for (i, c) in catalog.constructs.iter().enumerate() {
            if c.matches(kind, ty, data) {
                out.frequency[i] += 1;
                matched = true;
            }
        }
        if !matched {
            let bucket = match kind {
                ConstructKind::NodeType => &mut out.unknown_nodes,
                ConstructKind::EdgeType => &mut out.unknown_edges,
            };
            *bucket.entry(ty.clone()).or_insert(0) += 1;
        }
    }
    out
}

/// `coverage_percent * (1 - unknown_share)`.
pub fn presence_score(coverage_percent: f64, unknown_share: f64) -> f64 {
    coverage_percent * (1.0 - unknown_share)
}

/// Normalized Shannon entropy over all catalog constructs; zero-frequency terms contribute 0.
pub fn utilization_entropy(frequency: &[u64]) -> Option<f64> {
    let total: u64 = frequency.iter().sum();
    if frequency.len() < 2 || total == 0 {
        return None;
    }
    let h: f64 = frequency
        .iter()
        .filter(|f| **f > 0)
        .map(|f| {
            let p = *f as f64 / total as f64;
            -p * p.ln()
        })
        .sum();
    Some((h / (frequency.len() as f64).ln()).clamp(0.0, 1.0))
}

fn merge(into: &mut BTreeMap<String, u64>, from: &BTreeMap<String, u64>) {
    for (k, v) in from {
        *into.entry(k.clone()).or_insert(0) += v;
    }
}

pub fn construct_presence(models: &[(String, ModelConstructs)], catalog: &ConstructCatalog) -> MeasureOutput {
    let k = catalog.len();
    let mut observed = vec![false; k];
    let (mut elements, mut unknown_nodes, mut unknown_edges) = (0u64, BTreeMap::new(), BTreeMap::new());
    let mut coverages = Vec::new();
    let mut per_model = BTreeMap::new();
    for (id, m) in models {
        for (i, f) in m.frequency.iter().enumerate() {
            observed[i] |= *f > 0;
        }
        elements += m.elements;
        merge(&mut unknown_nodes, &m.unknown_nodes);
        merge(&mut unknown_edges, &m.unknown_edges);
        let coverage = (k > 0).then(|| m.distinct() as f64 / k as f64);
        coverages.extend(coverage);
        per_model.insert(
            id.clone(),
            metrics([
                ("constructs_used", m.distinct().into()),
                ("coverage_share", MetricValue::opt_float(coverage)),
                ("unknown_elements", m.unknown().into()),
                ("elements", m.elements.into()),
            ]),
        );
    }
    let n_observed = observed.iter().filter(|o| **o).count();
    let coverage = (k > 0).then(|| n_observed as f64 / k as f64);
    let n_unknown: u64 = unknown_nodes.values().sum::<u64>() + unknown_edges.values().sum::<u64>();
    let unknown_share = (elements > 0).then(|| n_unknown as f64 / elements as f64);
    let score = match (coverage, unknown_share) {
        (Some(c), Some(u)) => Some(presence_score(c * 100.0, u)),
        _ => None,
    };

    let mut group_total: BTreeMap<String, u64> = BTreeMap::new();
    let mut group_seen: BTreeMap<String, u64> = BTreeMap::new();
    let mut presence = BTreeMap::new();
    for (c, seen) in catalog.constructs.iter().zip(&observed) {
        *group_total.entry(c.meta.group.clone()).or_insert(0) += 1;
        *group_seen.entry(c.meta.group.clone()).or_insert(0) += u64::from(*seen);
        presence.insert(c.id.clone(), Num::Int(i64::from(*seen)));
    }
    let by_group = group_total
        .iter()
        .map(|(g, t)| (g.clone(), Num::Float(group_seen[g] as f64 / *t as f64)))
        .collect();

    let dataset = MeasureEntry {
        metrics: metrics([
            ("catalog_size", k.into()),
            ("observed_constructs", n_observed.into()),
            ("dataset_coverage", MetricValue::opt_float(coverage)),
            ("coverage_by_group", MetricValue::Map(by_group)),
            ("construct_presence", MetricValue::Map(presence)),
            ("unknown_node_types", count_map(&unknown_nodes)),
            ("unknown_edge_types", count_map(&unknown_edges)),
            ("unknown_node_instances", unknown_nodes.values().sum::<u64>().into()),
            ("unknown_edge_instances", unknown_edges.values().sum::<u64>().into()),
            ("total_elements", elements.into()),
            ("unknown_share", MetricValue::opt_float(unknown_share)),
            ("model_coverage_share", describe(&coverages).into()),
            ("score", MetricValue::opt_float(score)),
        ]),
        score,
        notice: (elements == 0).then(|| "no elements to match".to_string()),
    };
    MeasureOutput { dataset, per_model }
}

pub fn construct_frequency(models: &[(String, ModelConstructs)], catalog: &ConstructCatalog) -> MeasureOutput {
    let k = catalog.len();
    let mut totals = vec![0u64; k];
    let mut per_model = BTreeMap::new();
    for (id, m) in models {
        for (t, f) in totals.iter_mut().zip(&m.frequency) {
            *t += f;
        }
        let used: BTreeMap<String, u64> = catalog
            .constructs
            .iter()
            .zip(&m.frequency)
            .filter(|(_, f)| **f > 0)
            .map(|(c, f)| (c.id.clone(), *f))
            .collect();
        per_model.insert(
            id.clone(),
            metrics([
                ("total_instances", m.frequency.iter().sum::<u64>().into()),
                ("frequency_by_construct", count_map(&used)),
                ("utilization_entropy", MetricValue::opt_float(utilization_entropy(&m.frequency))),
            ]),
        );
    }
    let total: u64 = totals.iter().sum();
    let entropy = utilization_entropy(&totals);
    let score = entropy.map(|e| e * 100.0);
    let freq: BTreeMap<String, u64> = catalog
        .constructs
        .iter()
        .zip(&totals)
        .map(|(c, f)| (c.id.clone(), *f))
        .collect();
    let notice = if k < 2 {
        Some("catalog has fewer than two constructs; entropy undefined".to_string())
    } else if total == 0 {
        Some("no construct instances".to_string())
    } else {
        None
    };
    let dataset = MeasureEntry {
        metrics: metrics([
            ("total_instances", total.into()),
            ("frequency_by_construct", count_map(&freq)),
            ("utilization_entropy", MetricValue::opt_float(entropy)),
            ("score", MetricValue::opt_float(score)),
        ]),
        score,
        notice,
    };
    MeasureOutput { dataset, per_model }
}

/// Constructs never observed, for quick inspection.
pub fn missing_constructs(models: &[(String, ModelConstructs)], catalog: &ConstructCatalog) -> BTreeSet<String> {
    catalog
        .constructs
        .iter()
        .enumerate()
        .filter(|(i, _)| models.iter().all(|(_, m)| m.frequency[*i] == 0))
        .map(|(_, c)| c.id.clone())
        .collect()
}
