//! D4 Size: element counts, degree, connectivity and containment depth.

use std::collections::{BTreeMap, HashMap};

use super::stats::{describe, mean, quantile};
use super::{metrics, MeasureEntry, MeasureOutput, Metrics};
use crate::model::{IrGraph, MetricValue};

/// Edges as index pairs; edges with an unknown endpoint are ignored.
fn indexed_edges(g: &IrGraph, containment_only: bool) -> Vec<(usize, usize)> {
    let index: HashMap<&str, usize> = g.nodes.iter().enumerate().map(|(i, n)| (n.id.as_str(), i)).collect();
    g.edges
        .iter()
        .filter(|e| !containment_only || e.is_containment)
        .filter_map(|e| Some((*index.get(e.source.as_str())?, *index.get(e.target.as_str())?)))
        .collect()
}

/// Undirected degrees; a self-loop contributes 2.
pub fn degrees(g: &IrGraph) -> Vec<u64> {
    let mut deg = vec![0u64; g.nodes.len()];
    for (s, t) in indexed_edges(g, false) {
        deg[s] += 1;
        deg[t] += 1;
    }
    deg
}

#[derive(Clone, Debug, PartialEq)]
pub struct Connectivity {
    pub n_components: u64,
    pub largest_component_size: u64,
    pub n_isolated: u64,
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Weakly connected components.
pub fn connectivity(g: &IrGraph) -> Connectivity {
    let n = g.nodes.len();
    let mut parent: Vec<usize> = (0..n).collect();
    for (s, t) in indexed_edges(g, false) {
        let (a, b) = (find(&mut parent, s), find(&mut parent, t));
        if a != b {
            parent[a.max(b)] = a.min(b);
        }
    }
    let mut sizes: HashMap<usize, u64> = HashMap::new();
    for i in 0..n {
        *sizes.entry(find(&mut parent, i)).or_insert(0) += 1;
    }
    Connectivity {
        n_components: sizes.len() as u64,
        largest_component_size: sizes.values().copied().max().unwrap_or(0),
        n_isolated: degrees(g).iter().filter(|d| **d == 0).count() as u64,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Containment {
    pub depths: Vec<u64>,
    pub max_depth: u64,
    pub n_roots: u64,
    pub n_contained: u64,
    pub depth_capped: bool,
}

/// Depth along containment edges (parent = source) by relaxation for at most
/// `n_nodes` rounds. If the last round still changed a depth, a cycle is
/// present: the result is flagged and depths are clamped to `n_nodes`.
pub fn containment_depth(g: &IrGraph) -> Containment {
    let n = g.nodes.len();
    let edges = indexed_edges(g, true);
    let mut has_parent = vec![false; n];
    for (_, c) in &edges {
        has_parent[*c] = true;
    }
    let mut depth = vec![0u64; n];
    let mut capped = false;
    for round in 1..=n {
        let mut changed = false;
        for (p, c) in &edges {
            if depth[*p] + 1 > depth[*c] {
                depth[*c] = depth[*p] + 1;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        if round == n {
            capped = true;
        }
    }
    for d in depth.iter_mut() {
        *d = (*d).min(n as u64);
    }
    let n_contained = has_parent.iter().filter(|h| **h).count() as u64;
    Containment {
        max_depth: depth.iter().copied().max().unwrap_or(0),
        depths: depth,
        n_roots: n as u64 - n_contained,
        n_contained,
        depth_capped: capped,
    }
}

fn ratio(a: f64, b: usize) -> Option<f64> {
    (b > 0).then(|| a / b as f64)
}

fn dataset_stats(per_model: &BTreeMap<String, Metrics>, keys: &[&str]) -> Metrics {
    keys.iter()
        .map(|k| {
            let values: Vec<f64> = per_model.values().filter_map(|m| m.get(*k).and_then(MetricValue::as_f64)).collect();
            (k.to_string(), describe(&values).into())
        })
        .collect()
}

fn output(per_model: BTreeMap<String, Metrics>, keys: &[&str], extra: Metrics) -> MeasureOutput {
    let mut m = dataset_stats(&per_model, keys);
    m.extend(extra);
    m.insert("n_models".into(), per_model.len().into());
    MeasureOutput {
        dataset: MeasureEntry {
            metrics: m,
            score: None,
            notice: None,
        },
        per_model,
    }
}

pub fn model_size(graphs: &[&IrGraph]) -> MeasureOutput {
    let per_model = graphs
        .iter()
        .map(|g| {
            let (n, e) = (g.nodes.len(), g.edges.len());
            (
                g.id.clone(),
                metrics([
                    ("n_nodes", n.into()),
                    ("n_edges", e.into()),
                    ("n_elements", (n + e).into()),
                    ("edge_node_ratio", MetricValue::opt_float(ratio(e as f64, n))),
                ]),
            )
        })
        .collect();
    output(per_model, &["n_nodes", "n_edges", "n_elements", "edge_node_ratio"], Metrics::new())
}

pub fn degree(graphs: &[&IrGraph]) -> MeasureOutput {
    let per_model = graphs
        .iter()
        .map(|g| {
            let mut deg: Vec<f64> = degrees(g).into_iter().map(|d| d as f64).collect();
            deg.sort_by(f64::total_cmp);
            (
                g.id.clone(),
                metrics([
                    ("mean_degree", MetricValue::opt_float(mean(&deg))),
                    ("median_degree", MetricValue::opt_float(quantile(&deg, 0.5))),
                    ("max_degree", MetricValue::opt_float(deg.last().copied())),
                ]),
            )
        })
        .collect();
    output(per_model, &["mean_degree", "median_degree", "max_degree"], Metrics::new())
}

pub fn connectivity_measure(graphs: &[&IrGraph]) -> MeasureOutput {
    let mut single = 0u64;
    let per_model = graphs
        .iter()
        .map(|g| {
            let c = connectivity(g);
            single += u64::from(c.n_components == 1);
            (
                g.id.clone(),
                metrics([
                    ("n_components", c.n_components.into()),
                    ("largest_component_size", c.largest_component_size.into()),
                    ("n_isolated", c.n_isolated.into()),
                    ("isolated_share", MetricValue::opt_float(ratio(c.n_isolated as f64, g.nodes.len()))),
                ]),
            )
        })
        .collect();
    output(
        per_model,
        &["n_components", "largest_component_size", "n_isolated", "isolated_share"],
        metrics([("single_component_models", single.into())]),
    )
}

pub fn containment_measure(graphs: &[&IrGraph]) -> MeasureOutput {
    let mut capped = 0u64;
    let per_model = graphs
        .iter()
        .map(|g| {
            let c = containment_depth(g);
            capped += u64::from(c.depth_capped);
            let n = g.nodes.len();
            (
                g.id.clone(),
                metrics([
                    ("max_depth", c.max_depth.into()),
                    ("mean_depth", MetricValue::opt_float(ratio(c.depths.iter().sum::<u64>() as f64, n))),
                    ("contained_share", MetricValue::opt_float(ratio(c.n_contained as f64, n))),
                    ("n_roots", c.n_roots.into()),
                    ("depth_capped", c.depth_capped.into()),
                ]),
            )
        })
        .collect();
    output(
        per_model,
        &["max_depth", "mean_depth", "contained_share", "n_roots"],
        metrics([("models_depth_capped", capped.into())]),
    )
}
