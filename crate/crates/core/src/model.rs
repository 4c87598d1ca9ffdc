//! Shared domain types: the typed-graph intermediate representation, parse
//! diagnostics, construct catalogs and metric values.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A property value attached to graphs, nodes and edges.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Bool(bool),
    Int(i64),
    Float(f64),
    Str(String),
}

impl Scalar {
    /// Value equality used by catalog matching; integers and floats compare numerically.
    pub fn matches(&self, other: &Scalar) -> bool {
        match (self, other) {
            (Scalar::Int(a), Scalar::Float(b)) | (Scalar::Float(b), Scalar::Int(a)) => {
                (*a as f64) == *b
            }
            _ => self == other,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            Scalar::Str(s) => Some(s),
            _ => None,
        }
    }
}

impl From<bool> for Scalar {
    fn from(v: bool) -> Self {
        Scalar::Bool(v)
    }
}

impl From<i64> for Scalar {
    fn from(v: i64) -> Self {
        Scalar::Int(v)
    }
}

impl From<&str> for Scalar {
    fn from(v: &str) -> Self {
        Scalar::Str(v.to_string())
    }
}

impl From<String> for Scalar {
    fn from(v: String) -> Self {
        Scalar::Str(v)
    }
}

pub type Properties = BTreeMap<String, Scalar>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IrNode {
    pub id: String,
    #[serde(rename = "type")]
    pub node_type: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default)]
    pub data: Properties,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IrEdge {
    pub id: String,
    #[serde(rename = "type")]
    pub edge_type: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub source: String,
    pub target: String,
    pub is_containment: bool,
    #[serde(default)]
    pub data: Properties,
}

/// One parsed model in the language-neutral graph form.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct IrGraph {
    pub id: String,
    pub source_path: String,
    pub language: String,
    #[serde(default)]
    pub attributes: Properties,
    pub nodes: Vec<IrNode>,
    pub edges: Vec<IrEdge>,
}

/// A broken [`IrGraph`] invariant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IrViolation {
    DuplicateNodeId(String),
    DuplicateEdgeId(String),
    EmptyNodeType(String),
    DanglingEndpoint { edge: String, endpoint: String },
}

impl fmt::Display for IrViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IrViolation::DuplicateNodeId(id) => write!(f, "duplicate node id `{id}`"),
            IrViolation::DuplicateEdgeId(id) => write!(f, "duplicate edge id `{id}`"),
            IrViolation::EmptyNodeType(id) => write!(f, "node `{id}` has an empty type"),
            IrViolation::DanglingEndpoint { edge, endpoint } => {
                write!(f, "edge `{edge}` references unknown node `{endpoint}`")
            }
        }
    }
}

impl IrGraph {
    pub fn validate(&self) -> Vec<IrViolation> {
        let mut violations = Vec::new();
        let mut node_ids = HashSet::with_capacity(self.nodes.len());
        for node in &self.nodes {
            if !node_ids.insert(node.id.as_str()) {
                violations.push(IrViolation::DuplicateNodeId(node.id.clone()));
            }
            if node.node_type.is_empty() {
                violations.push(IrViolation::EmptyNodeType(node.id.clone()));
            }
        }
        let mut edge_ids = HashSet::with_capacity(self.edges.len());
        for edge in &self.edges {
            if !edge_ids.insert(edge.id.as_str()) {
                violations.push(IrViolation::DuplicateEdgeId(edge.id.clone()));
            }
            for endpoint in [&edge.source, &edge.target] {
                if !node_ids.contains(endpoint.as_str()) {
                    violations.push(IrViolation::DanglingEndpoint {
                        edge: edge.id.clone(),
                        endpoint: endpoint.clone(),
                    });
                }
            }
        }
        violations
    }

    pub fn n_elements(&self) -> usize {
        self.nodes.len() + self.edges.len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum DiagnosticKind {
    UnresolvedReference,
    DuplicateId,
    MissingEdgeEndpoint,
    CompatibilityAdaptation,
    UnsupportedGenericReference,
}

impl DiagnosticKind {
    pub fn as_str(self) -> &'static str {
        match self {
            DiagnosticKind::UnresolvedReference => "UNRESOLVED_REFERENCE",
            DiagnosticKind::DuplicateId => "DUPLICATE_ID",
            DiagnosticKind::MissingEdgeEndpoint => "MISSING_EDGE_ENDPOINT",
            DiagnosticKind::CompatibilityAdaptation => "COMPATIBILITY_ADAPTATION",
            DiagnosticKind::UnsupportedGenericReference => "UNSUPPORTED_GENERIC_REFERENCE",
        }
    }
}

impl fmt::Display for DiagnosticKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A parser warning. `led_to_skip` means the element is absent from the IR.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    #[serde(rename = "type")]
    pub kind: DiagnosticKind,
    pub message: String,
    #[serde(default)]
    pub element_id: Option<String>,
    pub led_to_skip: bool,
}

impl Diagnostic {
    pub fn new(kind: DiagnosticKind, message: impl Into<String>) -> Self {
        Diagnostic {
            kind,
            message: message.into(),
            element_id: None,
            led_to_skip: false,
        }
    }

    pub fn element(mut self, id: impl Into<String>) -> Self {
        self.element_id = Some(id.into());
        self
    }

    pub fn skipped(mut self) -> Self {
        self.led_to_skip = true;
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParseStatus {
    Success,
    Partial,
    Failure,
}

impl ParseStatus {
    pub const ALL: [ParseStatus; 3] = [ParseStatus::Success, ParseStatus::Partial, ParseStatus::Failure];

    pub fn as_str(self) -> &'static str {
        match self {
            ParseStatus::Success => "success",
            ParseStatus::Partial => "partial",
            ParseStatus::Failure => "failure",
        }
    }
}

impl fmt::Display for ParseStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Per-model outcome of the parse stage.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParseRecord {
    pub model_id: String,
    pub source_path: String,
    pub status: ParseStatus,
    pub warnings: Vec<Diagnostic>,
    pub n_loaded: u64,
    pub n_skipped: u64,
    pub parse_time_ms: f64,
    pub source_bytes: u64,
    pub ir_bytes: Option<u64>,
    pub error_msg: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstructKind {
    NodeType,
    EdgeType,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstructMeta {
    pub group: String,
    #[serde(flatten)]
    pub extra: BTreeMap<String, serde_json::Value>,
}

/// A matchable language construct: element kind, IR type and data predicates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstructDef {
    pub id: String,
    pub kind: ConstructKind,
    pub match_type: String,
    #[serde(default)]
    pub match_data_equals: Properties,
    pub meta: ConstructMeta,
}

impl ConstructDef {
    pub fn matches(&self, kind: ConstructKind, element_type: &str, data: &Properties) -> bool {
        self.kind == kind
            && self.match_type == element_type
            && self
                .match_data_equals
                .iter()
                .all(|(k, v)| data.get(k).is_some_and(|actual| actual.matches(v)))
    }

    pub fn matches_node(&self, node: &IrNode) -> bool {
        self.matches(ConstructKind::NodeType, &node.node_type, &node.data)
    }

    pub fn matches_edge(&self, edge: &IrEdge) -> bool {
        self.matches(ConstructKind::EdgeType, &edge.edge_type, &edge.data)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstructCatalog {
    pub language: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub constructs: Vec<ConstructDef>,
}

impl ConstructCatalog {
    pub fn from_json(text: &str) -> Result<Self> {
        let catalog: ConstructCatalog =
            serde_json::from_str(text).map_err(|e| Error::InvalidCatalog(e.to_string()))?;
        catalog.validate()?;
        Ok(catalog)
    }

    pub fn validate(&self) -> Result<()> {
        let mut seen = HashSet::new();
        for construct in &self.constructs {
            if !seen.insert(construct.id.as_str()) {
                return Err(Error::InvalidCatalog(format!(
                    "duplicate construct id `{}`",
                    construct.id
                )));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.constructs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constructs.is_empty()
    }
}

/// Integer or float, kept apart so counts serialize without a fractional part.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Num {
    Int(i64),
    Float(f64),
}

impl Num {
    pub fn as_f64(self) -> f64 {
        match self {
            Num::Int(v) => v as f64,
            Num::Float(v) => v,
        }
    }
}

/// Summary of a numeric sample. All statistics are `None` when `count == 0`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistributionStats {
    pub min: Option<f64>,
    pub max: Option<f64>,
    pub mean: Option<f64>,
    pub median: Option<f64>,
    pub p75: Option<f64>,
    pub count: u64,
}

/// A single metric value at model or dataset level.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MetricValue {
    Null,
    Bool(bool),
    Int(i64),
    Float(f64),
    Text(String),
    Distribution(DistributionStats),
    Map(BTreeMap<String, Num>),
}

impl MetricValue {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            MetricValue::Int(v) => Some(*v as f64),
            MetricValue::Float(v) => Some(*v),
            _ => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            MetricValue::Text(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_distribution(&self) -> Option<&DistributionStats> {
        match self {
            MetricValue::Distribution(d) => Some(d),
            _ => None,
        }
    }

    pub fn as_map(&self) -> Option<&BTreeMap<String, Num>> {
        match self {
            MetricValue::Map(m) => Some(m),
            _ => None,
        }
    }

    pub fn opt_float(v: Option<f64>) -> Self {
        v.map_or(MetricValue::Null, MetricValue::Float)
    }
}

impl From<u64> for MetricValue {
    fn from(v: u64) -> Self {
        MetricValue::Int(v as i64)
    }
}

impl From<usize> for MetricValue {
    fn from(v: usize) -> Self {
        MetricValue::Int(v as i64)
    }
}

impl From<f64> for MetricValue {
    fn from(v: f64) -> Self {
        MetricValue::Float(v)
    }
}

impl From<bool> for MetricValue {
    fn from(v: bool) -> Self {
        MetricValue::Bool(v)
    }
}

impl From<&str> for MetricValue {
    fn from(v: &str) -> Self {
        MetricValue::Text(v.to_string())
    }
}

impl From<String> for MetricValue {
    fn from(v: String) -> Self {
        MetricValue::Text(v)
    }
}

impl From<DistributionStats> for MetricValue {
    fn from(v: DistributionStats) -> Self {
        MetricValue::Distribution(v)
    }
}

impl<T: Into<MetricValue>> From<Option<T>> for MetricValue {
    fn from(v: Option<T>) -> Self {
        v.map_or(MetricValue::Null, Into::into)
    }
}

pub fn count_map<'a, I>(counts: I) -> MetricValue
where
    I: IntoIterator<Item = (&'a String, &'a u64)>,
{
    MetricValue::Map(
        counts
            .into_iter()
            .map(|(k, v)| (k.clone(), Num::Int(*v as i64)))
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn node(id: &str, ty: &str) -> IrNode {
        IrNode {
            id: id.into(),
            node_type: ty.into(),
            name: None,
            data: Properties::new(),
        }
    }

    fn edge(id: &str, s: &str, t: &str) -> IrEdge {
        IrEdge {
            id: id.into(),
            edge_type: "Reference".into(),
            name: None,
            source: s.into(),
            target: t.into(),
            is_containment: false,
            data: Properties::new(),
        }
    }

    #[test]
    fn validate_reports_each_violation() {
        let graph = IrGraph {
            nodes: vec![node("a", "EClass"), node("a", ""), node("b", "EClass")],
            edges: vec![edge("e", "a", "b"), edge("e", "a", "zz")],
            ..Default::default()
        };
        let v = graph.validate();
        assert!(v.contains(&IrViolation::DuplicateNodeId("a".into())));
        assert!(v.contains(&IrViolation::EmptyNodeType("a".into())));
        assert!(v.contains(&IrViolation::DuplicateEdgeId("e".into())));
        assert!(v.contains(&IrViolation::DanglingEndpoint {
            edge: "e".into(),
            endpoint: "zz".into()
        }));
        assert_eq!(v.len(), 4);
    }

    #[test]
    fn construct_matching_requires_kind_type_and_data() {
        let def = ConstructDef {
            id: "ecore:EClass_Abstract".into(),
            kind: ConstructKind::NodeType,
            match_type: "EClass".into(),
            match_data_equals: [("abstract".to_string(), Scalar::Bool(true))].into(),
            meta: ConstructMeta {
                group: "modifier".into(),
                extra: BTreeMap::new(),
            },
        };
        let mut n = node("c", "EClass");
        assert!(!def.matches_node(&n));
        n.data.insert("abstract".into(), Scalar::Bool(false));
        assert!(!def.matches_node(&n));
        n.data.insert("abstract".into(), Scalar::Bool(true));
        assert!(def.matches_node(&n));
        let mut e = edge("x", "a", "b");
        e.edge_type = "EClass".into();
        e.data = n.data.clone();
        assert!(!def.matches_edge(&e));
    }

    #[test]
    fn scalar_numeric_match() {
        assert!(Scalar::Int(1).matches(&Scalar::Float(1.0)));
        assert!(!Scalar::Int(1).matches(&Scalar::Str("1".into())));
    }

    #[test]
    fn catalog_rejects_duplicate_ids() {
        let text = r#"{"language":"X","constructs":[
            {"id":"a","kind":"node_type","match_type":"A","match_data_equals":{},"meta":{"group":"g"}},
            {"id":"a","kind":"edge_type","match_type":"B","meta":{"group":"g"}}]}"#;
        assert!(matches!(
            ConstructCatalog::from_json(text),
            Err(Error::InvalidCatalog(_))
        ));
    }

    #[test]
    fn metric_value_shapes_survive_json() {
        let values = vec![
            MetricValue::Null,
            MetricValue::Int(3),
            MetricValue::Float(0.5),
            MetricValue::Text("en".into()),
            MetricValue::Distribution(DistributionStats {
                min: Some(1.0),
                max: Some(3.0),
                mean: Some(2.0),
                median: Some(2.0),
                p75: Some(2.5),
                count: 3,
            }),
            MetricValue::Distribution(DistributionStats::default()),
            MetricValue::Map([("a".to_string(), Num::Int(2)), ("b".to_string(), Num::Float(0.25))].into()),
        ];
        for v in values {
            let text = serde_json::to_string(&v).unwrap();
            let back: MetricValue = serde_json::from_str(&text).unwrap();
            assert_eq!(back, v, "{text}");
        }
    }
}
