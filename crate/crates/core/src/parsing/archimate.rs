//! ArchiMate models in the Archi tool storage format (`*.archimate`).
//!
//! Elements become nodes and relationships become edges; diagram models are
//! dropped. Relationships that use another relationship as an endpoint keep
//! their original endpoints, which are materialized as proxy nodes.

use std::collections::{BTreeMap, HashMap, HashSet};

use roxmltree::{Document, Node};

use super::xml::{decode_xml, local};
use super::{ModelParser, ParseFailure, ParseOptions, ParseOutcome, ParsedModel, ParserDescriptor};
use crate::model::{Diagnostic, DiagnosticKind, IrEdge, IrGraph, IrNode, Properties, Scalar};

const XSI_NS: &str = "http://www.w3.org/2001/XMLSchema-instance";

/// Attributes mapped to dedicated IR fields rather than copied into `data`.
const RESERVED_ATTRS: [&str; 5] = ["type", "id", "name", "source", "target"];

pub struct ArchimateParser {
    descriptor: ParserDescriptor,
}

impl ArchimateParser {
    pub fn new() -> Self {
        ArchimateParser {
            descriptor: ParserDescriptor {
                key: "ArchiMate-Archi".to_string(),
                language: "ArchiMate".to_string(),
                accepted_extensions: vec!["archimate".to_string()],
            },
        }
    }
}

impl Default for ArchimateParser {
    fn default() -> Self {
        Self::new()
    }
}

impl ModelParser for ArchimateParser {
    fn descriptor(&self) -> &ParserDescriptor {
        &self.descriptor
    }

    fn parse(&self, content: &[u8], source_path: &str, options: &ParseOptions) -> ParseOutcome {
        parse_archimate(content, source_path, options)
    }
}

/// Canonical ArchiMate 3.x spelling for legacy and British variants.
pub fn normalize_type(t: &str) -> String {
    match t {
        "Realisation" => "Realization".to_string(),
        "Specialisation" => "Specialization".to_string(),
        "UsedBy" => "Serving".to_string(),
        _ => match t.strip_prefix("Infrastructure") {
            Some(rest) if !rest.is_empty() => format!("Technology{rest}"),
            _ => t.to_string(),
        },
    }
}

/// Namespace-free `xsi:type` of an element tag.
fn xsi_type<'a>(node: Node<'a, '_>) -> Option<&'a str> {
    node.attribute((XSI_NS, "type"))
        .or_else(|| {
            node.attributes()
                .find(|a| a.name() == "type" && a.namespace().is_some())
                .map(|a| a.value())
        })
        .map(local)
        .filter(|t| !t.is_empty())
}

fn is_diagram(raw_type: &str, node: Node) -> bool {
    let prefixed = node
        .attribute((XSI_NS, "type"))
        .is_some_and(|t| t.starts_with("canvas:"));
    prefixed || raw_type.ends_with("Model")
}

fn scalar_attr(value: &str) -> Scalar {
    match value {
        "true" => Scalar::Bool(true),
        "false" => Scalar::Bool(false),
        other => Scalar::Str(other.to_string()),
    }
}

fn child_text(node: Node, name: &str) -> Option<String> {
    node.children()
        .find(|c| c.is_element() && c.tag_name().name() == name)
        .map(|c| c.text().unwrap_or("").to_string())
}

fn element_data(node: Node) -> Properties {
    let mut data = Properties::new();
    for attr in node.attributes() {
        if attr.namespace().is_some() || RESERVED_ATTRS.contains(&attr.name()) {
            continue;
        }
        data.insert(attr.name().to_string(), scalar_attr(attr.value()));
    }
    // The junction kind is an unprefixed `type` attribute.
    if let Some(kind) = node.attributes().find(|a| a.name() == "type" && a.namespace().is_none()) {
        data.insert("type".to_string(), Scalar::Str(kind.value().to_string()));
    }
    if let Some(doc) = child_text(node, "documentation").or_else(|| node.attribute("documentation").map(str::to_string)) {
        data.insert("documentation".to_string(), Scalar::Str(doc));
    }
    for prop in node
        .children()
        .filter(|c| c.is_element() && c.tag_name().name() == "property")
    {
        if let Some(key) = prop.attribute("key") {
            let value = prop.attribute("value").unwrap_or("");
            data.insert(format!("property.{key}"), Scalar::Str(value.to_string()));
        }
    }
    data
}

struct RawRelationship {
    id: String,
    edge_type: String,
    name: String,
    source: Option<String>,
    target: Option<String>,
    data: Properties,
}

fn collect_elements<'a, 'i>(parent: Node<'a, 'i>, out: &mut Vec<Node<'a, 'i>>) {
    for child in parent.children().filter(|c| c.is_element()) {
        match child.tag_name().name() {
            "folder" => collect_elements(child, out),
            "element" => out.push(child),
            _ => {}
        }
    }
}

pub fn parse_archimate(content: &[u8], _source_path: &str, options: &ParseOptions) -> ParseOutcome {
    let text = decode_xml(content).map_err(|e| ParseFailure(format!("XML syntax error: {e}")))?;
    let doc = Document::parse(&text).map_err(|e| ParseFailure(format!("XML syntax error: {e}")))?;
    let root = doc.root_element();
    let root_name = root.tag_name().name();
    if root_name != "model" && root_name != "ArchimateModel" {
        return Err(ParseFailure(format!("unsupported root element `{root_name}`")));
    }

    let mut graph = IrGraph::default();
    for key in ["name", "id", "version"] {
        if let Some(v) = root.attribute(key) {
            graph.attributes.insert(key.to_string(), Scalar::Str(v.to_string()));
        }
    }
    if let Some(purpose) = child_text(root, "purpose").or_else(|| root.attribute("purpose").map(str::to_string)) {
        graph.attributes.insert("purpose".to_string(), Scalar::Str(purpose));
    }

    let mut tags = Vec::new();
    collect_elements(root, &mut tags);

    let mut diagnostics = Vec::new();
    let mut n_skipped = 0u64;
    let mut seen_ids = HashSet::new();
    let mut node_index: HashSet<String> = HashSet::new();
    let mut relationships = Vec::new();
    let map_type = |t: &str| {
        if options.normalize_types {
            normalize_type(t)
        } else {
            t.to_string()
        }
    };

    for tag in tags {
        let raw_type = xsi_type(tag);
        if raw_type.is_some_and(|t| is_diagram(t, tag)) {
            continue;
        }
        let (Some(raw_type), Some(id)) = (raw_type, tag.attribute("id").filter(|i| !i.is_empty())) else {
            let what = tag.attribute("id").unwrap_or("<no id>");
            diagnostics.push(
                Diagnostic::new(
                    DiagnosticKind::CompatibilityAdaptation,
                    format!("element `{what}` lacks a type or id"),
                )
                .element(what)
                .skipped(),
            );
            n_skipped += 1;
            continue;
        };
        if !seen_ids.insert(id.to_string()) {
            diagnostics.push(
                Diagnostic::new(DiagnosticKind::DuplicateId, format!("duplicate id `{id}`"))
                    .element(id)
                    .skipped(),
            );
            n_skipped += 1;
            continue;
        }
        let name = tag.attribute("name").unwrap_or("").to_string();
        match raw_type.strip_suffix("Relationship") {
            Some(rel_type) if !rel_type.is_empty() => relationships.push(RawRelationship {
                id: id.to_string(),
                edge_type: map_type(rel_type),
                name,
                source: tag.attribute("source").map(str::to_string),
                target: tag.attribute("target").map(str::to_string),
                data: element_data(tag),
            }),
            _ => {
                node_index.insert(id.to_string());
                graph.nodes.push(IrNode {
                    id: id.to_string(),
                    node_type: map_type(raw_type),
                    name: Some(name),
                    data: element_data(tag),
                });
            }
        }
    }

    let rel_types: HashMap<String, String> = relationships
        .iter()
        .map(|r| (r.id.clone(), r.edge_type.clone()))
        .collect();
    let mut proxies: BTreeMap<String, IrNode> = BTreeMap::new();

    for rel in relationships {
        let mut resolved = true;
        for (role, endpoint) in [("source", &rel.source), ("target", &rel.target)] {
            let Some(endpoint) = endpoint else {
                diagnostics.push(
                    Diagnostic::new(
                        DiagnosticKind::MissingEdgeEndpoint,
                        format!("relationship `{}` has no {role}", rel.id),
                    )
                    .element(&rel.id)
                    .skipped(),
                );
                resolved = false;
                break;
            };
            if node_index.contains(endpoint) {
                continue;
            }
            if let Some(target_type) = rel_types.get(endpoint) {
                diagnostics.push(
                    Diagnostic::new(
                        DiagnosticKind::UnresolvedReference,
                        format!("relationship `{}` uses relationship `{endpoint}` as its {role}", rel.id),
                    )
                    .element(&rel.id),
                );
                proxies.entry(endpoint.clone()).or_insert_with(|| {
                    let mut data = Properties::new();
                    data.insert("proxy_for_edge".to_string(), Scalar::Str(endpoint.clone()));
                    IrNode {
                        id: endpoint.clone(),
                        node_type: target_type.clone(),
                        name: None,
                        data,
                    }
                });
                continue;
            }
            diagnostics.push(
                Diagnostic::new(
                    DiagnosticKind::MissingEdgeEndpoint,
                    format!("relationship `{}` references unknown {role} `{endpoint}`", rel.id),
                )
                .element(&rel.id)
                .skipped(),
            );
            resolved = false;
            break;
        }
        if !resolved {
            n_skipped += 1;
            continue;
        }
        let is_containment = rel.edge_type == "Composition" || rel.edge_type == "Aggregation";
        graph.edges.push(IrEdge {
            id: rel.id,
            edge_type: rel.edge_type,
            name: Some(rel.name),
            source: rel.source.unwrap_or_default(),
            target: rel.target.unwrap_or_default(),
            is_containment,
            data: rel.data,
        });
    }

    graph.nodes.extend(proxies.into_values());
    Ok(ParsedModel {
        graph,
        diagnostics,
        n_skipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wrap(body: &str) -> String {
        format!(
            r#"<?xml version="1.0" encoding="UTF-8"?>
<archimate:model xmlns:xsi="http://www.w3.org/2001/XMLSchema-instance" xmlns:archimate="http://www.archimatetool.com/archimate" name="Test" id="m1" version="4.9.0">
{body}
</archimate:model>"#
        )
    }

    fn parse(text: &str) -> ParseOutcome {
        parse_archimate(text.as_bytes(), "t.archimate", &ParseOptions::default())
    }

    #[test]
    fn two_elements_and_serving() {
        let m = parse(&wrap(
            r#"<folder name="Business" type="business">
  <element xsi:type="archimate:BusinessActor" name="Customer" id="a"><documentation>buyer</documentation></element>
  <element xsi:type="archimate:BusinessService" name="Ordering" id="s"><property key="owner" value="sales"/></element>
</folder>
<folder name="Relations" type="relations">
  <element xsi:type="archimate:ServingRelationship" id="r" source="s" target="a"/>
</folder>
<folder name="Views" type="diagrams">
  <element xsi:type="archimate:ArchimateDiagramModel" name="Default View" id="v">
    <child xsi:type="archimate:DiagramObject" id="d1" archimateElement="a"/>
  </element>
</folder>"#,
        ))
        .unwrap();
        assert_eq!(m.graph.nodes.len(), 2);
        assert_eq!(m.graph.edges.len(), 1);
        let e = &m.graph.edges[0];
        assert_eq!((e.edge_type.as_str(), e.is_containment), ("Serving", false));
        assert!(m.diagnostics.is_empty() && m.n_skipped == 0);
        assert_eq!(m.graph.nodes[0].data["documentation"], Scalar::from("buyer"));
        assert_eq!(m.graph.nodes[1].data["property.owner"], Scalar::from("sales"));
        assert_eq!(m.graph.attributes["name"], Scalar::from("Test"));
        assert!(m.graph.validate().is_empty());
    }

    #[test]
    fn composition_is_containment() {
        let m = parse(&wrap(
            r#"<folder type="application">
  <element xsi:type="archimate:ApplicationComponent" name="A" id="a"/>
  <element xsi:type="archimate:ApplicationComponent" name="B" id="b"/>
  <element xsi:type="archimate:CompositionRelationship" id="r1" source="a" target="b"/>
  <element xsi:type="archimate:AggregationRelationship" id="r2" source="a" target="b"/>
  <element xsi:type="archimate:FlowRelationship" id="r3" source="a" target="b"/>
</folder>"#,
        ))
        .unwrap();
        let flags: Vec<bool> = m.graph.edges.iter().map(|e| e.is_containment).collect();
        assert_eq!(flags, vec![true, true, false]);
    }

    #[test]
    fn relationship_endpoint_becomes_proxy() {
        let m = parse(&wrap(
            r#"<folder type="other">
  <element xsi:type="archimate:BusinessObject" name="O" id="o"/>
  <element xsi:type="archimate:BusinessRole" name="R" id="p"/>
  <element xsi:type="archimate:AssociationRelationship" id="r1" source="o" target="p"/>
  <element xsi:type="archimate:AssociationRelationship" id="r2" source="o" target="r1"/>
</folder>"#,
        ))
        .unwrap();
        assert_eq!(m.graph.edges.len(), 2);
        assert_eq!(m.graph.nodes.len(), 3);
        let proxy = m.graph.nodes.iter().find(|n| n.id == "r1").unwrap();
        assert_eq!(proxy.node_type, "Association");
        assert_eq!(proxy.data["proxy_for_edge"], Scalar::from("r1"));
        assert_eq!(m.diagnostics.len(), 1);
        assert_eq!(m.diagnostics[0].kind, DiagnosticKind::UnresolvedReference);
        assert!(!m.diagnostics[0].led_to_skip);
        assert!(m.graph.validate().is_empty());
    }

    #[test]
    fn duplicate_and_dangling() {
        let m = parse(&wrap(
            r#"<folder type="business">
  <element xsi:type="archimate:BusinessActor" name="First" id="a"/>
  <element xsi:type="archimate:BusinessRole" name="Second" id="a"/>
  <element xsi:type="archimate:AssignmentRelationship" id="r" source="a" target="ghost"/>
</folder>"#,
        ))
        .unwrap();
        assert_eq!(m.graph.nodes.len(), 1);
        assert_eq!(m.graph.nodes[0].name.as_deref(), Some("First"));
        assert!(m.graph.edges.is_empty());
        assert_eq!(m.n_skipped, 2);
        let kinds: Vec<_> = m.diagnostics.iter().map(|d| d.kind).collect();
        assert_eq!(kinds, vec![DiagnosticKind::DuplicateId, DiagnosticKind::MissingEdgeEndpoint]);
        assert!(m.diagnostics.iter().all(|d| d.led_to_skip));
    }

    #[test]
    fn failures() {
        assert!(parse("this is not xml").is_err());
        assert!(parse("<root/>").unwrap_err().0.contains("root"));
        assert!(parse(&wrap("<folder>")).is_err());
    }

    #[test]
    fn normalization_is_opt_in() {
        let text = wrap(
            r#"<folder>
  <element xsi:type="archimate:InfrastructureService" name="S" id="s"/>
  <element xsi:type="archimate:Node" name="N" id="n"/>
  <element xsi:type="archimate:UsedByRelationship" id="r1" source="s" target="n"/>
  <element xsi:type="archimate:RealisationRelationship" id="r2" source="n" target="s"/>
</folder>"#,
        );
        let raw = parse(&text).unwrap();
        assert_eq!(raw.graph.nodes[0].node_type, "InfrastructureService");
        assert_eq!(raw.graph.edges[0].edge_type, "UsedBy");
        let norm = parse_archimate(text.as_bytes(), "t", &ParseOptions { normalize_types: true }).unwrap();
        assert_eq!(norm.graph.nodes[0].node_type, "TechnologyService");
        let types: Vec<_> = norm.graph.edges.iter().map(|e| e.edge_type.as_str()).collect();
        assert_eq!(types, vec!["Serving", "Realization"]);
    }

    #[test]
    fn junction_kind_and_legacy_root() {
        let m = parse(
            r#"<archimate:ArchimateModel xmlns:xsi="http://www.w3.org/2001/XMLSchema-instance" xmlns:archimate="http://www.bolton.ac.uk/archimate" name="Old">
<folder><element xsi:type="archimate:Junction" id="j" type="or"/></folder>
</archimate:ArchimateModel>"#,
        )
        .unwrap();
        assert_eq!(m.graph.nodes[0].node_type, "Junction");
        assert_eq!(m.graph.nodes[0].data["type"], Scalar::from("or"));
        assert_eq!(m.graph.nodes[0].name.as_deref(), Some(""));
    }
}
