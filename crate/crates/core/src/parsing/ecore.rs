//! Ecore metamodels (`*.ecore` XMI).
//!
//! The XMI is read directly. Node ids are EMF-style URI fragments
//! (`/`, `//Book`, `//Book/title`), so intra-file references such as
//! `#//Book` resolve against the same index. Implicit structure is made
//! explicit as edges: containment of classifiers, features, operations,
//! parameters, literals and annotations, inheritance, references and typing.

use std::collections::{BTreeMap, HashMap, HashSet};

use roxmltree::{Document, Node};

use super::xml::{decode_xml, local};
use super::{ModelParser, ParseFailure, ParseOptions, ParseOutcome, ParsedModel, ParserDescriptor};
use crate::model::{Diagnostic, DiagnosticKind, IrEdge, IrGraph, IrNode, Properties, Scalar};

const XSI_NS: &str = "http://www.w3.org/2001/XMLSchema-instance";
const XMI_NS: &str = "http://www.omg.org/XMI";
const ECORE_URI: &str = "http://www.eclipse.org/emf/2002/Ecore";

/// Ecore metaclasses that can appear as reference targets; every other
/// builtin name is a data type.
const ECORE_METACLASSES: [&str; 20] = [
    "EObject",
    "EModelElement",
    "ENamedElement",
    "ETypedElement",
    "EClassifier",
    "EClass",
    "EDataType",
    "EEnum",
    "EEnumLiteral",
    "EPackage",
    "EFactory",
    "EStructuralFeature",
    "EAttribute",
    "EReference",
    "EOperation",
    "EParameter",
    "EAnnotation",
    "EStringToStringMapEntry",
    "EGenericType",
    "ETypeParameter",
];

pub struct EcoreParser {
    descriptor: ParserDescriptor,
}

impl EcoreParser {
    pub fn new() -> Self {
        EcoreParser {
            descriptor: ParserDescriptor {
                key: "Ecore".to_string(),
                language: "Ecore".to_string(),
                accepted_extensions: vec!["ecore".to_string()],
            },
        }
    }
}

impl Default for EcoreParser {
    fn default() -> Self {
        Self::new()
    }
}

impl ModelParser for EcoreParser {
    fn descriptor(&self) -> &ParserDescriptor {
        &self.descriptor
    }

    fn parse(&self, content: &[u8], source_path: &str, _options: &ParseOptions) -> ParseOutcome {
        parse_ecore(content, source_path)
    }
}

/// An edge whose target is only known after every node has been indexed.
struct Pending {
    edge_type: &'static str,
    source: String,
    target_ref: String,
    element: String,
    name: Option<String>,
    is_containment: bool,
    data: Properties,
}

#[derive(Default)]
struct Builder {
    graph: IrGraph,
    diagnostics: Vec<Diagnostic>,
    n_skipped: u64,
    /// Fragment paths and xmi:id aliases → node id.
    index: HashMap<String, String>,
    /// Every path taken, including those of references (which are edges).
    paths: HashSet<String>,
    local_uris: HashSet<String>,
    pending: Vec<Pending>,
    builtins: BTreeMap<String, IrNode>,
}

fn is_tag(node: &Node, name: &str) -> bool {
    node.is_element() && node.tag_name().name() == name
}

fn xsi_type<'a>(node: Node<'a, '_>) -> Option<&'a str> {
    node.attribute((XSI_NS, "type")).map(local)
}

fn flag(node: Node, attr: &str, default: bool) -> bool {
    node.attribute(attr).map_or(default, |v| v == "true")
}

fn ref_tokens(value: &str) -> Vec<String> {
    let tokens: Vec<&str> = value.split_whitespace().collect();
    if tokens.iter().any(|t| t.contains('#')) {
        tokens.into_iter().filter(|t| t.contains('#')).map(str::to_string).collect()
    } else {
        tokens.into_iter().filter(|t| !t.contains(':')).map(str::to_string).collect()
    }
}

/// References given either as an attribute or as child elements with `href`.
fn refs(node: Node, feature: &str) -> Vec<String> {
    let mut out = node.attribute(feature).map(ref_tokens).unwrap_or_default();
    for child in node.children().filter(|c| is_tag(c, feature)) {
        if let Some(href) = child.attribute("href") {
            out.extend(ref_tokens(href));
        }
    }
    out
}

fn has_type_arguments(node: Node) -> bool {
    node.children().any(|c| is_tag(&c, "eTypeArguments"))
}

enum TypeRef {
    None,
    Plain(String),
    Generic,
}

/// The type of a typed element, looking through a plain `eGenericType`.
fn type_ref(node: Node) -> TypeRef {
    if let Some(first) = refs(node, "eType").into_iter().next() {
        return TypeRef::Plain(first);
    }
    let Some(generic) = node.children().find(|c| is_tag(c, "eGenericType")) else {
        return TypeRef::None;
    };
    if has_type_arguments(generic) || generic.attribute("eTypeParameter").is_some() {
        return TypeRef::Generic;
    }
    refs(generic, "eClassifier")
        .into_iter()
        .next()
        .map_or(TypeRef::None, TypeRef::Plain)
}

impl Builder {
    fn warn(&mut self, kind: DiagnosticKind, message: String, element: &str) {
        self.diagnostics.push(Diagnostic::new(kind, message).element(element));
    }

    fn skip(&mut self, kind: DiagnosticKind, message: String, element: &str) {
        self.diagnostics
            .push(Diagnostic::new(kind, message).element(element).skipped());
        self.n_skipped += 1;
    }

    fn add_edge(
        &mut self,
        edge_type: &str,
        source: &str,
        target: &str,
        is_containment: bool,
        name: Option<String>,
        data: Properties,
    ) {
        let id = format!("e{}", self.graph.edges.len());
        self.graph.edges.push(IrEdge {
            id,
            edge_type: edge_type.to_string(),
            name,
            source: source.to_string(),
            target: target.to_string(),
            is_containment,
            data,
        });
    }

    /// Claims `path`; a second claim is a duplicate and the element is skipped.
    fn claim(&mut self, path: &str, what: &str) -> bool {
        if self.paths.insert(path.to_string()) {
            true
        } else {
            self.skip(
                DiagnosticKind::DuplicateId,
                format!("duplicate {what} `{path}`"),
                path,
            );
            false
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn add_node(
        &mut self,
        elem: Node,
        id: String,
        node_type: &str,
        name: Option<String>,
        data: Properties,
        parent: Option<(&str, &str)>,
        positional: Option<String>,
    ) -> Option<String> {
        if !self.claim(&id, node_type) {
            return None;
        }
        self.index.insert(id.clone(), id.clone());
        if let Some(alias) = positional {
            self.index.entry(alias).or_insert_with(|| id.clone());
        }
        if let Some(xmi_id) = elem.attribute((XMI_NS, "id")) {
            self.index.entry(xmi_id.to_string()).or_insert_with(|| id.clone());
        }
        self.graph.nodes.push(IrNode {
            id: id.clone(),
            node_type: node_type.to_string(),
            name,
            data,
        });
        if let Some((parent_id, edge_type)) = parent {
            self.add_edge(edge_type, parent_id, &id, true, None, Properties::new());
        }
        Some(id)
    }

    fn walk_children(&mut self, elem: Node, parent_id: &str, annotations_of: &str) {
        let mut annotation_seen: HashMap<String, usize> = HashMap::new();
        for child in elem.children().filter(|c| is_tag(c, "eAnnotations")) {
            self.walk_annotation(child, parent_id, annotations_of, &mut annotation_seen);
        }
    }

    fn walk_annotation(
        &mut self,
        elem: Node,
        owner_id: &str,
        path_parent: &str,
        seen: &mut HashMap<String, usize>,
    ) {
        let source = elem.attribute("source").unwrap_or("");
        let n = seen.entry(source.to_string()).or_insert(0);
        let suffix = if *n == 0 { String::new() } else { format!(".{n}") };
        *n += 1;
        let id = format!("{path_parent}/%{source}%{suffix}");
        let mut data = Properties::new();
        data.insert("source".to_string(), Scalar::from(source));
        for detail in elem.children().filter(|c| is_tag(c, "details")) {
            if let Some(key) = detail.attribute("key") {
                data.insert(
                    format!("detail.{key}"),
                    Scalar::from(detail.attribute("value").unwrap_or("")),
                );
            }
        }
        if let Some(id) = self.add_node(elem, id, "EAnnotation", None, data, Some((owner_id, "Contains_Annotation")), None) {
            self.walk_children(elem, &id, &id);
        }
    }

    fn walk_package(&mut self, elem: Node, id: String, parent: Option<&str>, positional: Option<String>) {
        let mut data = Properties::new();
        for key in ["nsURI", "nsPrefix"] {
            if let Some(v) = elem.attribute(key) {
                data.insert(key.to_string(), Scalar::from(v));
            }
        }
        if let Some(uri) = elem.attribute("nsURI").filter(|u| !u.is_empty()) {
            self.local_uris.insert(uri.to_string());
        }
        let name = Some(elem.attribute("name").unwrap_or("").to_string());
        let Some(id) = self.add_node(elem, id, "EPackage", name, data, parent.map(|p| (p, "Contains_Subpackage")), positional) else {
            return;
        };
        let mut counters: HashMap<&str, usize> = HashMap::new();
        for child in elem.children().filter(|c| c.is_element()) {
            let feature = child.tag_name().name();
            let index = *counters.entry(feature).and_modify(|n| *n += 1).or_insert(0);
            let (path, positional) = child_paths(&id, child, feature, index);
            match feature {
                "eClassifiers" => self.walk_classifier(child, path, &id, positional),
                "eSubpackages" => self.walk_package(child, path, Some(&id), Some(positional)),
                _ => {}
            }
        }
        self.walk_children(elem, &id, &id);
    }

    fn walk_classifier(&mut self, elem: Node, path: String, package_id: &str, positional: String) {
        let name = Some(elem.attribute("name").unwrap_or("").to_string());
        let parent = Some((package_id, "Contains_Classifier"));
        let Some(kind) = xsi_type(elem) else {
            self.skip(
                DiagnosticKind::CompatibilityAdaptation,
                format!("classifier `{path}` has no xsi:type"),
                &path,
            );
            return;
        };
        match kind {
            "EClass" => {
                let mut data = Properties::new();
                data.insert("abstract".into(), Scalar::Bool(flag(elem, "abstract", false)));
                data.insert("interface".into(), Scalar::Bool(flag(elem, "interface", false)));
                if let Some(id) = self.add_node(elem, path, "EClass", name, data, parent, Some(positional)) {
                    self.walk_class(elem, &id);
                }
            }
            "EDataType" | "EEnum" => {
                let mut data = Properties::new();
                if let Some(v) = elem.attribute("instanceClassName") {
                    data.insert("instanceClassName".into(), Scalar::from(v));
                }
                if let Some(id) = self.add_node(elem, path, kind, name, data, parent, Some(positional)) {
                    self.walk_type_parameters(elem, &id);
                    for (i, lit) in elem.children().filter(|c| is_tag(c, "eLiterals")).enumerate() {
                        let (lit_path, lit_pos) = child_paths(&id, lit, "eLiterals", i);
                        let mut data = Properties::new();
                        let value = lit
                            .attribute("value")
                            .and_then(|v| v.parse::<i64>().ok())
                            .unwrap_or(i as i64);
                        data.insert("value".into(), Scalar::Int(value));
                        if let Some(l) = lit.attribute("literal") {
                            data.insert("literal".into(), Scalar::from(l));
                        }
                        let lit_name = Some(lit.attribute("name").unwrap_or("").to_string());
                        if let Some(lit_id) = self.add_node(lit, lit_path, "EEnumLiteral", lit_name, data, Some((&id, "Contains_Literal")), Some(lit_pos)) {
                            self.walk_children(lit, &lit_id, &lit_id);
                        }
                    }
                    self.walk_children(elem, &id, &id);
                }
            }
            other => self.skip(
                DiagnosticKind::CompatibilityAdaptation,
                format!("unsupported classifier type `{other}` at `{path}`"),
                &path,
            ),
        }
    }

    fn walk_type_parameters(&mut self, elem: Node, owner: &str) {
        for tp in elem.children().filter(|c| is_tag(c, "eTypeParameters")) {
            let name = tp.attribute("name").unwrap_or("");
            self.skip(
                DiagnosticKind::UnsupportedGenericReference,
                format!("type parameter `{name}` of `{owner}` is not supported"),
                &format!("{owner}/{name}"),
            );
        }
    }

    fn walk_class(&mut self, elem: Node, class_id: &str) {
        self.walk_type_parameters(elem, class_id);
        let mut seen_supers = HashSet::new();
        let mut supers = refs(elem, "eSuperTypes");
        for generic in elem.children().filter(|c| is_tag(c, "eGenericSuperTypes")) {
            if has_type_arguments(generic) || generic.attribute("eTypeParameter").is_some() {
                self.skip(
                    DiagnosticKind::UnsupportedGenericReference,
                    format!("generic supertype of `{class_id}` is not supported"),
                    class_id,
                );
            } else {
                supers.extend(refs(generic, "eClassifier"));
            }
        }
        for target_ref in supers {
            if !seen_supers.insert(target_ref.clone()) {
                self.skip(
                    DiagnosticKind::DuplicateId,
                    format!("duplicate supertype `{target_ref}` on `{class_id}`"),
                    class_id,
                );
                continue;
            }
            self.pending.push(Pending {
                edge_type: "Generalization",
                source: class_id.to_string(),
                target_ref,
                element: class_id.to_string(),
                name: None,
                is_containment: false,
                data: Properties::new(),
            });
        }

        let mut counters: HashMap<&str, usize> = HashMap::new();
        let mut op_names: HashMap<String, usize> = HashMap::new();
        for child in elem.children().filter(|c| c.is_element()) {
            let feature = child.tag_name().name();
            if feature != "eStructuralFeatures" && feature != "eOperations" {
                continue;
            }
            let index = *counters.entry(feature).and_modify(|n| *n += 1).or_insert(0);
            let (mut path, positional) = child_paths(class_id, child, feature, index);
            if feature == "eOperations" {
                // Overloads are legal; EMF disambiguates repeated names with `.N`.
                let n = op_names.entry(path.clone()).or_insert(0);
                if *n > 0 {
                    path = format!("{path}.{n}");
                }
                *n += 1;
                self.walk_operation(child, path, class_id, positional);
            } else {
                self.walk_feature(child, path, class_id, positional);
            }
        }
        self.walk_children(elem, class_id, class_id);
    }

    fn bounds(&mut self, elem: Node, path: &str, data: &mut Properties) -> (i64, i64) {
        let read = |attr: &str, default: i64, this: &mut Self| match elem.attribute(attr) {
            None => default,
            Some(v) => v.trim().parse::<i64>().unwrap_or_else(|_| {
                this.warn(
                    DiagnosticKind::CompatibilityAdaptation,
                    format!("malformed {attr} `{v}` on `{path}`; using {default}"),
                    path,
                );
                default
            }),
        };
        let lower = read("lowerBound", 0, self);
        let upper = read("upperBound", 1, self);
        data.insert("lowerBound".into(), Scalar::Int(lower));
        data.insert("upperBound".into(), Scalar::Int(upper));
        (lower, upper)
    }

    fn feature_data(&mut self, elem: Node, path: &str) -> Properties {
        let mut data = Properties::new();
        let (lower, upper) = self.bounds(elem, path, &mut data);
        data.insert("ordered".into(), Scalar::Bool(flag(elem, "ordered", true)));
        data.insert("unique".into(), Scalar::Bool(flag(elem, "unique", true)));
        data.insert("required".into(), Scalar::Bool(lower >= 1));
        data.insert("many".into(), Scalar::Bool(upper == -1 || upper > 1));
        data.insert("derived".into(), Scalar::Bool(flag(elem, "derived", false)));
        data
    }

    fn walk_feature(&mut self, elem: Node, path: String, class_id: &str, positional: String) {
        let Some(kind) = xsi_type(elem) else {
            self.skip(
                DiagnosticKind::CompatibilityAdaptation,
                format!("feature `{path}` has no xsi:type"),
                &path,
            );
            return;
        };
        let ret_type = type_ref(elem);
        if matches!(ret_type, TypeRef::Generic) {
            self.skip(
                DiagnosticKind::UnsupportedGenericReference,
                format!("generic type of `{path}` is not supported"),
                &path,
            );
            return;
        }
        let name = elem.attribute("name").unwrap_or("").to_string();
        match kind {
            "EAttribute" => {
                let mut data = self.feature_data(elem, &path);
                data.insert("id".into(), Scalar::Bool(flag(elem, "iD", false) || flag(elem, "id", false)));
                let Some(id) = self.add_node(elem, path, "EAttribute", Some(name), data, Some((class_id, "Contains_Feature")), Some(positional)) else {
                    return;
                };
                if let TypeRef::Plain(target_ref) = ret_type {
                    self.push_typed(&id, target_ref);
                }
                self.walk_children(elem, &id, &id);
            }
            "EReference" => {
                if !self.claim(&path, "EReference") {
                    return;
                }
                let mut data = self.feature_data(elem, &path);
                let containment = flag(elem, "containment", false);
                data.insert("containment".into(), Scalar::Bool(containment));
                data.insert("resolveProxies".into(), Scalar::Bool(flag(elem, "resolveProxies", true)));
                let opposite = refs(elem, "eOpposite").into_iter().next();
                data.insert("bidirectional".into(), Scalar::Bool(opposite.is_some()));
                if let Some(o) = opposite {
                    data.insert("eOpposite".into(), Scalar::Str(o));
                }
                if elem.attribute("eKeys").is_some() || elem.children().any(|c| is_tag(&c, "eKeys")) {
                    self.warn(
                        DiagnosticKind::CompatibilityAdaptation,
                        format!("eKeys on `{path}` dropped"),
                        &path,
                    );
                }
                // Annotations of a reference hang off its owning class.
                self.walk_children(elem, class_id, &path);
                let TypeRef::Plain(target_ref) = ret_type else {
                    self.skip(
                        DiagnosticKind::MissingEdgeEndpoint,
                        format!("reference `{path}` has no type"),
                        &path,
                    );
                    return;
                };
                self.pending.push(Pending {
                    edge_type: if containment { "Containment" } else { "Reference" },
                    source: class_id.to_string(),
                    target_ref,
                    element: path,
                    name: Some(name),
                    is_containment: containment,
                    data,
                });
            }
            other => self.skip(
                DiagnosticKind::CompatibilityAdaptation,
                format!("unsupported feature type `{other}` at `{path}`"),
                &path,
            ),
        }
    }

    fn push_typed(&mut self, source: &str, target_ref: String) {
        self.pending.push(Pending {
            edge_type: "Typed",
            source: source.to_string(),
            target_ref,
            element: source.to_string(),
            name: None,
            is_containment: false,
            data: Properties::new(),
        });
    }

    fn walk_operation(&mut self, elem: Node, path: String, class_id: &str, positional: String) {
        let ret_type = type_ref(elem);
        if matches!(ret_type, TypeRef::Generic) {
            self.skip(
                DiagnosticKind::UnsupportedGenericReference,
                format!("generic return type of `{path}` is not supported"),
                &path,
            );
            return;
        }
        let mut data = Properties::new();
        self.bounds(elem, &path, &mut data);
        let name = Some(elem.attribute("name").unwrap_or("").to_string());
        let Some(id) = self.add_node(elem, path, "EOperation", name, data, Some((class_id, "Contains_Operation")), Some(positional)) else {
            return;
        };
        if let TypeRef::Plain(target_ref) = ret_type {
            self.push_typed(&id, target_ref);
        }
        self.walk_type_parameters(elem, &id);
        for (i, param) in elem.children().filter(|c| is_tag(c, "eParameters")).enumerate() {
            let (p_path, p_pos) = child_paths(&id, param, "eParameters", i);
            let p_type = type_ref(param);
            if matches!(p_type, TypeRef::Generic) {
                self.skip(
                    DiagnosticKind::UnsupportedGenericReference,
                    format!("generic type of parameter `{p_path}` is not supported"),
                    &p_path,
                );
                continue;
            }
            let mut p_data = Properties::new();
            self.bounds(param, &p_path, &mut p_data);
            let p_name = Some(param.attribute("name").unwrap_or("").to_string());
            if let Some(p_id) = self.add_node(param, p_path, "EParameter", p_name, p_data, Some((&id, "Contains_Parameter")), Some(p_pos)) {
                if let TypeRef::Plain(target_ref) = p_type {
                    self.push_typed(&p_id, target_ref);
                }
                self.walk_children(param, &p_id, &p_id);
            }
        }
        self.walk_children(elem, &id, &id);
    }

    fn builtin(&mut self, name: &str) -> String {
        let id = format!("{ECORE_URI}#//{name}");
        self.builtins.entry(id.clone()).or_insert_with(|| {
            let node_type = if ECORE_METACLASSES.contains(&name) { "EClass" } else { "EDataType" };
            let mut data = Properties::new();
            data.insert("builtin".into(), Scalar::Bool(true));
            IrNode {
                id: id.clone(),
                node_type: node_type.to_string(),
                name: Some(name.to_string()),
                data,
            }
        });
        id
    }

    fn resolve(&mut self, token: &str) -> Result<String, (DiagnosticKind, String)> {
        let (uri, fragment) = match token.split_once('#') {
            Some((u, f)) => (u, f),
            None => ("", token),
        };
        if uri.is_empty() || self.local_uris.contains(uri) {
            return self.index.get(fragment).cloned().ok_or_else(|| {
                (
                    DiagnosticKind::MissingEdgeEndpoint,
                    format!("no element `{fragment}` in this file"),
                )
            });
        }
        if uri.contains("emf/2002/Ecore") || uri.ends_with("Ecore.ecore") {
            let name = fragment.trim_start_matches('/');
            if !name.is_empty() && !name.contains('/') {
                return Ok(self.builtin(name));
            }
        }
        Err((
            DiagnosticKind::UnresolvedReference,
            format!("external reference `{token}` cannot be resolved"),
        ))
    }

    fn resolve_pending(&mut self) {
        for p in std::mem::take(&mut self.pending) {
            match self.resolve(&p.target_ref) {
                Ok(target) => self.add_edge(p.edge_type, &p.source, &target, p.is_containment, p.name, p.data),
                Err((kind, message)) => self.skip(
                    kind,
                    format!("{} edge from `{}`: {message}", p.edge_type, p.element),
                    &p.element,
                ),
            }
        }
        let builtins = std::mem::take(&mut self.builtins);
        self.graph.nodes.extend(builtins.into_values());
    }
}

/// Name-based fragment path and positional alias of a contained element.
fn child_paths(parent: &str, elem: Node, feature: &str, index: usize) -> (String, String) {
    let positional = format!("{parent}/@{feature}.{index}");
    match elem.attribute("name").filter(|n| !n.is_empty()) {
        Some(name) => (format!("{parent}/{name}"), positional),
        None => (positional.clone(), positional),
    }
}

pub fn parse_ecore(content: &[u8], _source_path: &str) -> ParseOutcome {
    let text = decode_xml(content).map_err(|e| ParseFailure(format!("XMI syntax error: {e}")))?;
    let doc = Document::parse(&text).map_err(|e| ParseFailure(format!("XMI syntax error: {e}")))?;
    let root = doc.root_element();
    let packages: Vec<Node> = match root.tag_name().name() {
        "EPackage" => vec![root],
        "XMI" => root.children().filter(|c| is_tag(c, "EPackage")).collect(),
        _ => Vec::new(),
    };
    if packages.is_empty() {
        return Err(ParseFailure(format!(
            "no EPackage root (found `{}`)",
            root.tag_name().name()
        )));
    }

    let mut b = Builder::default();
    if let Some(first) = packages.first() {
        for key in ["name", "nsURI", "nsPrefix"] {
            if let Some(v) = first.attribute(key) {
                b.graph.attributes.insert(key.to_string(), Scalar::from(v));
            }
        }
    }
    let multi = packages.len() > 1;
    for (i, pkg) in packages.into_iter().enumerate() {
        let id = if multi { format!("/{i}") } else { "/".to_string() };
        b.walk_package(pkg, id, None, None);
    }
    b.resolve_pending();
    Ok(ParsedModel {
        graph: b.graph,
        diagnostics: b.diagnostics,
        n_skipped: b.n_skipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wrap(body: &str) -> String {
        format!(
            r#"<?xml version="1.0" encoding="UTF-8"?>
<ecore:EPackage xmi:version="2.0" xmlns:xmi="http://www.omg.org/XMI" xmlns:xsi="http://www.w3.org/2001/XMLSchema-instance"
    xmlns:ecore="http://www.eclipse.org/emf/2002/Ecore" name="lib" nsURI="http://lib/1.0" nsPrefix="lib">
{body}
</ecore:EPackage>"#
        )
    }

    fn parse(body: &str) -> ParsedModel {
        parse_ecore(wrap(body).as_bytes(), "t.ecore").unwrap()
    }

    fn count(g: &IrGraph, t: &str) -> usize {
        g.edges.iter().filter(|e| e.edge_type == t).count()
    }

    #[test]
    fn package_with_inheritance() {
        let m = parse(
            r##"<eClassifiers xsi:type="ecore:EClass" name="Item"/>
<eClassifiers xsi:type="ecore:EClass" name="Book" eSuperTypes="#//Item"/>"##,
        );
        assert_eq!(m.graph.nodes.len(), 3);
        assert_eq!(count(&m.graph, "Contains_Classifier"), 2);
        assert_eq!(count(&m.graph, "Generalization"), 1);
        assert_eq!(m.graph.edges.len(), 3);
        let g = m.graph.edges.iter().find(|e| e.edge_type == "Generalization").unwrap();
        assert_eq!((g.source.as_str(), g.target.as_str()), ("//Book", "//Item"));
        assert!(m.diagnostics.is_empty());
    }

    #[test]
    fn abstract_flag_and_features() {
        let m = parse(
            r##"<eClassifiers xsi:type="ecore:EClass" name="Shape" abstract="true">
  <eStructuralFeatures xsi:type="ecore:EAttribute" name="tags" upperBound="-1" unique="false"
      eType="ecore:EDataType http://www.eclipse.org/emf/2002/Ecore#//EString"/>
  <eStructuralFeatures xsi:type="ecore:EAttribute" name="key" lowerBound="1" iD="true"
      eType="ecore:EDataType http://www.eclipse.org/emf/2002/Ecore#//EString"/>
</eClassifiers>"##,
        );
        let shape = m.graph.nodes.iter().find(|n| n.id == "//Shape").unwrap();
        assert_eq!(shape.data["abstract"], Scalar::Bool(true));
        let tags = m.graph.nodes.iter().find(|n| n.id == "//Shape/tags").unwrap();
        assert_eq!(tags.data["many"], Scalar::Bool(true));
        assert_eq!(tags.data["unique"], Scalar::Bool(false));
        assert_eq!(tags.data["required"], Scalar::Bool(false));
        let key = m.graph.nodes.iter().find(|n| n.id == "//Shape/key").unwrap();
        assert_eq!(key.data["required"], Scalar::Bool(true));
        assert_eq!(key.data["id"], Scalar::Bool(true));
        let builtin = m.graph.nodes.iter().find(|n| n.name.as_deref() == Some("EString")).unwrap();
        assert_eq!(builtin.node_type, "EDataType");
        assert_eq!(count(&m.graph, "Typed"), 2);
        assert!(m.graph.validate().is_empty());
    }

    #[test]
    fn containment_reference() {
        let m = parse(
            r##"<eClassifiers xsi:type="ecore:EClass" name="Library">
  <eStructuralFeatures xsi:type="ecore:EReference" name="books" upperBound="-1" eType="#//Book" containment="true"/>
  <eStructuralFeatures xsi:type="ecore:EReference" name="owner" eType="#//Book" eOpposite="#//Book/lib"/>
</eClassifiers>
<eClassifiers xsi:type="ecore:EClass" name="Book"/>"##,
        );
        let c = m.graph.edges.iter().find(|e| e.edge_type == "Containment").unwrap();
        assert!(c.is_containment);
        assert_eq!(c.name.as_deref(), Some("books"));
        assert_eq!(c.data["many"], Scalar::Bool(true));
        let r = m.graph.edges.iter().find(|e| e.edge_type == "Reference").unwrap();
        assert!(!r.is_containment);
        assert_eq!(r.data["bidirectional"], Scalar::Bool(true));
        assert_eq!(r.data["eOpposite"], Scalar::from("#//Book/lib"));
        assert_eq!(m.graph.nodes.len(), 3);
    }

    #[test]
    fn generics_are_skipped_with_warning() {
        let m = parse(
            r##"<eClassifiers xsi:type="ecore:EClass" name="Box">
  <eTypeParameters name="T"/>
  <eStructuralFeatures xsi:type="ecore:EReference" name="content">
    <eGenericType eTypeParameter="#//Box/T"/>
  </eStructuralFeatures>
</eClassifiers>
<eClassifiers xsi:type="ecore:EClass" name="BookBox">
  <eGenericSuperTypes eClassifier="#//Box"><eTypeArguments eClassifier="#//BookBox"/></eGenericSuperTypes>
</eClassifiers>"##,
        );
        assert_eq!(m.n_skipped, 3);
        assert!(m
            .diagnostics
            .iter()
            .all(|d| d.kind == DiagnosticKind::UnsupportedGenericReference && d.led_to_skip));
        assert_eq!(count(&m.graph, "Generalization"), 0);
    }

    #[test]
    fn plain_generic_type_is_a_type() {
        let m = parse(
            r##"<eClassifiers xsi:type="ecore:EClass" name="A">
  <eStructuralFeatures xsi:type="ecore:EReference" name="b"><eGenericType eClassifier="#//B"/></eStructuralFeatures>
</eClassifiers>
<eClassifiers xsi:type="ecore:EClass" name="B"/>"##,
        );
        assert_eq!(count(&m.graph, "Reference"), 1);
        assert!(m.diagnostics.is_empty());
    }

    #[test]
    fn external_and_dangling_references() {
        let m = parse(
            r##"<eClassifiers xsi:type="ecore:EClass" name="A" eSuperTypes="other.ecore#//Base">
  <eStructuralFeatures xsi:type="ecore:EReference" name="x" eType="#//Nowhere"/>
  <eStructuralFeatures xsi:type="ecore:EReference" name="y">
    <eType xsi:type="ecore:EClass" href="http://www.eclipse.org/emf/2002/Ecore#//EObject"/>
  </eStructuralFeatures>
</eClassifiers>"##,
        );
        let kinds: Vec<_> = m.diagnostics.iter().map(|d| d.kind).collect();
        assert_eq!(
            kinds,
            vec![DiagnosticKind::UnresolvedReference, DiagnosticKind::MissingEdgeEndpoint]
        );
        assert_eq!(m.n_skipped, 2);
        let eobject = m.graph.nodes.iter().find(|n| n.name.as_deref() == Some("EObject")).unwrap();
        assert_eq!(eobject.node_type, "EClass");
        assert!(m.graph.validate().is_empty());
    }

    #[test]
    fn duplicates_and_ekeys() {
        let m = parse(
            r##"<eClassifiers xsi:type="ecore:EClass" name="A" eSuperTypes="#//B #//B">
  <eStructuralFeatures xsi:type="ecore:EReference" name="b" eType="#//B" eKeys="#//B/k"/>
</eClassifiers>
<eClassifiers xsi:type="ecore:EClass" name="B"/>
<eClassifiers xsi:type="ecore:EClass" name="B"/>"##,
        );
        let kinds: Vec<_> = m.diagnostics.iter().map(|d| d.kind).collect();
        assert_eq!(kinds.iter().filter(|k| **k == DiagnosticKind::DuplicateId).count(), 2);
        assert_eq!(kinds.iter().filter(|k| **k == DiagnosticKind::CompatibilityAdaptation).count(), 1);
        assert_eq!(m.n_skipped, 2);
        assert_eq!(count(&m.graph, "Reference"), 1);
        assert_eq!(m.graph.nodes.iter().filter(|n| n.node_type == "EClass").count(), 2);
    }

    #[test]
    fn operations_enums_annotations_and_subpackages() {
        let m = parse(
            r##"<eAnnotations source="http://www.eclipse.org/emf/2002/GenModel"><details key="documentation" value="d"/></eAnnotations>
<eClassifiers xsi:type="ecore:EEnum" name="Kind"><eLiterals name="A"/><eLiterals name="B" value="5"/></eClassifiers>
<eClassifiers xsi:type="ecore:EClass" name="C">
  <eOperations name="run" eType="#//Kind"><eParameters name="n" eType="ecore:EDataType http://www.eclipse.org/emf/2002/Ecore#//EInt"/></eOperations>
  <eOperations name="run"/>
</eClassifiers>
<eSubpackages name="sub" nsURI="http://lib/sub" nsPrefix="sub">
  <eClassifiers xsi:type="ecore:EClass" name="D" eSuperTypes="#//C"/>
</eSubpackages>"##,
        );
        assert!(m.diagnostics.is_empty(), "{:?}", m.diagnostics);
        let ids: HashSet<&str> = m.graph.nodes.iter().map(|n| n.id.as_str()).collect();
        for id in ["/", "//Kind", "//Kind/A", "//Kind/B", "//C", "//C/run", "//C/run.1", "//C/run/n", "//sub", "//sub/D"] {
            assert!(ids.contains(id), "missing {id}");
        }
        let ann = m.graph.nodes.iter().find(|n| n.node_type == "EAnnotation").unwrap();
        assert_eq!(ann.name, None);
        assert_eq!(ann.data["detail.documentation"], Scalar::from("d"));
        let b = m.graph.nodes.iter().find(|n| n.id == "//Kind/B").unwrap();
        assert_eq!(b.data["value"], Scalar::Int(5));
        for t in ["Contains_Literal", "Contains_Operation", "Contains_Parameter", "Contains_Subpackage", "Contains_Annotation"] {
            assert!(count(&m.graph, t) >= 1, "{t}");
        }
        assert!(m.graph.edges.iter().filter(|e| e.edge_type.starts_with("Contains_")).all(|e| e.is_containment));
        assert!(m.graph.validate().is_empty());
    }

    #[test]
    fn xmi_wrapped_and_invalid_roots() {
        let xmi = r#"<xmi:XMI xmi:version="2.0" xmlns:xmi="http://www.omg.org/XMI" xmlns:ecore="http://www.eclipse.org/emf/2002/Ecore">
<ecore:EPackage name="a"/><ecore:EPackage name="b"/></xmi:XMI>"#;
        let m = parse_ecore(xmi.as_bytes(), "x").unwrap();
        let ids: Vec<&str> = m.graph.nodes.iter().map(|n| n.id.as_str()).collect();
        assert_eq!(ids, vec!["/0", "/1"]);
        assert!(parse_ecore(b"<foo/>", "x").unwrap_err().0.contains("EPackage"));
        assert!(parse_ecore(b"<ecore:EPackage", "x").is_err());
    }

    #[test]
    fn xmi_id_references() {
        let m = parse(
            r#"<eClassifiers xsi:type="ecore:EClass" name="A" xmi:id="_a"/>
<eClassifiers xsi:type="ecore:EClass" name="B" eSuperTypes="_a"/>"#,
        );
        assert_eq!(count(&m.graph, "Generalization"), 1);
    }
}
