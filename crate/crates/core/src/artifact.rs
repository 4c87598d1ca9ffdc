//! Canonical JSON encoding for every persisted artifact.
//!
//! Objects are emitted with sorted keys, two-space indentation and a trailing
//! newline so that identical values always produce identical bytes. Writes go
//! to a temporary sibling first and are renamed into place.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::{Error, Result};

pub const DATASET_INFO: &str = "dataset_info.json";
pub const IR_INFO: &str = "ir_info.json";
pub const IR_DIR: &str = "ir";
pub const MEASURES: &str = "measures.json";
pub const MEASURES_PER_MODEL: &str = "measures_per_model.json";
pub const REPORT: &str = "report.json";

/// Artifact names that may be served or listed; IR files live under [`IR_DIR`].
pub const ARTIFACT_NAMES: [&str; 5] = [DATASET_INFO, IR_INFO, MEASURES, MEASURES_PER_MODEL, REPORT];

fn sort_keys(value: Value) -> Value {
    match value {
        Value::Object(map) => {
            let mut entries: Vec<(String, Value)> = map.into_iter().collect();
            entries.sort_by(|a, b| a.0.cmp(&b.0));
            let mut sorted = Map::new();
            for (k, v) in entries {
                sorted.insert(k, sort_keys(v));
            }
            Value::Object(sorted)
        }
        Value::Array(items) => Value::Array(items.into_iter().map(sort_keys).collect()),
        other => other,
    }
}

pub fn to_canonical_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let value = serde_json::to_value(value).map_err(|e| Error::Encode(e.to_string()))?;
    let mut text =
        serde_json::to_string_pretty(&sort_keys(value)).map_err(|e| Error::Encode(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

/// Writes `value` as canonical JSON and returns the number of bytes written.
pub fn write_artifact<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<u64> {
    let text = to_canonical_json(value)?;
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    let file_name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let tmp = path.with_file_name(format!(".{file_name}.{}.tmp", std::process::id()));
    fs::write(&tmp, text.as_bytes()).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        Error::io(path, e)
    })?;
    Ok(text.len() as u64)
}

pub fn read_artifact<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    decode(path, &text)
}

pub(crate) fn decode<T: DeserializeOwned>(path: &Path, text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Decode {
        path: path.to_path_buf(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{IrEdge, IrGraph, IrNode, Properties, Scalar};

    fn sample_graph() -> IrGraph {
        let mut data = Properties::new();
        data.insert("abstract".into(), Scalar::Bool(true));
        data.insert("lowerBound".into(), Scalar::Int(0));
        IrGraph {
            id: "ab".repeat(32),
            source_path: "m/a.ecore".into(),
            language: "Ecore".into(),
            attributes: Properties::new(),
            nodes: vec![
                IrNode {
                    id: "/".into(),
                    node_type: "EPackage".into(),
                    name: Some("p".into()),
                    data: Properties::new(),
                },
                IrNode {
                    id: "//A".into(),
                    node_type: "EClass".into(),
                    name: Some("A".into()),
                    data,
                },
            ],
            edges: vec![IrEdge {
                id: "e0".into(),
                edge_type: "Contains_Classifier".into(),
                name: None,
                source: "/".into(),
                target: "//A".into(),
                is_containment: true,
                data: Properties::new(),
            }],
        }
    }

    #[test]
    fn graph_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ir").join("g.json");
        let g = sample_graph();
        let n = write_artifact(&path, &g).unwrap();
        assert_eq!(n, fs::metadata(&path).unwrap().len());
        let back: IrGraph = read_artifact(&path).unwrap();
        assert_eq!(back, g);
        assert!(back.validate().is_empty());
    }

    #[test]
    fn repeated_writes_are_byte_identical_and_sorted() {
        let dir = tempfile::tempdir().unwrap();
        let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
        write_artifact(&a, &sample_graph()).unwrap();
        write_artifact(&b, &sample_graph()).unwrap();
        let (ta, tb) = (fs::read(&a).unwrap(), fs::read(&b).unwrap());
        assert_eq!(ta, tb);
        let text = String::from_utf8(ta).unwrap();
        assert!(text.ends_with("}\n"));
        let attrs = text.find("\"attributes\"").unwrap();
        let edges = text.find("\"edges\"").unwrap();
        let nodes = text.find("\"nodes\"").unwrap();
        assert!(attrs < edges && edges < nodes);
    }

    #[test]
    fn truncated_file_is_a_decode_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.json");
        write_artifact(&path, &sample_graph()).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        fs::write(&path, &text[..text.len() / 2]).unwrap();
        match read_artifact::<IrGraph>(&path) {
            Err(Error::Decode { line, .. }) => assert!(line > 0),
            other => panic!("expected decode error, got {other:?}"),
        }
    }

    #[test]
    fn missing_file_is_io_error() {
        let err = read_artifact::<IrGraph>(Path::new("/nonexistent/x.json")).unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
    }
}
