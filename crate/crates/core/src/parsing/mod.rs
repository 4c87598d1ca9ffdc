//! Parser registry and the parse stage.
//!
//! Every candidate from `dataset_info.json` is hashed, handed to the selected
//! parser on a worker thread with a timeout, classified, and (unless it
//! failed) written to `ir/<model_id>.json`. A crash or hang in one parser
//! invocation is recorded as a failure and never aborts the stage.

pub mod archimate;
pub mod ecore;
mod xml;

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::sync::{mpsc, Arc};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::artifact::{self, DATASET_INFO, IR_DIR, IR_INFO};
use crate::error::{Error, Result};
use crate::id::compute_model_id;
use crate::model::{Diagnostic, IrGraph, ParseRecord, ParseStatus};
use crate::pipeline::RunContext;
use crate::scan::DatasetInfo;

pub use archimate::ArchimateParser;
pub use ecore::EcoreParser;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParserDescriptor {
    pub key: String,
    pub language: String,
    pub accepted_extensions: Vec<String>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ParseOptions {
    pub normalize_types: bool,
}

/// A successfully built IR plus the diagnostics collected on the way.
#[derive(Clone, Debug, PartialEq)]
pub struct ParsedModel {
    pub graph: IrGraph,
    pub diagnostics: Vec<Diagnostic>,
    pub n_skipped: u64,
}

/// No IR could be built.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseFailure(pub String);

pub type ParseOutcome = std::result::Result<ParsedModel, ParseFailure>;

pub trait ModelParser: Send + Sync {
    fn descriptor(&self) -> &ParserDescriptor;

    fn parse(&self, content: &[u8], source_path: &str, options: &ParseOptions) -> ParseOutcome;
}

#[derive(Clone, Default)]
pub struct ParserRegistry {
    parsers: BTreeMap<String, Arc<dyn ModelParser>>,
}

impl ParserRegistry {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Registry with the ArchiMate (Archi format) and Ecore parsers.
    pub fn builtin() -> Self {
        let mut registry = Self::empty();
        registry.register(Arc::new(ArchimateParser::new()));
        registry.register(Arc::new(EcoreParser::new()));
        registry
    }

    /// Adds a parser; a parser with the same key is replaced.
    pub fn register(&mut self, parser: Arc<dyn ModelParser>) {
        self.parsers
            .insert(parser.descriptor().key.clone(), parser);
    }

    pub fn select(&self, key: &str) -> Result<Arc<dyn ModelParser>> {
        self.parsers.get(key).cloned().ok_or_else(|| Error::UnknownParser {
            key: key.to_string(),
            available: self.keys().join(", "),
        })
    }

    pub fn keys(&self) -> Vec<String> {
        self.parsers.keys().cloned().collect()
    }

    pub fn descriptors(&self) -> Vec<ParserDescriptor> {
        self.parsers.values().map(|p| p.descriptor().clone()).collect()
    }
}

pub fn select_parser(key: &str) -> Result<Arc<dyn ModelParser>> {
    ParserRegistry::builtin().select(key)
}

pub fn classify_status(warnings: &[Diagnostic], n_skipped: u64, ir_built: bool) -> ParseStatus {
    if !ir_built {
        ParseStatus::Failure
    } else if warnings.is_empty() && n_skipped == 0 {
        ParseStatus::Success
    } else {
        ParseStatus::Partial
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IrTotals {
    pub n_models: u64,
    pub n_success: u64,
    pub n_partial: u64,
    pub n_failed: u64,
    pub elements_loaded: u64,
    pub elements_skipped: u64,
    pub warnings_total: u64,
    pub warnings_by_type: BTreeMap<String, u64>,
}

/// Contents of `ir_info.json`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct IrInfo {
    pub totals: IrTotals,
    pub index: BTreeMap<String, ParseRecord>,
}

impl IrInfo {
    pub fn from_records(records: impl IntoIterator<Item = ParseRecord>) -> Self {
        let mut info = IrInfo::default();
        for record in records {
            info.index.insert(record.model_id.clone(), record);
        }
        let t = &mut info.totals;
        for record in info.index.values() {
            t.n_models += 1;
            match record.status {
                ParseStatus::Success => t.n_success += 1,
                ParseStatus::Partial => t.n_partial += 1,
                ParseStatus::Failure => t.n_failed += 1,
            }
            t.elements_loaded += record.n_loaded;
            t.elements_skipped += record.n_skipped;
            t.warnings_total += record.warnings.len() as u64;
            for w in &record.warnings {
                *t.warnings_by_type.entry(w.kind.to_string()).or_insert(0) += 1;
            }
        }
        info
    }
}

pub fn ir_path(output_dir: &Path, model_id: &str) -> std::path::PathBuf {
    output_dir.join(IR_DIR).join(format!("{model_id}.json"))
}

/// Runs `parser` on a worker thread, converting panics and timeouts into failures.
fn parse_guarded(
    parser: Arc<dyn ModelParser>,
    content: Vec<u8>,
    source_path: String,
    options: ParseOptions,
    timeout: Duration,
) -> (ParseOutcome, f64) {
    let (tx, rx) = mpsc::channel();
    let spawned = std::thread::Builder::new()
        .name("modelbench-parse".into())
        .spawn(move || {
            let started = Instant::now();
            let outcome = parser.parse(&content, &source_path, &options);
            let _ = tx.send((outcome, started.elapsed().as_secs_f64() * 1000.0));
        });
    if let Err(e) = spawned {
        return (Err(ParseFailure(format!("cannot start parser thread: {e}"))), 0.0);
    }
    match rx.recv_timeout(timeout) {
        Ok(result) => result,
        Err(mpsc::RecvTimeoutError::Timeout) => (
            Err(ParseFailure("timeout".to_string())),
            timeout.as_secs_f64() * 1000.0,
        ),
        Err(mpsc::RecvTimeoutError::Disconnected) => {
            (Err(ParseFailure("parser panicked".to_string())), 0.0)
        }
    }
}

fn failure_record(model_id: String, source_path: &str, source_bytes: u64, time_ms: f64, msg: String) -> ParseRecord {
    ParseRecord {
        model_id,
        source_path: source_path.to_string(),
        status: ParseStatus::Failure,
        warnings: Vec::new(),
        n_loaded: 0,
        n_skipped: 0,
        parse_time_ms: time_ms,
        source_bytes,
        ir_bytes: None,
        error_msg: Some(msg),
    }
}

fn parse_candidate(
    ctx: &RunContext,
    root: &Path,
    parser: &Arc<dyn ModelParser>,
    language: &str,
    rel: &str,
) -> Result<ParseRecord> {
    let full = root.join(rel);
    let content = match fs::read(&full) {
        Ok(c) => c,
        Err(_) => {
            // Gone since the scan; index it under the hash of its path so it stays visible.
            let id = compute_model_id(format!("missing:{rel}").as_bytes());
            return Ok(failure_record(id, rel, 0, 0.0, "file missing".to_string()));
        }
    };
    let model_id = compute_model_id(&content);
    let source_bytes = content.len() as u64;
    let options = ParseOptions {
        normalize_types: ctx.profile.parse.normalize_types,
    };
    let timeout = Duration::from_secs_f64(ctx.profile.parse.timeout_s);
    let (outcome, time_ms) = parse_guarded(parser.clone(), content, rel.to_string(), options, timeout);
    match outcome {
        Err(ParseFailure(msg)) => Ok(failure_record(model_id, rel, source_bytes, time_ms, msg)),
        Ok(mut parsed) => {
            parsed.graph.id = model_id.clone();
            parsed.graph.source_path = rel.to_string();
            parsed.graph.language = language.to_string();
            let ir_bytes = artifact::write_artifact(&ir_path(&ctx.output_dir, &model_id), &parsed.graph)?;
            let status = classify_status(&parsed.diagnostics, parsed.n_skipped, true);
            Ok(ParseRecord {
                model_id,
                source_path: rel.to_string(),
                status,
                n_loaded: parsed.graph.n_elements() as u64,
                n_skipped: parsed.n_skipped,
                warnings: parsed.diagnostics,
                parse_time_ms: time_ms,
                source_bytes,
                ir_bytes: Some(ir_bytes),
                error_msg: None,
            })
        }
    }
}

fn clear_ir_dir(dir: &Path) -> Result<()> {
    match fs::read_dir(dir) {
        Ok(entries) => {
            for entry in entries.flatten() {
                let p = entry.path();
                if p.extension().is_some_and(|e| e == "json") {
                    fs::remove_file(&p).map_err(|e| Error::io(&p, e))?;
                }
            }
            Ok(())
        }
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(()),
        Err(e) => Err(Error::io(dir, e)),
    }
}

/// Parse stage: builds IR files for every scan candidate and writes `ir_info.json`.
pub fn run_parse(ctx: &RunContext) -> Result<IrInfo> {
    run_parse_with(ctx, &ParserRegistry::builtin())
}

pub fn run_parse_with(ctx: &RunContext, registry: &ParserRegistry) -> Result<IrInfo> {
    let info_path = ctx.output_dir.join(DATASET_INFO);
    if !info_path.is_file() {
        return Err(Error::MissingScanArtifact(info_path));
    }
    let dataset: DatasetInfo = artifact::read_artifact(&info_path)?;
    let parser = registry.select(&ctx.profile.parse.parser_language)?;
    let language = parser.descriptor().language.clone();
    let ir_dir = ctx.output_dir.join(IR_DIR);
    clear_ir_dir(&ir_dir)?;
    fs::create_dir_all(&ir_dir).map_err(|e| Error::io(&ir_dir, e))?;

    let root = Path::new(&dataset.dataset_root).to_path_buf();
    let records = dataset
        .candidates
        .par_iter()
        .map(|rel| parse_candidate(ctx, &root, &parser, &language, rel))
        .collect::<Result<Vec<_>>>()?;

    let info = IrInfo::from_records(records);
    artifact::write_artifact(&ctx.output_dir.join(IR_INFO), &info)?;
    Ok(info)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::DiagnosticKind;

    #[test]
    fn registry_lookup() {
        let reg = ParserRegistry::builtin();
        assert_eq!(reg.select("ArchiMate-Archi").unwrap().descriptor().language, "ArchiMate");
        assert_eq!(reg.select("Ecore").unwrap().descriptor().language, "Ecore");
        match reg.select("UML") {
            Err(Error::UnknownParser { available, .. }) => {
                assert!(available.contains("ArchiMate-Archi") && available.contains("Ecore"))
            }
            Err(other) => panic!("unexpected error {other}"),
            Ok(_) => panic!("UML must not resolve"),
        }
    }

    #[test]
    fn status_classification() {
        let warn = vec![Diagnostic::new(DiagnosticKind::UnresolvedReference, "x")];
        assert_eq!(classify_status(&[], 0, true), ParseStatus::Success);
        assert_eq!(classify_status(&warn, 0, true), ParseStatus::Partial);
        assert_eq!(classify_status(&[], 2, true), ParseStatus::Partial);
        assert_eq!(classify_status(&warn, 3, false), ParseStatus::Failure);
        assert_eq!(classify_status(&[], 0, false), ParseStatus::Failure);
    }

    struct Sleepy(ParserDescriptor);

    impl ModelParser for Sleepy {
        fn descriptor(&self) -> &ParserDescriptor {
            &self.0
        }
        fn parse(&self, content: &[u8], _: &str, _: &ParseOptions) -> ParseOutcome {
            if content == b"panic" {
                panic!("boom");
            }
            std::thread::sleep(Duration::from_millis(500));
            Err(ParseFailure("late".into()))
        }
    }

    #[test]
    fn hung_and_crashing_parsers_become_failures() {
        let p: Arc<dyn ModelParser> = Arc::new(Sleepy(ParserDescriptor {
            key: "s".into(),
            language: "S".into(),
            accepted_extensions: vec![],
        }));
        let (out, ms) = parse_guarded(p.clone(), b"x".to_vec(), "x".into(), ParseOptions::default(), Duration::from_millis(20));
        assert_eq!(out, Err(ParseFailure("timeout".into())));
        assert!(ms > 0.0);
        let (out, _) = parse_guarded(p, b"panic".to_vec(), "x".into(), ParseOptions::default(), Duration::from_secs(5));
        assert_eq!(out, Err(ParseFailure("parser panicked".into())));
    }

    #[test]
    fn totals_aggregate_records() {
        let rec = |id: &str, status, warnings: usize, loaded, skipped| ParseRecord {
            model_id: id.into(),
            source_path: format!("{id}.x"),
            status,
            warnings: (0..warnings)
                .map(|_| Diagnostic::new(DiagnosticKind::DuplicateId, "d"))
                .collect(),
            n_loaded: loaded,
            n_skipped: skipped,
            parse_time_ms: 1.0,
            source_bytes: 10,
            ir_bytes: None,
            error_msg: None,
        };
        let info = IrInfo::from_records(vec![
            rec("b", ParseStatus::Partial, 2, 5, 1),
            rec("a", ParseStatus::Success, 0, 7, 0),
            rec("c", ParseStatus::Failure, 0, 0, 0),
        ]);
        let t = &info.totals;
        assert_eq!((t.n_models, t.n_success, t.n_partial, t.n_failed), (3, 1, 1, 1));
        assert_eq!((t.elements_loaded, t.elements_skipped), (12, 1));
        assert_eq!(t.warnings_total, 2);
        assert_eq!(t.warnings_by_type["DUPLICATE_ID"], 2);
        assert_eq!(info.index.keys().collect::<Vec<_>>(), vec!["a", "b", "c"]);
    }
}
