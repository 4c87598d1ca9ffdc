//! Profile-driven benchmarking of software model datasets.
//!
//! A run goes through four stages, each persisting JSON artifacts under the
//! profile's output directory: [`scan`] discovers and deduplicates model files,
//! [`parsing`] maps them into a typed-graph IR, [`measures`] computes the
//! quality measures and [`report`] projects them into presentation objects.

pub mod artifact;
pub mod error;
pub mod id;
pub mod measures;
pub mod model;
pub mod parsing;
pub mod pipeline;
pub mod profile;
pub mod report;
pub mod scan;

pub use error::{Error, Result};
pub use id::compute_model_id;
pub use model::{
    ConstructCatalog, ConstructDef, ConstructKind, Diagnostic, DiagnosticKind, DistributionStats,
    IrEdge, IrGraph, IrNode, MetricValue, ParseRecord, ParseStatus, Properties, Scalar,
};
pub use pipeline::{run_stage, RunContext, Stage, StageSummary};
pub use profile::{load_profile, BenchmarkProfile};
