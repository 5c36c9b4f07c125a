//! Static and runtime dependency analysis for Django-style monoliths.
//!
//! The pipeline scans a project tree ([`scanner`]), optionally folds in
//! per-endpoint request counts ([`ops`]), builds a weighted dependency graph
//! ([`graph`]), clusters it with Girvan-Newman ([`community`]) and renders a
//! per-service file assignment ([`report`]).

pub mod community;
pub mod error;
pub mod graph;
pub mod ops;
pub mod path;
pub mod pipeline;
pub mod report;
pub mod scanner;

pub use community::{Betweenness, Dendrogram, Partition};
pub use error::{Error, Result};
pub use graph::{DependencyGraph, Edge, NodeKind};
pub use ops::{EdgeCalls, OperationalDataset, OperationalRecord};
pub use path::ModulePath;
pub use pipeline::{analyze, analyze_with, Analysis, AnalysisOptions};
pub use report::{DecompositionReport, Mode, ServiceCut};
pub use scanner::{ProjectFacts, ScanConfig};
