//! End-to-end analysis: scan, weight, cluster, report.

use std::path::{Path, PathBuf};

use crate::community::{self, Betweenness, Dendrogram, Partition};
use crate::error::{Error, Result};
use crate::graph::DependencyGraph;
use crate::ops::{self, OperationalDataset};
use crate::report::{self, DecompositionReport, DotStage, Mode};
use crate::scanner::{self, ProjectFacts, ScanConfig};

#[derive(Debug, Clone, Default)]
pub struct AnalysisOptions {
    pub ops_path: Option<PathBuf>,
    pub static_only: bool,
    /// Requested number of services; `None` picks the best-modularity cut.
    pub services: Option<usize>,
    pub betweenness: Betweenness,
    pub scan: ScanConfig,
}

impl AnalysisOptions {
    pub fn validate(&self) -> Result<()> {
        if self.static_only && self.ops_path.is_some() {
            return Err(Error::Usage("--static-only and --ops are mutually exclusive".into()));
        }
        if self.services == Some(0) {
            return Err(Error::Usage("--services must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Analysis {
    pub facts: ProjectFacts,
    pub graph: DependencyGraph,
    pub dendrogram: Dendrogram,
    pub partition: Partition,
    pub report: DecompositionReport,
}

impl Analysis {
    pub fn mode(&self) -> Mode {
        self.report.mode
    }

    pub fn render_dot(&self) -> String {
        let stage = match self.report.mode {
            Mode::StaticOnly => DotStage::Static,
            Mode::Combined => DotStage::Combined,
        };
        report::render_dot(&self.graph, Some(&self.partition), stage)
    }
}

/// Runs the whole pipeline, reading operational data from
/// `options.ops_path` when given.
pub fn analyze(project_dir: &Path, options: &AnalysisOptions) -> Result<Analysis> {
    options.validate()?;
    let dataset = options.ops_path.as_deref().map(ops::load_ops).transpose()?;
    analyze_with(project_dir, dataset.as_ref(), options)
}

/// Like [`analyze`] with operational data already in memory; `options.ops_path`
/// is ignored.
pub fn analyze_with(
    project_dir: &Path,
    dataset: Option<&OperationalDataset>,
    options: &AnalysisOptions,
) -> Result<Analysis> {
    if options.static_only && dataset.is_some() {
        return Err(Error::Usage("static-only analysis cannot take operational data".into()));
    }
    let facts = scanner::scan_project(project_dir, &options.scan)?;
    let mut warnings = facts.warnings.clone();

    let mut graph = DependencyGraph::build_static(&facts);
    let mode = match dataset {
        Some(ds) => {
            let edge_calls = ops::aggregate_edge_calls(ds, &facts);
            warnings.extend(edge_calls.warnings.iter().cloned());
            warnings.extend(graph.apply_dynamic(&edge_calls));
            Mode::Combined
        }
        None => Mode::StaticOnly,
    };
    graph.finalize_weights();

    community::check_target(&graph, options.services)?;
    let dendrogram = community::girvan_newman(&graph, options.betweenness);
    let partition = community::select(&dendrogram, options.services);

    let mut report = report::assign_files(&partition, &graph, &facts, mode);
    warnings.append(&mut report.warnings);
    report.warnings = warnings;
    Ok(Analysis { facts, graph, dendrogram, partition, report })
}
