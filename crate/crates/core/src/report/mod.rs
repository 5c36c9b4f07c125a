//! Decomposition suggestions: which files each proposed service needs.

mod dot;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::community::Partition;
use crate::graph::{DependencyGraph, NodeKind};
use crate::path::ModulePath;
use crate::scanner::{FileStatus, ProjectFacts, Totals};

pub use dot::{render_dot, DotStage};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    StaticOnly,
    Combined,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ServiceCut {
    pub index: usize,
    pub members: BTreeSet<ModulePath>,
    #[serde(rename = "files")]
    pub file_list: Vec<ModulePath>,
    pub shared: BTreeSet<ModulePath>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionReport {
    pub totals: Totals,
    pub mode: Mode,
    pub services: Vec<ServiceCut>,
    pub warnings: Vec<String>,
}

/// Builds one service per community. A service's files are its members plus
/// every model directly connected to one of its views, so a model used from
/// several services is listed (and marked shared) in each of them.
pub fn assign_files(
    partition: &Partition,
    graph: &DependencyGraph,
    facts: &ProjectFacts,
    mode: Mode,
) -> DecompositionReport {
    let mut services: Vec<ServiceCut> = partition
        .communities
        .iter()
        .enumerate()
        .map(|(index, members)| {
            let mut files: BTreeSet<ModulePath> = members.clone();
            for e in graph.edges.values() {
                for (near, far) in [(&e.a, &e.b), (&e.b, &e.a)] {
                    if members.contains(near)
                        && graph.nodes.get(near) == Some(&NodeKind::View)
                        && graph.nodes.get(far) == Some(&NodeKind::Model)
                    {
                        files.insert(far.clone());
                    }
                }
            }
            ServiceCut {
                index,
                members: members.clone(),
                file_list: files.into_iter().collect(),
                shared: BTreeSet::new(),
            }
        })
        .collect();

    let mut seen: BTreeMap<ModulePath, usize> = BTreeMap::new();
    for s in &services {
        for f in &s.file_list {
            *seen.entry(f.clone()).or_default() += 1;
        }
    }
    for s in &mut services {
        s.shared = s.file_list.iter().filter(|f| seen[*f] > 1).cloned().collect();
    }

    let mut warnings = Vec::new();
    let node_modules: BTreeSet<&ModulePath> =
        graph.nodes.keys().filter_map(|id| facts.class(id).map(|c| &c.module)).collect();
    for f in &facts.files {
        if let (Some(module), FileStatus::Parsed) = (&f.module, &f.status) {
            if !node_modules.contains(module) {
                warnings.push(format!("{} is not assigned to any service", f.path));
            }
        }
    }

    DecompositionReport { totals: facts.totals, mode, services, warnings }
}

impl DecompositionReport {
    /// Plain-text listing: totals header, then one block per service.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let t = &self.totals;
        let _ = writeln!(out, "Total Files: {}", t.files);
        let _ = writeln!(out, "Django_Views: {}", t.views);
        let _ = writeln!(out, "Django_Models: {}", t.models);
        for s in &self.services {
            let _ = writeln!(out);
            let _ = writeln!(out, "GraphNumber: {}", s.index);
            let _ = writeln!(out, "list_of_files: [");
            for (i, f) in s.file_list.iter().enumerate() {
                let sep = if i + 1 < s.file_list.len() { "," } else { "" };
                let _ = writeln!(out, "    '{f}'{sep}");
            }
            let _ = writeln!(out, "]");
        }
        out
    }

    pub fn render_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }
}
