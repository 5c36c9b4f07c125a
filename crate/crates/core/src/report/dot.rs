use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::community::Partition;
use crate::graph::{DependencyGraph, NodeKind};
use crate::path::ModulePath;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DotStage {
    /// Total weight only.
    Static,
    /// Total weight in black plus the dynamic share in green.
    Combined,
}

fn shape(kind: NodeKind) -> &'static str {
    match kind {
        NodeKind::View => "box",
        NodeKind::Model => "ellipse",
        NodeKind::Serializer => "note",
        NodeKind::Other => "diamond",
    }
}

fn quote(id: &ModulePath) -> String {
    // identifiers and dots never need escaping
    format!("\"{id}\"")
}

/// Renders the graph in Graphviz DOT. Communities, when given, become
/// `cluster_<i>` subgraphs.
pub fn render_dot(graph: &DependencyGraph, partition: Option<&Partition>, stage: DotStage) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "graph dependencies {{");
    if !graph.nodes.is_empty() {
        let _ = writeln!(out, "  node [fontname=\"Helvetica\"];");
        let _ = writeln!(out, "  edge [fontname=\"Helvetica\"];");
    }
    let node_line = |out: &mut String, indent: &str, id: &ModulePath| {
        let kind = graph.nodes[id];
        let _ = writeln!(out, "{indent}{} [shape={}];", quote(id), shape(kind));
    };
    match partition {
        Some(p) => {
            for (i, community) in p.communities.iter().enumerate() {
                let _ = writeln!(out, "  subgraph cluster_{i} {{");
                let _ = writeln!(out, "    label=\"service {i}\";");
                for id in community.iter().filter(|id| graph.nodes.contains_key(*id)) {
                    node_line(&mut out, "    ", id);
                }
                let _ = writeln!(out, "  }}");
            }
            for id in graph.nodes.keys().filter(|id| p.community_of(id).is_none()) {
                node_line(&mut out, "  ", id);
            }
        }
        None => {
            for id in graph.nodes.keys() {
                node_line(&mut out, "  ", id);
            }
        }
    }
    for e in graph.edges.values() {
        let label = match stage {
            DotStage::Static => format!("label=\"{:.1}\"", e.total_weight),
            DotStage::Combined => {
                format!("label=<{:.1}<BR/><FONT COLOR=\"green\">{:.1}</FONT>>", e.total_weight, e.dyn_weight)
            }
        };
        let _ = writeln!(out, "  {} -- {} [{label}];", quote(&e.a), quote(&e.b));
    }
    let _ = writeln!(out, "}}");
    out
}
