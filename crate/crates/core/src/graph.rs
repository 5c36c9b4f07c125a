//! Weighted, undirected dependency graph.
//!
//! Edge weights follow three rules:
//!
//! ```text
//! static  = imports + method calls (+ one per model relation)
//! dynamic = runtime calls × max static weight / max runtime calls
//! total   = static + dynamic
//! ```
//!
//! The dynamic term is normalized so that the busiest runtime edge weighs
//! exactly as much as the heaviest static edge.

use std::collections::{BTreeMap, BTreeSet};

use crate::ops::EdgeCalls;
use crate::path::ModulePath;
use crate::scanner::ProjectFacts;

pub use crate::scanner::ClassKind as NodeKind;

/// Where an edge's weight came from. Directions are kept here only; the
/// graph itself is undirected.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Provenance {
    Uses { from: ModulePath, to: ModulePath },
    Relation { from: ModulePath, to: ModulePath },
    Runtime { view: ModulePath, model: ModulePath },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    /// Endpoints, `a < b`.
    pub a: ModulePath,
    pub b: ModulePath,
    pub num_imports: u32,
    pub num_method_calls: u32,
    pub relation_count: u32,
    pub static_weight: f64,
    pub dyn_calls: u64,
    pub dyn_weight: f64,
    pub total_weight: f64,
    pub provenance: BTreeSet<Provenance>,
}

impl Edge {
    fn new(a: ModulePath, b: ModulePath) -> Self {
        Edge {
            a,
            b,
            num_imports: 0,
            num_method_calls: 0,
            relation_count: 0,
            static_weight: 0.0,
            dyn_calls: 0,
            dyn_weight: 0.0,
            total_weight: 0.0,
            provenance: BTreeSet::new(),
        }
    }

    fn refresh_static(&mut self) {
        self.static_weight = f64::from(self.num_imports + self.num_method_calls + self.relation_count);
    }
}

pub(crate) fn edge_key(x: &ModulePath, y: &ModulePath) -> (ModulePath, ModulePath) {
    if x <= y {
        (x.clone(), y.clone())
    } else {
        (y.clone(), x.clone())
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct DependencyGraph {
    pub nodes: BTreeMap<ModulePath, NodeKind>,
    pub edges: BTreeMap<(ModulePath, ModulePath), Edge>,
    pub max_static_weight: f64,
    pub max_dyn_calls: u64,
}

impl DependencyGraph {
    /// Graph with the given nodes and total weights, for callers that
    /// already have weights. Panics on self-edges or unknown endpoints.
    pub fn from_weighted_edges<'a>(
        nodes: impl IntoIterator<Item = (ModulePath, NodeKind)>,
        edges: impl IntoIterator<Item = (&'a ModulePath, &'a ModulePath, f64)>,
    ) -> Self {
        let mut g = DependencyGraph { nodes: nodes.into_iter().collect(), ..Default::default() };
        for (x, y, w) in edges {
            assert!(x != y, "self-edge on {x}");
            assert!(g.nodes.contains_key(x) && g.nodes.contains_key(y), "edge {x}-{y} references unknown node");
            let key = edge_key(x, y);
            let mut e = Edge::new(key.0.clone(), key.1.clone());
            e.static_weight = w;
            e.total_weight = w;
            g.edges.insert(key, e);
        }
        g.max_static_weight = g.edges.values().map(|e| e.static_weight).fold(0.0, f64::max);
        g
    }

    pub fn edge(&self, x: &str, y: &str) -> Option<&Edge> {
        let (x, y) = (x.parse().ok()?, y.parse().ok()?);
        self.edges.get(&edge_key(&x, &y))
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.values().map(|e| e.total_weight).sum()
    }

    fn edge_mut(&mut self, x: &ModulePath, y: &ModulePath) -> &mut Edge {
        let key = edge_key(x, y);
        self.edges.entry(key.clone()).or_insert_with(|| Edge::new(key.0, key.1))
    }

    /// One node per model, view and serializer class, plus `Other` classes
    /// that depend on or are used by a model or view. One edge per dependent
    /// pair.
    pub fn build_static(facts: &ProjectFacts) -> Self {
        let kinds: BTreeMap<ModulePath, NodeKind> = facts.classes.iter().map(|c| (c.id(), c.kind)).collect();
        let core = |id: &ModulePath| matches!(kinds.get(id), Some(NodeKind::Model | NodeKind::View));

        let mut g = DependencyGraph::default();
        for (id, kind) in &kinds {
            if *kind != NodeKind::Other {
                g.nodes.insert(id.clone(), *kind);
            }
        }
        for dep in &facts.dependencies {
            for (this, other) in [(&dep.user, &dep.used), (&dep.used, &dep.user)] {
                if kinds.get(this) == Some(&NodeKind::Other) && core(other) {
                    g.nodes.insert(this.clone(), NodeKind::Other);
                }
            }
        }
        for dep in &facts.dependencies {
            if dep.user == dep.used || !g.nodes.contains_key(&dep.user) || !g.nodes.contains_key(&dep.used) {
                continue;
            }
            let e = g.edge_mut(&dep.user, &dep.used);
            e.num_imports += dep.num_imports;
            e.num_method_calls += dep.num_method_calls;
            e.provenance.insert(Provenance::Uses { from: dep.user.clone(), to: dep.used.clone() });
        }
        for rel in &facts.relations {
            if rel.source_model == rel.target_model
                || !g.nodes.contains_key(&rel.source_model)
                || !g.nodes.contains_key(&rel.target_model)
            {
                continue;
            }
            let e = g.edge_mut(&rel.source_model, &rel.target_model);
            e.relation_count += 1;
            e.provenance.insert(Provenance::Relation { from: rel.source_model.clone(), to: rel.target_model.clone() });
        }
        for e in g.edges.values_mut() {
            e.refresh_static();
        }
        g.edges.retain(|_, e| e.static_weight > 0.0);
        g.max_static_weight = g.edges.values().map(|e| e.static_weight).fold(0.0, f64::max);
        g
    }

    /// Adds runtime call counts and normalized dynamic weights. Creates
    /// edges the static scan missed. Returns warnings.
    pub fn apply_dynamic(&mut self, edge_calls: &EdgeCalls) -> Vec<String> {
        let mut warnings = Vec::new();
        let mut kept = Vec::new();
        for ((view, model), &calls) in &edge_calls.counts {
            let missing: Vec<&ModulePath> =
                [view, model].into_iter().filter(|n| !self.nodes.contains_key(*n)).collect();
            if !missing.is_empty() || view == model {
                warnings.push(format!("runtime edge {view} -> {model} dropped: endpoint not in graph"));
                continue;
            }
            if calls > 0 {
                kept.push((view, model, calls));
            }
        }
        let max_calls = kept.iter().map(|(_, _, c)| *c).max().unwrap_or(0);
        if max_calls == 0 {
            return warnings;
        }
        let fallback = self.max_static_weight == 0.0;
        if fallback {
            warnings.push("no static edges to normalize against; dynamic weights use raw call counts".into());
        }
        self.max_dyn_calls = max_calls;
        for (view, model, calls) in kept {
            let max_static = self.max_static_weight;
            let e = self.edge_mut(view, model);
            e.dyn_calls += calls;
            e.dyn_weight =
                if fallback { e.dyn_calls as f64 } else { (e.dyn_calls as f64 * max_static) / max_calls as f64 };
            e.provenance.insert(Provenance::Runtime { view: view.clone(), model: model.clone() });
        }
        warnings
    }

    /// Sets `total = static + dynamic` and drops zero-weight edges.
    pub fn finalize_weights(&mut self) {
        for e in self.edges.values_mut() {
            e.total_weight = e.static_weight + e.dyn_weight;
        }
        self.edges.retain(|_, e| e.total_weight > 0.0);
    }

    /// Weighted degree of each node over `total_weight`.
    pub fn strengths(&self) -> BTreeMap<&ModulePath, f64> {
        let mut s: BTreeMap<&ModulePath, f64> = self.nodes.keys().map(|n| (n, 0.0)).collect();
        for e in self.edges.values() {
            *s.entry(&e.a).or_default() += e.total_weight;
            *s.entry(&e.b).or_default() += e.total_weight;
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scanner::{ClassFact, ClassKind, Dependency, RelationFact, RelationKind};

    fn p(s: &str) -> ModulePath {
        s.parse().unwrap()
    }

    fn class(id: &str, kind: ClassKind) -> ClassFact {
        let path = p(id);
        ClassFact { name: path.last().to_string(), module: path, bases: vec![], resolved_bases: vec![], kind, line: 1 }
    }

    fn dep(user: &str, used: &str, imports: u32, calls: u32) -> Dependency {
        Dependency { user: p(user), used: p(used), num_imports: imports, num_method_calls: calls }
    }

    #[test]
    fn relation_only_edge() {
        let facts = ProjectFacts {
            classes: vec![class("m.A", ClassKind::Model), class("m.B", ClassKind::Model)],
            relations: vec![RelationFact {
                source_model: p("m.A"),
                target_model: p("m.B"),
                relation_kind: RelationKind::ForeignKey,
            }],
            ..Default::default()
        };
        let g = DependencyGraph::build_static(&facts);
        assert_eq!(g.edges.len(), 1);
        assert_eq!(g.edge("m.B", "m.A").unwrap().static_weight, 1.0);
        assert_eq!(g.max_static_weight, 1.0);
    }

    #[test]
    fn isolated_nodes() {
        let facts = ProjectFacts {
            classes: vec![class("m.A", ClassKind::Model), class("v.V", ClassKind::View)],
            ..Default::default()
        };
        let g = DependencyGraph::build_static(&facts);
        assert_eq!(g.node_count(), 2);
        assert!(g.edges.is_empty());
    }

    #[test]
    fn other_classes_join_only_through_core_nodes() {
        let facts = ProjectFacts {
            classes: vec![
                class("m.A", ClassKind::Model),
                class("u.Helper", ClassKind::Other),
                class("u.Lonely", ClassKind::Other),
                class("s.S", ClassKind::Serializer),
            ],
            dependencies: vec![dep("u.Helper", "m.A", 1, 2), dep("u.Lonely", "s.S", 1, 0)],
            ..Default::default()
        };
        let g = DependencyGraph::build_static(&facts);
        assert!(g.nodes.contains_key(&p("u.Helper")));
        assert!(!g.nodes.contains_key(&p("u.Lonely")));
        assert_eq!(g.edges.len(), 1);
        assert_eq!(g.edge("m.A", "u.Helper").unwrap().static_weight, 3.0);
    }

    #[test]
    fn mutual_dependencies_merge() {
        let facts = ProjectFacts {
            classes: vec![class("m.A", ClassKind::Model), class("m.B", ClassKind::Model)],
            dependencies: vec![dep("m.A", "m.B", 1, 1), dep("m.B", "m.A", 1, 2)],
            ..Default::default()
        };
        let g = DependencyGraph::build_static(&facts);
        let e = g.edge("m.A", "m.B").unwrap();
        assert_eq!((e.num_imports, e.num_method_calls, e.static_weight), (2, 3, 5.0));
        assert_eq!(e.provenance.len(), 2);
    }

    fn calls(entries: &[(&str, &str, u64)]) -> EdgeCalls {
        EdgeCalls { counts: entries.iter().map(|(v, m, c)| ((p(v), p(m)), *c)).collect(), warnings: vec![] }
    }

    #[test]
    fn static_only_and_simple_total() {
        let nodes = [(p("v.V"), NodeKind::View), (p("m.M"), NodeKind::Model)];
        let (v, m) = (p("v.V"), p("m.M"));
        let mut g = DependencyGraph::from_weighted_edges(nodes.clone(), [(&v, &m, 2.0)]);
        g.finalize_weights();
        assert_eq!(g.edge("v.V", "m.M").unwrap().total_weight, 2.0);

        let warnings = g.apply_dynamic(&calls(&[("v.V", "m.M", 7)]));
        assert!(warnings.is_empty());
        g.finalize_weights();
        let e = g.edge("v.V", "m.M").unwrap();
        assert_eq!((e.dyn_weight, e.total_weight), (2.0, 4.0));
    }

    #[test]
    fn empty_dynamic_leaves_graph_unchanged() {
        let nodes = [(p("v.V"), NodeKind::View), (p("m.M"), NodeKind::Model)];
        let (v, m) = (p("v.V"), p("m.M"));
        let mut g = DependencyGraph::from_weighted_edges(nodes, [(&v, &m, 3.0)]);
        let before = g.clone();
        assert!(g.apply_dynamic(&EdgeCalls::default()).is_empty());
        assert_eq!(g, before);
    }

    #[test]
    fn unknown_runtime_endpoints_dropped() {
        let nodes = [(p("v.V"), NodeKind::View), (p("m.M"), NodeKind::Model)];
        let (v, m) = (p("v.V"), p("m.M"));
        let mut g = DependencyGraph::from_weighted_edges(nodes, [(&v, &m, 3.0)]);
        let warnings = g.apply_dynamic(&calls(&[("v.V", "m.M", 2), ("v.Ghost", "m.M", 50)]));
        assert_eq!(warnings.len(), 1);
        assert_eq!(g.max_dyn_calls, 2);
        assert_eq!(g.edge("v.V", "m.M").unwrap().dyn_weight, 3.0);
    }

    #[test]
    fn no_static_maximum_falls_back_to_raw_counts() {
        let mut g = DependencyGraph {
            nodes: [(p("v.V"), NodeKind::View), (p("m.M"), NodeKind::Model)].into_iter().collect(),
            ..Default::default()
        };
        let warnings = g.apply_dynamic(&calls(&[("v.V", "m.M", 5)]));
        assert_eq!(warnings.len(), 1);
        g.finalize_weights();
        assert_eq!(g.edge("m.M", "v.V").unwrap().total_weight, 5.0);
    }
}
