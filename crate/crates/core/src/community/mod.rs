//! Girvan-Newman clustering and partition selection.

mod betweenness;

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::DependencyGraph;
use crate::path::ModulePath;

use betweenness::IndexedGraph;
pub use betweenness::{edge_betweenness, Betweenness, PATH_TIE_TOLERANCE};

/// Relative tolerance under which two betweenness values tie.
pub const BETWEENNESS_TIE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Partition {
    /// Each community sorted; communities ordered by their first member.
    pub communities: Vec<BTreeSet<ModulePath>>,
    pub modularity: f64,
}

impl Partition {
    /// Canonicalizes community order and computes modularity on `graph`.
    pub fn new(graph: &DependencyGraph, communities: Vec<BTreeSet<ModulePath>>) -> Result<Self> {
        let mut communities = communities;
        communities.sort();
        let modularity = modularity(graph, &communities)?;
        Ok(Partition { communities, modularity })
    }

    pub fn len(&self) -> usize {
        self.communities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.communities.is_empty()
    }

    pub fn community_of(&self, id: &ModulePath) -> Option<usize> {
        self.communities.iter().position(|c| c.contains(id))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Step {
    /// Edge whose removal produced this split; `None` for the initial state.
    pub removed: Option<(ModulePath, ModulePath)>,
    pub partition: Partition,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dendrogram {
    pub steps: Vec<Step>,
}

/// Newman modularity over `total_weight`:
/// `Q = Σ_c [ W_c / W − (S_c / 2W)² ]`.
///
/// Fails unless `communities` is a disjoint cover of the graph's nodes.
/// A graph without edge weight has `Q = 0`.
pub fn modularity(graph: &DependencyGraph, communities: &[BTreeSet<ModulePath>]) -> Result<f64> {
    let mut label: BTreeMap<&ModulePath, usize> = BTreeMap::new();
    for (c, members) in communities.iter().enumerate() {
        if members.is_empty() {
            return Err(Error::Partition(format!("community {c} is empty")));
        }
        for m in members {
            if !graph.nodes.contains_key(m) {
                return Err(Error::Partition(format!("{m} is not a graph node")));
            }
            if label.insert(m, c).is_some() {
                return Err(Error::Partition(format!("{m} is in more than one community")));
            }
        }
    }
    if label.len() != graph.nodes.len() {
        let missing = graph.nodes.keys().find(|n| !label.contains_key(n));
        return Err(Error::Partition(format!(
            "{} is not in any community",
            missing.map(ModulePath::as_str).unwrap_or("a node")
        )));
    }

    let total = graph.total_weight();
    if total <= 0.0 {
        return Ok(0.0);
    }
    let mut inner = vec![0.0; communities.len()];
    let mut strength = vec![0.0; communities.len()];
    for e in graph.edges.values() {
        let (ca, cb) = (label[&e.a], label[&e.b]);
        if ca == cb {
            inner[ca] += e.total_weight;
        }
        strength[ca] += e.total_weight;
        strength[cb] += e.total_weight;
    }
    Ok(inner.iter().zip(&strength).map(|(w_c, s_c)| w_c / total - (s_c / (2.0 * total)).powi(2)).sum())
}

fn components(ig: &IndexedGraph, active: &[bool]) -> Vec<usize> {
    let n = ig.ids.len();
    let mut label = vec![usize::MAX; n];
    let mut next = 0;
    for start in 0..n {
        if label[start] != usize::MAX {
            continue;
        }
        label[start] = next;
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for &(w, e) in &ig.adj[v] {
                if active[e] && label[w] == usize::MAX {
                    label[w] = next;
                    queue.push_back(w);
                }
            }
        }
        next += 1;
    }
    label
}

fn partition_from_labels(graph: &DependencyGraph, ig: &IndexedGraph, labels: &[usize]) -> Partition {
    let mut groups: BTreeMap<usize, BTreeSet<ModulePath>> = BTreeMap::new();
    for (i, &l) in labels.iter().enumerate() {
        groups.entry(l).or_default().insert(ig.ids[i].clone());
    }
    Partition::new(graph, groups.into_values().collect()).expect("component labels cover the graph")
}

/// Divisive clustering: repeatedly removes the edge with the highest
/// betweenness, recomputing after each removal, and records a step each
/// time the number of connected components grows.
///
/// Ties on betweenness go to the lighter edge, then to the lexicographically
/// smaller endpoint pair.
pub fn girvan_newman(graph: &DependencyGraph, mode: Betweenness) -> Dendrogram {
    let ig = IndexedGraph::new(graph, mode);
    let m = ig.edge_count();
    let mut active = vec![true; m];
    let mut labels = components(&ig, &active);
    let mut count = labels.iter().copied().max().map_or(0, |l| l + 1);
    let mut steps = vec![Step { removed: None, partition: partition_from_labels(graph, &ig, &labels) }];

    let all: Vec<usize> = (0..ig.ids.len()).collect();
    let mut eb = ig.betweenness(&active, &all);
    let keys: Vec<(ModulePath, ModulePath)> = graph.edges.keys().cloned().collect();

    for _ in 0..m {
        let max = (0..m).filter(|&e| active[e]).map(|e| eb[e]).fold(f64::NEG_INFINITY, f64::max);
        let tol = BETWEENNESS_TIE_TOLERANCE * max.abs();
        // edges are indexed in lexicographic key order, so the first minimum wins ties
        let chosen = (0..m)
            .filter(|&e| active[e] && eb[e] >= max - tol)
            .min_by(|&x, &y| ig.weights[x].total_cmp(&ig.weights[y]).then(x.cmp(&y)))
            .expect("an active edge remains");
        active[chosen] = false;

        let old = labels[ig.ends[chosen].0];
        let members: Vec<usize> = (0..ig.ids.len()).filter(|&v| labels[v] == old).collect();
        let new_labels = components(&ig, &active);
        let new_count = new_labels.iter().copied().max().map_or(0, |l| l + 1);
        labels = new_labels;
        if new_count > count {
            count = new_count;
            steps.push(Step {
                removed: Some(keys[chosen].clone()),
                partition: partition_from_labels(graph, &ig, &labels),
            });
        }

        // only the component that lost an edge changes
        let fresh = ig.betweenness(&active, &members);
        for e in 0..m {
            let (a, _) = ig.ends[e];
            if members.binary_search(&a).is_ok() {
                eb[e] = fresh[e];
            }
        }
    }
    Dendrogram { steps }
}

/// Picks the partition to report: the first step with at least `target`
/// communities, or the step with the highest modularity (earliest on ties).
pub fn best_partition(graph: &DependencyGraph, target: Option<usize>, mode: Betweenness) -> Result<Partition> {
    check_target(graph, target)?;
    let dendrogram = girvan_newman(graph, mode);
    Ok(select(&dendrogram, target))
}

pub fn check_target(graph: &DependencyGraph, target: Option<usize>) -> Result<()> {
    let nodes = graph.node_count();
    match target {
        Some(0) => Err(Error::Usage("service count must be at least 1".into())),
        Some(t) if t > nodes => Err(Error::TooManyServices { requested: t, nodes }),
        _ => Ok(()),
    }
}

pub fn select(dendrogram: &Dendrogram, target: Option<usize>) -> Partition {
    let steps = &dendrogram.steps;
    let chosen = match target {
        Some(t) => steps.iter().find(|s| s.partition.len() >= t).or(steps.last()),
        None => steps.iter().fold(None::<&Step>, |best, s| match best {
            Some(b) if s.partition.modularity <= b.partition.modularity => Some(b),
            _ => Some(s),
        }),
    };
    chosen.expect("dendrogram has an initial step").partition.clone()
}
