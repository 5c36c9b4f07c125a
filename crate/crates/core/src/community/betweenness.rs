//! Edge betweenness by Brandes-style dependency accumulation over
//! Dijkstra shortest-path DAGs.
//!
//! Distances are `1 / total_weight` in weighted mode, so strongly coupled
//! nodes are close and bridges between loosely coupled groups carry many
//! shortest paths. Path lengths within a relative tolerance of each other
//! count as equally short.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::graph::DependencyGraph;
use crate::path::ModulePath;

/// Relative tolerance under which two path lengths are considered equal.
pub const PATH_TIE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Betweenness {
    /// Edge length is `1 / total_weight`.
    #[default]
    Weighted,
    /// Every edge has length 1.
    Unweighted,
}

/// Index-based view of a graph for the clustering loop.
#[derive(Debug, Clone)]
pub(crate) struct IndexedGraph {
    pub ids: Vec<ModulePath>,
    /// (a, b) with a < b, in lexicographic order of the id pair.
    pub ends: Vec<(usize, usize)>,
    pub lengths: Vec<f64>,
    pub weights: Vec<f64>,
    pub adj: Vec<Vec<(usize, usize)>>,
}

impl IndexedGraph {
    pub fn new(graph: &DependencyGraph, mode: Betweenness) -> Self {
        let ids: Vec<ModulePath> = graph.nodes.keys().cloned().collect();
        let pos: BTreeMap<&ModulePath, usize> = ids.iter().enumerate().map(|(i, id)| (id, i)).collect();
        let mut ends = Vec::with_capacity(graph.edges.len());
        let mut lengths = Vec::with_capacity(graph.edges.len());
        let mut weights = Vec::with_capacity(graph.edges.len());
        let mut adj = vec![Vec::new(); ids.len()];
        for (e, edge) in graph.edges.values().enumerate() {
            let (a, b) = (pos[&edge.a], pos[&edge.b]);
            ends.push((a, b));
            weights.push(edge.total_weight);
            lengths.push(match mode {
                Betweenness::Weighted => 1.0 / edge.total_weight,
                Betweenness::Unweighted => 1.0,
            });
            adj[a].push((b, e));
            adj[b].push((a, e));
        }
        IndexedGraph { ids, ends, lengths, weights, adj }
    }

    pub fn edge_count(&self) -> usize {
        self.ends.len()
    }

    /// Betweenness of every active edge, counting only paths that start in
    /// `sources`. With `sources` covering a whole component this is exact
    /// for that component's edges. Unordered-pair convention (halved).
    pub fn betweenness(&self, active: &[bool], sources: &[usize]) -> Vec<f64> {
        let per_source: Vec<Vec<f64>> = sources.par_iter().map(|&s| self.single_source(s, active)).collect();
        let mut total = vec![0.0; self.edge_count()];
        // fixed summation order keeps results independent of thread count
        for contrib in &per_source {
            for (t, c) in total.iter_mut().zip(contrib) {
                *t += c;
            }
        }
        for t in &mut total {
            *t /= 2.0;
        }
        total
    }

    fn single_source(&self, s: usize, active: &[bool]) -> Vec<f64> {
        let n = self.ids.len();
        let mut dist = vec![f64::INFINITY; n];
        let mut sigma = vec![0.0f64; n];
        let mut preds: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
        let mut done = vec![false; n];
        let mut order = Vec::new();
        let mut heap = BinaryHeap::new();

        dist[s] = 0.0;
        sigma[s] = 1.0;
        heap.push(Candidate { dist: 0.0, node: s });
        while let Some(Candidate { node: v, .. }) = heap.pop() {
            if done[v] {
                continue;
            }
            done[v] = true;
            order.push(v);
            for &(w, e) in &self.adj[v] {
                if !active[e] || done[w] {
                    continue;
                }
                let nd = dist[v] + self.lengths[e];
                let tol = PATH_TIE_TOLERANCE * nd;
                if nd < dist[w] - tol {
                    dist[w] = nd;
                    sigma[w] = sigma[v];
                    preds[w].clear();
                    preds[w].push((v, e));
                    heap.push(Candidate { dist: nd, node: w });
                } else if (nd - dist[w]).abs() <= tol {
                    sigma[w] += sigma[v];
                    preds[w].push((v, e));
                }
            }
        }

        let mut delta = vec![0.0f64; n];
        let mut eb = vec![0.0f64; self.edge_count()];
        for &w in order.iter().rev() {
            for &(v, e) in &preds[w] {
                let c = sigma[v] / sigma[w] * (1.0 + delta[w]);
                eb[e] += c;
                delta[v] += c;
            }
        }
        eb
    }
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    dist: f64,
    node: usize,
}

impl PartialEq for Candidate {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Candidate {}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Candidate {
    // min-heap on distance, then node index
    fn cmp(&self, other: &Self) -> Ordering {
        other.dist.total_cmp(&self.dist).then_with(|| other.node.cmp(&self.node))
    }
}

/// Edge betweenness of every edge, keyed by the sorted endpoint pair.
pub fn edge_betweenness(graph: &DependencyGraph, mode: Betweenness) -> BTreeMap<(ModulePath, ModulePath), f64> {
    let ig = IndexedGraph::new(graph, mode);
    let active = vec![true; ig.edge_count()];
    let sources: Vec<usize> = (0..ig.ids.len()).collect();
    let eb = ig.betweenness(&active, &sources);
    graph.edges.keys().cloned().zip(eb).collect()
}
