//! Independent oracles and generators shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use monobreak::{DependencyGraph, ModulePath, NodeKind};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use regex::Regex;

pub fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/orders-demo")
}

pub fn fixture_ops() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/ops.json")
}

pub fn p(s: &str) -> ModulePath {
    s.parse().unwrap()
}

/// A small weighted graph as plain data: node count and (a, b, weight).
#[derive(Debug, Clone)]
pub struct PlainGraph {
    pub n: usize,
    pub edges: Vec<(usize, usize, f64)>,
}

impl PlainGraph {
    pub fn name(i: usize) -> String {
        format!("n{i}")
    }

    pub fn to_graph(&self) -> DependencyGraph {
        let ids: Vec<ModulePath> = (0..self.n).map(|i| p(&Self::name(i))).collect();
        DependencyGraph::from_weighted_edges(
            ids.iter().map(|id| (id.clone(), NodeKind::Other)),
            self.edges.iter().map(|&(a, b, w)| (&ids[a], &ids[b], w)),
        )
    }

    /// Edge key in the library's convention: lexicographically sorted names.
    pub fn key(&self, e: usize) -> (ModulePath, ModulePath) {
        let (a, b, _) = self.edges[e];
        let (x, y) = (p(&Self::name(a)), p(&Self::name(b)));
        if x <= y {
            (x, y)
        } else {
            (y, x)
        }
    }
}

/// Random connected graph: a random spanning tree plus extra edges with
/// probability `density`. Weights in [0.5, 10).
pub fn random_connected(rng: &mut StdRng, max_nodes: usize, density: f64) -> PlainGraph {
    let n = rng.random_range(2..=max_nodes);
    let mut edges = Vec::new();
    let mut present = std::collections::BTreeSet::new();
    for v in 1..n {
        let u = rng.random_range(0..v);
        present.insert((u, v));
        edges.push((u, v, rng.random_range(0.5..10.0)));
    }
    for u in 0..n {
        for v in u + 1..n {
            if !present.contains(&(u, v)) && rng.random_bool(density) {
                edges.push((u, v, rng.random_range(0.5..10.0)));
            }
        }
    }
    PlainGraph { n, edges }
}

/// Random graph that may be disconnected, with integer weights.
pub fn random_graph(rng: &mut StdRng, max_nodes: usize, density: f64) -> PlainGraph {
    let n = rng.random_range(1..=max_nodes);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random_bool(density) {
                edges.push((u, v, f64::from(rng.random_range(1u32..20))));
            }
        }
    }
    PlainGraph { n, edges }
}

pub fn seeded(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// Edge betweenness by enumerating every simple path between every ordered
/// pair, keeping those of minimum length (relative tolerance `tol`), and
/// crediting each edge on them with its share. Halved for undirected pairs.
pub fn brute_force_betweenness(g: &PlainGraph, lengths: &[f64], tol: f64) -> Vec<f64> {
    let mut adj = vec![Vec::new(); g.n];
    for (e, &(a, b, _)) in g.edges.iter().enumerate() {
        adj[a].push((b, e));
        adj[b].push((a, e));
    }
    let mut eb = vec![0.0; g.edges.len()];
    for s in 0..g.n {
        for t in 0..g.n {
            if s == t {
                continue;
            }
            let mut paths: Vec<(f64, Vec<usize>)> = Vec::new();
            let mut visited = vec![false; g.n];
            visited[s] = true;
            enumerate(s, t, 0.0, &adj, lengths, &mut visited, &mut Vec::new(), &mut paths);
            let Some(best) = paths.iter().map(|(l, _)| *l).reduce(f64::min) else {
                continue;
            };
            let shortest: Vec<&Vec<usize>> =
                paths.iter().filter(|(l, _)| *l <= best + tol * best).map(|(_, p)| p).collect();
            let share = 1.0 / shortest.len() as f64;
            for path in shortest {
                for &e in path {
                    eb[e] += share;
                }
            }
        }
    }
    eb.iter().map(|x| x / 2.0).collect()
}

#[allow(clippy::too_many_arguments)]
fn enumerate(
    v: usize,
    t: usize,
    len: f64,
    adj: &[Vec<(usize, usize)>],
    lengths: &[f64],
    visited: &mut [bool],
    stack: &mut Vec<usize>,
    out: &mut Vec<(f64, Vec<usize>)>,
) {
    if v == t {
        out.push((len, stack.clone()));
        return;
    }
    for &(w, e) in &adj[v] {
        if visited[w] {
            continue;
        }
        visited[w] = true;
        stack.push(e);
        enumerate(w, t, len + lengths[e], adj, lengths, visited, stack, out);
        stack.pop();
        visited[w] = false;
    }
}

/// Modularity by the pairwise definition
/// `Q = 1/(2W) Σ_ij [A_ij − k_i k_j / 2W] δ(c_i, c_j)`.
pub fn pairwise_modularity(g: &PlainGraph, labels: &[usize]) -> f64 {
    let mut a = vec![vec![0.0; g.n]; g.n];
    for &(u, v, w) in &g.edges {
        a[u][v] += w;
        a[v][u] += w;
    }
    let k: Vec<f64> = a.iter().map(|row| row.iter().sum()).collect();
    let two_w: f64 = k.iter().sum();
    if two_w == 0.0 {
        return 0.0;
    }
    let mut q = 0.0;
    for i in 0..g.n {
        for j in 0..g.n {
            if labels[i] == labels[j] {
                q += a[i][j] - k[i] * k[j] / two_w;
            }
        }
    }
    q / two_w
}

/// Reference sites per (class, alias) found by scanning raw lines: an
/// occurrence of the alias as a whole word, not preceded by `.`, and
/// immediately followed by `.` or `(`. Comments are stripped; the scanned
/// text is assumed to contain no string literals mentioning aliases.
pub fn line_scan_counts(text: &str, aliases: &[&str]) -> BTreeMap<(String, String), u32> {
    let class_re = Regex::new(r"^class\s+([A-Za-z_]\w*)").unwrap();
    let word_res: Vec<(String, Regex)> =
        aliases.iter().map(|a| (a.to_string(), Regex::new(&format!(r"\b{a}\b")).unwrap())).collect();
    let mut counts = BTreeMap::new();
    let mut current: Option<String> = None;
    for raw in text.lines() {
        let line = raw.split('#').next().unwrap();
        if let Some(c) = class_re.captures(line) {
            current = Some(c[1].to_string());
            continue;
        }
        if !line.starts_with(' ') && !line.trim().is_empty() {
            current = None;
        }
        let Some(class) = &current else { continue };
        for (alias, re) in &word_res {
            for m in re.find_iter(line) {
                let before = line[..m.start()].chars().last();
                let after = line[m.end()..].chars().next();
                if before != Some('.') && matches!(after, Some('.') | Some('(')) {
                    *counts.entry((class.clone(), alias.clone())).or_insert(0) += 1;
                }
            }
        }
    }
    counts
}

/// Writes a synthetic Django-style project of `files` source files:
/// models with foreign keys, views using models and serializers, and a
/// matching ops-JSON document. Returns the ops-JSON text.
pub fn write_synthetic_project(root: &Path, files: usize, seed: u64) -> String {
    let mut rng = seeded(seed);
    let models = files * 2 / 5;
    let serializers = files / 5;
    let views = files - models - serializers;
    for dir in ["models", "views", "serializers"] {
        fs::create_dir_all(root.join(dir)).unwrap();
    }

    for m in 0..models {
        let mut src = String::from("from django.db import models\n");
        let targets: Vec<usize> =
            (0..rng.random_range(0..3usize)).map(|_| rng.random_range(0..models)).filter(|&t| t != m).collect();
        for t in &targets {
            let _ = writeln!(src, "from .M{t} import M{t}");
        }
        let _ = writeln!(src, "\nclass M{m}(models.Model):");
        let _ = writeln!(src, "    name = models.CharField(max_length=40)");
        for (i, t) in targets.iter().enumerate() {
            if i % 2 == 0 {
                let _ = writeln!(src, "    f{i} = models.ForeignKey(M{t}, on_delete=models.CASCADE)");
            } else {
                let _ = writeln!(src, "    f{i} = models.ManyToManyField('M{t}')");
            }
        }
        fs::write(root.join(format!("models/M{m}.py")), src).unwrap();
    }

    for s in 0..serializers {
        let src = format!("from rest_framework import serializers\n\nclass S{s}(serializers.Serializer):\n    pass\n");
        fs::write(root.join(format!("serializers/S{s}.py")), src).unwrap();
    }

    let mut requests = Vec::new();
    for v in 0..views {
        // views cluster around a home block of models so there is structure to find
        let block = v % 5;
        let mut used: Vec<usize> = (0..rng.random_range(1..4usize))
            .map(|_| (block * models / 5 + rng.random_range(0..(models / 5).max(1))) % models)
            .collect();
        if rng.random_bool(0.3) {
            used.push(rng.random_range(0..models));
        }
        used.sort_unstable();
        used.dedup();
        let ser = rng.random_range(0..serializers.max(1));
        let mut src = String::from("from rest_framework.viewsets import ModelViewSet\n");
        for m in &used {
            let _ = writeln!(src, "from ..models.M{m} import M{m}");
        }
        if serializers > 0 {
            let _ = writeln!(src, "from ..serializers.S{ser} import S{ser}");
        }
        let _ = writeln!(src, "\nclass V{v}(ModelViewSet):");
        let _ = writeln!(src, "    queryset = M{}.objects.all()", used[0]);
        if serializers > 0 {
            let _ = writeln!(src, "    serializer_class = S{ser}");
        }
        let _ = writeln!(src, "\n    def detail(self, request):");
        for m in &used {
            for _ in 0..rng.random_range(1..3) {
                let _ = writeln!(src, "        M{m}.objects.filter(pk=request.id)");
            }
        }
        fs::write(root.join(format!("views/V{v}.py")), src).unwrap();

        let extra = rng.random_range(0..models);
        let touched: Vec<String> =
            used.iter().filter(|_| rng.random_bool(0.7)).chain([&extra]).map(|m| format!("\"models.M{m}\"")).collect();
        requests.push(format!(
            "    {{\"view\": \"views.V{v}\", \"method\": \"detail\", \"calls\": {}, \"models\": [{}]}}",
            rng.random_range(1..500),
            touched.join(", ")
        ));
    }
    format!("{{\n  \"requests\": [\n{}\n  ]\n}}\n", requests.join(",\n"))
}
