use std::collections::BTreeMap;

use super::{ClassKind, ProjectFacts, ScanConfig};
use crate::path::ModulePath;

/// Assigns a kind to every class by following project-internal inheritance
/// and matching external bases against the configured base names.
///
/// Classes on an inheritance cycle become `Other`. Returns warnings.
/// Idempotent: kinds depend only on names and bases.
pub fn classify_classes(facts: &mut ProjectFacts, config: &ScanConfig) -> Vec<String> {
    let ids: Vec<ModulePath> = facts.classes.iter().map(|c| c.id()).collect();
    let pos: BTreeMap<&ModulePath, usize> = ids.iter().enumerate().map(|(i, id)| (id, i)).collect();
    let succ: Vec<Vec<usize>> = facts
        .classes
        .iter()
        .map(|c| c.resolved_bases.iter().flatten().filter_map(|b| pos.get(b).copied()).collect())
        .collect();

    let cyclic = cyclic_nodes(&succ);
    let mut warnings = Vec::new();
    for (i, &on_cycle) in cyclic.iter().enumerate() {
        if on_cycle {
            warnings.push(format!("{}: inheritance cycle; classified as other", ids[i]));
        }
    }

    let mut memo: Vec<Option<ClassKind>> = vec![None; ids.len()];
    for i in 0..ids.len() {
        kind_of(i, facts, config, &cyclic, &pos, &mut memo);
    }
    for (c, k) in facts.classes.iter_mut().zip(memo) {
        c.kind = k.unwrap_or(ClassKind::Other);
    }
    facts.recompute_totals();
    warnings
}

fn kind_of(
    i: usize,
    facts: &ProjectFacts,
    config: &ScanConfig,
    cyclic: &[bool],
    pos: &BTreeMap<&ModulePath, usize>,
    memo: &mut Vec<Option<ClassKind>>,
) -> ClassKind {
    if let Some(k) = memo[i] {
        return k;
    }
    if cyclic[i] {
        memo[i] = Some(ClassKind::Other);
        return ClassKind::Other;
    }
    let class = &facts.classes[i];
    let mut inherited = Vec::new();
    for (raw, resolved) in class.bases.iter().zip(&class.resolved_bases) {
        match resolved.as_ref().and_then(|id| pos.get(id)) {
            Some(&j) => inherited.push(kind_of(j, facts, config, cyclic, pos, memo)),
            None => {
                let last = raw.rsplit('.').next().unwrap_or(raw);
                if config.model_bases.iter().any(|b| b == last) {
                    inherited.push(ClassKind::Model);
                } else if config.view_bases.iter().any(|b| b == last) {
                    inherited.push(ClassKind::View);
                }
            }
        }
    }
    let kind = if inherited.contains(&ClassKind::Model) {
        ClassKind::Model
    } else if inherited.contains(&ClassKind::View) {
        ClassKind::View
    } else if inherited.contains(&ClassKind::Serializer)
        || class.name.contains("Serializer")
        || class.bases.iter().any(|b| b.contains("Serializer"))
    {
        ClassKind::Serializer
    } else {
        ClassKind::Other
    };
    memo[i] = Some(kind);
    kind
}

/// Marks nodes in a non-trivial strongly connected component (Tarjan).
fn cyclic_nodes(succ: &[Vec<usize>]) -> Vec<bool> {
    struct State<'a> {
        succ: &'a [Vec<usize>],
        index: Vec<Option<usize>>,
        low: Vec<usize>,
        on_stack: Vec<bool>,
        stack: Vec<usize>,
        next: usize,
        cyclic: Vec<bool>,
    }

    fn visit(s: &mut State<'_>, v: usize) {
        s.index[v] = Some(s.next);
        s.low[v] = s.next;
        s.next += 1;
        s.stack.push(v);
        s.on_stack[v] = true;
        for k in 0..s.succ[v].len() {
            let w = s.succ[v][k];
            match s.index[w] {
                None => {
                    visit(s, w);
                    s.low[v] = s.low[v].min(s.low[w]);
                }
                Some(iw) if s.on_stack[w] => s.low[v] = s.low[v].min(iw),
                Some(_) => {}
            }
        }
        if Some(s.low[v]) == s.index[v] {
            let mut component = Vec::new();
            while let Some(w) = s.stack.pop() {
                s.on_stack[w] = false;
                component.push(w);
                if w == v {
                    break;
                }
            }
            let self_loop = s.succ[v].contains(&v);
            if component.len() > 1 || self_loop {
                for w in component {
                    s.cyclic[w] = true;
                }
            }
        }
    }

    let n = succ.len();
    let mut s = State {
        succ,
        index: vec![None; n],
        low: vec![0; n],
        on_stack: vec![false; n],
        stack: Vec::new(),
        next: 0,
        cyclic: vec![false; n],
    };
    for v in 0..n {
        if s.index[v].is_none() {
            visit(&mut s, v);
        }
    }
    s.cyclic
}
