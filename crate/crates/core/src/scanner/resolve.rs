//! Project-wide name resolution: import bindings, reference chains, class
//! dependencies and relation targets.

use std::collections::{BTreeMap, BTreeSet};

use super::parse::{FileFacts, ImportForm, ImportStmt, RelationTarget};
use super::{module_set, CallFact, ClassKind, Dependency, ImportFact, ProjectFacts, RelationFact};
use crate::path::ModulePath;

/// Re-export chains longer than this are not followed.
const MAX_REEXPORT_DEPTH: usize = 8;

pub(crate) struct ParsedFile {
    pub module: ModulePath,
    pub facts: FileFacts,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Binding {
    Class(ModulePath),
    Module(ModulePath),
    /// Project-internal but not a class or module (function, constant).
    InternalOther,
    External,
}

struct Index<'a> {
    files: &'a [ParsedFile],
    modules: BTreeSet<ModulePath>,
    file_of_module: BTreeMap<&'a ModulePath, usize>,
    classes_by_module: BTreeMap<&'a ModulePath, BTreeMap<&'a str, ModulePath>>,
}

impl<'a> Index<'a> {
    fn new(files: &'a [ParsedFile], kept: &BTreeSet<(usize, String)>) -> Self {
        let modules = module_set(files.iter().map(|f| &f.module));
        let mut file_of_module = BTreeMap::new();
        let mut classes_by_module: BTreeMap<&ModulePath, BTreeMap<&str, ModulePath>> = BTreeMap::new();
        for (i, f) in files.iter().enumerate() {
            file_of_module.entry(&f.module).or_insert(i);
            for c in &f.facts.classes {
                if kept.contains(&(i, c.name.clone())) {
                    classes_by_module.entry(&f.module).or_default().entry(&c.name).or_insert_with(|| c.id());
                }
            }
        }
        Index { files, modules, file_of_module, classes_by_module }
    }

    /// Maps a possibly-truncated absolute path onto a project module: exact
    /// match, or a unique suffix match for paths of two or more segments.
    fn normalize(&self, path: &ModulePath) -> Option<ModulePath> {
        if self.modules.contains(path) {
            return Some(path.clone());
        }
        if !path.as_str().contains('.') {
            return None;
        }
        let mut hits = self.modules.iter().filter(|m| m.ends_with(path));
        let first = hits.next()?;
        hits.next().is_none().then(|| first.clone())
    }

    fn name_in_module(&self, module: &ModulePath, name: &str, depth: usize) -> Option<Binding> {
        if let Some(id) = self.classes_by_module.get(module).and_then(|m| m.get(name)) {
            return Some(Binding::Class(id.clone()));
        }
        if depth < MAX_REEXPORT_DEPTH {
            if let Some(&fi) = self.file_of_module.get(module) {
                if let Some(imp) = self.files[fi].facts.imports.iter().rev().find(|i| i.alias == name) {
                    if let b @ (Binding::Class(_) | Binding::Module(_)) = self.bind(imp, depth + 1) {
                        return Some(b);
                    }
                }
            }
        }
        let child = module.child(name).ok()?;
        self.modules.contains(&child).then_some(Binding::Module(child))
    }

    fn bind(&self, imp: &ImportStmt, depth: usize) -> Binding {
        match imp.form {
            ImportForm::Import => match self.normalize(&imp.bound) {
                Some(m) => Binding::Module(m),
                None => Binding::External,
            },
            ImportForm::From => {
                let parent = imp.bound.parent();
                let name = imp.bound.last();
                let parent = parent.and_then(|p| self.normalize(&p));
                match parent {
                    Some(p) => self.name_in_module(&p, name, depth).unwrap_or(Binding::InternalOther),
                    None => {
                        let top = imp.bound.clone();
                        if self.modules.contains(&top) {
                            Binding::Module(top)
                        } else if imp.relative {
                            Binding::InternalOther
                        } else {
                            Binding::External
                        }
                    }
                }
            }
        }
    }
}

struct FileScope<'a> {
    module: &'a ModulePath,
    local_classes: BTreeMap<&'a str, ModulePath>,
    aliases: BTreeMap<&'a str, Binding>,
}

impl FileScope<'_> {
    /// Resolves a reference chain to a project class id, and whether its root
    /// came in through an import.
    fn resolve_chain(&self, index: &Index<'_>, chain: &[String]) -> Option<(ModulePath, bool)> {
        let root = chain.first()?;
        if let Some(id) = self.local_classes.get(root.as_str()) {
            return Some((id.clone(), false));
        }
        match self.aliases.get(root.as_str())? {
            Binding::Class(id) => Some((id.clone(), true)),
            Binding::Module(m) => {
                let mut module = m.clone();
                for seg in &chain[1..] {
                    match index.name_in_module(&module, seg, 0)? {
                        Binding::Class(id) => return Some((id, true)),
                        Binding::Module(next) => module = next,
                        _ => return None,
                    }
                }
                None
            }
            _ => None,
        }
    }
}

pub(crate) fn resolve(facts: &mut ProjectFacts, mut files: Vec<ParsedFile>) {
    // Class ids must be unique project-wide; the first definition wins.
    let mut seen_ids = BTreeSet::new();
    let mut kept = BTreeSet::new();
    for (i, f) in files.iter_mut().enumerate() {
        facts.warnings.append(&mut f.facts.warnings);
        for c in &f.facts.classes {
            if seen_ids.insert(c.id()) {
                kept.insert((i, c.name.clone()));
            } else {
                facts.warnings.push(format!("{}: class {} duplicates id {}; ignored", f.module, c.name, c.id()));
            }
        }
    }
    let index = Index::new(&files, &kept);

    let mut scopes = Vec::with_capacity(files.len());
    for (i, f) in files.iter().enumerate() {
        let local_classes = f
            .facts
            .classes
            .iter()
            .filter(|c| kept.contains(&(i, c.name.clone())))
            .map(|c| (c.name.as_str(), c.id()))
            .collect();
        let mut aliases = BTreeMap::new();
        for imp in &f.facts.imports {
            let binding = index.bind(imp, 0);
            facts.imports.push(ImportFact {
                importer: f.module.clone(),
                imported: match &binding {
                    Binding::Class(id) | Binding::Module(id) => id.clone(),
                    _ => imp.imported.clone(),
                },
                alias: imp.alias.clone(),
                external: binding == Binding::External,
            });
            aliases.insert(imp.alias.as_str(), binding);
        }
        scopes.push(FileScope { module: &f.module, local_classes, aliases });
    }

    for (i, f) in files.iter().enumerate() {
        let scope = &scopes[i];
        let classes: Vec<_> = f.facts.classes.iter().filter(|c| kept.contains(&(i, c.name.clone()))).collect();

        for c in &classes {
            let mut c = (*c).clone();
            c.resolved_bases = c
                .bases
                .iter()
                .map(|b| {
                    let chain: Vec<String> = b.split('.').map(String::from).collect();
                    scope.resolve_chain(&index, &chain).map(|(id, _)| id)
                })
                .collect();
            facts.classes.push(c);
        }

        // (user, used) -> (imports, calls)
        let mut deps: BTreeMap<(ModulePath, ModulePath), (u32, u32)> = BTreeMap::new();
        let mut calls: BTreeMap<(ModulePath, ModulePath, String), u32> = BTreeMap::new();
        for site in &f.facts.calls {
            let Some(user) = scope.local_classes.get(site.class.as_str()) else { continue };
            let Some((used, via_import)) = scope.resolve_chain(&index, &site.chain) else { continue };
            if &used == user {
                continue;
            }
            let entry = deps.entry((user.clone(), used.clone())).or_default();
            entry.1 += site.count;
            if via_import {
                entry.0 = 1;
            }
            *calls.entry((user.clone(), used, site.callee_alias().to_string())).or_default() += site.count;
        }
        let mut referenced_aliases = BTreeSet::new();
        for (class, root) in &f.facts.mentions {
            referenced_aliases.insert(root.as_str());
            let Some(user) = scope.local_classes.get(class.as_str()) else { continue };
            if let Some(Binding::Class(used)) = scope.aliases.get(root.as_str()) {
                if !scope.local_classes.contains_key(root.as_str()) && used != user {
                    deps.entry((user.clone(), used.clone())).or_default().0 = 1;
                }
            }
        }
        for (alias, binding) in &scope.aliases {
            let Binding::Class(used) = binding else { continue };
            if referenced_aliases.contains(alias) || scope.local_classes.contains_key(alias) {
                continue;
            }
            match classes.as_slice() {
                [] => {}
                [only] => {
                    let user = only.id();
                    if &user != used {
                        deps.entry((user, used.clone())).or_default().0 = 1;
                    }
                }
                _ => facts
                    .warnings
                    .push(format!("{}: import {alias} ({used}) is used by no class; dropped", scope.module)),
            }
        }
        facts.dependencies.extend(deps.into_iter().filter(|(_, (imp, calls))| imp + calls > 0).map(
            |((user, used), (num_imports, num_method_calls))| Dependency { user, used, num_imports, num_method_calls },
        ));
        facts.calls.extend(calls.into_iter().map(|((caller, callee, callee_alias), count)| CallFact {
            caller,
            callee,
            callee_alias,
            count,
        }));
    }

    // Relation targets; endpoint kinds are checked after classification.
    let mut by_name: BTreeMap<&str, Vec<ModulePath>> = BTreeMap::new();
    for c in &facts.classes {
        by_name.entry(c.name.as_str()).or_default().push(c.id());
    }
    let mut relations = Vec::new();
    for (i, f) in files.iter().enumerate() {
        let scope = &scopes[i];
        for rel in &f.facts.relations {
            let Some(source) = scope.local_classes.get(rel.class.as_str()) else { continue };
            let target = match &rel.target {
                RelationTarget::Name(chain) => scope.resolve_chain(&index, chain).map(|(id, _)| id),
                RelationTarget::Literal(s) if s == "self" => Some(source.clone()),
                RelationTarget::Literal(s) => {
                    let name = s.rsplit('.').next().unwrap_or(s);
                    match by_name.get(name).map(Vec::as_slice) {
                        Some([one]) => Some(one.clone()),
                        Some(many) if many.len() > 1 => {
                            facts.warnings.push(format!(
                                "{}: line {}: relation target '{s}' is ambiguous ({} classes named {name}); unresolved",
                                f.module,
                                rel.line,
                                many.len()
                            ));
                            continue;
                        }
                        _ => None,
                    }
                }
            };
            match target {
                Some(t) if &t == source => {}
                Some(target_model) => {
                    relations.push(RelationFact { source_model: source.clone(), target_model, relation_kind: rel.kind })
                }
                None => facts.warnings.push(format!(
                    "{}: line {}: relation target of {}.{} not found in project",
                    f.module, rel.line, rel.class, rel.field
                )),
            }
        }
    }
    facts.relations = relations;
}

/// Keeps only model-to-model relations. Runs after classification.
pub(crate) fn finish_relations(facts: &mut ProjectFacts) {
    let kinds: BTreeMap<ModulePath, ClassKind> = facts.classes.iter().map(|c| (c.id(), c.kind)).collect();
    let mut kept = Vec::new();
    for rel in std::mem::take(&mut facts.relations) {
        let is_model = |id: &ModulePath| kinds.get(id) == Some(&ClassKind::Model);
        if is_model(&rel.source_model) && is_model(&rel.target_model) {
            kept.push(rel);
        } else {
            facts.warnings.push(format!(
                "relation {} -> {} ignored: both ends must be models",
                rel.source_model, rel.target_model
            ));
        }
    }
    facts.relations = kept;
}
