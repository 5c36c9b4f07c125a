//! Project scanning: walks a source tree, parses each file and resolves the
//! per-file facts into project-wide classes and class-to-class dependencies.

pub mod lexer;
pub mod parse;

mod classify;
mod resolve;

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::path::ModulePath;

pub use classify::classify_classes;
pub use parse::{parse_file, FileFacts};

pub const SOURCE_EXTENSION: &str = "py";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassKind {
    Model,
    View,
    Serializer,
    Other,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RelationKind {
    ForeignKey,
    OneToOne,
    ManyToMany,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassFact {
    pub name: String,
    pub module: ModulePath,
    /// Base expressions as written, e.g. `models.Model`.
    pub bases: Vec<String>,
    /// Project class each base resolves to, parallel to `bases`.
    pub resolved_bases: Vec<Option<ModulePath>>,
    pub kind: ClassKind,
    pub line: u32,
}

impl ClassFact {
    /// Graph node id: the module path when the class is named after its file
    /// (`models/Item.py::Item` → `models.Item`), else `module.Class`.
    pub fn id(&self) -> ModulePath {
        if self.module.last() == self.name {
            self.module.clone()
        } else {
            self.module.child(&self.name).expect("class names are identifiers")
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImportFact {
    pub importer: ModulePath,
    pub imported: ModulePath,
    pub alias: String,
    /// Framework or stdlib import; never contributes to the graph.
    pub external: bool,
}

/// Resolved reference sites from one class to another project class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CallFact {
    pub caller: ModulePath,
    pub callee: ModulePath,
    pub callee_alias: String,
    pub count: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RelationFact {
    pub source_model: ModulePath,
    pub target_model: ModulePath,
    pub relation_kind: RelationKind,
}

/// Static dependency of one class on another: the `NumImports` and
/// `NumMethodCalls` terms of the static edge weight.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Dependency {
    pub user: ModulePath,
    pub used: ModulePath,
    /// 0 or 1: an import binds once per file.
    pub num_imports: u32,
    pub num_method_calls: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum FileStatus {
    Parsed,
    Skipped { reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileRecord {
    /// Path relative to the project root, `/`-separated.
    pub path: String,
    pub module: Option<ModulePath>,
    #[serde(flatten)]
    pub status: FileStatus,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Totals {
    pub files: usize,
    pub views: usize,
    pub models: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProjectFacts {
    pub files: Vec<FileRecord>,
    pub classes: Vec<ClassFact>,
    pub imports: Vec<ImportFact>,
    pub calls: Vec<CallFact>,
    pub dependencies: Vec<Dependency>,
    pub relations: Vec<RelationFact>,
    pub totals: Totals,
    pub warnings: Vec<String>,
}

impl ProjectFacts {
    pub fn skipped(&self) -> impl Iterator<Item = &FileRecord> {
        self.files.iter().filter(|f| matches!(f.status, FileStatus::Skipped { .. }))
    }

    pub fn class(&self, id: &ModulePath) -> Option<&ClassFact> {
        self.classes.iter().find(|c| &c.id() == id)
    }

    pub fn kind_of(&self, id: &ModulePath) -> Option<ClassKind> {
        self.class(id).map(|c| c.kind)
    }

    pub(crate) fn recompute_totals(&mut self) {
        self.totals = Totals {
            files: self.files.len(),
            views: self.classes.iter().filter(|c| c.kind == ClassKind::View).count(),
            models: self.classes.iter().filter(|c| c.kind == ClassKind::Model).count(),
        };
    }
}

/// Scanner settings. Base-name lists extend the defaults.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanConfig {
    pub model_bases: Vec<String>,
    pub view_bases: Vec<String>,
    pub ignore_dirs: Vec<String>,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            model_bases: vec!["Model".into()],
            view_bases: vec!["ModelViewSet".into()],
            ignore_dirs: vec!["migrations".into(), "tests".into(), "venv".into()],
        }
    }
}

impl ScanConfig {
    /// Loads a TOML file whose lists are appended to the defaults.
    pub fn from_toml_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
        Self::from_toml_str(&text).map_err(|message| Error::Config { path: path.to_path_buf(), message })
    }

    pub fn from_toml_str(text: &str) -> std::result::Result<Self, String> {
        #[derive(Deserialize, Default)]
        #[serde(default, deny_unknown_fields)]
        struct Extra {
            model_bases: Vec<String>,
            view_bases: Vec<String>,
            ignore_dirs: Vec<String>,
        }
        let extra: Extra = toml::from_str(text).map_err(|e| e.to_string())?;
        let mut cfg = ScanConfig::default();
        for (dst, src) in [
            (&mut cfg.model_bases, extra.model_bases),
            (&mut cfg.view_bases, extra.view_bases),
            (&mut cfg.ignore_dirs, extra.ignore_dirs),
        ] {
            for item in src {
                if !dst.contains(&item) {
                    dst.push(item);
                }
            }
        }
        Ok(cfg)
    }

    fn ignores(&self, dir_name: &str) -> bool {
        dir_name.starts_with('.') || self.ignore_dirs.iter().any(|d| d == dir_name)
    }
}

struct SourceFile {
    rel: String,
    abs: PathBuf,
    module: Option<(ModulePath, bool)>,
}

fn collect_sources(root: &Path, config: &ScanConfig) -> Result<Vec<SourceFile>> {
    let meta = fs::metadata(root).map_err(|source| Error::ProjectDir { path: root.to_path_buf(), source })?;
    if !meta.is_dir() {
        return Err(Error::NotADirectory { path: root.to_path_buf() });
    }
    let mut out = Vec::new();
    let mut stack = vec![(root.to_path_buf(), Vec::<String>::new())];
    while let Some((dir, rel)) = stack.pop() {
        let entries = fs::read_dir(&dir).map_err(|source| {
            if dir == root {
                Error::ProjectDir { path: root.to_path_buf(), source }
            } else {
                Error::Io { path: dir.clone(), source }
            }
        })?;
        let mut entries: Vec<_> =
            entries.filter_map(|e| e.ok()).map(|e| (e.file_name().to_string_lossy().into_owned(), e.path())).collect();
        entries.sort();
        for (name, path) in entries {
            let Ok(ft) = fs::symlink_metadata(&path).map(|m| m.file_type()) else { continue };
            let mut child_rel = rel.clone();
            child_rel.push(name.clone());
            if ft.is_dir() {
                if !config.ignores(&name) {
                    stack.push((path, child_rel));
                }
            } else if path.extension().is_some_and(|e| e == SOURCE_EXTENSION) && (ft.is_file() || ft.is_symlink()) {
                out.push(SourceFile { module: module_for(&child_rel), rel: child_rel.join("/"), abs: path });
            }
        }
    }
    out.sort_by(|a, b| a.rel.cmp(&b.rel));
    Ok(out)
}

/// `views/ViewItem.py` → `views.ViewItem`; `app/__init__.py` → (`app`, package).
fn module_for(rel: &[String]) -> Option<(ModulePath, bool)> {
    let (file, dirs) = rel.split_last()?;
    let stem = file.strip_suffix(&format!(".{SOURCE_EXTENSION}"))?;
    if stem == "__init__" {
        if dirs.is_empty() {
            return ModulePath::from_segments(["__init__"]).ok().map(|m| (m, false));
        }
        return ModulePath::from_segments(dirs).ok().map(|m| (m, true));
    }
    ModulePath::from_segments(dirs.iter().map(String::as_str).chain([stem])).ok().map(|m| (m, false))
}

/// Scans `root` and returns classified, resolved facts.
pub fn scan_project(root: &Path, config: &ScanConfig) -> Result<ProjectFacts> {
    let sources = collect_sources(root, config)?;

    let parsed: Vec<(FileRecord, Option<(ModulePath, FileFacts)>)> = sources
        .par_iter()
        .map(|src| {
            let Some((module, is_package)) = &src.module else {
                let record = FileRecord {
                    path: src.rel.clone(),
                    module: None,
                    status: FileStatus::Skipped { reason: "file name is not a valid module name".into() },
                };
                return (record, None);
            };
            let skipped = |reason: String| FileRecord {
                path: src.rel.clone(),
                module: Some(module.clone()),
                status: FileStatus::Skipped { reason },
            };
            let bytes = match fs::read(&src.abs) {
                Ok(b) => b,
                Err(e) => return (skipped(format!("unreadable: {e}")), None),
            };
            let text = String::from_utf8_lossy(&bytes);
            match parse_file(&text, module, *is_package) {
                Ok(facts) => (
                    FileRecord { path: src.rel.clone(), module: Some(module.clone()), status: FileStatus::Parsed },
                    Some((module.clone(), facts)),
                ),
                Err(e) => (skipped(format!("parse error at {e}")), None),
            }
        })
        .collect();

    let mut facts = ProjectFacts::default();
    let mut files = Vec::new();
    for (record, parsed) in parsed {
        if let FileStatus::Skipped { reason } = &record.status {
            facts.warnings.push(format!("{}: skipped: {reason}", record.path));
        }
        facts.files.push(record);
        if let Some((module, file_facts)) = parsed {
            files.push(resolve::ParsedFile { module, facts: file_facts });
        }
    }
    resolve::resolve(&mut facts, files);
    let warnings = classify_classes(&mut facts, config);
    facts.warnings.extend(warnings);
    resolve::finish_relations(&mut facts);
    facts.recompute_totals();
    Ok(facts)
}

/// Modules present in the project, including package prefixes.
pub(crate) fn module_set<'a>(modules: impl Iterator<Item = &'a ModulePath>) -> BTreeSet<ModulePath> {
    let mut set = BTreeSet::new();
    for m in modules {
        let mut cur = Some(m.clone());
        while let Some(p) = cur {
            cur = p.parent();
            set.insert(p);
        }
    }
    set
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn module_paths_for_files() {
        let rel = |s: &str| s.split('/').map(String::from).collect::<Vec<_>>();
        assert_eq!(module_for(&rel("views/ViewItem.py")).unwrap().0.as_str(), "views.ViewItem");
        assert_eq!(module_for(&rel("app/__init__.py")).unwrap(), ("app".parse().unwrap(), true));
        assert_eq!(module_for(&rel("__init__.py")).unwrap(), ("__init__".parse().unwrap(), false));
        assert!(module_for(&rel("app/0001_initial.py")).is_none());
        assert!(module_for(&rel("my-app/x.py")).is_none());
    }

    #[test]
    fn config_extends_defaults() {
        let cfg = ScanConfig::from_toml_str("model_bases = [\"BaseModel\"]\nignore_dirs = [\"scripts\", \"tests\"]\n")
            .unwrap();
        assert_eq!(cfg.model_bases, ["Model", "BaseModel"]);
        assert_eq!(cfg.view_bases, ["ModelViewSet"]);
        assert_eq!(cfg.ignore_dirs, ["migrations", "tests", "venv", "scripts"]);
        assert!(ScanConfig::from_toml_str("unknown = 1").is_err());
    }

    #[test]
    fn class_ids() {
        let class = |module: &str, name: &str| ClassFact {
            name: name.into(),
            module: module.parse().unwrap(),
            bases: vec![],
            resolved_bases: vec![],
            kind: ClassKind::Other,
            line: 1,
        };
        assert_eq!(class("models.Item", "Item").id().as_str(), "models.Item");
        assert_eq!(class("shop.models", "Item").id().as_str(), "shop.models.Item");
    }
}
