//! Statement-level recognizer over the token stream.
//!
//! Recognized constructs: `import` / `from ... import` statements, top-level
//! `class` headers, reference sites rooted at an import alias or a local
//! class, and relation fields declared with `ForeignKey`, `OneToOneField` or
//! `ManyToManyField`. Everything else is skipped.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::lexer::{tokenize, LexError, Token, TokenKind};
use super::{ClassFact, ClassKind, RelationKind};
use crate::path::{is_identifier, ModulePath};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ImportForm {
    /// `import a.b` / `import a.b as c`
    Import,
    /// `from a import b`
    From,
}

/// One name bound by an import statement, with relative dots already resolved.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImportStmt {
    /// Full dotted target as written (`rest_framework.viewsets.ModelViewSet`).
    pub imported: ModulePath,
    /// What the alias refers to. Differs from `imported` only for
    /// `import a.b.c`, which binds `a`.
    pub bound: ModulePath,
    pub alias: String,
    pub form: ImportForm,
    /// Written with leading dots; always project-internal.
    pub relative: bool,
    pub line: u32,
}

/// Aggregated reference sites in one class: a call or attribute access whose
/// leftmost identifier is `chain[0]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CallSite {
    pub class: String,
    /// Leading dotted identifiers of the expression, e.g. `[Item, objects, all]`.
    pub chain: Vec<String>,
    pub count: u32,
}

impl CallSite {
    pub fn callee_alias(&self) -> &str {
        &self.chain[0]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum RelationTarget {
    Name(Vec<String>),
    Literal(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawRelation {
    pub class: String,
    pub field: String,
    pub kind: RelationKind,
    pub target: RelationTarget,
    pub line: u32,
}

/// Everything learned from a single file before project-wide resolution.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileFacts {
    pub classes: Vec<ClassFact>,
    pub imports: Vec<ImportStmt>,
    pub calls: Vec<CallSite>,
    /// (class, root identifier) for every reference, including bare names.
    pub mentions: BTreeSet<(String, String)>,
    pub relations: Vec<RawRelation>,
    pub warnings: Vec<String>,
}

impl FileFacts {
    pub fn call_count(&self, class: &str, alias: &str) -> u32 {
        self.calls.iter().filter(|c| c.class == class && c.callee_alias() == alias).map(|c| c.count).sum()
    }
}

struct Statement<'a> {
    indent: usize,
    line: u32,
    /// First statement of its logical line.
    leading: bool,
    tokens: &'a [Token],
}

/// Parses one source file. `is_package` marks `__init__.py`, which changes
/// what relative imports are relative to.
///
/// Tokenizer failures abort the file; statement-level problems become
/// warnings and the statement is skipped.
pub fn parse_file(text: &str, module: &ModulePath, is_package: bool) -> Result<FileFacts, LexError> {
    let lines = tokenize(text)?;
    let mut statements = Vec::new();
    for line in &lines {
        for (i, tokens) in split_semicolons(&line.tokens).into_iter().enumerate() {
            if !tokens.is_empty() {
                statements.push(Statement { indent: line.indent, line: tokens[0].line, leading: i == 0, tokens });
            }
        }
    }

    let mut facts = FileFacts::default();
    let warn = |facts: &mut FileFacts, line: u32, msg: String| {
        facts.warnings.push(format!("{module}: line {line}: {msg}"));
    };

    // First pass: imports anywhere in the file, and top-level class headers.
    let mut seen_imports = BTreeSet::new();
    let package = package_of(module, is_package);
    for st in &statements {
        let Some(first) = st.tokens[0].name() else { continue };
        match first {
            "import" | "from" => match parse_import(st.tokens, &package) {
                Ok(stmts) => {
                    for imp in stmts {
                        if seen_imports.insert((imp.alias.clone(), imp.imported.clone())) {
                            facts.imports.push(imp);
                        }
                    }
                }
                Err(ImportIssue::Wildcard(m)) => {
                    warn(&mut facts, st.line, format!("wildcard import from {m} ignored"));
                }
                Err(ImportIssue::Malformed(msg)) => warn(&mut facts, st.line, format!("malformed import: {msg}")),
            },
            "class" if st.indent == 0 && st.leading => match parse_class_header(st.tokens) {
                Some((name, bases, _)) => {
                    if facts.classes.iter().any(|c| c.name == name) {
                        warn(&mut facts, st.line, format!("duplicate class {name}; keeping the first definition"));
                    } else {
                        facts.classes.push(ClassFact {
                            name,
                            module: module.clone(),
                            bases,
                            resolved_bases: Vec::new(),
                            kind: ClassKind::Other,
                            line: st.line,
                        });
                    }
                }
                None => warn(&mut facts, st.line, "malformed class header".to_string()),
            },
            _ => {}
        }
    }

    let mut roots: BTreeSet<&str> = facts.imports.iter().map(|i| i.alias.as_str()).collect();
    let class_names: Vec<String> = facts.classes.iter().map(|c| c.name.clone()).collect();
    roots.extend(class_names.iter().map(String::as_str));

    // Second pass: reference sites and relation fields inside class bodies.
    let mut calls: BTreeMap<(String, Vec<String>), u32> = BTreeMap::new();
    let mut mentions = BTreeSet::new();
    let mut relations = Vec::new();
    let mut current: Option<String> = None;
    for st in &statements {
        let first = st.tokens[0].name();
        if st.indent == 0 && st.leading {
            current = None;
            if first == Some("class") {
                if let Some((name, _, body_start)) = parse_class_header(st.tokens) {
                    if class_names.contains(&name) {
                        let body = &st.tokens[body_start..];
                        count_references(&name, body, &roots, &mut calls, &mut mentions);
                        if let Some(rel) = parse_relation(&name, body) {
                            relations.push(rel);
                        }
                        current = Some(name);
                    }
                }
                continue;
            }
        }
        let Some(class) = current.as_deref() else { continue };
        if matches!(first, Some("import" | "from")) {
            continue;
        }
        count_references(class, st.tokens, &roots, &mut calls, &mut mentions);
        if let Some(rel) = parse_relation(class, st.tokens) {
            relations.push(rel);
        }
    }

    facts.calls = calls.into_iter().map(|((class, chain), count)| CallSite { class, chain, count }).collect();
    facts.mentions = mentions;
    facts.relations = relations;
    Ok(facts)
}

fn split_semicolons(tokens: &[Token]) -> Vec<&[Token]> {
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut start = 0;
    for (i, t) in tokens.iter().enumerate() {
        match &t.kind {
            TokenKind::Op("(" | "[" | "{") => depth += 1,
            TokenKind::Op(")" | "]" | "}") => depth = depth.saturating_sub(1),
            TokenKind::Op(";") if depth == 0 => {
                out.push(&tokens[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&tokens[start..]);
    out
}

fn package_of(module: &ModulePath, is_package: bool) -> Vec<String> {
    let mut segs: Vec<String> = module.segments().map(str::to_string).collect();
    if !is_package {
        segs.pop();
    }
    segs
}

enum ImportIssue {
    Wildcard(String),
    Malformed(String),
}

/// Reads `a.b.c` starting at `i`; returns the segments and the index after.
fn dotted_name(tokens: &[Token], mut i: usize) -> Option<(Vec<String>, usize)> {
    let mut segs = vec![tokens.get(i)?.name()?.to_string()];
    i += 1;
    while tokens.get(i).is_some_and(|t| t.is_op(".")) {
        let seg = tokens.get(i + 1)?.name()?;
        segs.push(seg.to_string());
        i += 2;
    }
    Some((segs, i))
}

fn parse_import(tokens: &[Token], package: &[String]) -> Result<Vec<ImportStmt>, ImportIssue> {
    let line = tokens[0].line;
    let malformed = |m: &str| ImportIssue::Malformed(m.to_string());
    let to_path = |segs: &[String]| ModulePath::from_segments(segs).map_err(|_| malformed("invalid module name"));

    if tokens[0].name() == Some("import") {
        let mut out = Vec::new();
        let mut i = 1;
        loop {
            let (segs, next) = dotted_name(tokens, i).ok_or_else(|| malformed("expected module name"))?;
            i = next;
            let imported = to_path(&segs)?;
            let (alias, bound) = if tokens.get(i).and_then(Token::name) == Some("as") {
                let alias = tokens.get(i + 1).and_then(Token::name).ok_or_else(|| malformed("expected alias"))?;
                i += 2;
                (alias.to_string(), imported.clone())
            } else {
                (segs[0].clone(), to_path(&segs[..1])?)
            };
            out.push(ImportStmt { imported, bound, alias, form: ImportForm::Import, relative: false, line });
            match tokens.get(i) {
                None => return Ok(out),
                Some(t) if t.is_op(",") => i += 1,
                Some(_) => return Err(malformed("unexpected token")),
            }
        }
    }

    // from [dots][module] import names
    let mut i = 1;
    let mut level = 0usize;
    while let Some(t) = tokens.get(i) {
        match t.kind {
            TokenKind::Op(".") => level += 1,
            TokenKind::Op("...") => level += 3,
            _ => break,
        }
        i += 1;
    }
    let mut base: Vec<String> = Vec::new();
    if level > 0 {
        let up = level - 1;
        if up > package.len() {
            return Err(malformed("relative import beyond project root"));
        }
        base.extend_from_slice(&package[..package.len() - up]);
    }
    if tokens.get(i).and_then(Token::name) != Some("import") {
        let (segs, next) = dotted_name(tokens, i).ok_or_else(|| malformed("expected module name"))?;
        base.extend(segs);
        i = next;
    }
    if tokens.get(i).and_then(Token::name) != Some("import") {
        return Err(malformed("expected 'import'"));
    }
    i += 1;
    if tokens.get(i).is_some_and(|t| t.is_op("*")) {
        return Err(ImportIssue::Wildcard(base.join(".")));
    }
    let mut end = tokens.len();
    if tokens.get(i).is_some_and(|t| t.is_op("(")) {
        if !tokens.last().is_some_and(|t| t.is_op(")")) {
            return Err(malformed("unbalanced parentheses"));
        }
        i += 1;
        end -= 1;
    }
    let mut out = Vec::new();
    while i < end {
        let name = tokens[i].name().ok_or_else(|| malformed("expected imported name"))?;
        i += 1;
        let mut alias = name;
        if i < end && tokens[i].name() == Some("as") {
            alias = tokens.get(i + 1).and_then(Token::name).ok_or_else(|| malformed("expected alias"))?;
            i += 2;
        }
        let mut segs = base.clone();
        segs.push(name.to_string());
        let imported = to_path(&segs)?;
        out.push(ImportStmt {
            bound: imported.clone(),
            imported,
            alias: alias.to_string(),
            form: ImportForm::From,
            relative: level > 0,
            line,
        });
        if i < end {
            if !tokens[i].is_op(",") {
                return Err(malformed("unexpected token"));
            }
            i += 1;
        }
    }
    if out.is_empty() {
        return Err(malformed("nothing imported"));
    }
    Ok(out)
}

/// `class Name[(bases)]: [body]` → (name, raw bases, index of first body token).
fn parse_class_header(tokens: &[Token]) -> Option<(String, Vec<String>, usize)> {
    let name = tokens.get(1)?.name()?;
    if !is_identifier(name) || is_keyword(name) {
        return None;
    }
    let mut bases = Vec::new();
    let mut i = 2;
    if tokens.get(i).is_some_and(|t| t.is_op("(")) {
        let mut depth = 0usize;
        let mut arg_start = i + 1;
        loop {
            let t = tokens.get(i)?;
            match t.kind {
                TokenKind::Op("(" | "[" | "{") => depth += 1,
                TokenKind::Op(")" | "]" | "}") => depth -= 1,
                _ => {}
            }
            if depth == 1 && t.is_op(",") || depth == 0 {
                let arg = &tokens[arg_start..i];
                let is_kwarg = arg.get(1).is_some_and(|t| t.is_op("=")) || arg.first().is_some_and(|t| t.is_op("**"));
                if !is_kwarg {
                    if let Some((segs, _)) = dotted_name(arg, 0) {
                        bases.push(segs.join("."));
                    }
                }
                arg_start = i + 1;
            }
            i += 1;
            if depth == 0 {
                break;
            }
        }
    }
    if !tokens.get(i)?.is_op(":") {
        return None;
    }
    Some((name.to_string(), bases, i + 1))
}

fn count_references(
    class: &str,
    tokens: &[Token],
    roots: &BTreeSet<&str>,
    calls: &mut BTreeMap<(String, Vec<String>), u32>,
    mentions: &mut BTreeSet<(String, String)>,
) {
    for (i, tok) in tokens.iter().enumerate() {
        let Some(name) = tok.name() else { continue };
        if i > 0 && tokens[i - 1].is_op(".") {
            continue;
        }
        if !roots.contains(name) {
            continue;
        }
        mentions.insert((class.to_string(), name.to_string()));
        let Some(next) = tokens.get(i + 1) else { continue };
        if next.is_op(".") || next.is_op("(") {
            let (chain, _) = dotted_name(tokens, i).unwrap_or_else(|| (vec![name.to_string()], i + 1));
            *calls.entry((class.to_string(), chain)).or_default() += 1;
        }
    }
}

fn relation_kind(name: &str) -> Option<RelationKind> {
    match name {
        "ForeignKey" => Some(RelationKind::ForeignKey),
        "OneToOneField" => Some(RelationKind::OneToOne),
        "ManyToManyField" => Some(RelationKind::ManyToMany),
        _ => None,
    }
}

/// `field = [x.]ForeignKey(Target, ...)` or `...(to='Target')`.
fn parse_relation(class: &str, tokens: &[Token]) -> Option<RawRelation> {
    let field = tokens.first()?.name()?;
    let mut i = 1;
    if tokens.get(i).is_some_and(|t| t.is_op(":")) {
        // annotated assignment: skip to '='
        i = tokens.iter().position(|t| t.is_op("="))?;
    }
    if !tokens.get(i)?.is_op("=") {
        return None;
    }
    let (chain, after) = dotted_name(tokens, i + 1)?;
    let kind = relation_kind(chain.last()?)?;
    if !tokens.get(after)?.is_op("(") {
        return None;
    }
    // split top-level arguments
    let mut args: Vec<&[Token]> = Vec::new();
    let mut depth = 0usize;
    let mut start = after + 1;
    for j in after..tokens.len() {
        match tokens[j].kind {
            TokenKind::Op("(" | "[" | "{") => depth += 1,
            TokenKind::Op(")" | "]" | "}") => {
                depth -= 1;
                if depth == 0 {
                    args.push(&tokens[start..j]);
                    break;
                }
            }
            TokenKind::Op(",") if depth == 1 => {
                args.push(&tokens[start..j]);
                start = j + 1;
            }
            _ => {}
        }
    }
    let target_tokens = args
        .iter()
        .find(|a| a.first().and_then(Token::name) == Some("to") && a.get(1).is_some_and(|t| t.is_op("=")))
        .map(|a| &a[2..])
        .or_else(|| args.first().copied().filter(|a| !a.get(1).is_some_and(|t| t.is_op("="))))?;
    let target = match target_tokens {
        [Token { kind: TokenKind::Str(s), .. }] => RelationTarget::Literal(s.clone()),
        _ => {
            let (segs, end) = dotted_name(target_tokens, 0)?;
            if end != target_tokens.len() {
                return None;
            }
            RelationTarget::Name(segs)
        }
    };
    Some(RawRelation { class: class.to_string(), field: field.to_string(), kind, target, line: tokens[0].line })
}

fn is_keyword(s: &str) -> bool {
    matches!(
        s,
        "False"
            | "None"
            | "True"
            | "and"
            | "as"
            | "assert"
            | "async"
            | "await"
            | "break"
            | "class"
            | "continue"
            | "def"
            | "del"
            | "elif"
            | "else"
            | "except"
            | "finally"
            | "for"
            | "from"
            | "global"
            | "if"
            | "import"
            | "in"
            | "is"
            | "lambda"
            | "nonlocal"
            | "not"
            | "or"
            | "pass"
            | "raise"
            | "return"
            | "try"
            | "while"
            | "with"
            | "yield"
    )
}
