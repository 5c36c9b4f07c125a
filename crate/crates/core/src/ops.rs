//! Operational data: per-endpoint request counts and the models each
//! endpoint touched, aggregated into per-(view, model) dynamic call counts.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use chrono::{DateTime, FixedOffset};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::path::{is_identifier, ModulePath};
use crate::scanner::{ClassKind, ProjectFacts};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OperationalRecord {
    pub view: ModulePath,
    pub method: String,
    pub calls: u64,
    pub models: BTreeSet<ModulePath>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub start: DateTime<FixedOffset>,
    pub end: DateTime<FixedOffset>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OperationalDataset {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<Window>,
    pub requests: Vec<OperationalRecord>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRecord {
    view: String,
    method: String,
    calls: i64,
    models: Vec<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawWindow {
    start: String,
    end: String,
}

pub fn load_ops(path: &Path) -> Result<OperationalDataset> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
    OperationalDataset::from_json(&text)
}

impl OperationalDataset {
    /// Parses and validates ops-JSON. Records sharing a (view, method) pair
    /// are merged by summing calls and unioning models, in first-seen order.
    pub fn from_json(text: &str) -> Result<Self> {
        let root: Value = serde_json::from_str(text).map_err(|e| Error::OpsFormat(e.to_string()))?;
        let Value::Object(mut obj) = root else {
            return Err(Error::OpsFormat("top level must be an object".into()));
        };
        let requests = obj.remove("requests").ok_or_else(|| Error::OpsFormat("missing \"requests\"".into()))?;
        let window = match obj.remove("window") {
            None | Some(Value::Null) => None,
            Some(w) => Some(parse_window(w)?),
        };
        if let Some(key) = obj.keys().next() {
            return Err(Error::OpsFormat(format!("unknown key {key:?}")));
        }
        let Value::Array(items) = requests else {
            return Err(Error::OpsFormat("\"requests\" must be an array".into()));
        };

        let mut dataset = OperationalDataset { window, requests: Vec::new() };
        for (index, item) in items.into_iter().enumerate() {
            let bad = |message: String| Error::OpsRecord { index, message };
            let raw: RawRecord = serde_json::from_value(item).map_err(|e| bad(e.to_string()))?;
            if raw.calls < 0 {
                return Err(bad(format!("negative calls ({})", raw.calls)));
            }
            let view: ModulePath = raw.view.parse().map_err(|_| bad(format!("invalid view path {:?}", raw.view)))?;
            if !is_identifier(&raw.method) {
                return Err(bad(format!("invalid method name {:?}", raw.method)));
            }
            let models = raw
                .models
                .iter()
                .map(|m| m.parse().map_err(|_| bad(format!("invalid model path {m:?}"))))
                .collect::<Result<BTreeSet<ModulePath>>>()?;
            if raw.calls > 0 && models.is_empty() {
                return Err(bad("a record with calls > 0 must name at least one model".into()));
            }
            dataset.push(OperationalRecord { view, method: raw.method, calls: raw.calls as u64, models });
        }
        Ok(dataset)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("dataset serializes")
    }

    /// Adds a record, merging with an existing (view, method) entry.
    pub fn push(&mut self, record: OperationalRecord) {
        match self.requests.iter_mut().find(|r| r.view == record.view && r.method == record.method) {
            Some(existing) => {
                existing.calls += record.calls;
                existing.models.extend(record.models);
            }
            None => self.requests.push(record),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.requests.is_empty()
    }
}

fn parse_window(value: Value) -> Result<Window> {
    let raw: RawWindow = serde_json::from_value(value).map_err(|e| Error::OpsFormat(format!("window: {e}")))?;
    let parse =
        |s: &str| DateTime::parse_from_rfc3339(s).map_err(|e| Error::OpsFormat(format!("window timestamp {s:?}: {e}")));
    let window = Window { start: parse(&raw.start)?, end: parse(&raw.end)? };
    if window.start > window.end {
        return Err(Error::OpsFormat("window start is after its end".into()));
    }
    Ok(window)
}

/// Dynamic call totals per (view, model) edge.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EdgeCalls {
    pub counts: BTreeMap<(ModulePath, ModulePath), u64>,
    pub warnings: Vec<String>,
}

impl EdgeCalls {
    pub fn get(&self, view: &str, model: &str) -> Option<u64> {
        self.counts.iter().find(|((v, m), _)| v.as_str() == view && m.as_str() == model).map(|(_, c)| *c)
    }

    pub fn max_calls(&self) -> u64 {
        self.counts.values().copied().max().unwrap_or(0)
    }

    pub fn scaled(&self, k: u64) -> EdgeCalls {
        EdgeCalls {
            counts: self.counts.iter().map(|(e, c)| (e.clone(), c * k)).collect(),
            warnings: self.warnings.clone(),
        }
    }
}

/// Credits each record's full call count to every (view, model) edge it
/// touched. Names unknown to the scan, or of the wrong kind, are reported
/// and excluded.
pub fn aggregate_edge_calls(dataset: &OperationalDataset, facts: &ProjectFacts) -> EdgeCalls {
    let kinds: BTreeMap<ModulePath, ClassKind> = facts.classes.iter().map(|c| (c.id(), c.kind)).collect();
    let mut out = EdgeCalls::default();
    for rec in &dataset.requests {
        if kinds.get(&rec.view) != Some(&ClassKind::View) {
            out.warnings
                .push(format!("ops: view {} ({}) is not a view in the project; record excluded", rec.view, rec.method));
            continue;
        }
        for model in &rec.models {
            if kinds.get(model) != Some(&ClassKind::Model) {
                out.warnings.push(format!(
                    "ops: model {model} (from {}.{}) is not a model in the project; excluded",
                    rec.view, rec.method
                ));
                continue;
            }
            if rec.calls > 0 {
                *out.counts.entry((rec.view.clone(), model.clone())).or_default() += rec.calls;
            }
        }
    }
    out
}
