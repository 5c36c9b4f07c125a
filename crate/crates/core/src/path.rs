use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// Dotted module path such as `models.Item`.
///
/// Ordering is the lexicographic order of the dotted rendering, which is the
/// order used for file lists and for every tie-break.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModulePath(String);

pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c == '_' || c.is_alphabetic() => {}
        _ => return false,
    }
    chars.all(|c| c == '_' || c.is_alphanumeric())
}

impl ModulePath {
    pub fn from_segments<I, S>(segments: I) -> Result<Self, Error>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut dotted = String::new();
        for seg in segments {
            let seg = seg.as_ref();
            if !is_identifier(seg) {
                return Err(Error::ModulePath(seg.to_string()));
            }
            if !dotted.is_empty() {
                dotted.push('.');
            }
            dotted.push_str(seg);
        }
        if dotted.is_empty() {
            return Err(Error::ModulePath(String::new()));
        }
        Ok(ModulePath(dotted))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn segments(&self) -> impl Iterator<Item = &str> {
        self.0.split('.')
    }

    pub fn last(&self) -> &str {
        self.0.rsplit('.').next().unwrap_or(&self.0)
    }

    pub fn parent(&self) -> Option<ModulePath> {
        self.0.rfind('.').map(|i| ModulePath(self.0[..i].to_string()))
    }

    /// Appends one identifier segment.
    pub fn child(&self, segment: &str) -> Result<ModulePath, Error> {
        if !is_identifier(segment) {
            return Err(Error::ModulePath(segment.to_string()));
        }
        Ok(ModulePath(format!("{}.{}", self.0, segment)))
    }

    pub fn ends_with(&self, other: &ModulePath) -> bool {
        self.0 == other.0 || self.0.ends_with(&format!(".{}", other.0))
    }
}

impl FromStr for ModulePath {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.is_empty() {
            return Err(Error::ModulePath(s.to_string()));
        }
        ModulePath::from_segments(s.split('.')).map_err(|_| Error::ModulePath(s.to_string()))
    }
}

impl fmt::Display for ModulePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl Serialize for ModulePath {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for ModulePath {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
