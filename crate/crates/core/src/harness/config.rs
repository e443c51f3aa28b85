//! Flat `key = value` configuration text with `#` comments.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::{Vec3, Vec4};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: key `{key}` repeated (first on line {first})")]
    Duplicate { line: usize, key: String, first: usize },
    #[error("line {line}: `{key}`: {msg}")]
    Value { line: usize, key: String, msg: String },
    #[error("missing required key `{0}`")]
    Missing(String),
    #[error("{path}: {msg}")]
    Io { path: String, msg: String },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub key: String,
    pub value: String,
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConfigDoc {
    pub entries: Vec<Entry>,
}

fn valid_key(k: &str) -> bool {
    !k.is_empty() && k.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '.')
}

impl ConfigDoc {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut entries = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((k, v)) = content.split_once('=') else {
                return Err(ConfigError::Syntax { line, msg: format!("expected `key = value`, found `{content}`") });
            };
            let key = k.trim();
            if !valid_key(key) {
                return Err(ConfigError::Syntax { line, msg: format!("invalid key `{key}`") });
            }
            let value = v.trim();
            if value.is_empty() {
                return Err(ConfigError::Syntax { line, msg: format!("empty value for `{key}`") });
            }
            entries.push(Entry { key: key.to_string(), value: value.to_string(), line });
        }
        Ok(Self { entries })
    }

    pub fn reader(&self) -> Reader<'_> {
        Reader { doc: self, used: BTreeSet::new() }
    }
}

/// Typed access that records which entries were consumed.
pub struct Reader<'a> {
    doc: &'a ConfigDoc,
    used: BTreeSet<usize>,
}

impl<'a> Reader<'a> {
    fn find(&mut self, key: &str) -> Result<Option<&'a Entry>, ConfigError> {
        let mut found: Option<(usize, &Entry)> = None;
        for (i, e) in self.doc.entries.iter().enumerate() {
            if e.key == key {
                if let Some((_, first)) = found {
                    return Err(ConfigError::Duplicate { line: e.line, key: key.into(), first: first.line });
                }
                found = Some((i, e));
            }
        }
        Ok(found.map(|(i, e)| {
            self.used.insert(i);
            e
        }))
    }

    /// All entries with this key, in order.
    pub fn all(&mut self, key: &str) -> Vec<&'a Entry> {
        let mut out = Vec::new();
        for (i, e) in self.doc.entries.iter().enumerate() {
            if e.key == key {
                self.used.insert(i);
                out.push(e);
            }
        }
        out
    }

    pub fn has(&self, key: &str) -> bool {
        self.doc.entries.iter().any(|e| e.key == key)
    }

    /// Distinct keys starting with `prefix`.
    pub fn keys_with_prefix(&self, prefix: &str) -> Vec<String> {
        let mut set = BTreeSet::new();
        for e in &self.doc.entries {
            if e.key.starts_with(prefix) {
                set.insert(e.key.clone());
            }
        }
        set.into_iter().collect()
    }

    pub fn string(&mut self, key: &str) -> Result<Option<String>, ConfigError> {
        Ok(self.find(key)?.map(|e| e.value.clone()))
    }

    pub fn parse_with<T, F>(&mut self, key: &str, f: F) -> Result<Option<T>, ConfigError>
    where
        F: Fn(&str) -> Result<T, String>,
    {
        match self.find(key)? {
            None => Ok(None),
            Some(e) => f(&e.value).map(Some).map_err(|msg| ConfigError::Value { line: e.line, key: key.into(), msg }),
        }
    }

    pub fn f64(&mut self, key: &str) -> Result<Option<f64>, ConfigError> {
        self.parse_with(key, parse_f64)
    }

    pub fn bool(&mut self, key: &str) -> Result<Option<bool>, ConfigError> {
        self.parse_with(key, parse_bool)
    }

    pub fn u64(&mut self, key: &str) -> Result<Option<u64>, ConfigError> {
        self.parse_with(key, |s| s.parse::<u64>().map_err(|e| format!("expected a non-negative integer ({e})")))
    }

    pub fn vec3(&mut self, key: &str) -> Result<Option<Vec3>, ConfigError> {
        self.parse_with(key, |s| {
            let v = parse_list(s)?;
            match v.len() {
                1 => Ok(Vec3::repeat(v[0])),
                3 => Ok(Vec3::new(v[0], v[1], v[2])),
                n => Err(format!("expected 1 or 3 numbers, found {n}")),
            }
        })
    }

    pub fn vec4(&mut self, key: &str) -> Result<Option<Vec4>, ConfigError> {
        self.parse_with(key, |s| {
            let v = parse_list(s)?;
            match v.len() {
                1 => Ok(Vec4::repeat(v[0])),
                4 => Ok(Vec4::new(v[0], v[1], v[2], v[3])),
                n => Err(format!("expected 1 or 4 numbers, found {n}")),
            }
        })
    }

    pub fn list(&mut self, key: &str) -> Result<Option<Vec<f64>>, ConfigError> {
        self.parse_with(key, parse_list)
    }

    /// Reports the first entry that was never read.
    pub fn finish(self) -> Result<(), ConfigError> {
        for (i, e) in self.doc.entries.iter().enumerate() {
            if !self.used.contains(&i) {
                return Err(ConfigError::UnknownKey { line: e.line, key: e.key.clone() });
            }
        }
        Ok(())
    }
}

pub fn parse_f64(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("expected a number, found `{}`", s.trim()))?;
    if !v.is_finite() {
        return Err("value must be finite".into());
    }
    Ok(v)
}

pub fn parse_bool(s: &str) -> Result<bool, String> {
    match s.trim() {
        "true" | "on" | "yes" | "1" => Ok(true),
        "false" | "off" | "no" | "0" => Ok(false),
        other => Err(format!("expected true/false, found `{other}`")),
    }
}

pub fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',').map(parse_f64).collect()
}

/// Formats a number list the way the parser reads it.
pub struct NumberList<'a>(pub &'a [f64]);

impl fmt::Display for NumberList<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_values() {
        let doc = ConfigDoc::parse("# header\nmass_kg = 0.6  # trailing\n\nk_x = 1, 2, 3\nflag = on\n").unwrap();
        let mut r = doc.reader();
        assert_eq!(r.f64("mass_kg").unwrap(), Some(0.6));
        assert_eq!(r.vec3("k_x").unwrap(), Some(Vec3::new(1.0, 2.0, 3.0)));
        assert_eq!(r.bool("flag").unwrap(), Some(true));
        assert_eq!(r.f64("absent").unwrap(), None);
        r.finish().unwrap();
    }

    #[test]
    fn diagnostics_carry_line_numbers() {
        assert_eq!(
            ConfigDoc::parse("a = 1\nnot a pair\n"),
            Err(ConfigError::Syntax { line: 2, msg: "expected `key = value`, found `not a pair`".into() })
        );
        let doc = ConfigDoc::parse("a = 1\nb = x\n").unwrap();
        let mut r = doc.reader();
        assert!(matches!(r.f64("b"), Err(ConfigError::Value { line: 2, .. })));
        let doc = ConfigDoc::parse("a = 1\nb = 2\na = 3\n").unwrap();
        assert!(matches!(doc.reader().f64("a"), Err(ConfigError::Duplicate { line: 3, first: 1, .. })));
        let doc = ConfigDoc::parse("a = 1\ntypo = 2\n").unwrap();
        let mut r = doc.reader();
        r.f64("a").unwrap();
        assert_eq!(r.finish(), Err(ConfigError::UnknownKey { line: 2, key: "typo".into() }));
    }

    #[test]
    fn rejects_non_finite_and_bad_lists() {
        assert!(parse_f64("inf").is_err());
        assert!(parse_f64("nan").is_err());
        let doc = ConfigDoc::parse("v = 1, 2\n").unwrap();
        assert!(doc.reader().vec3("v").is_err());
        assert!(ConfigDoc::parse("bad key = 1").is_err());
        assert!(ConfigDoc::parse("k =").is_err());
    }
}
