//! Line-oriented `key = value` run files with `[section]` headers.
//!
//! ```text
//! # default law, thm1 at three horizons
//! [law]
//! c = 0.5
//! nu = 1
//! kappa = 4
//! eps = 0.5
//!
//! [experiment]
//! horizons = 1000, 3000, 10000
//! replicas = 200
//! ```
//!
//! Every key must be consumed by the command that reads the file; leftovers
//! are reported as errors by [`RunConfig::finish`].

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};
use std::str::FromStr;

use crate::disorder::RateLaw;
use crate::error::{Error, Result};

pub const SECTIONS: [&str; 2] = ["law", "experiment"];

#[derive(Debug, Clone, PartialEq)]
struct Entry {
    value: String,
    line: usize,
}

#[derive(Debug, Default)]
pub struct RunConfig {
    entries: BTreeMap<(String, String), Entry>,
    sections: BTreeSet<String>,
    used: RefCell<BTreeSet<(String, String)>>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        let mut section: Option<String> = None;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            if let Some(name) = body.strip_prefix('[') {
                let name = name
                    .strip_suffix(']')
                    .ok_or_else(|| Error::Config(format!("line {line}: malformed header `{body}`")))?
                    .trim();
                if !SECTIONS.contains(&name) {
                    return Err(Error::Config(format!(
                        "line {line}: unknown section [{name}] (expected one of {SECTIONS:?})"
                    )));
                }
                if !cfg.sections.insert(name.to_string()) {
                    return Err(Error::Config(format!("line {line}: section [{name}] repeated")));
                }
                section = Some(name.to_string());
                continue;
            }
            let (key, value) = body
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {line}: expected `key = value`")))?;
            let key = key.trim();
            if key.is_empty() {
                return Err(Error::Config(format!("line {line}: empty key")));
            }
            let sec = section
                .clone()
                .ok_or_else(|| Error::Config(format!("line {line}: key `{key}` before any section")))?;
            let k = (sec.clone(), key.to_string());
            let entry = Entry {
                value: value.trim().to_string(),
                line,
            };
            if let Some(prev) = cfg.entries.insert(k, entry) {
                return Err(Error::Config(format!(
                    "line {line}: key `{key}` in [{sec}] already set on line {}",
                    prev.line
                )));
            }
        }
        Ok(cfg)
    }

    pub fn has_section(&self, section: &str) -> bool {
        self.sections.contains(section)
    }

    fn raw(&self, section: &str, key: &str) -> Option<&Entry> {
        let k = (section.to_string(), key.to_string());
        let e = self.entries.get(&k)?;
        self.used.borrow_mut().insert(k);
        Some(e)
    }

    pub fn get<T: FromStr>(&self, section: &str, key: &str) -> Result<Option<T>> {
        let Some(e) = self.raw(section, key) else {
            return Ok(None);
        };
        e.value.parse().map(Some).map_err(|_| {
            Error::Config(format!(
                "line {}: cannot parse `{key}` in [{section}] from `{}`",
                e.line, e.value
            ))
        })
    }

    pub fn or<T: FromStr>(&self, section: &str, key: &str, default: T) -> Result<T> {
        Ok(self.get(section, key)?.unwrap_or(default))
    }

    pub fn require<T: FromStr>(&self, section: &str, key: &str) -> Result<T> {
        self.get(section, key)?
            .ok_or_else(|| Error::Config(format!("missing key `{key}` in [{section}]")))
    }

    /// Comma-separated list.
    pub fn list<T: FromStr>(&self, section: &str, key: &str) -> Result<Option<Vec<T>>> {
        let Some(e) = self.raw(section, key) else {
            return Ok(None);
        };
        e.value
            .split(',')
            .map(|s| {
                s.trim().parse().map_err(|_| {
                    Error::Config(format!(
                        "line {}: cannot parse item `{}` of `{key}` in [{section}]",
                        e.line,
                        s.trim()
                    ))
                })
            })
            .collect::<Result<Vec<T>>>()
            .map(Some)
    }

    pub fn list_or<T: FromStr>(&self, section: &str, key: &str, default: Vec<T>) -> Result<Vec<T>> {
        Ok(self.list(section, key)?.unwrap_or(default))
    }

    /// The `[law]` block, all four keys required when the block is present.
    pub fn law(&self) -> Result<Option<RateLaw>> {
        if !self.has_section("law") {
            return Ok(None);
        }
        let c = self.require("law", "c")?;
        let nu = self.require("law", "nu")?;
        let kappa = self.require("law", "kappa")?;
        let eps = self.require("law", "eps")?;
        RateLaw::new(c, nu, kappa, eps).map(Some)
    }

    /// Errors on any key nobody asked for.
    pub fn finish(&self) -> Result<()> {
        let used = self.used.borrow();
        let unknown: Vec<String> = self
            .entries
            .iter()
            .filter(|(k, _)| !used.contains(*k))
            .map(|((s, k), e)| format!("`{k}` in [{s}] (line {})", e.line))
            .collect();
        if unknown.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(format!("unknown keys: {}", unknown.join(", "))))
        }
    }
}
