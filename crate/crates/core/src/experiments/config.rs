//! Plain-text `key = value` configuration with `#` comments.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::grid::Grid;

#[derive(Debug, Clone, Default)]
pub struct Config {
    entries: BTreeMap<String, (usize, String)>,
    used: RefCell<BTreeSet<String>>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", i + 1)))?;
            let key = key.trim();
            if key.is_empty() {
                return Err(Error::Config(format!("line {}: empty key", i + 1)));
            }
            if entries
                .insert(key.to_string(), (i + 1, value.trim().to_string()))
                .is_some()
            {
                return Err(Error::Config(format!("line {}: duplicate key `{key}`", i + 1)));
            }
        }
        Ok(Self { entries, used: RefCell::default() })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn contains(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    fn raw(&self, key: &str) -> Option<&(usize, String)> {
        let entry = self.entries.get(key);
        if entry.is_some() {
            self.used.borrow_mut().insert(key.to_string());
        }
        entry
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.raw(key) {
            None => Ok(None),
            Some((line, value)) => value.parse().map(Some).map_err(|_| {
                Error::Config(format!("line {line}: cannot parse `{value}` for `{key}`"))
            }),
        }
    }

    pub fn get_or<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        Ok(self.get(key)?.unwrap_or(default))
    }

    pub fn require<T: FromStr>(&self, key: &str) -> Result<T> {
        self.get(key)?
            .ok_or_else(|| Error::Config(format!("missing key `{key}`")))
    }

    /// Comma- or whitespace-separated list.
    pub fn get_list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>> {
        match self.raw(key) {
            None => Ok(None),
            Some((line, value)) => value
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .map(|s| {
                    s.parse().map_err(|_| {
                        Error::Config(format!("line {line}: cannot parse `{s}` in `{key}`"))
                    })
                })
                .collect::<Result<Vec<T>>>()
                .map(Some),
        }
    }

    pub fn list_or<T: FromStr>(&self, key: &str, default: Vec<T>) -> Result<Vec<T>> {
        Ok(self.get_list(key)?.unwrap_or(default))
    }

    pub fn bool_or(&self, key: &str, default: bool) -> Result<bool> {
        match self.raw(key) {
            None => Ok(default),
            Some((line, value)) => match value.to_ascii_lowercase().as_str() {
                "true" | "yes" | "1" | "on" => Ok(true),
                "false" | "no" | "0" | "off" => Ok(false),
                _ => Err(Error::Config(format!("line {line}: `{value}` is not a boolean"))),
            },
        }
    }

    /// Grid from `n` and `extent` (one entry per axis, or a single entry
    /// repeated over `d` axes).
    pub fn grid_or(&self, d: usize, n: usize, extent: f64) -> Result<Grid> {
        let ns = self.list_or("n", vec![n])?;
        let ls = self.list_or("extent", vec![extent])?;
        Grid::new(&expand(ns, d, "n")?, &expand(ls, d, "extent")?)
    }

    /// Errors on keys that were never read.
    pub fn finish(&self) -> Result<()> {
        let used = self.used.borrow();
        let unknown: Vec<_> = self.entries.keys().filter(|k| !used.contains(*k)).cloned().collect();
        if unknown.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(format!("unknown keys: {}", unknown.join(", "))))
        }
    }
}

fn expand<T: Copy>(v: Vec<T>, d: usize, name: &str) -> Result<Vec<T>> {
    match v.len() {
        1 => Ok(vec![v[0]; d]),
        k if k == d => Ok(v),
        k => Err(Error::Config(format!("`{name}` has {k} entries for d = {d}"))),
    }
}
