//! Flat `key = value` config files and flag/file/default resolution.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use serde_json::Value;

use super::CliError;

/// Parsed config file. Keys are normalized to `snake_case`, so `eps-abs` and
/// `eps_abs` name the same entry.
#[derive(Debug, Default, Clone)]
pub struct ConfigFile {
    entries: BTreeMap<String, (usize, String)>,
}

pub fn normalize_key(k: &str) -> String {
    k.trim().replace('-', "_")
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(CliError::Validation(format!("config line {}: expected key = value", i + 1)));
            };
            let key = normalize_key(k);
            if key.is_empty() {
                return Err(CliError::Validation(format!("config line {}: empty key", i + 1)));
            }
            if entries.insert(key.clone(), (i + 1, v.trim().to_string())).is_some() {
                return Err(CliError::Validation(format!("config line {}: duplicate key {key}", i + 1)));
            }
        }
        Ok(ConfigFile { entries })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Validation(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }
}

/// Resolves each parameter as flag > file > default and records the result,
/// so every output can embed the configuration it ran with.
pub struct Resolver {
    file: ConfigFile,
    used: BTreeSet<String>,
    pub resolved: BTreeMap<String, Value>,
}

impl Resolver {
    pub fn new(file: ConfigFile) -> Self {
        Resolver {
            file,
            used: BTreeSet::new(),
            resolved: BTreeMap::new(),
        }
    }

    fn file_value<T>(&mut self, key: &str) -> Result<Option<T>, CliError>
    where
        T: FromStr,
        T::Err: Display,
    {
        self.used.insert(key.to_string());
        match self.file.entries.get(key) {
            None => Ok(None),
            Some((line, v)) => v
                .parse::<T>()
                .map(Some)
                .map_err(|e| CliError::Validation(format!("config line {line}: {key} = {v:?}: {e}"))),
        }
    }

    fn record<T: serde::Serialize>(&mut self, key: &str, v: &T) {
        self.resolved
            .insert(key.to_string(), serde_json::to_value(v).unwrap_or(Value::Null));
    }

    pub fn get<T>(&mut self, key: &str, flag: Option<T>, default: T) -> Result<T, CliError>
    where
        T: FromStr + serde::Serialize,
        T::Err: Display,
    {
        let file = self.file_value::<T>(key)?;
        let v = flag.or(file).unwrap_or(default);
        self.record(key, &v);
        Ok(v)
    }

    /// Like [`Resolver::get`] without a default; absent stays `None`.
    pub fn get_opt<T>(&mut self, key: &str, flag: Option<T>) -> Result<Option<T>, CliError>
    where
        T: FromStr + serde::Serialize,
        T::Err: Display,
    {
        let file = self.file_value::<T>(key)?;
        let v = flag.or(file);
        self.record(key, &v);
        Ok(v)
    }

    /// Comma-separated list.
    pub fn get_list<T>(&mut self, key: &str, flag: Option<Vec<T>>, default: Vec<T>) -> Result<Vec<T>, CliError>
    where
        T: FromStr + serde::Serialize,
        T::Err: Display,
    {
        self.used.insert(key.to_string());
        let file = match self.file.entries.get(key) {
            None => None,
            Some((line, v)) => Some(
                v.split(',')
                    .map(|t| t.trim().parse::<T>())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|e| CliError::Validation(format!("config line {line}: {key}: {e}")))?,
            ),
        };
        let v = flag.or(file).unwrap_or(default);
        self.record(key, &v);
        Ok(v)
    }

    /// Rejects file keys no parameter asked for.
    pub fn finish(self) -> Result<BTreeMap<String, Value>, CliError> {
        let unknown: Vec<_> = self
            .file
            .entries
            .iter()
            .filter(|(k, _)| !self.used.contains(*k))
            .map(|(k, (line, _))| format!("{k} (line {line})"))
            .collect();
        if !unknown.is_empty() {
            return Err(CliError::Validation(format!("unknown config keys: {}", unknown.join(", "))));
        }
        Ok(self.resolved)
    }
}
