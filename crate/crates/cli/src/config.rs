//! Flat `key = value` configuration files.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use crate::UsageError;

/// Keys are the long flag names without dashes, e.g. `code-a = steane7`.
#[derive(Debug, Clone, Default)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, UsageError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| UsageError(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, UsageError> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| UsageError(format!("config line {}: expected key = value", i + 1)))?;
            let key = k.trim().replace('_', "-");
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(UsageError(format!("config line {}: unknown key `{}`", i + 1, k.trim())));
            }
            values.insert(key, v.trim().to_string());
        }
        Ok(ConfigFile { values })
    }

    /// `flag` if given, else the file's value for `key`, parsed.
    pub fn pick<T>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, UsageError>
    where
        T: FromStr,
        T::Err: std::fmt::Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        self.values
            .get(key)
            .map(|v| {
                v.parse()
                    .map_err(|e| UsageError(format!("config key `{key}`: {e}")))
            })
            .transpose()
    }
}

const KNOWN_KEYS: &[&str] = &[
    "scheme",
    "code-a",
    "code-b",
    "rounds",
    "p",
    "trials",
    "seed",
    "format",
    "out",
    "out-dir",
    "jobs",
    "postselect",
    "basis-order",
    "measurement-noise",
    "source",
    "fidelity",
    "kq-budget-steane",
    "kq-budget-surface",
    "which",
];
