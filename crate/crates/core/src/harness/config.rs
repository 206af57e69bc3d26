//! Key-value run configuration with environment overrides.
//!
//! Format: one `key = value` per line; `#` starts a comment; blank lines
//! are ignored. `VDW_SEED` and `VDW_WORKERS` override `seed` and `workers`.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Result, VdwError};

pub const DEFAULT_SEED: u64 = 20_160_401;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct HarnessConfig {
    pub values: BTreeMap<String, String>,
}

impl HarnessConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                VdwError::Param(format!("config line {}: expected key = value", i + 1))
            })?;
            let k = k.trim();
            if k.is_empty() {
                return Err(VdwError::Param(format!("config line {}: empty key", i + 1)));
            }
            values.insert(k.to_string(), v.trim().to_string());
        }
        Ok(Self { values })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Applies `VDW_SEED` / `VDW_WORKERS` from the process environment.
    pub fn with_env(self) -> Self {
        self.with_overrides(
            std::env::var("VDW_SEED").ok(),
            std::env::var("VDW_WORKERS").ok(),
        )
    }

    pub fn with_overrides(mut self, seed: Option<String>, workers: Option<String>) -> Self {
        if let Some(s) = seed {
            self.values.insert("seed".into(), s);
        }
        if let Some(w) = workers {
            self.values.insert("workers".into(), w);
        }
        self
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.values.insert(key.to_string(), value.to_string());
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.values.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| VdwError::Param(format!("config key {key}: cannot parse {v:?}"))),
        }
    }

    pub fn get_or<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        Ok(self.get(key)?.unwrap_or(default))
    }

    /// Comma-separated list.
    pub fn get_list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>> {
        match self.values.get(key) {
            None => Ok(None),
            Some(v) => v
                .split(',')
                .map(|s| {
                    s.trim().parse().map_err(|_| {
                        VdwError::Param(format!("config key {key}: cannot parse {s:?}"))
                    })
                })
                .collect::<Result<Vec<T>>>()
                .map(Some),
        }
    }

    pub fn seed(&self) -> Result<u64> {
        self.get_or("seed", DEFAULT_SEED)
    }

    pub fn workers(&self) -> Result<Option<usize>> {
        self.get("workers")
    }
}

/// Sizes the global rayon pool; a no-op if it was already built.
pub fn install_workers(workers: Option<usize>) {
    if let Some(w) = workers.filter(|&w| w > 0) {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build_global();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_override() {
        let c =
            HarnessConfig::parse("# run\nseed = 7\n\nns = 100, 200 # sizes\ntrials=3\n").unwrap();
        assert_eq!(c.seed().unwrap(), 7);
        assert_eq!(c.get_list::<usize>("ns").unwrap(), Some(vec![100, 200]));
        assert_eq!(c.get_or("trials", 0usize).unwrap(), 3);
        assert_eq!(c.get_or("missing", 1.5f64).unwrap(), 1.5);
        let c = c.with_overrides(Some("9".into()), Some("2".into()));
        assert_eq!(c.seed().unwrap(), 9);
        assert_eq!(c.workers().unwrap(), Some(2));
    }

    #[test]
    fn rejects_malformed() {
        assert!(HarnessConfig::parse("seed 7").is_err());
        assert!(HarnessConfig::parse("= 7").is_err());
        let c = HarnessConfig::parse("seed = x").unwrap();
        assert!(c.seed().is_err());
        assert_eq!(
            HarnessConfig::parse("").unwrap().seed().unwrap(),
            DEFAULT_SEED
        );
    }
}
