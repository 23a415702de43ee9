//! TOML config files merged with command-line overrides.

use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use toml::{Table, Value};

use crate::CliError;

/// Key/value pairs from a config file, with flag overrides applied on top.
#[derive(Debug, Default)]
pub struct Layered {
    table: Table,
}

impl Layered {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let mut table: Table = text.parse().map_err(|e: toml::de::Error| CliError::Config(e.to_string()))?;
        // keys may sit at the top level or inside any section
        let sections: Vec<String> = table.iter().filter(|(_, v)| v.is_table()).map(|(k, _)| k.clone()).collect();
        for name in sections {
            if let Some(Value::Table(inner)) = table.remove(&name) {
                for (k, v) in inner {
                    if table.insert(k.clone(), v).is_some() {
                        return Err(CliError::Config(format!("key {k:?} given twice")));
                    }
                }
            }
        }
        Ok(Self { table })
    }

    pub fn set(&mut self, key: &str, value: Option<impl Into<Value>>) {
        if let Some(v) = value {
            self.table.insert(key.to_string(), v.into());
        }
    }

    /// Inserts `value` only if the key is absent.
    pub fn fill(&mut self, key: &str, value: impl Into<Value>) {
        self.table.entry(key.to_string()).or_insert_with(|| value.into());
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.table.get(key)
    }

    /// Removes and returns a path-valued key.
    pub fn take_path(&mut self, key: &str) -> Result<Option<PathBuf>, CliError> {
        match self.table.remove(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(PathBuf::from(s))),
            Some(other) => Err(CliError::Config(format!("{key} must be a string, got {other}"))),
        }
    }

    pub fn into_config<T: DeserializeOwned>(self) -> Result<T, CliError> {
        Value::Table(self.table).try_into().map_err(|e: toml::de::Error| CliError::Config(e.to_string()))
    }
}

/// TOML integers are signed 64-bit; larger seeds are rejected by clap's
/// range check before they get here.
pub fn int(v: Option<u64>) -> Option<i64> {
    v.map(|x| x as i64)
}
