use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::hash::config_hash;
use crate::error::{Error, Result};
use crate::experiments::{RateFit, Verdict};

/// Format tag of [`ResultRecord`] files.
pub const RECORD_FORMAT: &str = "twophase-record-1";
/// Version of the code that produced a record.
pub const CODE_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NamedSeries {
    pub name: String,
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NamedFit {
    pub name: String,
    pub fit: RateFit,
}

/// JSON summary of one run or study.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResultRecord {
    pub format: String,
    pub code_version: String,
    /// subcommand or study that produced the record
    pub kind: String,
    pub config_hash: String,
    pub config: Value,
    pub series: Vec<NamedSeries>,
    pub fits: Vec<NamedFit>,
    pub verdicts: Vec<Verdict>,
    pub flags: Vec<String>,
    /// study-specific payload
    pub summary: Value,
    pub pass: bool,
}

impl ResultRecord {
    pub fn new<C: Serialize>(kind: &str, config: &C) -> Result<Self> {
        Ok(ResultRecord {
            format: RECORD_FORMAT.to_string(),
            code_version: CODE_VERSION.to_string(),
            kind: kind.to_string(),
            config_hash: config_hash(config)?,
            config: serde_json::to_value(config)?,
            series: Vec::new(),
            fits: Vec::new(),
            verdicts: Vec::new(),
            flags: Vec::new(),
            summary: Value::Null,
            pass: true,
        })
    }

    pub fn fit(mut self, name: &str, fit: &RateFit) -> Self {
        self.fits.push(NamedFit { name: name.to_string(), fit: fit.clone() });
        self
    }

    pub fn series(mut self, name: &str, times: &[f64], values: &[f64]) -> Self {
        self.series.push(NamedSeries { name: name.to_string(), times: times.to_vec(), values: values.to_vec() });
        self
    }

    /// Sets the verdicts and recomputes `pass`.
    pub fn verdicts(mut self, v: &[Verdict]) -> Self {
        self.verdicts.extend_from_slice(v);
        self.pass = self.verdicts.iter().all(|x| x.pass);
        self
    }

    pub fn flags(mut self, f: &[String]) -> Self {
        self.flags.extend_from_slice(f);
        self
    }

    pub fn summary<S: Serialize>(mut self, s: &S) -> Result<Self> {
        self.summary = serde_json::to_value(s)?;
        Ok(self)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Parses a record, rejecting other format tags.
    pub fn from_json(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text)?;
        let found = v.get("format").and_then(Value::as_str).unwrap_or("").to_string();
        if found != RECORD_FORMAT {
            return Err(Error::FormatVersionMismatch { expected: RECORD_FORMAT.to_string(), found });
        }
        Ok(serde_json::from_value(v)?)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }
}
