//! Versioned JSON experiment reports.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};

pub const SCHEMA: &str = "report_v1";
pub const TOOL: &str = "zkhelp";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Everything needed to rerun an experiment.
#[derive(Debug, Clone, Default, Serialize, PartialEq)]
pub struct ExperimentConfig {
    pub subcommand: String,
    pub inputs: BTreeMap<String, String>,
    pub params: BTreeMap<String, Value>,
    pub seed: Option<u64>,
    pub budget: usize,
    pub outputs: BTreeMap<String, String>,
}

impl ExperimentConfig {
    pub fn new(subcommand: &str, budget: usize) -> ExperimentConfig {
        ExperimentConfig {
            subcommand: subcommand.into(),
            budget,
            ..Default::default()
        }
    }

    pub fn input(mut self, key: &str, path: &Path) -> Self {
        self.inputs.insert(key.into(), path.display().to_string());
        self
    }

    pub fn param(mut self, key: &str, v: impl Serialize) -> Self {
        self.params.insert(
            key.into(),
            serde_json::to_value(v).expect("param serialize"),
        );
        self
    }

    pub fn output(&mut self, key: &str, path: &Path) {
        self.outputs.insert(key.into(), path.display().to_string());
    }

    pub fn validate(&self) -> Result<()> {
        if self.budget < 1 {
            return Err(Error::Precondition("budget must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub tool: &'static str,
    pub version: &'static str,
    pub config: ExperimentConfig,
    pub results: Value,
}

impl Report {
    pub fn new(config: ExperimentConfig, results: impl Serialize) -> Report {
        Report {
            schema: SCHEMA,
            tool: TOOL,
            version: VERSION,
            config,
            results: serde_json::to_value(results).expect("results serialize"),
        }
    }

    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialize");
        s.push('\n');
        s
    }

    /// Writes to `path`, or stdout when absent.
    pub fn write(&self, path: Option<&Path>) -> Result<()> {
        match path {
            Some(p) => std::fs::write(p, self.to_json_string())?,
            None => print!("{}", self.to_json_string()),
        }
        Ok(())
    }
}
