//! Experiment configuration, read from a TOML file.
//!
//! ```toml
//! qrels = "data/qrels.txt"
//! seed = 7
//! shuffles = 5
//! training_fraction = 0.10
//! w = 5
//! probfuse_segments = 25
//!
//! [[run_group]]
//! name = "first"
//! topfiles = ["data/sysA.txt", "data/sysB.txt"]
//! ```
//!
//! `name` is optional (groups default to `group1`, `group2`, ...); every
//! other scalar has the default shown above except `seed`, which defaults
//! to 0. Relative paths are interpreted by the caller, typically against
//! the config file's directory.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::experiments::ExperimentParams;

/// One experimental run: a set of topfiles fused together.
#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunGroupConfig {
    pub name: Option<String>,
    pub topfiles: Vec<PathBuf>,
}

/// Full experiment description.
#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub qrels: PathBuf,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_shuffles")]
    pub shuffles: usize,
    #[serde(default = "default_training_fraction")]
    pub training_fraction: f64,
    #[serde(default = "default_w")]
    pub w: usize,
    #[serde(default = "default_probfuse_segments")]
    pub probfuse_segments: usize,
    #[serde(rename = "run_group")]
    pub run_groups: Vec<RunGroupConfig>,
}

fn default_shuffles() -> usize {
    5
}

fn default_training_fraction() -> f64 {
    0.10
}

fn default_w() -> usize {
    5
}

fn default_probfuse_segments() -> usize {
    25
}

impl ExperimentConfig {
    /// Parses and validates a config from TOML text.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config: ExperimentConfig =
            toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    /// Loads a config file, resolving relative paths against its directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path)
            .map_err(|e| Error::from(e).in_file(path.display().to_string()))?;
        let mut config = Self::from_toml_str(&text)
            .map_err(|e| e.in_file(path.display().to_string()))?;
        if let Some(dir) = path.parent() {
            config.resolve_relative_to(dir);
        }
        Ok(config)
    }

    fn resolve_relative_to(&mut self, dir: &Path) {
        let resolve = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = dir.join(&*p);
            }
        };
        resolve(&mut self.qrels);
        for group in &mut self.run_groups {
            for topfile in &mut group.topfiles {
                resolve(topfile);
            }
        }
    }

    fn validate(&self) -> Result<()> {
        let mut offending = Vec::new();
        if !(self.training_fraction > 0.0 && self.training_fraction < 1.0) {
            offending.push(format!(
                "training_fraction = {} (must be in (0, 1))",
                self.training_fraction
            ));
        }
        if self.shuffles == 0 {
            offending.push("shuffles = 0 (must be at least 1)".into());
        }
        if self.probfuse_segments == 0 {
            offending.push("probfuse_segments = 0 (must be at least 1)".into());
        }
        if self.run_groups.is_empty() {
            offending.push("run_group: at least one group is required".into());
        }
        let mut seen: BTreeSet<&Path> = BTreeSet::new();
        for (i, group) in self.run_groups.iter().enumerate() {
            if group.topfiles.len() < 2 {
                offending.push(format!(
                    "run_group[{i}].topfiles: a group needs at least 2 systems"
                ));
            }
            for topfile in &group.topfiles {
                if !seen.insert(topfile.as_path()) {
                    offending.push(format!(
                        "run_group[{i}].topfiles: {} appears in more than one group",
                        topfile.display()
                    ));
                }
            }
        }
        if offending.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(offending.join("; ")))
        }
    }

    /// Group name, defaulting to `group{index+1}`.
    pub fn group_name(&self, index: usize) -> String {
        self.run_groups[index]
            .name
            .clone()
            .unwrap_or_else(|| format!("group{}", index + 1))
    }

    /// The scalar parameters of the protocol.
    pub fn params(&self) -> ExperimentParams {
        ExperimentParams {
            shuffle_count: self.shuffles,
            training_fraction: self.training_fraction,
            w: self.w,
            probfuse_segments: self.probfuse_segments,
            seed: self.seed,
        }
    }
}
