// SPDX-License-Identifier: Apache-2.0

//! Run configuration for the `bench` subcommand.
//!
//! The file is flat TOML, every key optional:
//!
//! ```toml
//! circuits = ["s27.bench", "s298.bench"]  # paths, relative to the file
//! frames = 1
//! k = 2
//! slack = 0
//! seed = 0
//! attacks = ["SAT", "SCOPE", "RANDOM"]
//! budget_sec = 60.0
//! solver = "embedded"                     # or "external"
//! trials = 1000
//! jobs = 1
//! out = "results"
//! ```
//!
//! Command-line flags override file values.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Deserialize;
use ucobf_core::attacks::AttackId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SolverChoice {
    #[default]
    Embedded,
    External,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub circuits: Option<Vec<PathBuf>>,
    pub frames: Option<usize>,
    pub k: Option<usize>,
    pub slack: Option<usize>,
    pub seed: Option<u64>,
    pub attacks: Option<Vec<String>>,
    pub budget_sec: Option<f64>,
    pub solver: Option<SolverChoice>,
    pub trials: Option<usize>,
    pub jobs: Option<usize>,
    pub out: Option<PathBuf>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<FileConfig> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read config {}", path.display()))?;
        let mut cfg: FileConfig = toml::from_str(&text).with_context(|| format!("bad config {}", path.display()))?;
        let dir = path.parent().unwrap_or(Path::new("."));
        if let Some(c) = &mut cfg.circuits {
            for p in c.iter_mut() {
                if p.is_relative() {
                    *p = dir.join(&*p);
                }
            }
        }
        if let Some(o) = &mut cfg.out {
            if o.is_relative() {
                *o = dir.join(&*o);
            }
        }
        Ok(cfg)
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub circuits: Vec<PathBuf>,
    pub frames: usize,
    pub k: usize,
    pub slack: usize,
    pub seed: u64,
    pub attacks: Vec<AttackId>,
    pub budget_sec: f64,
    pub solver: SolverChoice,
    pub trials: usize,
    pub jobs: usize,
    pub out: PathBuf,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.circuits.is_empty() {
            bail!("no circuits given");
        }
        for c in &self.circuits {
            if !c.is_file() {
                bail!("circuit file not found: {}", c.display());
            }
        }
        if self.frames == 0 {
            bail!("frames must be at least 1");
        }
        if !(self.budget_sec > 0.0 && self.budget_sec.is_finite()) {
            bail!("budget must be positive, got {}", self.budget_sec);
        }
        if self.jobs == 0 {
            bail!("jobs must be at least 1");
        }
        if self.trials == 0 {
            bail!("trials must be at least 1");
        }
        for a in &self.attacks {
            if !a.is_implemented() {
                bail!("attack {a} has no engine in this tool");
            }
        }
        Ok(())
    }
}

pub fn parse_attacks(names: &[String]) -> Result<Vec<AttackId>> {
    names
        .iter()
        .map(|n| n.parse::<AttackId>().map_err(anyhow::Error::msg))
        .collect()
}
