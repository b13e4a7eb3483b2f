//! Scenario files: what to run, on which grid, with which flow and solver.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context as _, Result};
use plab_core::axisym::AxisymProfile;
use plab_core::dynamics::SolverConfig;
use plab_core::grid::GridSpec;
use plab_core::Grid;
use serde::{Deserialize, Serialize};

use crate::registry;

/// Version of the scenario schema this build reads and writes.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema_version: u32,
    pub name: String,
    pub grid: GridSpec,
    /// Flow for the dynamics experiments; a `random` profile carries its own corpus seed.
    pub profile: AxisymProfile,
    pub solver: SolverConfig,
    pub experiments: Vec<String>,
    pub output_dir: PathBuf,
    /// Seed of every random corpus drawn by the experiments.
    #[serde(default)]
    pub seed: u64,
    /// Per-experiment option blocks, keyed by experiment.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub options: BTreeMap<String, serde_json::Value>,
}

impl Scenario {
    pub fn new(name: &str, grid: Grid, profile: AxisymProfile, solver: SolverConfig, output_dir: impl Into<PathBuf>) -> Self {
        Scenario {
            schema_version: SCHEMA_VERSION,
            name: name.to_string(),
            grid: grid.into(),
            profile,
            solver,
            experiments: Vec::new(),
            output_dir: output_dir.into(),
            seed: 0,
            options: BTreeMap::new(),
        }
    }

    pub fn with_experiments(mut self, keys: &[&str]) -> Self {
        self.experiments = keys.iter().map(|k| k.to_string()).collect();
        self
    }

    pub fn with_option(mut self, key: &str, value: serde_json::Value) -> Self {
        self.options.insert(key.to_string(), value);
        self
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let s: Scenario = serde_json::from_str(text).context("parsing scenario")?;
        s.validate()?;
        Ok(s)
    }

    /// Reads a scenario; a relative `output_dir` is taken relative to the file.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let mut s = Self::from_json(&text).with_context(|| format!("in {}", path.display()))?;
        if s.output_dir.is_relative() {
            if let Some(parent) = path.parent() {
                s.output_dir = parent.join(&s.output_dir);
            }
        }
        Ok(s)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    pub fn grid(&self) -> Result<Grid> {
        Ok(Grid::try_from(self.grid)?)
    }

    /// Everything that can be checked without running anything.
    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            bail!("scenario schema version {} is not supported (expected {SCHEMA_VERSION})", self.schema_version);
        }
        let grid = self.grid()?;
        self.profile.validate()?;
        self.profile.check_support(&grid)?;
        self.solver.validate()?;
        for key in &self.experiments {
            if registry::find(key).is_none() {
                bail!("unknown experiment key {key:?}; registered keys: {}", registry::keys().join(", "));
            }
        }
        for key in self.options.keys() {
            if registry::find(key).is_none() {
                bail!("options given for unknown experiment {key:?}");
            }
        }
        Ok(())
    }

    /// Option block of `key`, with defaults for anything left out.
    pub fn options_for<T: serde::de::DeserializeOwned + Default>(&self, key: &str) -> Result<T> {
        match self.options.get(key) {
            None => Ok(T::default()),
            Some(v) => serde_json::from_value(v.clone()).with_context(|| format!("options of {key}")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn sample() -> Scenario {
        Scenario::new(
            "ring",
            Grid::cube(32, 2.0 * PI).unwrap(),
            AxisymProfile::reference_ring(),
            SolverConfig::cfl(0.5, 1.0),
            "out",
        )
        .with_experiments(&["partition_audit", "conservation_run"])
    }

    #[test]
    fn round_trips_unchanged() {
        let s = sample();
        let back = Scenario::from_json(&s.to_json()).unwrap();
        assert_eq!(back, s);
        assert_eq!(back.to_json(), s.to_json());
    }

    #[test]
    fn rejects_unknown_keys_and_versions() {
        let mut s = sample();
        s.experiments.push("nope".into());
        assert!(s.validate().unwrap_err().to_string().contains("nope"));
        let mut s = sample();
        s.schema_version = 99;
        assert!(s.validate().is_err());
        let text = sample().to_json().replace("\"seed\"", "\"sed\"");
        assert!(Scenario::from_json(&text).is_err());
    }
}
