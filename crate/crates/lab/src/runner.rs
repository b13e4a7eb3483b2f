//! Running a scenario end to end.

use std::fs;
use std::path::PathBuf;

use anyhow::{Context as _, Result};

use crate::registry::{self, Context};
use crate::report::ExperimentReport;
use crate::scenario::Scenario;

/// Environment variable fixing the size of the worker pool.
pub const THREADS_VAR: &str = "PLAB_THREADS";

/// Sizes the global rayon pool from `PLAB_THREADS` when it is set.
///
/// Results do not depend on the pool size; only wall time does.
pub fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var(THREADS_VAR) {
        let n: usize = v.trim().parse().with_context(|| format!("{THREADS_VAR}={v:?} is not a thread count"))?;
        // a pool that already exists keeps its size
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub output_dir: PathBuf,
    pub reports: Vec<ExperimentReport>,
}

impl RunSummary {
    pub fn passed(&self) -> bool {
        self.reports.iter().all(ExperimentReport::passed)
    }

    pub fn failures(&self) -> Vec<(String, String)> {
        self.reports
            .iter()
            .flat_map(|r| r.pass_flags.iter().filter(|(_, &p)| !p).map(|(id, _)| (r.key.clone(), id.clone())))
            .collect()
    }
}

/// Validates `scenario`, runs its experiments in order, and writes
/// `scenario.json` and `reports.json` into the output directory.
///
/// `on_report` sees each report as soon as its experiment finishes.
pub fn run_scenario_with(scenario: &Scenario, mut on_report: impl FnMut(&ExperimentReport)) -> Result<RunSummary> {
    scenario.validate()?;
    let out = &scenario.output_dir;
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    fs::write(out.join("scenario.json"), scenario.to_json())?;
    let mut reports = Vec::new();
    for key in &scenario.experiments {
        let exp = registry::find(key).expect("validated key");
        let ctx = Context::new(scenario, exp.key)?;
        let report = (exp.run)(&ctx).with_context(|| format!("experiment {key}"))?;
        report.validate()?;
        on_report(&report);
        reports.push(report);
    }
    fs::write(out.join("reports.json"), serde_json::to_string_pretty(&reports)?)?;
    Ok(RunSummary { output_dir: out.clone(), reports })
}

pub fn run_scenario(scenario: &Scenario) -> Result<RunSummary> {
    run_scenario_with(scenario, |_| {})
}

#[cfg(test)]
mod tests {
    use super::*;
    use plab_core::axisym::AxisymProfile;
    use plab_core::dynamics::SolverConfig;
    use plab_core::Grid;
    use std::f64::consts::PI;

    #[test]
    fn empty_scenario_writes_echo_and_empty_reports() {
        let dir = tempfile::tempdir().unwrap();
        let s = Scenario::new(
            "empty",
            Grid::cube(16, 2.0 * PI).unwrap(),
            AxisymProfile::reference_ring(),
            SolverConfig::cfl(0.5, 0.1),
            dir.path(),
        );
        let sum = run_scenario(&s).unwrap();
        assert!(sum.passed());
        assert_eq!(fs::read_to_string(dir.path().join("reports.json")).unwrap().trim(), "[]");
        let echo = Scenario::from_json(&fs::read_to_string(dir.path().join("scenario.json")).unwrap()).unwrap();
        assert_eq!(echo, s);
    }
}
