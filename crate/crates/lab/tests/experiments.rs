//! Every registered experiment runs on a small grid and raises exactly the
//! checks of its criteria that it owns.

use std::f64::consts::PI;

use plab::registry::REGISTRY;
use plab::report::find_check;
use plab::runner::run_scenario;
use plab::Scenario;
use plab_core::axisym::AxisymProfile;
use plab_core::dynamics::SolverConfig;
use plab_core::Grid;
use serde_json::json;

/// The random ring corpus needs at least 64 points per axis to resolve its cores.
const CORPUS_KEYS: [&str; 3] = ["embedding_sweep", "biot_savart_bound", "geometry_audit"];

fn small(dir: &std::path::Path, key: &str) -> Scenario {
    let n = if CORPUS_KEYS.contains(&key) { 64 } else { 32 };
    let solver = SolverConfig { output_interval: Some(0.05), ..SolverConfig::cfl(0.5, 0.1) };
    Scenario::new(key, Grid::cube(n, 2.0 * PI).unwrap(), AxisymProfile::reference_ring(), solver, dir.join(key))
        .with_experiments(&[key])
        .with_option("partition_audit", json!({ "fields": 2 }))
        .with_option("bony_audit", json!({ "pairs": 2, "commutator_inputs": 1 }))
        .with_option("lorentz_suite", json!({ "product_pairs": 4, "diagonal_fields": 1 }))
        .with_option("embedding_sweep", json!({ "flows": 2, "refined_n": 64 }))
        .with_option("biot_savart_bound", json!({ "flows": 2, "refined_n": 64 }))
        .with_option("dilation_audit", json!({ "fields": 2, "max_level": 2 }))
        .with_option("conservation_run", json!({ "refined_n": 64 }))
        .with_option("norm_growth", json!({ "coarse_n": 16 }))
        .with_option("transport_audit", json!({ "dt": 0.05, "t_end": 0.1 }))
}

#[test]
fn every_experiment_runs_and_reports() {
    let dir = tempfile::tempdir().unwrap();
    for e in REGISTRY {
        let sum = run_scenario(&small(dir.path(), e.key)).unwrap_or_else(|err| panic!("{}: {err:#}", e.key));
        let r = &sum.reports[0];
        assert_eq!(r.key, e.key);
        assert!(!r.pass_flags.is_empty(), "{} raised no flags", e.key);
        for id in r.pass_flags.keys() {
            let c = find_check(id).unwrap();
            assert!(e.criteria.contains(&c.criterion), "{} raised {id}", e.key);
        }
        for p in &r.artifact_paths {
            assert!(p.is_relative(), "{}: {}", e.key, p.display());
            assert!(sum.output_dir.join(p).exists(), "{}: {}", e.key, p.display());
        }
        assert!(sum.output_dir.join("reports.json").exists());
    }
}
