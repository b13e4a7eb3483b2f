//! The `plab` binary end to end on a tiny grid.

use std::f64::consts::PI;
use std::fs;
use std::process::Command;

use plab::{ExperimentReport, Scenario};
use plab_core::axisym::AxisymProfile;
use plab_core::dynamics::SolverConfig;
use plab_core::random::band_limited;
use plab_core::snapshot::write_field;
use plab_core::Grid;
use serde_json::json;

fn plab(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_plab")).args(args).env("PLAB_THREADS", "1").output().unwrap()
}

#[test]
fn run_plots_norms_and_decompose() {
    let dir = tempfile::tempdir().unwrap();
    let grid = Grid::cube(16, 2.0 * PI).unwrap();
    let solver = SolverConfig { output_interval: Some(0.05), ..SolverConfig::cfl(0.5, 0.1) };
    let s = Scenario::new("cli", grid, AxisymProfile::reference_ring(), solver, "out")
        .with_experiments(&["partition_audit", "conservation_run"])
        .with_option("partition_audit", json!({ "fields": 2 }))
        .with_option("conservation_run", json!({ "refined_n": 0 }));
    let file = dir.path().join("cli.json");
    fs::write(&file, s.to_json()).unwrap();

    let run = plab(&["run", file.to_str().unwrap()]);
    let code = run.status.code().unwrap();
    assert!(code == 0 || code == 1, "stderr: {}", String::from_utf8_lossy(&run.stderr));
    // the relative output directory resolves next to the scenario file
    let out = dir.path().join("out");
    let reports: Vec<ExperimentReport> = serde_json::from_str(&fs::read_to_string(out.join("reports.json")).unwrap()).unwrap();
    assert_eq!(reports.len(), 2);
    assert_eq!(code == 0, reports.iter().all(ExperimentReport::passed));

    let plots = plab(&["plots", out.to_str().unwrap()]);
    assert!(plots.status.success());
    assert!(out.join("plots/plot.gp").exists());
    assert!(fs::read_dir(out.join("plots")).unwrap().count() > 1);

    let field = dir.path().join("f.field");
    write_field(&field, &band_limited(&grid, 3, 4.0, true)).unwrap();
    let norms = plab(&["norms", field.to_str().unwrap(), "--besov", "0,inf,1", "--lorentz", "3,1"]);
    assert!(norms.status.success());
    let text = String::from_utf8(norms.stdout).unwrap();
    assert!(text.starts_with("component 0 besov(0,inf,1) "), "{text}");
    assert!(text.contains("lorentz(3,1)"));

    let blocks = dir.path().join("blocks");
    let dec = plab(&["decompose", field.to_str().unwrap(), "--out", blocks.to_str().unwrap()]);
    assert!(dec.status.success());
    let csv = fs::read_to_string(blocks.join("blocks.csv")).unwrap();
    let rows = csv.lines().count() - 1;
    assert_eq!(rows, (grid.q_max() + 2) as usize);
    assert!(blocks.join("c0_q-1.field").exists());
}

#[test]
fn errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(plab(&["run", dir.path().join("missing.json").to_str().unwrap()]).status.code(), Some(2));
    let field = dir.path().join("f.field");
    write_field(&field, &band_limited(&Grid::cube(16, 2.0 * PI).unwrap(), 1, 4.0, true)).unwrap();
    assert_eq!(plab(&["norms", field.to_str().unwrap(), "--lorentz", "3"]).status.code(), Some(2));
    assert_eq!(plab(&["norms", field.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn readme_scenario_parses() {
    let readme = include_str!("../../../README.md");
    let start = readme.find("```json\n").unwrap() + "```json\n".len();
    let body = &readme[start..start + readme[start..].find("```").unwrap()];
    let s = Scenario::from_json(body).unwrap();
    s.validate().unwrap();
    assert_eq!(s.experiments, ["conservation_run", "decomposition_suite"]);
}
