//! Acceptance run: one line per numbered criterion.
//!
//! Artifacts go to a temporary directory, or to `PLAB_ACCEPTANCE_OUT` when set.
//! A failing criterion is printed as FAIL; the process itself only exits
//! nonzero for failures when `PLAB_ACCEPTANCE_STRICT` is set.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use plab::report::CHECKS;
use plab::runner::run_scenario;
use plab::{ExperimentReport, Scenario};
use plab_core::axisym::AxisymProfile;
use plab_core::dynamics::SolverConfig;
use plab_core::{Grid, PartitionOfUnity};
use serde_json::json;

const BOX: f64 = 2.0 * std::f64::consts::PI;
/// Wall-time budget of the partition audit.
const PARTITION_SECONDS: f64 = 1.0;
/// Wall-time budget of the partition and reconstruction experiment.
const RECONSTRUCTION_SECONDS: f64 = 10.0;

fn scenario(root: &Path, name: &str, n: usize, solver: SolverConfig, keys: &[&str]) -> Scenario {
    Scenario::new(name, Grid::cube(n, BOX).unwrap(), AxisymProfile::reference_ring(), solver, root.join(name))
        .with_experiments(keys)
}

fn ring_solver() -> SolverConfig {
    SolverConfig { output_interval: Some(0.125), ..SolverConfig::cfl(0.5, 1.0) }
}

struct Outcome {
    flags: BTreeMap<String, bool>,
    notes: Vec<String>,
    errors: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Outcome { flags: BTreeMap::new(), notes: Vec::new(), errors: Vec::new() }
    }

    fn absorb(&mut self, r: &ExperimentReport) {
        for (id, &p) in &r.pass_flags {
            let e = self.flags.entry(id.clone()).or_insert(true);
            *e &= p;
        }
        for (k, v) in &r.measurements {
            self.notes.push(format!("{k}={v:.3e}"));
        }
    }

    fn line(&self, criterion: u8) -> (bool, String) {
        let ids: Vec<_> = CHECKS.iter().filter(|c| c.criterion == criterion).map(|c| c.id).collect();
        let mut ok = self.errors.is_empty();
        let mut parts = Vec::new();
        for id in ids {
            match self.flags.get(id) {
                Some(&p) => {
                    ok &= p;
                    if !p {
                        parts.push(format!("{id} failed"));
                    }
                }
                None => {
                    ok = false;
                    parts.push(format!("{id} not run"));
                }
            }
        }
        parts.extend(self.errors.iter().cloned());
        let detail = if parts.is_empty() { "all checks pass".to_string() } else { parts.join("; ") };
        (ok, detail)
    }
}

/// Runs `s` and files its reports under `criteria`; returns the wall time.
fn run_into(out: &mut BTreeMap<u8, Outcome>, criteria: &[u8], s: Scenario) -> f64 {
    let t = Instant::now();
    match run_scenario(&s) {
        Ok(sum) => {
            for r in &sum.reports {
                for &c in criteria {
                    if plab::registry::find(&r.key).map_or(false, |e| e.criteria.contains(&c)) {
                        out.get_mut(&c).unwrap().absorb(r);
                    }
                }
            }
        }
        Err(e) => {
            for &c in criteria {
                out.get_mut(&c).unwrap().errors.push(format!("{}: {e:#}", s.name));
            }
        }
    }
    let secs = t.elapsed().as_secs_f64();
    eprintln!("  [{} done in {secs:.1} s]", s.name);
    secs
}

fn files(root: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.insert(p.strip_prefix(root).unwrap().to_path_buf(), fs::read(&p).unwrap());
            }
        }
    }
    out
}

fn main() -> ExitCode {
    // `cargo test` passes harness flags; `--list` must print nothing.
    if std::env::args().any(|a| a == "--list") {
        return ExitCode::SUCCESS;
    }
    let keep = std::env::var_os("PLAB_ACCEPTANCE_OUT").map(PathBuf::from);
    let tmp = tempfile::tempdir().unwrap();
    let root = keep.unwrap_or_else(|| tmp.path().to_path_buf());
    fs::create_dir_all(&root).unwrap();
    let mut out: BTreeMap<u8, Outcome> = (1..=12).map(|c| (c, Outcome::new())).collect();

    // Partition wall time, measured on its own.
    let pu = PartitionOfUnity::classical();
    let t = Instant::now();
    let audit = pu.audit(&Grid::cube(128, BOX).unwrap());
    let secs = t.elapsed().as_secs_f64();
    out.get_mut(&1).unwrap().notes.push(format!("audit_seconds={secs:.3}"));
    if secs >= PARTITION_SECONDS || audit.radii_checked == 0 {
        out.get_mut(&1).unwrap().errors.push(format!("partition audit took {secs:.3} s"));
    }

    let short = SolverConfig::cfl(0.5, 1.0);
    let recon = run_into(&mut out, &[1, 2], scenario(&root, "partition64", 64, short.clone(), &["partition_audit"]));
    out.get_mut(&2).unwrap().notes.push(format!("seconds={recon:.2}"));
    if recon >= RECONSTRUCTION_SECONDS {
        out.get_mut(&2).unwrap().errors.push(format!("reconstruction audit took {recon:.1} s"));
    }
    run_into(&mut out, &[4, 11], scenario(&root, "spectral64", 64, short.clone(), &["bernstein_sweep", "dilation_audit"]));
    run_into(&mut out, &[3, 5, 12], scenario(&root, "norms32", 32, short.clone(), &["bony_audit", "lorentz_suite", "transport_audit"]));
    run_into(&mut out, &[5], scenario(&root, "embedding64", 64, short.clone(), &["embedding_sweep"]));
    run_into(&mut out, &[6], scenario(&root, "geometry128", 128, short.clone(), &["geometry_audit"]));
    run_into(&mut out, &[10], scenario(&root, "flow64", 64, ring_solver(), &["biot_savart_bound", "vorticity_growth"]));
    run_into(&mut out, &[9], scenario(&root, "decomposition64", 64, SolverConfig { output_interval: Some(0.25), ..SolverConfig::cfl(0.5, 1.0) }, &["decomposition_suite", "norm_growth"]));
    // the carrier is weak and wide enough that the deformed datum stays resolved at n = 128
    let mut model = scenario(&root, "model128", 128, ring_solver(), &["model_v_suite"]);
    model.profile = AxisymProfile::GaussianBlob { amplitude: 0.01, width: 0.2, z_center: 0.0 };
    run_into(&mut out, &[8], model);
    run_into(&mut out, &[7], scenario(&root, "conservation128", 128, ring_solver(), &["conservation_run"]));

    // Determinism: the same small scenario twice into the same directory.
    let tiny = scenario(&root, "determinism", 16, SolverConfig { output_interval: Some(0.05), ..SolverConfig::cfl(0.5, 0.1) }, &["partition_audit", "conservation_run"])
        .with_option("partition_audit", json!({ "fields": 3 }))
        .with_option("conservation_run", json!({ "refined_n": 0 }));
    let det = run_scenario(&tiny).map(|_| files(&tiny.output_dir)).and_then(|first| {
        fs::remove_dir_all(&tiny.output_dir)?;
        run_scenario(&tiny)?;
        Ok((first, files(&tiny.output_dir)))
    });
    let det = match det {
        Ok((a, b)) if a == b && a.len() > 3 => (true, format!("{} files byte-identical", a.len())),
        Ok((a, b)) => {
            let diff: Vec<_> = a.keys().chain(b.keys()).filter(|k| a.get(*k) != b.get(*k)).map(|k| k.display().to_string()).collect();
            (false, format!("differing files: {}", diff.join(", ")))
        }
        Err(e) => (false, format!("run failed: {e:#}")),
    };

    let mut all = true;
    for c in 1..=12u8 {
        let o = &out[&c];
        let (ok, detail) = o.line(c);
        all &= ok;
        println!("criterion {c:>2}: {} ({detail})", if ok { "PASS" } else { "FAIL" });
        if !o.notes.is_empty() {
            println!("              {}", o.notes.join(" "));
        }
    }
    all &= det.0;
    println!("criterion 13: {} ({})", if det.0 { "PASS" } else { "FAIL" }, det.1);
    println!("artifacts: {}", root.display());
    if all || std::env::var_os("PLAB_ACCEPTANCE_STRICT").is_none() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
