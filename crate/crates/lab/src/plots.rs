//! Plot-ready data from a run directory.
//!
//! Every diagnostics channel becomes a two-column `t value` file, every
//! interaction matrix a `j q value` triplet file, and one gnuplot script
//! draws them all. Nothing here renders images itself.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context as _, Result};
use plab_core::dynamics::{DiagnosticsSeries, BASIC_CHANNELS};

pub const PLOT_DIR: &str = "plots";
pub const SCRIPT: &str = "plot.gp";

#[derive(Debug, Clone, Default)]
pub struct PlotSummary {
    /// Written files, relative to the run directory.
    pub files: Vec<PathBuf>,
    /// Channels or inputs that were expected but missing.
    pub warnings: Vec<String>,
}

fn find_named(root: &Path, name: &str, out: &mut Vec<PathBuf>) -> Result<()> {
    let mut entries: Vec<_> = fs::read_dir(root)?.collect::<std::io::Result<Vec<_>>>()?;
    entries.sort_by_key(|e| e.file_name());
    for e in entries {
        let p = e.path();
        if p.is_dir() {
            if e.file_name() != PLOT_DIR {
                find_named(&p, name, out)?;
            }
        } else if e.file_name() == name {
            out.push(p);
        }
    }
    Ok(())
}

/// `a/b/diagnostics.csv` under the run directory becomes the prefix `a_b`.
fn prefix(run_dir: &Path, file: &Path) -> String {
    let rel = file.parent().and_then(|p| p.strip_prefix(run_dir).ok()).unwrap_or(Path::new(""));
    let parts: Vec<String> = rel.components().map(|c| c.as_os_str().to_string_lossy().into_owned()).collect();
    if parts.is_empty() {
        "run".to_string()
    } else {
        parts.join("_")
    }
}

/// Writes plot data for everything plottable under `run_dir` into `run_dir/plots`.
pub fn emit_plots(run_dir: &Path) -> Result<PlotSummary> {
    anyhow::ensure!(run_dir.is_dir(), "{} is not a directory", run_dir.display());
    let out = run_dir.join(PLOT_DIR);
    fs::create_dir_all(&out)?;
    let mut summary = PlotSummary::default();
    let mut script = String::from("set terminal pngcairo size 900,600\nset grid\n");

    let mut diags = Vec::new();
    find_named(run_dir, "diagnostics.csv", &mut diags)?;
    if diags.is_empty() {
        summary.warnings.push(format!("no diagnostics.csv under {}", run_dir.display()));
    }
    for file in &diags {
        let pre = prefix(run_dir, file);
        let text = fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
        let series = DiagnosticsSeries::from_csv(&text).with_context(|| format!("parsing {}", file.display()))?;
        for ch in BASIC_CHANNELS {
            if series.channel(ch).is_none() {
                summary.warnings.push(format!("{}: channel {ch} missing", file.display()));
            }
        }
        for (name, values) in &series.channels {
            let mut data = String::new();
            for (t, v) in series.times.iter().zip(values) {
                let _ = writeln!(data, "{t:.17e} {v:.17e}");
            }
            let fname = format!("{pre}_{name}.dat");
            fs::write(out.join(&fname), data)?;
            summary.files.push(PathBuf::from(PLOT_DIR).join(&fname));
            let _ = writeln!(
                script,
                "set output '{pre}_{name}.png'\nset xlabel 't'\nset ylabel '{name}'\nplot '{fname}' using 1:2 with linespoints title '{name}'"
            );
        }
    }

    let mut decays = Vec::new();
    find_named(run_dir, "block_decay.csv", &mut decays)?;
    for file in &decays {
        let pre = prefix(run_dir, file);
        let text = fs::read_to_string(file)?;
        let mut by_time: BTreeMap<String, String> = BTreeMap::new();
        let mut index: Vec<String> = Vec::new();
        for line in text.lines().skip(1).filter(|l| !l.trim().is_empty()) {
            let cols: Vec<&str> = line.split(',').collect();
            anyhow::ensure!(cols.len() == 4, "{}: malformed row {line:?}", file.display());
            if !by_time.contains_key(cols[0]) {
                index.push(cols[0].to_string());
            }
            let _ = writeln!(by_time.entry(cols[0].to_string()).or_default(), "{} {} {}", cols[1], cols[2], cols[3]);
        }
        for (k, t) in index.iter().enumerate() {
            let fname = format!("{pre}_block_decay_t{k}.dat");
            fs::write(out.join(&fname), &by_time[t])?;
            summary.files.push(PathBuf::from(PLOT_DIR).join(&fname));
            let tv: f64 = t.parse().unwrap_or(f64::NAN);
            let _ = writeln!(
                script,
                "set output '{pre}_block_decay_t{k}.png'\nset xlabel 'j'\nset ylabel 'q'\nset title 't = {tv}'\nset cbrange [-40:2]\nplot '{fname}' using 1:2:3 with image title ''\nunset title"
            );
        }
    }
    if decays.is_empty() {
        summary.warnings.push("no block_decay.csv, interaction plots skipped".to_string());
    }

    fs::write(out.join(SCRIPT), script)?;
    summary.files.push(PathBuf::from(PLOT_DIR).join(SCRIPT));
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn channels_become_files_and_missing_ones_warn() {
        let dir = tempfile::tempdir().unwrap();
        let mut d = DiagnosticsSeries::new();
        d.push(0.0, &[("alpha_L2", 1.0), ("energy", 2.0)]).unwrap();
        d.push(0.5, &[("alpha_L2", 1.0), ("energy", 2.5)]).unwrap();
        fs::create_dir_all(dir.path().join("conservation_run")).unwrap();
        fs::write(dir.path().join("conservation_run/diagnostics.csv"), d.to_csv()).unwrap();
        let s = emit_plots(dir.path()).unwrap();
        let energy = fs::read_to_string(dir.path().join("plots/conservation_run_energy.dat")).unwrap();
        assert_eq!(energy.lines().count(), 2);
        assert!(s.warnings.iter().any(|w| w.contains("alpha_Linf")));
        assert!(s.warnings.iter().any(|w| w.contains("block_decay")));
        assert!(dir.path().join("plots/plot.gp").exists());
    }
}
