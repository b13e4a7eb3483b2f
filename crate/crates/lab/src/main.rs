use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context as _, Result};
use clap::{Parser, Subcommand};
use plab::plots::emit_plots;
use plab::runner::run_scenario_with;
use plab::{configure_threads, Scenario};
use plab_core::lp::decompose;
use plab_core::norms::{besov_norm, lorentz_norm, BesovParams, LorentzParams};
use plab_core::snapshot::{read_components, write_field};
use plab_core::PartitionOfUnity;

#[derive(Parser)]
#[command(name = "plab", version, about = "Littlewood-Paley experiments on periodic axisymmetric flows")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every experiment of a scenario file; exits nonzero if any check fails.
    Run { scenario: PathBuf },
    /// Besov and Lorentz norms of each component of a stored field.
    Norms {
        field: PathBuf,
        /// `s,p,r`; `inf` is accepted for p and r.
        #[arg(long)]
        besov: Option<String>,
        /// `p,q`; `inf` is accepted for q.
        #[arg(long)]
        lorentz: Option<String>,
    },
    /// Write the dyadic blocks of a stored field.
    Decompose {
        field: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Turn a run directory into plot data and a gnuplot script.
    Plots { run_dir: PathBuf },
}

fn numbers(text: &str, count: usize, what: &str) -> Result<Vec<f64>> {
    let v: Vec<f64> = text
        .split(',')
        .map(|s| match s.trim() {
            "inf" | "infinity" => Ok(f64::INFINITY),
            t => t.parse::<f64>().with_context(|| format!("{what}: {t:?} is not a number")),
        })
        .collect::<Result<_>>()?;
    if v.len() != count {
        bail!("{what} takes {count} comma-separated values, got {text:?}");
    }
    Ok(v)
}

fn run(cmd: Command) -> Result<bool> {
    match cmd {
        Command::Run { scenario } => {
            let s = Scenario::load(&scenario)?;
            eprintln!("scenario {} -> {}", s.name, s.output_dir.display());
            let summary = run_scenario_with(&s, |r| {
                eprintln!("{:<22} {}", r.key, if r.passed() { "pass" } else { "FAIL" });
            })?;
            for (key, id) in summary.failures() {
                eprintln!("  failed: {key} {id}");
            }
            Ok(summary.passed())
        }
        Command::Norms { field, besov, lorentz } => {
            if besov.is_none() && lorentz.is_none() {
                bail!("give --besov s,p,r and/or --lorentz p,q");
            }
            let comps = read_components(&field)?;
            let pu = PartitionOfUnity::classical();
            for (i, f) in comps.iter().enumerate() {
                let mut line = format!("component {i}");
                if let Some(b) = &besov {
                    let v = numbers(b, 3, "--besov")?;
                    let bp = BesovParams::new(v[0], v[1], v[2])?;
                    let _ = write!(line, " besov({b}) {:.17e}", besov_norm(f, bp, &pu)?);
                }
                if let Some(l) = &lorentz {
                    let v = numbers(l, 2, "--lorentz")?;
                    let _ = write!(line, " lorentz({l}) {:.17e}", lorentz_norm(f, LorentzParams::new(v[0], v[1])?));
                }
                println!("{line}");
            }
            Ok(true)
        }
        Command::Decompose { field, out } => {
            let comps = read_components(&field)?;
            let pu = PartitionOfUnity::classical();
            fs::create_dir_all(&out)?;
            let mut csv = String::from("component,q,sup\n");
            for (i, f) in comps.iter().enumerate() {
                let d = decompose(f, &pu, false)?;
                for (q, b) in &d.blocks {
                    let _ = writeln!(csv, "{i},{q},{:.17e}", b.max_abs());
                    write_field(&out.join(format!("c{i}_q{q}.field")), b)?;
                }
                eprintln!("component {i}: reconstruction residual {:.3e}", d.reconstruction_residual);
            }
            fs::write(out.join("blocks.csv"), csv)?;
            Ok(true)
        }
        Command::Plots { run_dir } => {
            let s = emit_plots(&run_dir)?;
            for w in &s.warnings {
                eprintln!("warning: {w}");
            }
            println!("{} files written under {}", s.files.len(), run_dir.join(plab::plots::PLOT_DIR).display());
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|_| run(cli.command));
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
