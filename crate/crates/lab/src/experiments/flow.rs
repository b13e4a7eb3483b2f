use std::fmt::Write as _;
use std::fs;

use anyhow::Result;
use plab_core::axisym::{realize, realize_alpha, ur_over_r};
use plab_core::dynamics::{evolve_with, DiagnosticsLevel, DiagnosticsSeries, EulerRun, EulerState, SolverConfig};
use plab_core::norms::{lorentz_norm, LorentzParams};
use plab_core::snapshot::write_field;
use plab_core::Grid;
use serde::{Deserialize, Serialize};

use super::flow_corpus;
use crate::registry::Context;
use crate::report::ExperimentReport;

pub const DRIFT_TOL: f64 = 0.01;
pub const REFINEMENT_FACTOR: f64 = 2.0;
pub const CONSERVED: [&str; 5] = ["alpha_L1", "alpha_L2", "alpha_Linf", "alpha_L31", "energy"];
/// Output spacing of the refined comparison run when the scenario sets none.
pub const REFINED_OUTPUT_INTERVAL: f64 = 0.125;

fn channel<'a>(d: &'a DiagnosticsSeries, name: &str) -> Result<&'a [f64]> {
    d.channel(name).ok_or_else(|| anyhow::anyhow!("diagnostics lack {name}"))
}

/// Relative drift of a channel over the rows recorded at `times`.
pub fn drift_at(d: &DiagnosticsSeries, name: &str, times: &[f64]) -> Result<f64> {
    let c = channel(d, name)?;
    let picked: Vec<f64> = d
        .times
        .iter()
        .zip(c)
        .filter(|(t, _)| times.iter().any(|s| (*t - s).abs() <= 1e-12 * s.abs().max(1.0)))
        .map(|(_, v)| *v)
        .collect();
    anyhow::ensure!(picked.len() == times.len(), "{name}: {} of {} output rows found", picked.len(), times.len());
    let c0 = picked[0];
    let dmax = picked.iter().fold(0.0f64, |a, v| a.max((v - c0).abs()));
    Ok(if c0 == 0.0 { dmax } else { dmax / c0.abs() })
}

/// Runs the scenario flow on `grid`, writing `alpha` at each output time
/// as `snapshots/t_<index>.field` under `dir` when it is given.
fn run_flow(ctx: &Context, grid: &Grid, cfg: &SolverConfig, dir: Option<&std::path::Path>) -> Result<EulerRun> {
    let state = EulerState::from_profile(&ctx.scenario.profile, grid)?;
    let snaps = dir.map(|d| d.join("snapshots"));
    if let Some(s) = &snaps {
        fs::create_dir_all(s)?;
    }
    let mut index = 0;
    Ok(evolve_with(state, cfg, &ctx.pu, |s| {
        if let Some(dir) = &snaps {
            write_field(&dir.join(format!("t_{index}.field")), &s.alpha)?;
        }
        index += 1;
        Ok(())
    })?)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConservationOptions {
    /// Grid of the refined comparison run, twice the scenario grid if absent; zero skips it.
    pub refined_n: Option<usize>,
}

impl Default for ConservationOptions {
    fn default() -> Self {
        ConservationOptions { refined_n: None }
    }
}

pub fn conservation_run(ctx: &Context) -> Result<ExperimentReport> {
    let opts: ConservationOptions = ctx.options()?;
    let mut rep = ExperimentReport::new(ctx.key);
    let dir = ctx.dir()?;
    let mut cfg = ctx.scenario.solver.clone();
    if cfg.output_interval.is_none() {
        cfg.output_interval = Some(REFINED_OUTPUT_INTERVAL);
    }
    let config = serde_json::json!({
        "grid": ctx.scenario.grid,
        "profile": ctx.scenario.profile,
        "solver": cfg,
    });
    ctx.write(&mut rep, "config.json", serde_json::to_string_pretty(&config)?)?;
    let run = run_flow(ctx, &ctx.grid, &cfg, Some(&dir))?;
    rep.artifact(ctx.relative(&dir.join("snapshots")));
    ctx.write(&mut rep, "diagnostics.csv", run.diagnostics.to_csv())?;
    rep.measure("conservation.steps", run.steps as f64);

    for name in CONSERVED {
        rep.bound(&format!("conservation.{name}"), run.diagnostics.drift(name)?, DRIFT_TOL);
    }
    rep.flag("conservation.monotone", run.alpha_l31_nonincreasing()?);
    let l31_0 = channel(&run.diagnostics, "alpha_L31")?[0];
    let ur = channel(&run.diagnostics, "ur_over_r_inf")?;
    rep.constant("conservation.ur_over_r_per_alpha_L31", ur.iter().copied().fold(0.0, f64::max) / l31_0);

    let fine_n = opts.refined_n.unwrap_or(2 * ctx.grid.n());
    if fine_n > 0 {
        let fine = Grid::new(fine_n, ctx.grid.box_length(), 3)?;
        // diagnostics only where both runs share an output time
        let fine_cfg = SolverConfig { diagnostics_every: usize::MAX, ..cfg.clone() };
        let mut times = vec![0.0];
        times.extend(cfg.output_times());
        let refined = run_flow(ctx, &fine, &fine_cfg, None)?;
        ctx.write(&mut rep, "refined/diagnostics.csv", refined.diagnostics.to_csv())?;
        let mut csv = String::from("channel,coarse_drift,fine_drift\n");
        let mut smaller = true;
        for name in CONSERVED {
            let c = drift_at(&run.diagnostics, name, &times)?;
            let f = drift_at(&refined.diagnostics, name, &times)?;
            smaller &= f < c;
            rep.measure(&format!("conservation.{name}.coarse_output_drift"), c);
            rep.measure(&format!("conservation.{name}.fine_output_drift"), f);
            let _ = writeln!(csv, "{name},{c:.17e},{f:.17e}");
        }
        rep.flag("conservation.refinement", smaller);
        ctx.write(&mut rep, "refinement.csv", csv)?;
    }
    Ok(rep)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BiotSavartOptions {
    pub flows: usize,
    pub refined_n: Option<usize>,
}

impl Default for BiotSavartOptions {
    fn default() -> Self {
        BiotSavartOptions { flows: 10, refined_n: None }
    }
}

pub fn biot_savart_bound(ctx: &Context) -> Result<ExperimentReport> {
    let opts: BiotSavartOptions = ctx.options()?;
    let mut rep = ExperimentReport::new(ctx.key);
    let fine = Grid::new(opts.refined_n.unwrap_or(2 * ctx.grid.n()), ctx.grid.box_length(), 3)?;
    let l31 = LorentzParams::new(3.0, 1.0)?;
    let corpus = flow_corpus(ctx.seed(), opts.flows);
    let mut csv = String::from("flow_id,n,ur_over_r_inf,alpha_L31,ratio\n");
    let mut constants = Vec::new();
    for g in [ctx.grid, fine] {
        let mut c = 0.0f64;
        for (i, prof) in corpus.iter().enumerate() {
            let lhs = ur_over_r(&realize(prof, &g)?)?.max_abs();
            let rhs = lorentz_norm(&realize_alpha(prof, &g)?, l31);
            let r = lhs / rhs;
            c = c.max(r);
            let _ = writeln!(csv, "{i},{},{lhs:.17e},{rhs:.17e},{r:.17e}", g.n());
        }
        constants.push(c);
    }
    rep.constant("biot_savart.coarse", constants[0]);
    rep.constant("biot_savart.fine", constants[1]);
    rep.flag("biot_savart.bounded", constants.iter().all(|c| c.is_finite()));
    let factor = (constants[1] / constants[0]).max(constants[0] / constants[1]);
    rep.bound("biot_savart.refinement", factor, REFINEMENT_FACTOR);
    ctx.write(&mut rep, "ur_over_r.csv", csv)?;
    Ok(rep)
}

pub fn vorticity_growth(ctx: &Context) -> Result<ExperimentReport> {
    let mut rep = ExperimentReport::new(ctx.key);
    let run = run_flow(ctx, &ctx.grid, &ctx.scenario.solver, None)?;
    let d = &run.diagnostics;
    let l31_0 = channel(d, "alpha_L31")?[0];
    let ur = channel(d, "ur_over_r_inf")?;
    let om = channel(d, "omega_inf")?;
    let u = channel(d, "u_inf")?;
    let mut csv = String::from("t,ur_over_r_inf,omega_inf,u_inf,ur_bound,omega_rate\n");
    let (mut bound, mut rate) = (0.0f64, 0.0f64);
    for i in 0..d.len() {
        let t = d.times[i];
        let b = ur[i] / l31_0;
        let r = if t > 0.0 { (om[i] / om[0]).ln() / (t * l31_0) } else { 0.0 };
        bound = bound.max(b);
        rate = rate.max(r);
        let _ = writeln!(csv, "{t:.17e},{:.17e},{:.17e},{:.17e},{b:.17e},{r:.17e}", ur[i], om[i], u[i]);
    }
    rep.constant("vorticity.ur_bound", bound);
    rep.constant("vorticity.growth_rate", rate);
    rep.flag("vorticity.ur_bound", bound.is_finite() && l31_0 > 0.0);
    rep.flag("vorticity.growth", rate.is_finite());
    ctx.write(&mut rep, "growth.csv", csv)?;
    Ok(rep)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NormGrowthOptions {
    /// Grid of the comparison run, half the scenario grid if absent.
    pub coarse_n: Option<usize>,
}

impl Default for NormGrowthOptions {
    fn default() -> Self {
        NormGrowthOptions { coarse_n: None }
    }
}

pub fn norm_growth(ctx: &Context) -> Result<ExperimentReport> {
    let opts: NormGrowthOptions = ctx.options()?;
    let mut rep = ExperimentReport::new(ctx.key);
    let cfg = SolverConfig { diagnostics: DiagnosticsLevel::Full, ..ctx.scenario.solver.clone() };
    let coarse = Grid::new(opts.coarse_n.unwrap_or(ctx.grid.n() / 2), ctx.grid.box_length(), 3)?;
    let mut factors = Vec::new();
    let mut finite = true;
    for g in [ctx.grid, coarse] {
        let run = run_flow(ctx, &g, &cfg, None)?;
        let d = &run.diagnostics;
        ctx.write(&mut rep, &format!("n{}/diagnostics.csv", g.n()), d.to_csv())?;
        let mut f = Vec::new();
        for name in ["omega_Binf1", "u_B1inf1"] {
            let c = channel(d, name)?;
            finite &= c.iter().all(|v| v.is_finite());
            let growth = c.iter().copied().fold(0.0, f64::max) / c[0];
            rep.constant(&format!("growth.{name}.n{}", g.n()), growth);
            f.push(growth);
        }
        factors.push(f);
    }
    rep.flag("growth.finite", finite);
    let worst = (0..2)
        .map(|k| (factors[0][k] / factors[1][k]).max(factors[1][k] / factors[0][k]))
        .fold(0.0, f64::max);
    rep.bound("growth.refinement", worst, REFINEMENT_FACTOR);
    Ok(rep)
}
