use std::fmt::Write as _;

use anyhow::Result;
use plab_core::dynamics::{
    block_decay_report, block_growth_fit, evolve_tilde_family_observed, initial_quotient_audit, EulerDriver, EulerState,
};
use plab_core::snapshot::write_vector;
use serde::{Deserialize, Serialize};

use crate::registry::Context;
use crate::report::{audit_csv, AuditRow, ExperimentReport};

pub const CLOSURE_TOL: f64 = 1e-6;
pub const INITIAL_LEAK_TOL: f64 = 1e-12;
/// Rounding allowance when comparing offsets across times.
pub const OFFSET_SLACK: f64 = 1e-9;
pub const REPORT_TIMES: [f64; 3] = [0.25, 0.5, 1.0];

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DecompositionOptions {
    /// Write every member at every output time under `family/<q>/`.
    pub write_family: bool,
}

impl Default for DecompositionOptions {
    fn default() -> Self {
        DecompositionOptions { write_family: true }
    }
}

pub fn decomposition_suite(ctx: &Context) -> Result<ExperimentReport> {
    let opts: DecompositionOptions = ctx.options()?;
    let mut rep = ExperimentReport::new(ctx.key);
    let dir = ctx.dir()?;
    let mut cfg = ctx.scenario.solver.clone();
    if cfg.output_interval.is_none() {
        cfg.output_interval = Some(REPORT_TIMES[0]);
    }
    let state = EulerState::from_profile(&ctx.scenario.profile, &ctx.grid)?;
    let omega0 = state.vorticity()?;
    let mut index = 0;
    let run = evolve_tilde_family_observed(&mut EulerDriver::new(state), &omega0, &ctx.pu, &cfg, |fam| {
        if opts.write_family {
            for (q, w) in &fam.blocks {
                let d = dir.join("family").join(q.to_string());
                std::fs::create_dir_all(&d)?;
                write_vector(&d.join(format!("t_{index}.field")), w)?;
            }
        }
        index += 1;
        Ok(())
    })?;
    if opts.write_family {
        rep.artifact(ctx.relative(&dir.join("family")));
    }

    rep.bound("decomposition.closure", run.max_residual(), CLOSURE_TOL);
    rep.measure("decomposition.alpha_gap", run.max_alpha_gap());
    rep.measure("decomposition.members", run.initial_block_sup.len() as f64);
    rep.measure("decomposition.skipped_blocks", run.skipped.len() as f64);

    let decay = block_decay_report(&run)?;
    let first = &decay.rows[0];
    anyhow::ensure!(first.t == 0.0, "interaction matrices start at t = 0");
    rep.bound("decomposition.initial_leak", first.off_tridiagonal, INITIAL_LEAK_TOL);
    rep.bound("decomposition.initial_offset", first.offset, 1.0);
    let mut csv = String::from("t,offset,u_integral,fitted_bound,off_tridiagonal\n");
    for r in &decay.rows {
        let _ = writeln!(csv, "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}", r.t, r.offset, r.u_integral, r.fitted_bound, r.off_tridiagonal);
    }
    ctx.write(&mut rep, "offsets.csv", csv)?;
    let reported: Vec<_> = REPORT_TIMES
        .iter()
        .filter_map(|t| decay.rows.iter().find(|r| (r.t - t).abs() <= 1e-12))
        .collect();
    for r in &reported {
        rep.measure(&format!("decomposition.offset_t{}", r.t), r.offset);
    }
    rep.flag(
        "decomposition.offsets",
        reported.len() == REPORT_TIMES.iter().filter(|&&t| t <= cfg.t_end * (1.0 + 1e-12)).count()
            && decay.rows.iter().all(|r| r.offset.is_finite()),
    );
    rep.flag(
        "decomposition.offsets_nondecreasing",
        decay.rows.windows(2).all(|w| w[1].offset >= w[0].offset - OFFSET_SLACK),
    );
    rep.constant("decomposition.offset_gronwall", decay.fitted_constant);
    let mut triplets = String::from("t,j,q,value\n");
    for (t, j, q, m) in &decay.matrix {
        let _ = writeln!(triplets, "{t:.17e},{j},{q},{m:.17e}");
    }
    ctx.write(&mut rep, "block_decay.csv", triplets)?;

    let growth = block_growth_fit(&run)?;
    rep.constant("decomposition.growth", growth.constant);
    rep.flag("decomposition.growth", growth.constant.is_finite());
    let mut gcsv = String::from("q,initial_sup,constant\n");
    for (q, c) in &growth.per_block {
        let _ = writeln!(gcsv, "{q},{:.17e},{c:.17e}", run.initial_block_sup[q]);
    }
    ctx.write(&mut rep, "growth.csv", gcsv)?;

    let div = run.matrices.iter().map(|m| m.block_divergence).fold(0.0, f64::max);
    rep.measure("decomposition.block_divergence", div);
    rep.measure("decomposition.block_structure", run.matrices.iter().map(|m| m.block_structure).fold(0.0, f64::max));

    let (rows, fit) = initial_quotient_audit(&run.omega_initial, &ctx.pu)?;
    rep.constant("decomposition.quotient_lemma", fit.value);
    rep.flag("decomposition.quotient_lemma", fit.value.is_finite());
    let audit: Vec<_> = rows.iter().map(|&(q, l, r)| AuditRow::new(0, q, l, r)).collect();
    ctx.write(&mut rep, "omega1_over_x2.csv", audit_csv(&audit))?;
    Ok(rep)
}
