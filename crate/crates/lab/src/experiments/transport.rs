use std::fmt::Write as _;

use anyhow::Result;
use plab_core::dynamics::{transport_estimate_audit, EulerDriver, EulerState, FrozenVelocity, SolverConfig};
use plab_core::norms::BesovParams;
use plab_core::random::band_limited;
use plab_core::VectorField;
use serde::{Deserialize, Serialize};

use crate::registry::Context;
use crate::report::ExperimentReport;

pub const REFINEMENT_FACTOR: f64 = 2.0;
pub const REST_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TransportOptions {
    /// Coarse fixed step; the comparison run halves it.
    pub dt: f64,
    pub t_end: f64,
    /// `(s, p, r)` triples; infinite entries are written as `null`.
    pub regularities: Vec<(f64, Option<f64>, Option<f64>)>,
}

impl Default for TransportOptions {
    fn default() -> Self {
        TransportOptions {
            dt: 0.05,
            t_end: 0.5,
            regularities: vec![(-1.0, None, None), (0.5, None, None), (1.0, None, Some(1.0))],
        }
    }
}

pub fn transport_audit(ctx: &Context) -> Result<ExperimentReport> {
    let opts: TransportOptions = ctx.options()?;
    let mut rep = ExperimentReport::new(ctx.key);
    let g = &ctx.grid;
    let f0 = band_limited(g, ctx.seed(), g.max_frequency() / 3.0, false);
    let inf = |x: Option<f64>| x.unwrap_or(f64::INFINITY);
    let mut csv = String::from("s,p,r,dt,t,ratio,integral\n");
    let (mut finite, mut worst, mut rest) = (true, 0.0f64, 0.0f64);
    for &(s, p, r) in &opts.regularities {
        let bp = BesovParams::new(s, inf(p), inf(r))?;
        let mut constants = Vec::new();
        for dt in [opts.dt, opts.dt / 2.0] {
            let cfg = SolverConfig::fixed(dt, opts.t_end);
            let state = EulerState::from_profile(&ctx.scenario.profile, g)?;
            let audit = transport_estimate_audit(&mut EulerDriver::new(state), &f0, bp, &cfg, &ctx.pu)?;
            for (t, ratio, integral) in &audit.samples {
                let _ = writeln!(csv, "{s},{},{},{dt},{t:.17e},{ratio:.17e},{integral:.17e}", bp.p, bp.r);
            }
            constants.push(audit.fitted_constant);
        }
        finite &= constants.iter().all(|c| c.is_finite());
        rep.constant(&format!("transport.s{s}.dt"), constants[0]);
        rep.constant(&format!("transport.s{s}.half_dt"), constants[1]);
        worst = worst.max((constants[0] / constants[1]).max(constants[1] / constants[0]));

        let cfg = SolverConfig::fixed(opts.dt, opts.t_end);
        let still = transport_estimate_audit(&mut FrozenVelocity::new(VectorField::zeros(*g)), &f0, bp, &cfg, &ctx.pu)?;
        rest = rest.max((still.fitted_constant - 1.0).abs());
    }
    rep.flag("transport.finite", finite);
    rep.bound("transport.refinement", worst, REFINEMENT_FACTOR);
    rep.bound("transport.rest", rest, REST_TOL);
    ctx.write(&mut rep, "transport.csv", csv)?;
    Ok(rep)
}
