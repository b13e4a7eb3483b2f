use std::fmt::Write as _;

use anyhow::Result;
use plab_core::axisym::{angular_field, biot_savart, check_axisymmetry, radial_quotient, realize, realize_alpha, AxisymProfile};
use plab_core::dynamics::{evolve_vorticity_model, EulerDriver, EulerState, FrozenVelocity, ModelRun, SolverConfig};
use plab_core::random::solenoidal;
use plab_core::{Grid, VectorField};
use serde::{Deserialize, Serialize};

use super::flow_corpus;
use crate::registry::Context;
use crate::report::ExperimentReport;

pub const STRUCTURE_TOL: f64 = 1e-8;
pub const ROUND_TRIP_TOL: f64 = 1e-9;
pub const MODEL_TOL: f64 = 1e-6;
pub const LINEARITY_TOL: f64 = 1e-10;
pub const REST_TOL: f64 = 1e-12;

fn rel(a: &VectorField, b: &VectorField) -> Result<f64> {
    let scale = b.max_norm();
    let d = a.sub(b)?.max_norm();
    Ok(if scale == 0.0 { d } else { d / scale })
}

/// Structured profiles plus two random ones.
fn geometry_corpus(seed: u64) -> Vec<(String, AxisymProfile)> {
    let mut v = vec![
        ("reference_ring".to_string(), AxisymProfile::reference_ring()),
        ("blob".to_string(), AxisymProfile::GaussianBlob { amplitude: 0.2, width: 0.2, z_center: 0.0 }),
        ("dipole".to_string(), AxisymProfile::Dipole { amplitude: 0.2, width: 0.2, z_center: 0.05 }),
    ];
    for (i, p) in flow_corpus(seed, 2).into_iter().enumerate() {
        v.push((format!("random_{i}"), p));
    }
    v
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeometryOptions {
    /// Profiles to audit instead of the built-in corpus.
    pub profiles: Vec<AxisymProfile>,
}

pub fn geometry_audit(ctx: &Context) -> Result<ExperimentReport> {
    let opts: GeometryOptions = ctx.options()?;
    let mut rep = ExperimentReport::new(ctx.key);
    let corpus = if opts.profiles.is_empty() {
        geometry_corpus(ctx.seed())
    } else {
        opts.profiles.into_iter().enumerate().map(|(i, p)| (format!("profile_{i}"), p)).collect()
    };
    let mut csv = String::from("profile,field,curl,blocks,worst_block,biot_savart,quotient,curl_quotient\n");
    let (mut fields, mut blocks, mut bs, mut quot, mut quot_curl) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for (name, prof) in &corpus {
        let u = realize(prof, &ctx.grid)?;
        let audit = check_axisymmetry(&u, &ctx.pu)?;
        let worst_q = audit
            .blocks
            .iter()
            .max_by(|a, b| a.report.worst().total_cmp(&b.report.worst()))
            .map_or(0, |b| b.q);
        let omega = u.curl()?;
        let mean = u.mean();
        let centred = VectorField::from_components(
            [0, 1, 2].map(|i| u.component(i).map(|x| x - mean[i])),
        )?;
        let round = rel(&biot_savart(&omega)?, &centred)?;
        let alpha = realize_alpha(prof, &ctx.grid)?;
        let scale = alpha.max_abs();
        let scale = if scale == 0.0 { 1.0 } else { scale };
        // manufactured r alpha e_theta, and the ungated quotient of the spectral
        // curl, where a structural failure shows as a large defect
        let quotient_of = |w: &VectorField| -> Result<f64> {
            let q = radial_quotient(w.component(1), &w.component(0).scale(-1.0))?;
            Ok(q.sub(&alpha)?.max_abs() / scale)
        };
        let qd = quotient_of(&angular_field(&alpha)?)?;
        let qc = quotient_of(&omega)?;
        fields = fields.max(audit.field_worst());
        blocks = blocks.max(audit.blocks_worst());
        bs = bs.max(round);
        quot = quot.max(qd);
        quot_curl = quot_curl.max(qc);
        let _ = writeln!(
            csv,
            "{name},{:.3e},{:.3e},{:.3e},{worst_q},{round:.3e},{qd:.3e},{qc:.3e}",
            audit.field.worst(),
            audit.curl.worst(),
            audit.blocks_worst()
        );
    }
    rep.bound("geometry.fields", fields, STRUCTURE_TOL);
    rep.bound("geometry.blocks", blocks, STRUCTURE_TOL);
    rep.bound("geometry.biot_savart", bs, ROUND_TRIP_TOL);
    rep.bound("geometry.quotient", quot, STRUCTURE_TOL);
    rep.measure("geometry.curl_quotient", quot_curl);
    ctx.write(&mut rep, "structure.csv", csv)?;
    Ok(rep)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelOptions {
    /// Advect under the frozen initial velocity instead of the Euler solution.
    pub frozen: bool,
    /// Grid of the linearity and rest checks.
    pub small_n: usize,
    /// Angular datum `r alpha e_theta` of the preservation check.
    pub datum: AxisymProfile,
}

impl Default for ModelOptions {
    fn default() -> Self {
        ModelOptions {
            frozen: false,
            small_n: 16,
            datum: AxisymProfile::GaussianBlob { amplitude: 1.0, width: 0.2, z_center: 0.05 },
        }
    }
}

/// The model under the scenario flow, frozen at `t = 0` or evolving.
fn run_model(ctx: &Context, frozen: bool, omega0: &VectorField, cfg: &SolverConfig, angular: bool) -> Result<ModelRun> {
    let state = EulerState::from_profile(&ctx.scenario.profile, &ctx.grid)?;
    Ok(if frozen {
        evolve_vorticity_model(&mut FrozenVelocity::new(state.u), omega0, cfg, angular)?
    } else {
        evolve_vorticity_model(&mut EulerDriver::new(state), omega0, cfg, angular)?
    })
}

pub fn model_v_suite(ctx: &Context) -> Result<ExperimentReport> {
    let opts: ModelOptions = ctx.options()?;
    let mut rep = ExperimentReport::new(ctx.key);
    let cfg = &ctx.scenario.solver;
    let g = &ctx.grid;
    let mut csv = String::from("case,t,divergence,non_angular\n");

    let w0 = solenoidal(g, ctx.seed(), g.max_frequency() / 3.0);
    let div_run = run_model(ctx, opts.frozen, &w0, cfg, false)?;
    for (t, d) in div_run.times.iter().zip(&div_run.divergence) {
        let _ = writeln!(csv, "solenoidal,{t:.17e},{d:.3e},");
    }
    rep.bound("model.divergence", div_run.max_divergence(), MODEL_TOL);
    drop(div_run);

    opts.datum.check_support(g)?;
    let omega0 = angular_field(&realize_alpha(&opts.datum, g)?)?;
    let ang = run_model(ctx, opts.frozen, &omega0, cfg, true)?;
    for i in 0..ang.times.len() {
        let _ = writeln!(csv, "angular,{:.17e},{:.3e},{:.3e}", ang.times[i], ang.divergence[i], ang.non_angular[i]);
    }
    rep.bound("model.angular", ang.max_non_angular(), MODEL_TOL);
    rep.bound("model.stretching", ang.max_stretching_defect(), MODEL_TOL);
    drop(ang);
    ctx.write(&mut rep, "model.csv", csv)?;

    let small = Grid::new(opts.small_n, g.box_length(), 3)?;
    let short = SolverConfig { output_interval: None, ..SolverConfig::fixed(0.05, 0.2) };
    let u = solenoidal(&small, ctx.seed().wrapping_add(1), 4.0);
    let a = solenoidal(&small, ctx.seed().wrapping_add(2), 4.0);
    let b = solenoidal(&small, ctx.seed().wrapping_add(3), 4.0);
    let evolve = |w: &VectorField| -> Result<VectorField> {
        Ok(evolve_vorticity_model(&mut FrozenVelocity::new(u.clone()), w, &short, false)?.final_field().clone())
    };
    let combined = evolve(&a.lincomb(1.0, &b, -2.5)?)?;
    let separate = evolve(&a)?.lincomb(1.0, &evolve(&b)?, -2.5)?;
    rep.bound("model.linearity", rel(&combined, &separate)?, LINEARITY_TOL);
    let still = evolve_vorticity_model(&mut FrozenVelocity::new(VectorField::zeros(small)), &a, &short, false)?;
    rep.bound("model.rest", rel(still.final_field(), &a)?, REST_TOL);
    Ok(rep)
}
