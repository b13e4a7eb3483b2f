use std::fmt::Write as _;

use anyhow::Result;
use plab_core::bernstein::bernstein_ratio;
use plab_core::lp::decompose;
use plab_core::partition::lattice_radii;
use plab_core::random::band_limited;
use plab_core::SpectralField;
use serde::{Deserialize, Serialize};

use crate::registry::Context;
use crate::report::ExperimentReport;

pub const IDENTITY_TOL: f64 = 1e-12;
pub const RECONSTRUCTION_TOL: f64 = 1e-10;
/// Largest admissible ratio between Bernstein constants of different blocks.
pub const BERNSTEIN_SPREAD: f64 = 4.0;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PartitionOptions {
    /// Random band-limited fields in the reconstruction corpus.
    pub fields: usize,
}

impl Default for PartitionOptions {
    fn default() -> Self {
        PartitionOptions { fields: 50 }
    }
}

pub fn partition_audit(ctx: &Context) -> Result<ExperimentReport> {
    let opts: PartitionOptions = ctx.options()?;
    let mut rep = ExperimentReport::new(ctx.key);
    let audit = ctx.pu.audit(&ctx.grid);
    rep.bound("partition.identity", audit.identity_violation, IDENTITY_TOL);
    rep.bound("partition.homogeneous", audit.homogeneous_violation, IDENTITY_TOL);
    rep.measure("partition.disjointness", audit.disjointness_violation);
    rep.measure("partition.chi_phi", audit.chi_phi_violation);
    rep.flag("partition.supports", audit.disjointness_violation == 0.0 && audit.chi_phi_violation == 0.0);
    rep.measure("partition.radii_checked", audit.radii_checked as f64);
    ctx.write(&mut rep, "partition.csv", ctx.pu.to_csv(&lattice_radii(&ctx.grid)))?;

    let rho = ctx.pu.band_limit(ctx.grid.q_max());
    let mut csv = String::from("field_id,residual\n");
    let mut worst = 0.0f64;
    for i in 0..opts.fields {
        let f = band_limited(&ctx.grid, ctx.seed().wrapping_add(i as u64), rho, true);
        let r = decompose(&f, &ctx.pu, false)?.reconstruction_residual;
        worst = worst.max(r);
        let _ = writeln!(csv, "{i},{r:.17e}");
    }
    rep.bound("reconstruction.residual", worst, RECONSTRUCTION_TOL);
    ctx.write(&mut rep, "reconstruction.csv", csv)?;
    Ok(rep)
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BernsteinOptions {
    /// Derivative order; the acceptance sweep uses one.
    pub k: Option<usize>,
}

pub fn bernstein_sweep(ctx: &Context) -> Result<ExperimentReport> {
    let opts: BernsteinOptions = ctx.options()?;
    let k = opts.k.unwrap_or(1);
    let mut rep = ExperimentReport::new(ctx.key);
    // a lattice point mass: flat spectrum, and each block is the 2^q-dilated kernel,
    // so the ratios collapse; for white noise the a < b ratio decays like 2^(-3q/2)
    let mut samples = vec![0.0; ctx.grid.len()];
    samples[0] = 1.0;
    let f = SpectralField::from_samples(ctx.grid, samples)?;
    let inf = f64::INFINITY;
    let mut csv = String::from("a,b,q,derivative,mixed\n");
    let mut derivative = Vec::new();
    let mut mixed = Vec::new();
    for q in 0..ctx.grid.q_max() {
        let d = bernstein_ratio(&f, q, k, inf, inf, &ctx.pu)?;
        let m = bernstein_ratio(&f, q, k, 2.0, inf, &ctx.pu)?;
        derivative.push(d.derivative);
        mixed.push(m.mixed);
        let _ = writeln!(csv, "inf,inf,{q},{:.17e},{:.17e}", d.derivative, d.mixed);
        let _ = writeln!(csv, "2,inf,{q},{:.17e},{:.17e}", m.derivative, m.mixed);
    }
    let spread = |v: &[f64]| {
        let hi = v.iter().copied().fold(0.0, f64::max);
        let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
        hi / lo
    };
    rep.bound("bernstein.derivative", spread(&derivative), BERNSTEIN_SPREAD);
    rep.bound("bernstein.mixed", spread(&mixed), BERNSTEIN_SPREAD);
    rep.constant("bernstein.derivative_max", derivative.iter().copied().fold(0.0, f64::max));
    rep.constant("bernstein.mixed_max", mixed.iter().copied().fold(0.0, f64::max));
    ctx.write(&mut rep, "bernstein.csv", csv)?;
    Ok(rep)
}
