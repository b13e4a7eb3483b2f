use anyhow::Result;
use plab_core::fit::fit_ratio;
use plab_core::lp::block_window;
use plab_core::paraproduct::{
    bony_split, commutator_gain, commutator_terms, localization_leak, remainder_divergence_defect,
    stretching_norm_bound,
};
use plab_core::random::{band_limited, solenoidal};
use serde::{Deserialize, Serialize};

use crate::registry::Context;
use crate::report::{audit_csv, AuditRow, ExperimentReport};

pub const IDENTITY_TOL: f64 = 1e-10;
pub const LEAK_TOL: f64 = 1e-10;
pub const FOUR_TERM_TOL: f64 = 1e-9;
pub const DIVERGENCE_REWRITE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BonyOptions {
    pub pairs: usize,
    /// Velocity/scalar pairs in the commutator and stretching corpus.
    pub commutator_inputs: usize,
    /// Integrability of the commutator and stretching audits.
    pub p: f64,
}

impl Default for BonyOptions {
    fn default() -> Self {
        BonyOptions { pairs: 50, commutator_inputs: 4, p: 2.0 }
    }
}

pub fn bony_audit(ctx: &Context) -> Result<ExperimentReport> {
    let opts: BonyOptions = ctx.options()?;
    let mut rep = ExperimentReport::new(ctx.key);
    let g = &ctx.grid;
    let rho = g.corner_frequency();
    let seed = ctx.seed();

    let (mut identity, mut leak) = (0.0f64, 0.0f64);
    for i in 0..opts.pairs as u64 {
        let u = band_limited(g, seed.wrapping_add(2 * i), rho, true);
        let v = band_limited(g, seed.wrapping_add(2 * i + 1), rho, true);
        let split = bony_split(&u, &v, &ctx.pu)?;
        identity = identity.max(split.identity_defect(&u.dealiased_product(&v)?)?);
        leak = leak.max(localization_leak(&u, &v, &ctx.pu)?);
    }
    rep.bound("bony.identity", identity, IDENTITY_TOL);
    rep.bound("bony.localization", leak, LEAK_TOL);

    let (lo, hi) = block_window(g);
    let mut rows = Vec::new();
    let mut four = 0.0f64;
    let mut stretch = Vec::new();
    let mut rewrite = 0.0f64;
    // the commutator needs every product resolved, so inputs stay below a third of the band
    let low = g.max_frequency() / 3.0;
    for c in 0..opts.commutator_inputs {
        let s = seed.wrapping_add(1000 + c as u64);
        let u = solenoidal(g, s, low);
        let f = band_limited(g, s.wrapping_add(1), low, false);
        for q in lo..=hi {
            four = four.max(commutator_terms(q, &u, &f, &ctx.pu)?.defect());
        }
        for r in commutator_gain(&u, &f, opts.p, &ctx.pu)? {
            rows.push(AuditRow::new(c, r.q, r.lhs, r.rhs));
        }
        let omega = u.curl()?;
        stretch.push(stretching_norm_bound(&omega, &u, opts.p, &ctx.pu)?);
        rewrite = rewrite.max(remainder_divergence_defect(&omega, &u, &ctx.pu)?);
    }
    rep.bound("commutator.four_terms", four, FOUR_TERM_TOL);
    let gain = fit_ratio(&rows.iter().map(|r| (r.lhs, r.rhs)).collect::<Vec<_>>())?;
    rep.constant("commutator.gain", gain.value);
    rep.constant("commutator.gain_least_squares", gain.least_squares);
    rep.measure("commutator.gain_log_residual", gain.log_residual);
    rep.flag("commutator.gain", gain.value.is_finite());
    ctx.write(&mut rep, "commutator_gain.csv", audit_csv(&rows))?;

    let st = fit_ratio(&stretch)?;
    rep.constant("stretching.bound", st.value);
    rep.flag("stretching.bound", st.value.is_finite());
    let srows: Vec<_> = stretch.iter().enumerate().map(|(i, &(l, r))| AuditRow::new(i, -1, l, r)).collect();
    ctx.write(&mut rep, "stretching.csv", audit_csv(&srows))?;
    rep.bound("remainder.divergence", rewrite, DIVERGENCE_REWRITE_TOL);
    Ok(rep)
}
