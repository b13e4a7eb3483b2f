use std::fmt::Write as _;

use anyhow::Result;
use plab_core::axisym::{realize, realize_alpha};
use plab_core::fit::{fit_ratio, linear_fit};
use plab_core::norms::{dilation_ratio, min_dilation, embedding_ratio_from, lebesgue_norm, lorentz_norm, LorentzParams};
use plab_core::random::band_limited;
use plab_core::{Grid, SpectralField};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::flow_corpus;
use crate::registry::Context;
use crate::report::ExperimentReport;

pub const INDICATOR_TOL: f64 = 1e-6;
pub const DIAGONAL_TOL: f64 = 1e-8;
pub const PRODUCT_SLACK: f64 = 1e-8;
/// Largest admissible ratio of a constant between two resolutions.
pub const REFINEMENT_FACTOR: f64 = 2.0;
/// Largest admissible growth of the dilation constant over the sweep.
pub const DILATION_TREND: f64 = 2.0;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LorentzOptions {
    pub product_pairs: usize,
    pub diagonal_fields: usize,
}

impl Default for LorentzOptions {
    fn default() -> Self {
        LorentzOptions { product_pairs: 50, diagonal_fields: 5 }
    }
}

/// Indicator of the first `cells` samples.
fn indicator(g: &Grid, cells: usize) -> SpectralField {
    let mut s = vec![0.0; g.len()];
    s[..cells].iter_mut().for_each(|v| *v = 1.0);
    SpectralField::from_samples(*g, s).expect("grid size")
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

pub fn lorentz_suite(ctx: &Context) -> Result<ExperimentReport> {
    let opts: LorentzOptions = ctx.options()?;
    let mut rep = ExperimentReport::new(ctx.key);
    let g = &ctx.grid;
    let inf = f64::INFINITY;

    let ps = [1.0, 2.0, 3.0, 6.0];
    let qs = [1.0, 2.0, inf];
    let cells = [1usize, 37, 1000, g.len() / 2];
    let mut csv = String::from("p,q,m,norm,exact,relative_error\n");
    let mut worst = 0.0f64;
    let mut k = 0;
    for &p in &ps {
        for &q in &qs {
            let c = cells[k % cells.len()];
            k += 1;
            let m = c as f64 * g.cell_measure();
            let exact = if q.is_infinite() { m.powf(1.0 / p) } else { (p / q).powf(1.0 / q) * m.powf(1.0 / p) };
            let got = lorentz_norm(&indicator(g, c), LorentzParams::new(p, q)?);
            let e = rel(got, exact);
            worst = worst.max(e);
            let _ = writeln!(csv, "{p},{q},{m:.17e},{got:.17e},{exact:.17e},{e:.3e}");
        }
    }
    rep.measure("lorentz.triples", k as f64);
    rep.bound("lorentz.indicator", worst, INDICATOR_TOL);
    ctx.write(&mut rep, "indicator.csv", csv)?;

    let rho = g.max_frequency() / 2.0;
    let mut diag = 0.0f64;
    for i in 0..opts.diagonal_fields as u64 {
        let f = band_limited(g, ctx.seed().wrapping_add(i), rho, true);
        for &p in &ps {
            diag = diag.max(rel(lorentz_norm(&f, LorentzParams::new(p, p)?), lebesgue_norm(&f, p)?));
        }
    }
    rep.bound("lorentz.diagonal", diag, DIAGONAL_TOL);

    let pairs_pq = [(3.0, 1.0), (2.0, 2.0), (6.0, 3.0), (1.5, inf), (3.0, 1.5)];
    let mut samples = Vec::new();
    let mut nesting = Vec::new();
    for i in 0..opts.product_pairs {
        let s = ctx.seed().wrapping_add(100 + 2 * i as u64);
        let u = band_limited(g, s, rho, true);
        let v = band_limited(g, s + 1, rho, true);
        let (p, q) = pairs_pq[i % pairs_pq.len()];
        let lp = LorentzParams::new(p, q)?;
        let lhs = lorentz_norm(&u.mul(&v)?, lp);
        samples.push((lhs, u.max_abs() * lorentz_norm(&v, lp)));
        if q.is_finite() {
            let wide = LorentzParams::new(p, 2.0 * q)?;
            nesting.push((lorentz_norm(&v, wide), lorentz_norm(&v, lp)));
        }
    }
    let prod = fit_ratio(&samples)?;
    rep.constant("lorentz.product", prod.value);
    rep.measure("lorentz.product", prod.value);
    rep.flag("lorentz.product", prod.value <= 1.0 + PRODUCT_SLACK);
    let nest = fit_ratio(&nesting)?;
    rep.constant("lorentz.nesting", nest.value);
    rep.flag("lorentz.nesting", nest.value.is_finite());
    Ok(rep)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EmbeddingOptions {
    pub flows: usize,
    pub p: f64,
    /// Grid of the refinement comparison; twice the scenario grid if absent.
    pub refined_n: Option<usize>,
}

impl Default for EmbeddingOptions {
    fn default() -> Self {
        EmbeddingOptions { flows: 10, p: 2.0, refined_n: None }
    }
}

pub fn embedding_sweep(ctx: &Context) -> Result<ExperimentReport> {
    let opts: EmbeddingOptions = ctx.options()?;
    let mut rep = ExperimentReport::new(ctx.key);
    let fine = Grid::new(opts.refined_n.unwrap_or(2 * ctx.grid.n()), ctx.grid.box_length(), 3)?;
    let corpus = flow_corpus(ctx.seed(), opts.flows);
    let mut csv = String::from("flow_id,n,ratio\n");
    let mut fits = Vec::new();
    for g in [ctx.grid, fine] {
        let mut worst = 0.0f64;
        for (i, prof) in corpus.iter().enumerate() {
            // omega/r from the closed form: the spectral curl of a sampled ring is
            // not resolved to the structure tolerance below n = 128
            let r = embedding_ratio_from(&realize_alpha(prof, &g)?, &realize(prof, &g)?, opts.p, &ctx.pu)?;
            worst = worst.max(r);
            let _ = writeln!(csv, "{i},{},{r:.17e}", g.n());
        }
        fits.push(worst);
    }
    rep.constant("embedding.coarse", fits[0]);
    rep.constant("embedding.fine", fits[1]);
    rep.flag("embedding.bounded", fits.iter().all(|c| c.is_finite() && *c > 0.0));
    let factor = (fits[1] / fits[0]).max(fits[0] / fits[1]);
    rep.bound("embedding.refinement", factor, REFINEMENT_FACTOR);
    ctx.write(&mut rep, "embedding.csv", csv)?;
    Ok(rep)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DilationOptions {
    pub fields: usize,
    /// The sweep runs over `lambda = 2^-1 ... 2^-max_level`, stopping early
    /// at the smallest factor the grid resolves.
    pub max_level: i32,
}

impl Default for DilationOptions {
    fn default() -> Self {
        DilationOptions { fields: 10, max_level: 6 }
    }
}

/// Sums of Gaussians centred on the plane `x1 = 0`, so the contracted
/// samples stay continuous across the periodic boundary.
pub fn dilation_corpus(g: &Grid, seed: u64, count: usize) -> Vec<SpectralField> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let terms: Vec<(f64, f64, f64, f64, f64)> = (0..3)
                .map(|_| {
                    (
                        rng.gen_range(-1.0..1.0),
                        rng.gen_range(0.3..0.6),
                        rng.gen_range(-0.5..0.5),
                        rng.gen_range(-0.5..0.5),
                        rng.gen_range(0.0..3.0),
                    )
                })
                .collect();
            SpectralField::from_fn(*g, move |x| {
                terms
                    .iter()
                    .map(|&(a, w, c2, c3, k)| {
                        let d = x[0] * x[0] + (x[1] - c2).powi(2) + (x[2] - c3).powi(2);
                        a * (-d / (w * w)).exp() * (k * x[0]).cos()
                    })
                    .sum()
            })
        })
        .collect()
}

pub fn dilation_audit(ctx: &Context) -> Result<ExperimentReport> {
    let opts: DilationOptions = ctx.options()?;
    let mut rep = ExperimentReport::new(ctx.key);
    let corpus = dilation_corpus(&ctx.grid, ctx.seed(), opts.fields);
    let mut csv = String::from("lambda,field_id,ratio\n");
    let mut per_lambda = Vec::new();
    let min = min_dilation(ctx.grid.n());
    for level in (1..=opts.max_level).take_while(|&l| 2f64.powi(-l) >= min) {
        let lambda = 2f64.powi(-level);
        let mut c = 0.0f64;
        for (i, f) in corpus.iter().enumerate() {
            let r = dilation_ratio(f, lambda, &ctx.pu)?;
            c = c.max(r);
            let _ = writeln!(csv, "{lambda:.17e},{i},{r:.17e}");
        }
        rep.constant(&format!("dilation.lambda_2^-{level}"), c);
        per_lambda.push((level as f64, c));
    }
    anyhow::ensure!(!per_lambda.is_empty(), "no dilation level is resolved on this grid");
    rep.measure("dilation.levels", per_lambda.len() as f64);
    let max = per_lambda.iter().map(|p| p.1).fold(0.0, f64::max);
    rep.constant("dilation.max", max);
    rep.flag("dilation.bounded", per_lambda.iter().all(|p| p.1.is_finite()));
    // growth of the constant beyond its value at the mildest dilation
    let trend = max / per_lambda[0].1;
    rep.bound("dilation.no_trend", trend, DILATION_TREND);
    if per_lambda.len() >= 2 {
        let (_, slope, _) = linear_fit(&per_lambda)?;
        rep.measure("dilation.slope_per_level", slope);
    }
    ctx.write(&mut rep, "dilation.csv", csv)?;
    Ok(rep)
}
