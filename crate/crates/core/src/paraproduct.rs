//! Bony decomposition, the commutator `[Delta_q, u . grad]` and its
//! four-term split, and the norm audits built on them.
//!
//! Every product takes dealiased factors and is truncated to the kept
//! modes afterwards, so the decomposition identities hold to rounding.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::grid::Grid;
use crate::lp::block;
use crate::norms::{besov_norm, besov_norm_vector, lebesgue_norm, BesovParams};
use crate::partition::PartitionOfUnity;
use crate::vector::{gradient_sup, VectorField, DIVERGENCE_TOL};

/// `u v = T_u v + T_v u + R(u, v)`.
#[derive(Debug, Clone)]
pub struct BonySplit {
    pub para_uv: SpectralField,
    pub para_vu: SpectralField,
    pub remainder: SpectralField,
}

impl BonySplit {
    pub fn total(&self) -> SpectralField {
        SpectralField::sum(*self.para_uv.grid(), [&self.para_uv, &self.para_vu, &self.remainder])
            .expect("shared grid")
    }

    /// `||T_u v + T_v u + R - product||_inf / ||product||_inf`.
    pub fn identity_defect(&self, product: &SpectralField) -> Result<f64> {
        let d = self.total().sub(product)?.max_abs();
        let scale = product.max_abs();
        Ok(if scale == 0.0 { d } else { d / scale })
    }
}

/// Highest block index needed so the blocks cover every lattice frequency.
pub fn cover_index(grid: &Grid, pu: &PartitionOfUnity) -> i32 {
    pu.covering_index(grid.corner_frequency())
}

/// Samples of `Delta_q f` for `q = -1..=top`, index `q + 1`.
fn block_samples(f: &SpectralField, top: i32, pu: &PartitionOfUnity) -> Vec<Vec<f64>> {
    (-1..=top).map(|q| block(f, q, pu).samples().to_vec()).collect()
}

fn accumulate(acc: &mut [f64], a: &[f64], b: &[f64]) {
    acc.par_iter_mut().zip(a.par_iter().zip(b.par_iter())).for_each(|(o, (x, y))| *o += x * y);
}

fn add_into(acc: &mut [f64], a: &[f64]) {
    acc.par_iter_mut().zip(a.par_iter()).for_each(|(o, x)| *o += x);
}

fn finish(grid: Grid, samples: Vec<f64>) -> SpectralField {
    SpectralField::from_samples(grid, samples).expect("grid size").dealias()
}

/// Paraproduct and remainder sums from the blocks of both factors.
fn split_samples(a: &[Vec<f64>], b: &[Vec<f64>], len: usize) -> [Vec<f64>; 3] {
    let top = a.len() - 1;
    let mut tab = vec![0.0; len];
    let mut tba = vec![0.0; len];
    let mut rem = vec![0.0; len];
    // running S_{q-1} = sum of blocks j <= q - 2, index shifted by one
    let mut low_a = vec![0.0; len];
    let mut low_b = vec![0.0; len];
    for k in 0..=top {
        if k >= 2 {
            add_into(&mut low_a, &a[k - 2]);
            add_into(&mut low_b, &b[k - 2]);
            accumulate(&mut tab, &low_a, &b[k]);
            accumulate(&mut tba, &low_b, &a[k]);
        }
        for j in k.saturating_sub(1)..=(k + 1).min(top) {
            accumulate(&mut rem, &a[k], &b[j]);
        }
    }
    [tab, tba, rem]
}

/// Bony decomposition of the dealiased product of `u` and `v`.
pub fn bony_split(u: &SpectralField, v: &SpectralField, pu: &PartitionOfUnity) -> Result<BonySplit> {
    u.ensure_same_grid(v)?;
    let g = *u.grid();
    let top = cover_index(&g, pu);
    let a = block_samples(&u.dealias(), top, pu);
    let b = block_samples(&v.dealias(), top, pu);
    let [tab, tba, rem] = split_samples(&a, &b, g.len());
    Ok(BonySplit { para_uv: finish(g, tab), para_vu: finish(g, tba), remainder: finish(g, rem) })
}

/// `T_a b = sum_q S_{q-1} a Delta_q b`.
pub fn paraproduct(a: &SpectralField, b: &SpectralField, pu: &PartitionOfUnity) -> Result<SpectralField> {
    Ok(bony_split(a, b, pu)?.para_uv)
}

/// `R(a, b) = sum_q Delta_q a (Delta_{q-1} + Delta_q + Delta_{q+1}) b`.
pub fn remainder(a: &SpectralField, b: &SpectralField, pu: &PartitionOfUnity) -> Result<SpectralField> {
    Ok(bony_split(a, b, pu)?.remainder)
}

/// `T'_a b = T_a b + R(a, b)`.
pub fn paraproduct_prime(a: &SpectralField, b: &SpectralField, pu: &PartitionOfUnity) -> Result<SpectralField> {
    let s = bony_split(a, b, pu)?;
    s.para_uv.add(&s.remainder)
}

/// Annulus that carries `S_{q-1} a Delta_q b` before truncation.
pub fn summand_annulus(q: i32, pu: &PartitionOfUnity) -> (f64, f64) {
    let (lo, hi) = pu.support_phi();
    let low = pu.support_chi() * 2f64.powi(q - 1);
    let scale = 2f64.powi(q);
    (lo * scale - low, hi * scale + low)
}

/// Spectral leak of one paraproduct summand.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SummandLeak {
    pub q: i32,
    pub energy: f64,
    pub outside: f64,
}

/// Energy of each summand of `T_a b` outside its annulus, for `q >= 1`.
pub fn localization_leaks(a: &SpectralField, b: &SpectralField, pu: &PartitionOfUnity) -> Result<Vec<SummandLeak>> {
    a.ensure_same_grid(b)?;
    let g = *a.grid();
    let top = cover_index(&g, pu);
    let ab = block_samples(&a.dealias(), top, pu);
    let bb = block_samples(&b.dealias(), top, pu);
    let lat = g.lattice();
    let mut low = vec![0.0; g.len()];
    let mut out = Vec::new();
    for k in 2..ab.len() {
        add_into(&mut low, &ab[k - 2]);
        let mut term = vec![0.0; g.len()];
        accumulate(&mut term, &low, &bb[k]);
        let t = finish(g, term);
        let q = k as i32 - 1;
        let (lo, hi) = summand_annulus(q, pu);
        let c = t.coefficients();
        let (mut energy, mut outside) = (0.0, 0.0);
        for (flat, z) in c.iter().enumerate() {
            let idx = lat.split(flat);
            let w = lat.weight(idx[2], lat.shape[2]) * z.norm_sqr();
            energy += w;
            let rho = lat.rho(idx);
            if rho < lo || rho > hi {
                outside += w;
            }
        }
        out.push(SummandLeak { q, energy, outside });
    }
    Ok(out)
}

/// Largest leaked fraction over the summands, relative to the energy of `T_a b`.
pub fn localization_leak(a: &SpectralField, b: &SpectralField, pu: &PartitionOfUnity) -> Result<f64> {
    let leaks = localization_leaks(a, b, pu)?;
    let total: f64 = leaks.iter().map(|l| l.energy).sum();
    if total == 0.0 {
        return Ok(0.0);
    }
    Ok(leaks.iter().map(|l| l.outside / total).fold(0.0, f64::max))
}

fn require_solenoidal(u: &VectorField) -> Result<()> {
    let violation = u.relative_divergence();
    if violation > DIVERGENCE_TOL {
        return Err(Error::NotDivergenceFree { violation });
    }
    Ok(())
}

fn transport_term(u: &VectorField, f: &SpectralField) -> Result<SpectralField> {
    let mut acc = SpectralField::zeros(*f.grid());
    for j in 0..3 {
        acc = acc.add(&u.component(j).dealiased_product(&f.derivative(j))?)?;
    }
    Ok(acc)
}

/// `[Delta_q, u . grad] f = Delta_q (u . grad f) - u . grad Delta_q f`.
pub fn commutator(q: i32, u: &VectorField, f: &SpectralField, pu: &PartitionOfUnity) -> Result<SpectralField> {
    f.ensure_same_grid(u.component(0))?;
    require_solenoidal(u)?;
    let outer = block(&transport_term(u, f)?, q, pu);
    let inner = transport_term(u, &block(f, q, pu))?;
    outer.sub(&inner)
}

/// The four pieces of the commutator, summed over the components of `u`:
/// `R1 = Delta_q R(u^j, d_j f)`, `R2 = Delta_q T_{d_j f} u^j`,
/// `R3 = -T'_{Delta_q d_j f} u^j`, `R4 = [Delta_q, T_{u^j}] d_j f`.
#[derive(Debug, Clone)]
pub struct CommutatorTerms {
    pub r1: SpectralField,
    pub r2: SpectralField,
    pub r3: SpectralField,
    pub r4: SpectralField,
    pub direct: SpectralField,
}

impl CommutatorTerms {
    pub fn sum(&self) -> SpectralField {
        SpectralField::sum(*self.r1.grid(), [&self.r1, &self.r2, &self.r3, &self.r4]).expect("shared grid")
    }

    /// `||R1 + R2 + R3 + R4 - direct||_inf` relative to the largest piece.
    pub fn defect(&self) -> f64 {
        let d = self.sum().sub(&self.direct).expect("shared grid").max_abs();
        let scale = [&self.r1, &self.r2, &self.r3, &self.r4, &self.direct]
            .iter()
            .map(|f| f.max_abs())
            .fold(0.0, f64::max);
        if scale == 0.0 {
            d
        } else {
            d / scale
        }
    }
}

pub fn commutator_terms(q: i32, u: &VectorField, f: &SpectralField, pu: &PartitionOfUnity) -> Result<CommutatorTerms> {
    let direct = commutator(q, u, f, pu)?;
    let g = *f.grid();
    let mut r = [0; 4].map(|_| SpectralField::zeros(g));
    for j in 0..3 {
        let uj = u.component(j);
        let df = f.derivative(j);
        let s = bony_split(uj, &df, pu)?;
        r[0] = r[0].add(&block(&s.remainder, q, pu))?;
        r[1] = r[1].add(&block(&s.para_vu, q, pu))?;
        let dq = block(&df, q, pu);
        let inner = bony_split(&dq, uj, pu)?;
        r[2] = r[2].sub(&inner.para_uv.add(&inner.remainder)?)?;
        r[3] = r[3].add(&block(&s.para_uv, q, pu).sub(&inner.para_vu)?)?;
    }
    let [r1, r2, r3, r4] = r;
    Ok(CommutatorTerms { r1, r2, r3, r4, direct })
}

/// One row of the commutator gain audit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GainRow {
    pub q: i32,
    /// `2^{-q} ||[Delta_q, u . grad] f||_{L^p}`
    pub lhs: f64,
    /// `||f||_{B^{-1}_{p,inf}} ||u||_{B^1_{inf,1}}`
    pub rhs: f64,
    pub ratio: f64,
}

/// Gain of the commutator over the grid's block window.
pub fn commutator_gain(u: &VectorField, f: &SpectralField, p: f64, pu: &PartitionOfUnity) -> Result<Vec<GainRow>> {
    let fb = besov_norm(f, BesovParams::new(-1.0, p, f64::INFINITY)?, pu)?;
    let ub = besov_norm_vector(u, BesovParams::new(1.0, f64::INFINITY, 1.0)?, pu)?;
    let rhs = fb * ub;
    let (lo, hi) = crate::lp::block_window(f.grid());
    (lo..=hi)
        .map(|q| {
            let lhs = 2f64.powi(-q) * lebesgue_norm(&commutator(q, u, f, pu)?, p)?;
            let ratio = if rhs > 0.0 { lhs / rhs } else { 0.0 };
            Ok(GainRow { q, lhs, rhs, ratio })
        })
        .collect()
}

/// Relative tolerance on `omega = curl u` in `stretching_norm_bound`.
pub const CURL_TOL: f64 = 1e-8;

/// `(||omega . grad u||_{B^{3/p}_{p,1}}, ||omega||_{B^{3/p}_{p,1}} ||grad u||_inf)`.
pub fn stretching_norm_bound(
    omega: &VectorField,
    u: &VectorField,
    p: f64,
    pu: &PartitionOfUnity,
) -> Result<(f64, f64)> {
    omega.component(0).ensure_same_grid(u.component(0))?;
    let curl = u.curl()?;
    let scale = omega.max_norm().max(curl.max_norm());
    if scale == 0.0 {
        return Ok((0.0, 0.0));
    }
    let mismatch = curl.sub(omega)?.max_norm() / scale;
    if mismatch > CURL_TOL {
        return Err(Error::Inconsistent(format!("omega differs from curl u by {mismatch:.3e} relative")));
    }
    let grad = u.jacobian();
    let comps = [0, 1, 2].map(|i| {
        let mut acc = SpectralField::zeros(*u.grid());
        for (j, row) in grad[i].iter().enumerate() {
            acc = acc.add(&omega.component(j).dealiased_product(row).expect("shared grid")).expect("shared grid");
        }
        acc
    });
    let stretch = VectorField::from_components(comps)?;
    let bp = BesovParams::new(3.0 / p, p, 1.0)?;
    let lhs = besov_norm_vector(&stretch, bp, pu)?;
    let rhs = besov_norm_vector(omega, bp, pu)? * gradient_sup(&grad);
    Ok((lhs, rhs))
}

/// Relative mismatch between `sum_j R(omega^j, d_j u)` and `d_j R(omega^j, u)`,
/// which agree when `omega` is divergence free. Energies are compared
/// component by component.
pub fn remainder_divergence_defect(omega: &VectorField, u: &VectorField, pu: &PartitionOfUnity) -> Result<f64> {
    require_solenoidal(omega)?;
    let g = *u.grid();
    let mut worst = 0.0f64;
    let mut scale = 0.0f64;
    for i in 0..3 {
        let mut lhs = SpectralField::zeros(g);
        let mut rhs = SpectralField::zeros(g);
        for j in 0..3 {
            let wj = omega.component(j);
            lhs = lhs.add(&remainder(wj, &u.component(i).derivative(j), pu)?)?;
            rhs = rhs.add(&remainder(wj, u.component(i), pu)?.derivative(j))?;
        }
        worst = worst.max(lhs.sub(&rhs)?.spectral_energy());
        scale = scale.max(lhs.spectral_energy());
    }
    Ok(if scale == 0.0 { worst.sqrt() } else { (worst / scale).sqrt() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{band_limited, solenoidal};
    use std::f64::consts::PI;

    fn grid() -> Grid {
        Grid::cube(32, 2.0 * PI).unwrap()
    }

    #[test]
    fn split_of_random_pair_sums_to_product() {
        let g = grid();
        let pu = PartitionOfUnity::classical();
        let u = band_limited(&g, 1, 14.0, true);
        let v = band_limited(&g, 2, 14.0, true);
        let s = bony_split(&u, &v, &pu).unwrap();
        assert!(s.identity_defect(&u.dealiased_product(&v).unwrap()).unwrap() < 1e-12);
    }

    #[test]
    fn random_summands_stay_in_their_annuli() {
        let g = grid();
        let pu = PartitionOfUnity::classical();
        let u = band_limited(&g, 21, 16.0, true);
        let v = band_limited(&g, 22, 16.0, true);
        let leak = localization_leak(&u, &v, &pu).unwrap();
        assert!(leak < 1e-10, "{leak:e}");
    }

    #[test]
    fn constant_factor() {
        let g = grid();
        let pu = PartitionOfUnity::classical();
        let v = band_limited(&g, 4, 10.0, true);
        let c = SpectralField::constant(g, 2.5);
        let s = bony_split(&c, &v, &pu).unwrap();
        assert!(s.total().sub(&v.dealias().scale(2.5)).unwrap().max_abs() < 1e-12);
        // a constant lives in the lowest block only, so T_v c vanishes
        assert!(s.para_vu.max_abs() < 1e-14);
    }

    #[test]
    fn low_times_high_block() {
        let g = grid();
        let pu = PartitionOfUnity::classical();
        let u = block(&band_limited(&g, 5, 1.0, true), -1, &pu);
        let v = block(&band_limited(&g, 6, 12.0, false), 3, &pu);
        let s = bony_split(&u, &v, &pu).unwrap();
        assert!(s.para_vu.max_abs() < 1e-14);
        assert!(s.remainder.max_abs() < 1e-14);
        assert!(localization_leak(&u, &v, &pu).unwrap() < 1e-20);
    }

    #[test]
    fn constant_velocity_commutes() {
        let g = grid();
        let pu = PartitionOfUnity::classical();
        let u = VectorField::new(
            [SpectralField::constant(g, 0.3), SpectralField::constant(g, -1.1), SpectralField::constant(g, 0.7)],
            true,
        )
        .unwrap();
        let f = band_limited(&g, 8, 9.0, false);
        for q in -1..=3 {
            assert!(commutator(q, &u, &f, &pu).unwrap().max_abs() < 1e-12);
        }
    }

    #[test]
    fn four_terms_match_direct_commutator() {
        let g = grid();
        let pu = PartitionOfUnity::classical();
        let u = solenoidal(&g, 3, 8.0);
        let f = band_limited(&g, 9, 9.0, false);
        for q in [0, 2] {
            let t = commutator_terms(q, &u, &f, &pu).unwrap();
            assert!(t.defect() < 1e-11, "q = {q}: {}", t.defect());
        }
    }

    #[test]
    fn gradient_velocity_is_rejected() {
        let g = grid();
        let pu = PartitionOfUnity::classical();
        let f = band_limited(&g, 10, 5.0, false);
        let u = VectorField::gradient(&f);
        assert!(matches!(commutator(0, &u, &f, &pu), Err(Error::NotDivergenceFree { .. })));
    }

    #[test]
    fn stretching_bound_at_rest_and_mismatch() {
        let g = grid();
        let pu = PartitionOfUnity::classical();
        let z = VectorField::zeros(g);
        assert_eq!(stretching_norm_bound(&z, &z, 2.0, &pu).unwrap(), (0.0, 0.0));
        let u = solenoidal(&g, 12, 6.0);
        let w = u.curl().unwrap();
        let (lhs, rhs) = stretching_norm_bound(&w, &u, 2.0, &pu).unwrap();
        assert!(lhs > 0.0 && rhs > 0.0);
        assert!(stretching_norm_bound(&w.scale(1.5), &u, 2.0, &pu).is_err());
    }

    #[test]
    fn divergence_rewrite_of_remainder() {
        let g = grid();
        let pu = PartitionOfUnity::classical();
        let u = solenoidal(&g, 13, 7.0);
        let w = u.curl().unwrap();
        assert!(remainder_divergence_defect(&w, &u, &pu).unwrap() < 1e-11);
    }
}
