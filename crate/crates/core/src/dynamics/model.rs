//! The linear vorticity model `d_t Omega + u . grad Omega = Omega . grad u`
//! under a prescribed velocity, and the family of solutions started from
//! the dyadic blocks of the vorticity.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::axisym::{quotient_by_r, radial_quotient, structure, AxisymProfile, FieldKind};
use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::fit::{cumulative_trapezoid, fit_ratio, gronwall_fit, FittedConstant};
use crate::grid::Grid;
use crate::lp::block;
use crate::norms::{besov_norm, besov_norm_vector, lorentz_norm, BesovParams, LorentzParams};
use crate::paraproduct::cover_index;
use crate::partition::PartitionOfUnity;
use crate::vector::VectorField;

use super::config::SolverConfig;
use super::euler::{drive, EulerDriver, EulerState, VelocitySource};
use super::rhs::{Equation, PreparedVelocity, Rk4Member};

fn as_vector(y: &[SpectralField]) -> VectorField {
    VectorField::from_components([y[0].clone(), y[1].clone(), y[2].clone()]).expect("shared grid")
}

fn relative_divergence_of(v: &VectorField) -> f64 {
    v.relative_divergence()
}

/// Model trajectory with its preservation diagnostics.
#[derive(Debug, Clone)]
pub struct ModelRun {
    pub times: Vec<f64>,
    /// `||div Omega||_inf / ||Omega||_inf` at each recorded time.
    pub divergence: Vec<f64>,
    /// Radial plus axial part of `Omega`, relative to `||Omega||_inf`.
    pub non_angular: Vec<f64>,
    /// `||Omega . grad u - (u_r / r) Omega||_inf / ||Omega . grad u||_inf` at output times.
    pub stretching_defect: Vec<f64>,
    /// `Omega` at the output times, starting with the initial field.
    pub outputs: Vec<(f64, VectorField)>,
}

impl ModelRun {
    pub fn max_divergence(&self) -> f64 {
        self.divergence.iter().copied().fold(0.0, f64::max)
    }

    pub fn max_non_angular(&self) -> f64 {
        self.non_angular.iter().copied().fold(0.0, f64::max)
    }

    pub fn max_stretching_defect(&self) -> f64 {
        self.stretching_defect.iter().copied().fold(0.0, f64::max)
    }

    pub fn final_field(&self) -> &VectorField {
        &self.outputs.last().expect("initial output").1
    }
}

/// `||Omega . grad u - (u_r / r) Omega||_inf`, relative to the stretching term.
pub fn stretching_defect(omega: &VectorField, u: &VectorField, dealias: bool) -> Result<f64> {
    let pv = PreparedVelocity::new(u.clone(), dealias);
    let s = pv.stretch(omega.components());
    let q = radial_quotient(u.component(0), u.component(1))?;
    let scale = s.iter().map(|f| f.max_abs()).fold(0.0, f64::max);
    let mut worst = 0.0f64;
    for i in 0..3 {
        let prod = if dealias {
            q.dealiased_product(omega.component(i))?
        } else {
            q.mul(omega.component(i))?
        };
        worst = worst.max(s[i].sub(&prod)?.max_abs());
    }
    Ok(if scale == 0.0 { worst } else { worst / scale })
}

/// Solves the vorticity model from `omega0` under the velocity of `source`.
///
/// With `angular` the non-angular part and the stretching identity of
/// angular fields are tracked as well.
pub fn evolve_vorticity_model<S: VelocitySource>(
    source: &mut S,
    omega0: &VectorField,
    cfg: &SolverConfig,
    angular: bool,
) -> Result<ModelRun> {
    if !source.grid().same_as(omega0.grid()) {
        return Err(Error::GridMismatch);
    }
    let mut members = vec![Rk4Member::new(Equation::Vorticity, omega0.components().to_vec())];
    let mut run = ModelRun {
        times: Vec::new(),
        divergence: Vec::new(),
        non_angular: Vec::new(),
        stretching_defect: Vec::new(),
        outputs: Vec::new(),
    };
    drive(source, &mut members, cfg, |info, src, m| {
        let w = as_vector(&m[0].y);
        if info.record {
            run.times.push(info.t);
            run.divergence.push(relative_divergence_of(&w));
            if angular {
                run.non_angular.push(structure(&w, FieldKind::Angular, false)?.component);
            }
        }
        if info.output {
            if angular {
                run.stretching_defect.push(stretching_defect(&w, src.velocity(), cfg.dealias)?);
            }
            run.outputs.push((info.t, w));
        }
        Ok(())
    })?;
    Ok(run)
}

/// Solves `d_t f + u . grad f = 0`, returning `f` at the output times.
pub fn evolve_scalar<S: VelocitySource>(
    source: &mut S,
    f0: &SpectralField,
    cfg: &SolverConfig,
) -> Result<Vec<(f64, SpectralField)>> {
    let mut members = vec![Rk4Member::new(Equation::Transport, vec![f0.clone()])];
    let mut out = Vec::new();
    drive(source, &mut members, cfg, |info, _, m| {
        if info.output {
            out.push((info.t, m[0].y[0].clone()));
        }
        Ok(())
    })?;
    Ok(out)
}

/// Blocks whose initial sup falls below this fraction of `||omega_0||_inf` are skipped.
pub const DEGENERATE_BLOCK: f64 = 1e-14;

/// The tilde family at one time.
#[derive(Debug, Clone)]
pub struct TildeFamily {
    pub t: f64,
    pub blocks: BTreeMap<i32, VectorField>,
}

/// `||Delta_j omega_q(t)||_inf` for every pair of evolved blocks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InteractionMatrix {
    pub t: f64,
    /// `(j, q, value)` triplets.
    pub entries: Vec<(i32, i32, f64)>,
    /// Largest divergence and non-angular part over the blocks, relative to each block's sup.
    pub block_divergence: f64,
    pub block_structure: f64,
}

/// Everything recorded while evolving the tilde family.
#[derive(Debug, Clone)]
pub struct FamilyRun {
    pub times: Vec<f64>,
    /// `||Omega - sum_q omega_q||_inf / ||Omega||_inf` against the model solution
    /// from the full vorticity, driven by the same stage velocities.
    pub residual: Vec<f64>,
    /// Same sum against `r alpha e_theta` from the Euler solution.
    pub alpha_gap: Vec<f64>,
    pub block_sup: BTreeMap<i32, Vec<f64>>,
    pub initial_block_sup: BTreeMap<i32, f64>,
    pub skipped: Vec<i32>,
    /// `||u||_{B^1_{inf,1}}` and `||grad u||_inf` at each time.
    pub u_besov: Vec<f64>,
    pub grad_u: Vec<f64>,
    pub alpha_l31_initial: f64,
    pub omega_initial: VectorField,
    pub matrices: Vec<InteractionMatrix>,
    pub final_family: TildeFamily,
}

impl FamilyRun {
    pub fn max_residual(&self) -> f64 {
        self.residual.iter().copied().fold(0.0, f64::max)
    }

    pub fn max_alpha_gap(&self) -> f64 {
        self.alpha_gap.iter().copied().fold(0.0, f64::max)
    }

    /// `U(t) = int_0^t ||u||_{B^1_{inf,1}}`.
    pub fn u_integral(&self) -> Vec<f64> {
        cumulative_trapezoid(&self.times, &self.u_besov)
    }

    /// `U_1(t) = int_0^t ||grad u||_inf`.
    pub fn grad_integral(&self) -> Vec<f64> {
        cumulative_trapezoid(&self.times, &self.grad_u)
    }
}

fn interaction(t: f64, blocks: &BTreeMap<i32, VectorField>, top: i32, pu: &PartitionOfUnity) -> Result<InteractionMatrix> {
    let mut entries = Vec::new();
    let mut div = 0.0f64;
    let mut shape = 0.0f64;
    for (&q, w) in blocks {
        for j in -1..=top {
            let b = w.map_components(|c| block(c, j, pu));
            entries.push((j, q, b.max_norm()));
        }
        div = div.max(w.relative_divergence());
        shape = shape.max(structure(w, FieldKind::Angular, false)?.component);
    }
    Ok(InteractionMatrix { t, entries, block_divergence: div, block_structure: shape })
}

/// Evolves `omega_q` with `omega_q(0) = Delta_q omega_0` for every block of the
/// initial vorticity, in lockstep with the Euler solution from `profile`.
///
/// Interaction matrices are computed at `t = 0` and at every output time.
pub fn evolve_tilde_family(
    profile: &AxisymProfile,
    grid: &Grid,
    pu: &PartitionOfUnity,
    cfg: &SolverConfig,
) -> Result<FamilyRun> {
    let state = EulerState::from_profile(profile, grid)?;
    let omega0 = state.vorticity()?;
    evolve_tilde_family_with(&mut EulerDriver::new(state), &omega0, pu, cfg)
}

/// The tilde family under any velocity source, for instance a stored
/// history replayed with the same configuration.
pub fn evolve_tilde_family_with<S: VelocitySource>(
    source: &mut S,
    omega0: &VectorField,
    pu: &PartitionOfUnity,
    cfg: &SolverConfig,
) -> Result<FamilyRun> {
    evolve_tilde_family_observed(source, omega0, pu, cfg, |_| Ok(()))
}

/// `evolve_tilde_family_with`, handing the family at each output time to `on_output`.
pub fn evolve_tilde_family_observed<S: VelocitySource>(
    source: &mut S,
    omega0: &VectorField,
    pu: &PartitionOfUnity,
    cfg: &SolverConfig,
    mut on_output: impl FnMut(&TildeFamily) -> Result<()>,
) -> Result<FamilyRun> {
    let grid = source.grid();
    if !grid.same_as(omega0.grid()) {
        return Err(Error::GridMismatch);
    }
    let scale = omega0.max_norm();
    let top = cover_index(&grid, pu);
    let mut order = Vec::new();
    let mut skipped = Vec::new();
    let mut initial = BTreeMap::new();
    let mut members = vec![Rk4Member::new(Equation::Vorticity, omega0.components().to_vec())];
    for q in -1..=top {
        let b = omega0.map_components(|c| block(c, q, pu));
        let m = b.max_norm();
        if m <= DEGENERATE_BLOCK * scale {
            skipped.push(q);
            continue;
        }
        initial.insert(q, m);
        order.push(q);
        members.push(Rk4Member::new(Equation::Vorticity, b.into_components().to_vec()));
    }
    let besov = BesovParams::new(1.0, f64::INFINITY, 1.0)?;
    let l31 = lorentz_norm(&quotient_by_r(omega0)?, LorentzParams::new(3.0, 1.0)?);
    let mut run = FamilyRun {
        times: Vec::new(),
        residual: Vec::new(),
        alpha_gap: Vec::new(),
        block_sup: order.iter().map(|&q| (q, Vec::new())).collect(),
        initial_block_sup: initial,
        skipped,
        u_besov: Vec::new(),
        grad_u: Vec::new(),
        alpha_l31_initial: l31,
        omega_initial: omega0.clone(),
        matrices: Vec::new(),
        final_family: TildeFamily { t: 0.0, blocks: BTreeMap::new() },
    };
    // every step is recorded: the velocity integrals need the full series
    drive(source, &mut members, cfg, |info, src, m| {
        let full = as_vector(&m[0].y);
        let blocks: BTreeMap<i32, VectorField> =
            order.iter().zip(&m[1..]).map(|(&q, mem)| (q, as_vector(&mem.y))).collect();
        let sum = [0, 1, 2].map(|i| SpectralField::sum(grid, blocks.values().map(|b| b.component(i))).expect("shared grid"));
        let sum = VectorField::from_components(sum)?;
        let fs = full.max_norm();
        let rel = |x: f64| if fs == 0.0 { x } else { x / fs };
        run.times.push(info.t);
        run.residual.push(rel(sum.sub(&full)?.max_norm()));
        if let Some(w) = src.reference_vorticity()? {
            run.alpha_gap.push(rel(sum.sub(&w)?.max_norm()));
        }
        for (q, b) in &blocks {
            run.block_sup.get_mut(q).expect("evolved block").push(b.max_norm());
        }
        let u = src.velocity();
        run.u_besov.push(besov_norm_vector(u, besov, pu)?);
        run.grad_u.push(u.gradient_sup());
        let family = TildeFamily { t: info.t, blocks };
        if info.output {
            run.matrices.push(interaction(info.t, &family.blocks, top, pu)?);
            on_output(&family)?;
        }
        run.final_family = family;
        Ok(())
    })?;
    Ok(run)
}

/// Value reported for `log2` of an exactly vanishing interaction entry.
pub const LOG_FLOOR: f64 = -1.0e3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayRow {
    pub t: f64,
    /// Smallest `b` with `m(j, q) <= -|j - q| + b` over the nonvanishing entries.
    pub offset: f64,
    pub u_integral: f64,
    /// `C U(t)` for the single constant fitted across times.
    pub fitted_bound: f64,
    /// Largest entry with `|j - q| >= 2`, relative to `||Delta_q omega_0||_inf`.
    pub off_tridiagonal: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockDecayReport {
    pub rows: Vec<DecayRow>,
    /// `(t, j, q, m)` with `m` at `LOG_FLOOR` for exact zeros.
    pub matrix: Vec<(f64, i32, i32, f64)>,
    /// Smallest `C` with `2^{b(t)} <= C exp(C U(t))` over the rows.
    pub fitted_constant: f64,
    pub excluded: Vec<i32>,
}

/// `m(j, q) = log2(||Delta_j omega_q(t)||_inf / ||Delta_q omega_0||_inf)` and its envelope.
pub fn block_decay_report(run: &FamilyRun) -> Result<BlockDecayReport> {
    let integral = run.u_integral();
    let u_at = |t: f64| {
        let k = run.times.iter().position(|&s| s == t).expect("matrix times are recorded times");
        integral[k]
    };
    let mut rows = Vec::new();
    let mut matrix = Vec::new();
    for mat in &run.matrices {
        let mut offset = f64::NEG_INFINITY;
        let mut off = 0.0f64;
        for &(j, q, v) in &mat.entries {
            let base = run.initial_block_sup[&q];
            let ratio = v / base;
            let m = if ratio > 0.0 { ratio.log2() } else { LOG_FLOOR };
            matrix.push((mat.t, j, q, m));
            if ratio > 0.0 {
                offset = offset.max(m + (j - q).abs() as f64);
            }
            if (j - q).abs() >= 2 {
                off = off.max(ratio);
            }
        }
        rows.push(DecayRow { t: mat.t, offset, u_integral: u_at(mat.t), fitted_bound: 0.0, off_tridiagonal: off });
    }
    let samples: Vec<(f64, f64)> = rows.iter().map(|r| (2f64.powf(r.offset), r.u_integral)).collect();
    let c = gronwall_fit(&samples)?;
    for r in &mut rows {
        r.fitted_bound = c * r.u_integral;
    }
    Ok(BlockDecayReport { rows, matrix, fitted_constant: c, excluded: run.skipped.clone() })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthFit {
    /// Single `C` with `||omega_q(t)|| <= ||Delta_q omega_0|| exp(C t ||alpha_0||_{L^{3,1}})`.
    pub constant: f64,
    /// The constant each block would need on its own.
    pub per_block: BTreeMap<i32, f64>,
}

/// Fits the exponential growth bound of the block sup norms with one constant.
pub fn block_growth_fit(run: &FamilyRun) -> Result<GrowthFit> {
    let l = run.alpha_l31_initial;
    let mut per_block = BTreeMap::new();
    for (&q, sup) in &run.block_sup {
        let base = run.initial_block_sup[&q];
        let mut c = 0.0f64;
        for (t, v) in run.times.iter().zip(sup) {
            if *t > 0.0 && l > 0.0 {
                c = c.max((v / base).ln() / (t * l));
            }
        }
        per_block.insert(q, c);
    }
    let constant = per_block.values().copied().fold(0.0, f64::max);
    if !constant.is_finite() {
        return Err(Error::Inconsistent("block growth constant is not finite".into()));
    }
    Ok(GrowthFit { constant, per_block })
}

/// `(q, ||Delta_q omega_0^1 / x2||_{B^0_{inf,1}}, 2^q ||Delta_q omega_0||_inf)` and the fitted ratio.
pub fn initial_quotient_audit(
    omega0: &VectorField,
    pu: &PartitionOfUnity,
) -> Result<(Vec<(i32, f64, f64)>, FittedConstant)> {
    let bp = BesovParams::new(0.0, f64::INFINITY, 1.0)?;
    let (lo, hi) = crate::lp::block_window(omega0.grid());
    let mut rows = Vec::new();
    for q in lo..=hi {
        let b = omega0.map_components(|c| block(c, q, pu));
        // omega^1 / x2 = -omega^2 / x1 for angular fields
        let quotient = radial_quotient(&b.component(1).scale(-1.0), b.component(0))?;
        rows.push((q, besov_norm(&quotient, bp, pu)?, 2f64.powi(q) * b.max_norm()));
    }
    let fit = fit_ratio(&rows.iter().map(|r| (r.1, r.2)).collect::<Vec<_>>())?;
    Ok((rows, fit))
}

/// Which integrated velocity norm enters the transport estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransportExponent {
    /// `U_1(t) = int ||grad u||_inf`, for `-1 < s < 1`.
    Gradient,
    /// `U(t) = int ||u||_{B^1_{inf,1}}`, for the endpoint cases.
    Besov,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransportAudit {
    pub params: BesovParams,
    pub exponent: TransportExponent,
    /// `(t, ||f(t)|| / ||f_0||, exponent integral)`.
    pub samples: Vec<(f64, f64, f64)>,
    pub fitted_constant: f64,
}

/// Exponent for the regularity `s`, or an error outside the admissible range.
pub fn transport_exponent(bp: BesovParams) -> Result<TransportExponent> {
    if bp.s > -1.0 && bp.s < 1.0 {
        Ok(TransportExponent::Gradient)
    } else if (bp.s == -1.0 && bp.r.is_infinite()) || (bp.s == 1.0 && bp.r == 1.0) {
        Ok(TransportExponent::Besov)
    } else {
        Err(Error::InvalidExponent(format!(
            "transport estimate needs -1 < s < 1, or s = -1 with r = inf, or s = 1 with r = 1; got s = {}, r = {}",
            bp.s, bp.r
        )))
    }
}

/// Evolves `f0` by the velocity of `source` and fits `||f(t)|| <= C e^{C V(t)} ||f_0||`.
pub fn transport_estimate_audit<S: VelocitySource>(
    source: &mut S,
    f0: &SpectralField,
    bp: BesovParams,
    cfg: &SolverConfig,
    pu: &PartitionOfUnity,
) -> Result<TransportAudit> {
    let exponent = transport_exponent(bp)?;
    let n0 = besov_norm(f0, bp, pu)?;
    if n0 == 0.0 {
        return Err(Error::Inconsistent("transport audit needs nonzero initial data".into()));
    }
    let ub = BesovParams::new(1.0, f64::INFINITY, 1.0)?;
    let speed = |u: &VectorField| -> Result<f64> {
        match exponent {
            TransportExponent::Gradient => Ok(u.gradient_sup()),
            TransportExponent::Besov => besov_norm_vector(u, ub, pu),
        }
    };
    let mut members = vec![Rk4Member::new(Equation::Transport, vec![f0.clone()])];
    let mut times = Vec::new();
    let mut speeds = Vec::new();
    let mut ratios = Vec::new();
    drive(source, &mut members, cfg, |_, src, m| {
        times.push(src.time());
        speeds.push(speed(src.velocity())?);
        ratios.push(besov_norm(&m[0].y[0], bp, pu)? / n0);
        Ok(())
    })?;
    let integral = cumulative_trapezoid(&times, &speeds);
    let samples: Vec<(f64, f64, f64)> = (0..times.len()).map(|i| (times[i], ratios[i], integral[i])).collect();
    let fitted_constant = gronwall_fit(&samples.iter().map(|s| (s.1, s.2)).collect::<Vec<_>>())?;
    Ok(TransportAudit { params: bp, exponent, samples, fitted_constant })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::axisym::AxisymProfile;
    use crate::dynamics::euler::FrozenVelocity;
    use crate::partition::PartitionOfUnity;
    use crate::random::solenoidal;
    use std::f64::consts::PI;

    fn rel(a: &VectorField, b: &VectorField) -> f64 {
        a.sub(b).unwrap().max_norm() / b.max_norm()
    }

    #[test]
    fn model_is_linear_and_trivial_without_velocity() {
        let g = Grid::cube(16, 2.0 * PI).unwrap();
        let cfg = SolverConfig::fixed(0.05, 0.2);
        let u = solenoidal(&g, 1, 4.0);
        let w1 = solenoidal(&g, 2, 4.0);
        let w2 = solenoidal(&g, 3, 4.0);
        let run = |w: &VectorField| {
            let mut src = FrozenVelocity::new(u.clone());
            evolve_vorticity_model(&mut src, w, &cfg, false).unwrap().final_field().clone()
        };
        let combo = w1.lincomb(0.7, &w2, -1.3).unwrap();
        let lhs = run(&combo);
        let rhs = run(&w1).lincomb(0.7, &run(&w2), -1.3).unwrap();
        assert!(rel(&lhs, &rhs) < 1e-10);

        let mut still = FrozenVelocity::new(VectorField::zeros(g));
        let out = evolve_vorticity_model(&mut still, &w1, &cfg, false).unwrap();
        assert_eq!(out.final_field().sub(&w1).unwrap().max_norm(), 0.0);
    }

    #[test]
    fn transport_exponents_follow_the_admissible_range() {
        let p = |s, r| BesovParams::new(s, f64::INFINITY, r).unwrap();
        assert_eq!(transport_exponent(p(0.5, f64::INFINITY)).unwrap(), TransportExponent::Gradient);
        assert_eq!(transport_exponent(p(-1.0, f64::INFINITY)).unwrap(), TransportExponent::Besov);
        assert_eq!(transport_exponent(p(1.0, 1.0)).unwrap(), TransportExponent::Besov);
        assert!(transport_exponent(p(1.0, 2.0)).is_err());
        assert!(transport_exponent(p(-1.0, 1.0)).is_err());
        assert!(transport_exponent(p(1.5, 1.0)).is_err());
    }

    #[test]
    fn family_sums_to_the_model_solution() {
        let g = Grid::cube(32, 2.0 * PI).unwrap();
        let pu = PartitionOfUnity::classical();
        let cfg = SolverConfig { output_interval: Some(0.05), ..SolverConfig::cfl(0.5, 0.1) };
        let run = evolve_tilde_family(&AxisymProfile::reference_ring(), &g, &pu, &cfg).unwrap();
        assert!(run.max_residual() < 1e-10, "residual {}", run.max_residual());
        assert_eq!(run.matrices.len(), 3);
        assert_eq!(run.matrices[0].t, 0.0);
        let rep = block_decay_report(&run).unwrap();
        assert!(rep.rows[0].off_tridiagonal < 1e-12, "t = 0 leak {}", rep.rows[0].off_tridiagonal);
        assert!(rep.fitted_constant.is_finite());
        assert!(rep.rows.windows(2).all(|w| w[0].u_integral <= w[1].u_integral));
        let fit = block_growth_fit(&run).unwrap();
        assert!(fit.constant.is_finite());
    }

    #[test]
    fn family_replays_from_stored_snapshots() {
        let g = Grid::cube(32, 2.0 * PI).unwrap();
        let pu = PartitionOfUnity::classical();
        let cfg = SolverConfig { output_interval: Some(0.02), ..SolverConfig::cfl(0.5, 0.1) };
        let prof = AxisymProfile::reference_ring();
        let euler = crate::dynamics::euler::evolve_profile(&prof, &g, &cfg, &pu).unwrap();
        let mut history = euler.history().unwrap();
        let omega0 = crate::dynamics::euler::vorticity_of(&euler.snapshots[0].1).unwrap();
        let run = evolve_tilde_family_with(&mut history, &omega0, &pu, &cfg).unwrap();
        assert!(run.max_residual() < 1e-10);
        assert_eq!(run.alpha_gap.len(), run.times.len());
    }

    #[test]
    fn frozen_family_has_no_off_tridiagonal_interaction() {
        // with u = 0 every member stays Delta_q omega_0, and Delta_j Delta_q = 0 for |j - q| >= 2
        let g = Grid::cube(32, 2.0 * PI).unwrap();
        let pu = PartitionOfUnity::classical();
        let cfg = SolverConfig { output_interval: Some(0.05), ..SolverConfig::fixed(0.05, 0.1) };
        let omega0 = crate::dynamics::euler::vorticity_of(
            &crate::axisym::realize_alpha(&AxisymProfile::reference_ring(), &g).unwrap(),
        )
        .unwrap();
        let mut still = FrozenVelocity::new(VectorField::zeros(g));
        let run = evolve_tilde_family_with(&mut still, &omega0, &pu, &cfg).unwrap();
        let rep = block_decay_report(&run).unwrap();
        assert_eq!(rep.rows.len(), 3);
        for &(_, j, q, m) in &rep.matrix {
            if (j - q).abs() >= 2 {
                assert_eq!(m, LOG_FLOOR, "m({j}, {q})");
            }
        }
        for r in &rep.rows {
            assert_eq!(r.off_tridiagonal, 0.0);
            assert!(r.offset <= 1.0, "offset {}", r.offset);
        }
    }
}
