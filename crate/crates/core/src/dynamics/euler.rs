//! Axisymmetric Euler flow through the advected quantity `alpha = omega_theta / r`.

use crate::axisym::{angular_field, realize_alpha, AxisymProfile};
use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::grid::Grid;
use crate::partition::PartitionOfUnity;
use crate::vector::VectorField;

use super::config::SolverConfig;
use super::diagnostics::{euler_row, DiagnosticsSeries};
use super::rhs::{Equation, PreparedVelocity, Rk4Member};

/// `omega = r alpha e_theta` on Cartesian components.
pub fn vorticity_of(alpha: &SpectralField) -> Result<VectorField> {
    angular_field(alpha)
}

/// Mean-free, divergence-free velocity whose curl is the solenoidal part of `r alpha e_theta`.
pub fn velocity_of(alpha: &SpectralField) -> Result<VectorField> {
    vorticity_of(alpha)?.inverse_curl()
}

#[derive(Debug, Clone)]
pub struct EulerState {
    pub t: f64,
    pub step: usize,
    pub alpha: SpectralField,
    pub u: VectorField,
}

impl EulerState {
    pub fn from_alpha(alpha: SpectralField) -> Result<Self> {
        let u = velocity_of(&alpha)?;
        Ok(EulerState { t: 0.0, step: 0, alpha, u })
    }

    pub fn from_profile(profile: &AxisymProfile, grid: &Grid) -> Result<Self> {
        Self::from_alpha(realize_alpha(profile, grid)?)
    }

    pub fn vorticity(&self) -> Result<VectorField> {
        vorticity_of(&self.alpha)
    }
}

/// Something that supplies the velocity at each Runge-Kutta stage.
pub trait VelocitySource {
    fn grid(&self) -> Grid;
    fn time(&self) -> f64;
    /// Velocity at the current time.
    fn velocity(&self) -> &VectorField;
    /// Advances to `t_next = time() + dt`, calling `on_stage(s, u_s)` for
    /// the four stages in order before the source uses stage `s` itself.
    fn step(
        &mut self,
        dt: f64,
        t_next: f64,
        cfg: &SolverConfig,
        on_stage: &mut dyn FnMut(usize, &PreparedVelocity) -> Result<()>,
    ) -> Result<()>;

    /// The vorticity this velocity belongs to at the current time, when known.
    fn reference_vorticity(&self) -> Result<Option<VectorField>> {
        Ok(None)
    }
}

/// The Euler solver as a velocity source for coupled linear solves.
pub struct EulerDriver {
    pub state: EulerState,
}

impl EulerDriver {
    pub fn new(state: EulerState) -> Self {
        EulerDriver { state }
    }
}

impl VelocitySource for EulerDriver {
    fn grid(&self) -> Grid {
        *self.state.alpha.grid()
    }

    fn time(&self) -> f64 {
        self.state.t
    }

    fn velocity(&self) -> &VectorField {
        &self.state.u
    }

    fn step(
        &mut self,
        dt: f64,
        t_next: f64,
        cfg: &SolverConfig,
        on_stage: &mut dyn FnMut(usize, &PreparedVelocity) -> Result<()>,
    ) -> Result<()> {
        let mut m = Rk4Member::new(Equation::Transport, vec![self.state.alpha.clone()]);
        m.begin(dt);
        let mut pv = PreparedVelocity::new(self.state.u.clone(), cfg.dealias);
        for s in 0..4 {
            on_stage(s, &pv)?;
            m.stage(s, &pv)?;
            if s < 3 {
                pv = PreparedVelocity::new(velocity_of(&m.stage_input()[0])?, cfg.dealias);
            }
        }
        let alpha = m.y.remove(0);
        self.state.u = velocity_of(&alpha)?;
        self.state.alpha = alpha;
        self.state.t = t_next;
        self.state.step += 1;
        Ok(())
    }

    fn reference_vorticity(&self) -> Result<Option<VectorField>> {
        self.state.vorticity().map(Some)
    }
}

/// A velocity that does not change in time.
pub struct FrozenVelocity {
    u: VectorField,
    t: f64,
}

impl FrozenVelocity {
    pub fn new(u: VectorField) -> Self {
        FrozenVelocity { u, t: 0.0 }
    }
}

impl VelocitySource for FrozenVelocity {
    fn grid(&self) -> Grid {
        *self.u.grid()
    }

    fn time(&self) -> f64 {
        self.t
    }

    fn velocity(&self) -> &VectorField {
        &self.u
    }

    fn step(
        &mut self,
        _dt: f64,
        t_next: f64,
        cfg: &SolverConfig,
        on_stage: &mut dyn FnMut(usize, &PreparedVelocity) -> Result<()>,
    ) -> Result<()> {
        let pv = PreparedVelocity::new(self.u.clone(), cfg.dealias);
        for s in 0..4 {
            on_stage(s, &pv)?;
        }
        self.t = t_next;
        Ok(())
    }
}

/// Stored `alpha` snapshots of a run; the velocity between them comes from
/// linear interpolation of `alpha`, which is the same as interpolating the
/// velocity because the Biot-Savart reconstruction is linear.
pub struct VelocityHistory {
    times: Vec<f64>,
    alphas: Vec<SpectralField>,
    t: f64,
    current: VectorField,
}

impl VelocityHistory {
    pub fn new(snapshots: Vec<(f64, SpectralField)>) -> Result<Self> {
        if snapshots.is_empty() {
            return Err(Error::Inconsistent("a velocity history needs at least one snapshot".into()));
        }
        for w in snapshots.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(Error::Inconsistent("snapshot times must increase".into()));
            }
            w[0].1.ensure_same_grid(&w[1].1)?;
        }
        let (times, alphas): (Vec<_>, Vec<_>) = snapshots.into_iter().unzip();
        let t = times[0];
        let current = velocity_of(&alphas[0])?;
        Ok(VelocityHistory { times, alphas, t, current })
    }

    pub fn end_time(&self) -> f64 {
        *self.times.last().expect("nonempty")
    }

    /// `alpha` at time `t` by linear interpolation; constant beyond a single snapshot.
    pub fn alpha_at(&self, t: f64) -> Result<SpectralField> {
        let (t0, t1) = (self.times[0], self.end_time());
        let slack = 1e-9 * (1.0 + t1.abs());
        if t < t0 - slack || t > t1 + slack {
            return Err(Error::Inconsistent(format!("time {t} outside the stored history [{t0}, {t1}]")));
        }
        if self.times.len() == 1 {
            return Ok(self.alphas[0].clone());
        }
        let k = self.times.partition_point(|&s| s <= t).clamp(1, self.times.len() - 1);
        let (a, b) = (self.times[k - 1], self.times[k]);
        let w = ((t - a) / (b - a)).clamp(0.0, 1.0);
        self.alphas[k - 1].lincomb(1.0 - w, &self.alphas[k], w)
    }

    pub fn velocity_at(&self, t: f64) -> Result<VectorField> {
        velocity_of(&self.alpha_at(t)?)
    }
}

impl VelocitySource for VelocityHistory {
    fn grid(&self) -> Grid {
        *self.alphas[0].grid()
    }

    fn time(&self) -> f64 {
        self.t
    }

    fn velocity(&self) -> &VectorField {
        &self.current
    }

    fn step(
        &mut self,
        dt: f64,
        t_next: f64,
        cfg: &SolverConfig,
        on_stage: &mut dyn FnMut(usize, &PreparedVelocity) -> Result<()>,
    ) -> Result<()> {
        let u0 = PreparedVelocity::new(self.current.clone(), cfg.dealias);
        on_stage(0, &u0)?;
        let mid = PreparedVelocity::new(self.velocity_at(self.t + 0.5 * dt)?, cfg.dealias);
        on_stage(1, &mid)?;
        on_stage(2, &mid)?;
        let end = self.velocity_at(t_next)?;
        on_stage(3, &PreparedVelocity::new(end.clone(), cfg.dealias))?;
        self.current = end;
        self.t = t_next;
        Ok(())
    }

    fn reference_vorticity(&self) -> Result<Option<VectorField>> {
        vorticity_of(&self.alpha_at(self.t)?).map(Some)
    }
}

/// What the observer of a coupled run is told after each step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepInfo {
    pub step: usize,
    pub t: f64,
    pub dt: f64,
    pub cfl: f64,
    /// The step landed on an output time (always true for the initial call).
    pub output: bool,
    /// Diagnostics are due at this step.
    pub record: bool,
}

/// Advances `source` and `members` together to `cfg.t_end`.
///
/// `observe` runs once before the first step and after every step.
pub fn drive<S: VelocitySource>(
    source: &mut S,
    members: &mut [Rk4Member],
    cfg: &SolverConfig,
    mut observe: impl FnMut(&StepInfo, &S, &[Rk4Member]) -> Result<()>,
) -> Result<()> {
    cfg.validate()?;
    let h = source.grid().spacing();
    let stops = cfg.output_times();
    let start = source.time();
    let mut info = StepInfo { step: 0, t: start, dt: 0.0, cfl: 0.0, output: true, record: true };
    observe(&info, source, members)?;
    let mut next = 0;
    while next < stops.len() {
        let t = source.time();
        let stop = stops[next];
        let u_max = source.velocity().max_norm();
        let dt = cfg.step_size(t, stop, u_max, h);
        let cfl = cfg.check_cfl(info.step + 1, t, dt, u_max, h)?;
        let landed = dt == stop - t;
        let t_next = if landed { stop } else { t + dt };
        for m in members.iter_mut() {
            m.begin(dt);
        }
        source.step(dt, t_next, cfg, &mut |s, pv| {
            for m in members.iter_mut() {
                m.stage(s, pv)?;
            }
            Ok(())
        })?;
        if landed {
            next += 1;
        }
        let step = info.step + 1;
        info = StepInfo { step, t: t_next, dt, cfl, output: landed, record: landed || step % cfg.diagnostics_every == 0 };
        observe(&info, source, members)?;
    }
    Ok(())
}

/// Result of an Euler run: diagnostics, `alpha` at the output times and the final state.
#[derive(Debug, Clone)]
pub struct EulerRun {
    pub diagnostics: DiagnosticsSeries,
    pub snapshots: Vec<(f64, SpectralField)>,
    pub final_state: EulerState,
    pub steps: usize,
}

/// Tolerance of the monotonicity flag on `alpha_L31`.
pub const MONOTONE_TOL: f64 = 0.01;

impl EulerRun {
    /// `alpha_L31` never rises more than one percent above its running minimum.
    pub fn alpha_l31_nonincreasing(&self) -> Result<bool> {
        self.diagnostics.nonincreasing("alpha_L31", MONOTONE_TOL)
    }

    pub fn history(&self) -> Result<VelocityHistory> {
        VelocityHistory::new(self.snapshots.clone())
    }
}

/// Single Euler step of length chosen by `cfg` from `state`.
pub fn step_euler(state: &EulerState, cfg: &SolverConfig) -> Result<EulerState> {
    cfg.validate()?;
    let g = *state.alpha.grid();
    let h = g.spacing();
    let u_max = state.u.max_norm();
    let dt = cfg.step_size(state.t, f64::INFINITY, u_max, h);
    let dt = if dt.is_finite() { dt } else { cfg.t_end - state.t };
    cfg.check_cfl(state.step + 1, state.t, dt, u_max, h)?;
    let mut d = EulerDriver::new(state.clone());
    let t_next = state.t + dt;
    d.step(dt, t_next, cfg, &mut |_, _| Ok(()))?;
    Ok(d.state)
}

/// Evolves `initial` to `cfg.t_end`, recording diagnostics and snapshots.
pub fn evolve(initial: EulerState, cfg: &SolverConfig, pu: &PartitionOfUnity) -> Result<EulerRun> {
    let mut snapshots = Vec::new();
    let mut run = evolve_with(initial, cfg, pu, |s| {
        snapshots.push((s.t, s.alpha.clone()));
        Ok(())
    })?;
    run.snapshots = snapshots;
    Ok(run)
}

/// `evolve` handing each output state to `on_output` instead of keeping it,
/// which bounds the memory of long or fine runs.
pub fn evolve_with(
    initial: EulerState,
    cfg: &SolverConfig,
    pu: &PartitionOfUnity,
    mut on_output: impl FnMut(&EulerState) -> Result<()>,
) -> Result<EulerRun> {
    let mut driver = EulerDriver::new(initial);
    let mut diagnostics = DiagnosticsSeries::new();
    drive(&mut driver, &mut [], cfg, |info, d, _| {
        let s = &d.state;
        if info.record {
            diagnostics.push(info.t, &euler_row(&s.alpha, &s.u, info.cfl, cfg.diagnostics, pu)?)?;
        }
        if info.output {
            on_output(s)?;
        }
        Ok(())
    })?;
    let steps = driver.state.step;
    Ok(EulerRun { diagnostics, snapshots: Vec::new(), final_state: driver.state, steps })
}

/// `evolve` from a profile.
pub fn evolve_profile(profile: &AxisymProfile, grid: &Grid, cfg: &SolverConfig, pu: &PartitionOfUnity) -> Result<EulerRun> {
    evolve(EulerState::from_profile(profile, grid)?, cfg, pu)
}
