use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Time integrator; only classical fourth-order Runge-Kutta is offered.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Integrator {
    #[default]
    Rk4,
}

/// A fixed step, or a step recomputed each time to reach a target CFL number.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TimeStep {
    Fixed(f64),
    Cfl { cfl: f64 },
}

/// How much is recorded at each diagnostics time.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiagnosticsLevel {
    /// Lebesgue and Lorentz norms, energy and sup norms.
    #[default]
    Basic,
    /// Adds the Besov channels, which cost a full dyadic decomposition each.
    Full,
}

fn default_true() -> bool {
    true
}

fn default_cfl_max() -> f64 {
    0.5
}

fn default_every() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub dt: TimeStep,
    pub t_end: f64,
    #[serde(default = "default_true")]
    pub dealias: bool,
    #[serde(default)]
    pub integrator: Integrator,
    #[serde(default = "default_cfl_max")]
    pub cfl_max: f64,
    #[serde(default)]
    pub diagnostics: DiagnosticsLevel,
    /// Diagnostics are recorded every this many steps, and always at output times.
    #[serde(default = "default_every")]
    pub diagnostics_every: usize,
    /// Steps are shortened to land on multiples of this interval, where
    /// snapshots are kept.
    #[serde(default)]
    pub output_interval: Option<f64>,
}

/// Relative slack when comparing an observed CFL number with its bound, so a
/// step sized to the bound is not rejected for rounding.
const CFL_SLACK: f64 = 1e-12;

impl SolverConfig {
    /// CFL-driven steps at the given target, otherwise defaults.
    pub fn cfl(target: f64, t_end: f64) -> Self {
        SolverConfig {
            dt: TimeStep::Cfl { cfl: target },
            t_end,
            dealias: true,
            integrator: Integrator::Rk4,
            cfl_max: default_cfl_max().max(target),
            diagnostics: DiagnosticsLevel::Basic,
            diagnostics_every: 1,
            output_interval: None,
        }
    }

    pub fn fixed(dt: f64, t_end: f64) -> Self {
        SolverConfig { dt: TimeStep::Fixed(dt), ..Self::cfl(0.5, t_end) }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        match self.dt {
            TimeStep::Fixed(dt) if !(dt.is_finite() && dt > 0.0) => return bad(format!("dt must be positive, got {dt}")),
            TimeStep::Cfl { cfl } if !(cfl.is_finite() && cfl > 0.0) => {
                return bad(format!("target CFL must be positive, got {cfl}"))
            }
            TimeStep::Cfl { cfl } if cfl > self.cfl_max => {
                return bad(format!("target CFL {cfl} exceeds cfl_max {}", self.cfl_max))
            }
            _ => {}
        }
        if !(self.t_end.is_finite() && self.t_end >= 0.0) {
            return bad(format!("t_end must be finite and nonnegative, got {}", self.t_end));
        }
        if !(self.cfl_max.is_finite() && self.cfl_max > 0.0) {
            return bad(format!("cfl_max must be positive, got {}", self.cfl_max));
        }
        if self.diagnostics_every == 0 {
            return bad("diagnostics_every must be at least one".into());
        }
        if let Some(i) = self.output_interval {
            if !(i.is_finite() && i > 0.0) {
                return bad(format!("output_interval must be positive, got {i}"));
            }
        }
        Ok(())
    }

    /// Output times in `(0, t_end]`, always including `t_end`.
    pub fn output_times(&self) -> Vec<f64> {
        let mut out = Vec::new();
        if let Some(i) = self.output_interval {
            let mut k = 1;
            loop {
                let t = k as f64 * i;
                if t >= self.t_end * (1.0 - 1e-12) {
                    break;
                }
                out.push(t);
                k += 1;
            }
        }
        if self.t_end > 0.0 {
            out.push(self.t_end);
        }
        out
    }

    /// Step from `t` given the current sup of the velocity, shortened to land on `stop`.
    pub fn step_size(&self, t: f64, stop: f64, u_max: f64, spacing: f64) -> f64 {
        let remaining = stop - t;
        let base = match self.dt {
            TimeStep::Fixed(dt) => dt,
            TimeStep::Cfl { cfl } if u_max > 0.0 => cfl * spacing / u_max,
            TimeStep::Cfl { .. } => remaining,
        };
        // avoid a sliver step just before the stop
        if base >= remaining * (1.0 - 1e-9) {
            remaining
        } else {
            base
        }
    }

    /// Rejects a step whose CFL number exceeds the bound.
    pub fn check_cfl(&self, step: usize, t: f64, dt: f64, u_max: f64, spacing: f64) -> Result<f64> {
        let cfl = dt * u_max / spacing;
        if cfl > self.cfl_max * (1.0 + CFL_SLACK) {
            return Err(Error::CflViolation { step, t, cfl, max: self.cfl_max });
        }
        Ok(cfl)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn serde_forms_of_the_step() {
        let c: SolverConfig = serde_json::from_str(r#"{"dt": 0.01, "t_end": 1.0}"#).unwrap();
        assert_eq!(c.dt, TimeStep::Fixed(0.01));
        assert!(c.dealias && c.cfl_max == 0.5);
        let c: SolverConfig = serde_json::from_str(r#"{"dt": {"cfl": 0.4}, "t_end": 1.0}"#).unwrap();
        assert_eq!(c.dt, TimeStep::Cfl { cfl: 0.4 });
        let back: SolverConfig = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
        assert!(SolverConfig::fixed(-1.0, 1.0).validate().is_err());
        assert!(SolverConfig { dt: TimeStep::Cfl { cfl: 0.9 }, ..SolverConfig::cfl(0.5, 1.0) }.validate().is_err());
    }

    #[test]
    fn steps_land_on_outputs() {
        let c = SolverConfig { output_interval: Some(0.25), ..SolverConfig::fixed(0.1, 1.0) };
        assert_eq!(c.output_times(), vec![0.25, 0.5, 0.75, 1.0]);
        assert!((c.step_size(0.2, 0.25, 1.0, 1.0) - 0.05).abs() < 1e-15);
        assert_eq!(c.step_size(0.0, 0.25, 1.0, 1.0), 0.1);
        assert!(c.check_cfl(3, 0.0, 0.6, 1.0, 1.0).is_err());
        assert!(SolverConfig::cfl(0.5, 1.0).check_cfl(0, 0.0, 0.5, 1.0, 1.0).is_ok());
    }
}
