//! Axisymmetric Euler evolution, the linear vorticity model, transport and
//! the dyadic tilde family.

pub mod config;
pub mod diagnostics;
pub mod euler;
pub mod model;
pub mod rhs;

pub use config::{DiagnosticsLevel, Integrator, SolverConfig, TimeStep};
pub use diagnostics::{euler_row, DiagnosticsSeries, BASIC_CHANNELS, FULL_CHANNELS};
pub use euler::{
    drive, evolve, evolve_profile, evolve_with, step_euler, velocity_of, vorticity_of, EulerDriver, EulerRun, EulerState,
    FrozenVelocity, StepInfo, VelocityHistory, VelocitySource,
};
pub use model::{
    block_decay_report, block_growth_fit, evolve_scalar, evolve_tilde_family, evolve_tilde_family_observed, evolve_tilde_family_with,
    evolve_vorticity_model, initial_quotient_audit, stretching_defect, transport_estimate_audit, transport_exponent,
    BlockDecayReport, DecayRow, FamilyRun, GrowthFit, InteractionMatrix, ModelRun, TildeFamily, TransportAudit,
    TransportExponent,
};
pub use rhs::{Equation, PreparedVelocity, Rk4Member};
