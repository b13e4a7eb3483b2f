//! Axisymmetric flows without swirl: construction, structural checks,
//! Biot-Savart inversion and quotients by the distance to the axis.

mod checks;
mod profile;
mod quotient;

pub use checks::{
    check_axisymmetry, plane_value, require_angular_vorticity, require_axisymmetric_velocity, structure,
    AxisymmetryReport, BlockStructure, FieldKind, StructureReport, STRUCTURE_TOL,
};
pub use profile::{AxisymProfile, Potential, ENVELOPE_FLOOR};
pub use quotient::{quotient_by_r, radial_quotient, ur_over_r, AXIS_BAND};

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::grid::Grid;
use crate::vector::{VectorField, DIVERGENCE_TOL};

/// Samples the Cartesian velocity of `profile`.
///
/// The returned field claims zero divergence whenever the spectral divergence
/// of the samples passes the usual tolerance.
pub fn realize(profile: &AxisymProfile, grid: &Grid) -> Result<VectorField> {
    profile.check_support(grid)?;
    let f = profile.velocity_fn();
    let v = VectorField::from_fn(*grid, f);
    let ok = v.relative_divergence() <= DIVERGENCE_TOL;
    VectorField::new(v.into_components(), ok)
}

/// Samples `alpha = omega_theta / r` of `profile` from its closed form.
pub fn realize_alpha(profile: &AxisymProfile, grid: &Grid) -> Result<SpectralField> {
    profile.check_support(grid)?;
    Ok(SpectralField::from_fn(*grid, profile.alpha_fn()))
}

/// `omega = r alpha e_theta = alpha (-x2, x1, 0)`.
pub fn angular_field(alpha: &SpectralField) -> Result<VectorField> {
    let g = *alpha.grid();
    if g.dim() != 3 {
        return Err(Error::InvalidGrid("angular fields need a three-dimensional grid".into()));
    }
    let w1 = alpha.map_with_position(|x, a| -x[1] * a);
    let w2 = alpha.map_with_position(|x, a| x[0] * a);
    VectorField::from_components([w1, w2, SpectralField::zeros(g)])
}

/// Velocity with curl `omega`: the mean-free, divergence-free solution of
/// `curl u = omega`, `u_hat = i xi x omega_hat / |xi|^2`.
pub fn biot_savart(omega: &VectorField) -> Result<VectorField> {
    let scale = omega.max_norm();
    if scale == 0.0 {
        return Ok(VectorField::zeros(*omega.grid()));
    }
    let violation = omega.relative_divergence();
    if violation > DIVERGENCE_TOL {
        return Err(Error::NotDivergenceFree { violation });
    }
    let mean = omega.mean();
    let m = mean.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    if m > DIVERGENCE_TOL * scale {
        return Err(Error::Inconsistent(format!("vorticity must have zero mean, largest component mean {m:e}")));
    }
    omega.inverse_curl()
}
