use super::besov::{besov_norm_vector, BesovParams};
use super::lorentz::{lorentz_norm, LorentzParams};
use crate::axisym::{quotient_by_r, require_axisymmetric_velocity};
use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::partition::PartitionOfUnity;
use crate::vector::VectorField;

/// `||omega/r||_{L^{3,1}} / ||u||_{B^{1+3/p}_{p,1}}` for an axisymmetric
/// velocity without swirl; defined as zero for `u = 0`.
pub fn embedding_ratio(u: &VectorField, p: f64, pu: &PartitionOfUnity) -> Result<f64> {
    check_exponent(p)?;
    if u.max_component() == 0.0 {
        return Ok(0.0);
    }
    require_axisymmetric_velocity(u)?;
    let alpha = quotient_by_r(&u.curl()?)?;
    embedding_ratio_from(&alpha, u, p, pu)
}

/// The same ratio with `alpha = omega/r` supplied, for instance sampled from
/// a closed form where the spectral curl of `u` is not resolved.
pub fn embedding_ratio_from(alpha: &SpectralField, u: &VectorField, p: f64, pu: &PartitionOfUnity) -> Result<f64> {
    check_exponent(p)?;
    if !alpha.grid().same_as(u.grid()) {
        return Err(Error::GridMismatch);
    }
    if u.max_component() == 0.0 {
        return Ok(0.0);
    }
    let num = lorentz_norm(alpha, LorentzParams::new(3.0, 1.0)?);
    let den = besov_norm_vector(u, BesovParams::new(1.0 + 3.0 / p, p, 1.0)?, pu)?;
    Ok(num / den)
}

fn check_exponent(p: f64) -> Result<()> {
    if !(p >= 1.0 && p < 3.0) {
        return Err(Error::InvalidExponent(format!("embedding needs 1 <= p < 3, got {p}")));
    }
    Ok(())
}
