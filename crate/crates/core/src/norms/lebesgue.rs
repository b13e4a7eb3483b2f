use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::vector::VectorField;

pub(crate) fn check_exponent(p: f64, what: &str) -> Result<()> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::InvalidExponent(format!("{what} must lie in [1, inf], got {p}")));
    }
    Ok(())
}

/// `(sum_x |f(x)|^p h^d)^{1/p}`, or the grid maximum for `p = inf`.
pub fn lebesgue_norm(f: &SpectralField, p: f64) -> Result<f64> {
    lebesgue_norm_samples(f.samples(), f.grid().cell_measure(), p)
}

/// Lebesgue norm of the pointwise Euclidean magnitude.
pub fn lebesgue_norm_vector(v: &VectorField, p: f64) -> Result<f64> {
    lebesgue_norm(&v.magnitude(), p)
}

pub fn lebesgue_norm_samples(samples: &[f64], cell: f64, p: f64) -> Result<f64> {
    check_exponent(p, "p")?;
    let max = samples.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    if p.is_infinite() || max == 0.0 {
        return Ok(max);
    }
    // scaled by the maximum so large p cannot overflow
    let sum: f64 = if p == 1.0 {
        samples.iter().map(|v| v.abs() / max).sum()
    } else if p == 2.0 {
        samples.iter().map(|v| (v / max) * (v / max)).sum()
    } else {
        samples.iter().map(|v| (v.abs() / max).powf(p)).sum()
    };
    Ok(max * (sum * cell).powf(1.0 / p))
}
