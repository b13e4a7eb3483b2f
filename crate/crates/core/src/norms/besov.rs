use serde::{Deserialize, Serialize};

use super::lebesgue::{check_exponent, lebesgue_norm, lebesgue_norm_vector};
use crate::error::Result;
use crate::field::SpectralField;
use crate::lp::{block, block_window};
use crate::partition::PartitionOfUnity;
use crate::vector::VectorField;

/// Regularity `s`, integrability `p` and summation exponent `r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BesovParams {
    pub s: f64,
    pub p: f64,
    pub r: f64,
}

impl BesovParams {
    pub fn new(s: f64, p: f64, r: f64) -> Result<Self> {
        check_exponent(p, "Besov p")?;
        check_exponent(r, "Besov r")?;
        if !s.is_finite() {
            return Err(crate::Error::InvalidExponent(format!("regularity must be finite, got {s}")));
        }
        Ok(BesovParams { s, p, r })
    }

    pub fn validate(&self) -> Result<()> {
        Self::new(self.s, self.p, self.r).map(|_| ())
    }
}

/// `l^r` sum of a sequence, `r = inf` giving the maximum.
pub fn sequence_norm(values: &[f64], r: f64) -> f64 {
    if r.is_infinite() {
        return values.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    }
    let max = values.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    if max == 0.0 {
        return 0.0;
    }
    max * values.iter().map(|v| (v.abs() / max).powf(r)).sum::<f64>().powf(1.0 / r)
}

/// Weighted block norms `2^{qs} ||Delta_q f||_{L^p}` for `q = -1..=q_max`.
pub fn besov_sequence(f: &SpectralField, bp: BesovParams, pu: &PartitionOfUnity) -> Result<Vec<(i32, f64)>> {
    bp.validate()?;
    let (lo, hi) = block_window(f.grid());
    (lo..=hi)
        .map(|q| Ok((q, 2f64.powf(q as f64 * bp.s) * lebesgue_norm(&block(f, q, pu), bp.p)?)))
        .collect()
}

/// `||f||_{B^s_{p,r}}` over the grid's block window.
pub fn besov_norm(f: &SpectralField, bp: BesovParams, pu: &PartitionOfUnity) -> Result<f64> {
    let seq: Vec<f64> = besov_sequence(f, bp, pu)?.into_iter().map(|(_, v)| v).collect();
    Ok(sequence_norm(&seq, bp.r))
}

/// Block norms of a vector field, each measured on the Euclidean magnitude.
pub fn besov_sequence_vector(v: &VectorField, bp: BesovParams, pu: &PartitionOfUnity) -> Result<Vec<(i32, f64)>> {
    bp.validate()?;
    let (lo, hi) = block_window(v.grid());
    (lo..=hi)
        .map(|q| {
            let b = v.map_components(|c| block(c, q, pu));
            Ok((q, 2f64.powf(q as f64 * bp.s) * lebesgue_norm_vector(&b, bp.p)?))
        })
        .collect()
}

pub fn besov_norm_vector(v: &VectorField, bp: BesovParams, pu: &PartitionOfUnity) -> Result<f64> {
    let seq: Vec<f64> = besov_sequence_vector(v, bp, pu)?.into_iter().map(|(_, x)| x).collect();
    Ok(sequence_norm(&seq, bp.r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use std::f64::consts::PI;

    #[test]
    fn constant_field() {
        let g = Grid::cube(16, 2.0).unwrap();
        let pu = PartitionOfUnity::classical();
        let f = SpectralField::constant(g, -3.0);
        let bp = BesovParams::new(0.0, 2.0, 1.0).unwrap();
        let n = besov_norm(&f, bp, &pu).unwrap();
        assert!((n - 3.0 * 8f64.sqrt()).abs() < 1e-12);
        // only the low block survives, carrying the weight 2^{-s}
        let bp = BesovParams::new(1.0, f64::INFINITY, 1.0).unwrap();
        assert!((besov_norm(&f, bp, &pu).unwrap() - 1.5).abs() < 1e-12);
    }

    #[test]
    fn sup_sum_dominates_sup_max() {
        let g = Grid::cube(32, 2.0 * PI).unwrap();
        let pu = PartitionOfUnity::classical();
        let f = SpectralField::from_fn(g, |x| (x[0] + x[1]).sin() + 0.3 * (5.0 * x[2]).cos());
        let one = besov_norm(&f, BesovParams::new(0.0, f64::INFINITY, 1.0).unwrap(), &pu).unwrap();
        let inf = besov_norm(&f, BesovParams::new(0.0, f64::INFINITY, f64::INFINITY).unwrap(), &pu).unwrap();
        assert!(inf <= one);
    }
}
