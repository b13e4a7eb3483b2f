//! Observed constants in Bernstein's inequalities for single blocks.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::lp::delta_q;
use crate::norms::lebesgue_norm;
use crate::partition::PartitionOfUnity;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BernsteinRatios {
    /// `sup_{|a|=k} ||d^a Delta_q f||_{L^a} / (2^{qk} ||Delta_q f||_{L^a})`
    pub derivative: f64,
    /// `sup_{|a|=k} ||d^a Delta_q f||_{L^b} / (2^{q(k + d(1/a - 1/b))} ||Delta_q f||_{L^a})`
    pub mixed: f64,
}

/// Multi-indices of order `k` in `dim` variables.
pub fn multi_indices(dim: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(dim: usize, k: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == dim - 1 {
            prefix.push(k);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for i in 0..=k {
            prefix.push(i);
            rec(dim, k - i, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(dim, k, &mut Vec::new(), &mut out);
    out
}

/// Measures both Bernstein ratios of block `q` of `f`.
pub fn bernstein_ratio(
    f: &SpectralField,
    q: i32,
    k: usize,
    a: f64,
    b: f64,
    pu: &PartitionOfUnity,
) -> Result<BernsteinRatios> {
    if !(a >= 1.0 && b >= a) {
        return Err(Error::InvalidExponent(format!("need 1 <= a <= b, got a = {a}, b = {b}")));
    }
    let block = delta_q(f, q, pu)?;
    let base = lebesgue_norm(&block, a)?;
    if base == 0.0 || block.max_abs() <= 1e-14 * f.max_abs() {
        return Err(Error::ZeroBlock { q });
    }
    let dim = f.grid().dim();
    let (mut sup_a, mut sup_b) = (0.0f64, 0.0f64);
    for alpha in multi_indices(dim, k) {
        let mut d = block.clone();
        for (axis, &order) in alpha.iter().enumerate() {
            for _ in 0..order {
                d = d.derivative(axis);
            }
        }
        sup_a = sup_a.max(lebesgue_norm(&d, a)?);
        sup_b = sup_b.max(lebesgue_norm(&d, b)?);
    }
    let scale = 2f64.powi(q);
    let gap = dim as f64 * (1.0 / a - 1.0 / b);
    Ok(BernsteinRatios {
        derivative: sup_a / (scale.powi(k as i32) * base),
        mixed: sup_b / (scale.powf(k as f64 + gap) * base),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use std::f64::consts::PI;

    #[test]
    fn multi_index_counts() {
        assert_eq!(multi_indices(3, 1).len(), 3);
        assert_eq!(multi_indices(3, 2).len(), 6);
        assert_eq!(multi_indices(2, 3).len(), 4);
        assert_eq!(multi_indices(3, 0), vec![vec![0, 0, 0]]);
    }

    #[test]
    fn single_mode_derivative_ratio() {
        let g = Grid::cube(32, 2.0 * PI).unwrap();
        let pu = PartitionOfUnity::classical();
        // the phase puts samples on the extrema so the grid sup is exact
        let h = g.spacing();
        let f = SpectralField::from_fn(g, |x| (6.0 * (x[2] - 0.5 * h)).cos());
        let r = bernstein_ratio(&f, 2, 1, f64::INFINITY, f64::INFINITY, &pu).unwrap();
        assert!((r.derivative - 6.0 / 4.0).abs() < 1e-12, "{r:?}");
        assert!((r.mixed - r.derivative).abs() < 1e-15);
        let r0 = bernstein_ratio(&f, 2, 0, 2.0, 2.0, &pu).unwrap();
        assert!((r0.derivative - 1.0).abs() < 1e-14);
        assert!(matches!(bernstein_ratio(&f, 0, 1, 2.0, 2.0, &pu), Err(Error::ZeroBlock { q: 0 })));
    }
}
