use crate::error::Result;
use crate::field::{interpolation_weights, SpectralField};
use crate::vector::VectorField;

use super::checks::{require_angular_vorticity, require_axisymmetric_velocity};

/// Gauss-Legendre nodes and weights on `[-1, 1]`, eight points.
const GAUSS_NODES: [f64; 8] = [
    -0.960_289_856_497_536_3,
    -0.796_666_477_413_626_7,
    -0.525_532_409_916_329,
    -0.183_434_642_495_649_8,
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GAUSS_WEIGHTS: [f64; 8] = [
    0.101_228_536_290_376_26,
    0.222_381_034_453_374_47,
    0.313_706_645_877_887_3,
    0.362_683_783_378_362,
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_47,
    0.101_228_536_290_376_26,
];

/// Cells closer to the axis than this many grid spacings use the integral form.
pub const AXIS_BAND: f64 = 2.0;

/// Quotient `c = a / x1 = b / x2` of two fields that vanish on the planes
/// `x1 = 0` and `x2 = 0` respectively.
///
/// Away from the axis the quotient is a division by the larger coordinate.
/// Within `AXIS_BAND` cells of the axis it is evaluated as
/// `int_0^1 d_1 a(tau x1, x2, z) dtau` (or the `x2` analogue), with the
/// derivative sampled by trigonometric interpolation at Gauss nodes in `tau`.
pub fn radial_quotient(a: &SpectralField, b: &SpectralField) -> Result<SpectralField> {
    a.ensure_same_grid(b)?;
    let g = *a.grid();
    let n = g.n();
    let h = g.spacing();
    let (sa, sb) = (a.samples(), b.samples());
    let mut out = vec![0.0; sa.len()];
    let mut near = Vec::new();
    for i0 in 0..n {
        let x1 = g.coordinate(i0);
        for i1 in 0..n {
            let x2 = g.coordinate(i1);
            let r = x1.hypot(x2);
            if r < AXIS_BAND * h {
                near.push((i0, i1));
                continue;
            }
            let base = (i0 * n + i1) * n;
            for i2 in 0..n {
                out[base + i2] = if x1.abs() >= x2.abs() { sa[base + i2] / x1 } else { sb[base + i2] / x2 };
            }
        }
    }
    if !near.is_empty() {
        let da = a.derivative(0);
        let db = b.derivative(1);
        let (sda, sdb) = (da.samples(), db.samples());
        for (i0, i1) in near {
            let x1 = g.coordinate(i0);
            let x2 = g.coordinate(i1);
            let along_first = x1.abs() >= x2.abs();
            let x = if along_first { x1 } else { x2 };
            let mut w = vec![0.0; n];
            for (node, weight) in GAUSS_NODES.iter().zip(GAUSS_WEIGHTS) {
                let tau = 0.5 * (1.0 + node);
                for (acc, wi) in w.iter_mut().zip(interpolation_weights(&g, tau * x)) {
                    *acc += 0.5 * weight * wi;
                }
            }
            let base = (i0 * n + i1) * n;
            for i2 in 0..n {
                out[base + i2] = if along_first {
                    (0..n).map(|j| w[j] * sda[(j * n + i1) * n + i2]).sum()
                } else {
                    (0..n).map(|j| w[j] * sdb[(i0 * n + j) * n + i2]).sum()
                };
            }
        }
    }
    SpectralField::from_samples(g, out)
}

/// `alpha = omega_theta / r` for a purely angular vorticity.
pub fn quotient_by_r(omega: &VectorField) -> Result<SpectralField> {
    require_angular_vorticity(omega)?;
    radial_quotient(omega.component(1), &omega.component(0).scale(-1.0))
}

/// `u_r / r` for an axisymmetric velocity without swirl.
pub fn ur_over_r(u: &VectorField) -> Result<SpectralField> {
    require_axisymmetric_velocity(u)?;
    radial_quotient(u.component(0), u.component(1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_rule_integrates_degree_fifteen() {
        let exact = 1.0 / 16.0;
        let approx: f64 = GAUSS_NODES
            .iter()
            .zip(GAUSS_WEIGHTS)
            .map(|(x, w)| 0.5 * w * (0.5 * (1.0 + x)).powi(15))
            .sum();
        assert!((approx - exact).abs() < 1e-15);
        assert!((GAUSS_WEIGHTS.iter().sum::<f64>() - 2.0).abs() < 1e-15);
    }
}
