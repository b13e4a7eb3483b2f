//! Seeded random test fields with a prescribed frequency cutoff.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::field::SpectralField;
use crate::grid::Grid;
use crate::vector::VectorField;

/// Random real field whose coefficients vanish for `|xi| > rho_max` and,
/// unless `with_mean`, at `xi = 0`. The largest sample is normalized to one.
pub fn band_limited(grid: &Grid, seed: u64, rho_max: f64, with_mean: bool) -> SpectralField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lat = grid.lattice();
    let mut c = vec![Complex64::new(0.0, 0.0); grid.spectral_len()];
    for (flat, z) in c.iter_mut().enumerate() {
        let idx = lat.split(flat);
        let rho = lat.rho(idx);
        let re: f64 = rng.gen_range(-1.0..1.0);
        let im: f64 = rng.gen_range(-1.0..1.0);
        if rho <= rho_max && (with_mean || rho > 0.0) {
            *z = Complex64::new(re, im);
        }
    }
    // Going through the samples discards the parts the real inverse cannot
    // represent, so both representations agree afterwards.
    let f = SpectralField::from_coefficients(*grid, c).expect("lattice size");
    let samples = f.samples().to_vec();
    let f = SpectralField::from_samples(*grid, samples).expect("grid size");
    let m = f.max_abs();
    if m > 0.0 {
        f.scale(1.0 / m)
    } else {
        f
    }
}

/// Random divergence-free, mean-free velocity below `rho_max`, normalized to unit sup.
pub fn solenoidal(grid: &Grid, seed: u64, rho_max: f64) -> VectorField {
    let comps = [0u64, 1, 2].map(|i| band_limited(grid, seed.wrapping_mul(3).wrapping_add(i), rho_max, false));
    let a = VectorField::from_components(comps).expect("shared grid");
    let u = a.leray_project().expect("three-dimensional grid");
    let m = u.max_norm();
    if m > 0.0 {
        u.scale(1.0 / m)
    } else {
        u
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn deterministic_and_band_limited() {
        let g = Grid::cube(16, 2.0 * PI).unwrap();
        let a = band_limited(&g, 3, 4.0, false);
        let b = band_limited(&g, 3, 4.0, false);
        assert_eq!(a.samples(), b.samples());
        assert!(a.mean().abs() < 1e-15);
        let lat = g.lattice();
        for (flat, z) in a.coefficients().iter().enumerate() {
            if lat.rho(lat.split(flat)) > 4.0 {
                assert!(z.norm() < 1e-15);
            }
        }
        let u = solenoidal(&g, 5, 4.0);
        assert!(u.relative_divergence() < 1e-13);
    }
}
