use super::besov::{besov_norm, BesovParams};
use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::partition::PartitionOfUnity;

/// Smallest dilation factor still resolved on `n` samples per axis.
pub fn min_dilation(n: usize) -> f64 {
    2.0 / n as f64
}

/// `f_lambda(x1, x2, x3) = f(lambda x1, x2, x3)`, evaluated by trigonometric
/// interpolation of `f` along the first axis at the contracted positions.
pub fn anisotropic_dilate(f: &SpectralField, lambda: f64) -> Result<SpectralField> {
    let min = min_dilation(f.grid().n());
    if !(lambda <= 1.0 && lambda >= min) {
        return Err(Error::InvalidDilation { lambda, min });
    }
    if lambda == 1.0 {
        return Ok(f.clone());
    }
    let g = f.grid();
    let positions: Vec<f64> = (0..g.n()).map(|i| lambda * g.coordinate(i)).collect();
    Ok(f.resample_axis(0, &positions))
}

/// `||f_lambda||_{B^0_{inf,1}} / ((1 - ln lambda) ||f||_{B^0_{inf,1}})`.
pub fn dilation_ratio(f: &SpectralField, lambda: f64, pu: &PartitionOfUnity) -> Result<f64> {
    let bp = BesovParams::new(0.0, f64::INFINITY, 1.0)?;
    let base = besov_norm(f, bp, pu)?;
    if base == 0.0 {
        return Err(Error::Inconsistent("dilation ratio of the zero field is undefined".into()));
    }
    let fl = anisotropic_dilate(f, lambda)?;
    Ok(besov_norm(&fl, bp, pu)? / ((1.0 - lambda.ln()) * base))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use std::f64::consts::PI;

    fn bump(g: Grid) -> SpectralField {
        SpectralField::from_fn(g, |x| (-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) / 0.3).exp())
    }

    #[test]
    fn identity_and_range() {
        let g = Grid::cube(32, 2.0 * PI).unwrap();
        let pu = PartitionOfUnity::classical();
        let f = bump(g);
        assert!((dilation_ratio(&f, 1.0, &pu).unwrap() - 1.0).abs() < 1e-14);
        assert!(anisotropic_dilate(&f, 1.5).is_err());
        assert!(anisotropic_dilate(&f, 0.01).is_err());
        assert!(anisotropic_dilate(&f, 0.0).is_err());
    }

    #[test]
    fn stretched_samples_match_closed_form() {
        let g = Grid::cube(32, 2.0 * PI).unwrap();
        let f = bump(g);
        for lambda in [0.5, 0.25, 0.125] {
            let fl = anisotropic_dilate(&f, lambda).unwrap();
            // the sup is dilation invariant; on the grid it suffices that the
            // stretched samples match the closed form
            assert!(fl.max_abs() <= 1.0 + 1e-6);
            let want = SpectralField::from_fn(g, |x| {
                (-(lambda * lambda * x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) / 0.3).exp()
            });
            assert!(fl.sub(&want).unwrap().max_abs() < 1e-6);
        }
    }
}
