//! Littlewood-Paley blocks and dyadic decompositions.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::grid::Grid;
use crate::partition::PartitionOfUnity;

/// Admissible inhomogeneous block indices on `grid`.
pub fn block_window(grid: &Grid) -> (i32, i32) {
    (-1, grid.q_max())
}

/// Admissible homogeneous block indices on `grid`: the lowest block is the
/// first whose annulus reaches below the smallest nonzero frequency.
pub fn homogeneous_window(grid: &Grid, pu: &PartitionOfUnity) -> (i32, i32) {
    (pu.homogeneous_floor(grid.min_frequency()), grid.q_max())
}

fn check_block(grid: &Grid, q: i32) -> Result<()> {
    let (lo, hi) = block_window(grid);
    if q < lo || q > hi {
        return Err(Error::BlockOutOfRange { q, lo, hi });
    }
    Ok(())
}

/// `Delta_q f`, with `q = -1` the low-pass `chi(D) f`.
pub fn delta_q(f: &SpectralField, q: i32, pu: &PartitionOfUnity) -> Result<SpectralField> {
    check_block(f.grid(), q)?;
    Ok(block(f, q, pu))
}

/// Block operator without the window check, for sums that must cover every
/// representable frequency.
pub fn block(f: &SpectralField, q: i32, pu: &PartitionOfUnity) -> SpectralField {
    f.radial_multiplier(|rho| pu.block_symbol(q, rho))
}

/// Homogeneous block `phi(2^{-q} D) f`.
pub fn delta_dot_q(f: &SpectralField, q: i32, pu: &PartitionOfUnity) -> Result<SpectralField> {
    let (lo, hi) = homogeneous_window(f.grid(), pu);
    if q < lo || q > hi {
        return Err(Error::BlockOutOfRange { q, lo, hi });
    }
    Ok(f.radial_multiplier(|rho| pu.homogeneous_symbol(q, rho)))
}

/// `S_q f = sum_{j <= q-1} Delta_j f`, the multiplier `chi(2^{-q} D)`.
///
/// `q = q_max + 1` is accepted so the full inhomogeneous sum is available.
pub fn s_q(f: &SpectralField, q: i32, pu: &PartitionOfUnity) -> Result<SpectralField> {
    let hi = f.grid().q_max() + 1;
    if q < 0 || q > hi {
        return Err(Error::BlockOutOfRange { q, lo: 0, hi });
    }
    Ok(low_pass(f, q, pu))
}

/// `S_q` without range checks; `q <= -1` gives zero.
pub fn low_pass(f: &SpectralField, q: i32, pu: &PartitionOfUnity) -> SpectralField {
    if q < 0 {
        return f.scale(0.0);
    }
    f.radial_multiplier(|rho| pu.low_pass_symbol(q, rho))
}

/// Widened block `Delta_{q-1} + Delta_q + Delta_{q+1}`.
pub fn delta_tilde(f: &SpectralField, q: i32, pu: &PartitionOfUnity) -> SpectralField {
    f.radial_multiplier(|rho| {
        (q - 1..=q + 1).filter(|j| *j >= -1).map(|j| pu.block_symbol(j, rho)).sum()
    })
}

/// The indexed family of blocks of one field.
#[derive(Debug, Clone)]
pub struct DyadicDecomposition {
    pub blocks: BTreeMap<i32, SpectralField>,
    pub q_min: i32,
    pub q_max: i32,
    pub homogeneous: bool,
    /// `||f - sum_q blocks[q]||_inf / ||f||_inf` (zero for the zero field).
    pub reconstruction_residual: f64,
    /// Frequencies up to this magnitude are reconstructed exactly.
    pub band_limit: f64,
    /// Homogeneous only: frequencies below this are outside every block.
    pub low_frequency_cutoff: f64,
}

impl DyadicDecomposition {
    pub fn reconstruct(&self) -> SpectralField {
        let grid = *self.blocks.values().next().expect("decomposition has blocks").grid();
        SpectralField::sum(grid, self.blocks.values()).expect("blocks share one grid")
    }

    pub fn block(&self, q: i32) -> Option<&SpectralField> {
        self.blocks.get(&q)
    }

    /// Indices of blocks that are not identically zero up to `tol * ||f||_inf`.
    pub fn nonzero_blocks(&self, scale: f64, tol: f64) -> Vec<i32> {
        self.blocks.iter().filter(|(_, b)| b.max_abs() > tol * scale).map(|(q, _)| *q).collect()
    }
}

/// All blocks of `f` on the grid's window.
///
/// The homogeneous variant is only meaningful modulo constants on the torus,
/// so it requires a field of zero mean.
pub fn decompose(f: &SpectralField, pu: &PartitionOfUnity, homogeneous: bool) -> Result<DyadicDecomposition> {
    let grid = *f.grid();
    let scale = f.max_abs();
    let (q_min, q_max) = if homogeneous {
        let mean = f.mean();
        if mean.abs() > 1e-12 * scale.max(f64::MIN_POSITIVE) && mean != 0.0 {
            return Err(Error::NonzeroMean { mean });
        }
        homogeneous_window(&grid, pu)
    } else {
        block_window(&grid)
    };
    let mut blocks = BTreeMap::new();
    for q in q_min..=q_max {
        let b = if homogeneous {
            f.radial_multiplier(|rho| pu.homogeneous_symbol(q, rho))
        } else {
            block(f, q, pu)
        };
        blocks.insert(q, b);
    }
    let recon = SpectralField::sum(grid, blocks.values())?;
    let residual = if scale > 0.0 { recon.sub(f)?.max_abs() / scale } else { recon.max_abs() };
    Ok(DyadicDecomposition {
        blocks,
        q_min,
        q_max,
        homogeneous,
        reconstruction_residual: residual,
        band_limit: pu.band_limit(q_max),
        low_frequency_cutoff: if homogeneous { pu.homogeneous_band(q_min, q_max).0 } else { 0.0 },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid() -> Grid {
        Grid::cube(32, 2.0 * PI).unwrap()
    }

    #[test]
    fn single_mode_is_scaled_by_symbol() {
        let pu = PartitionOfUnity::classical();
        let g = grid();
        // A single mode is scaled by the block symbol at its radius.
        let rho = 5.0f64;
        let f = SpectralField::from_fn(g, |x| (3.0 * x[0] + 4.0 * x[1]).cos());
        for q in -1..=g.q_max() {
            let b = delta_q(&f, q, &pu).unwrap();
            let expect = pu.block_symbol(q, rho);
            assert!(b.sub(&f.scale(expect)).unwrap().max_abs() < 1e-12, "q={q}");
        }
        // 6/4 lies on the plateau of phi.
        let f = SpectralField::from_fn(g, |x| (6.0 * x[2]).sin());
        let b = delta_q(&f, 2, &pu).unwrap();
        assert!(b.sub(&f).unwrap().max_abs() < 1e-13);
    }

    #[test]
    fn constant_lives_in_low_block() {
        let pu = PartitionOfUnity::classical();
        let f = SpectralField::constant(grid(), 2.5);
        assert!(delta_q(&f, -1, &pu).unwrap().sub(&f).unwrap().max_abs() < 1e-14);
        for q in 0..=3 {
            assert!(delta_q(&f, q, &pu).unwrap().max_abs() < 1e-14);
        }
        assert!(s_q(&f, 0, &pu).unwrap().sub(&f).unwrap().max_abs() < 1e-14);
    }

    #[test]
    fn out_of_window_is_rejected() {
        let pu = PartitionOfUnity::classical();
        let f = SpectralField::constant(grid(), 1.0);
        match delta_q(&f, 4, &pu) {
            Err(Error::BlockOutOfRange { lo: -1, hi: 3, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        assert!(s_q(&f, -1, &pu).is_err());
    }

    #[test]
    fn homogeneous_needs_zero_mean() {
        let pu = PartitionOfUnity::classical();
        let f = SpectralField::from_fn(grid(), |x| 1.0 + x[0].cos());
        assert!(matches!(decompose(&f, &pu, true), Err(Error::NonzeroMean { .. })));
        let g = SpectralField::from_fn(grid(), |x| x[0].cos() + (5.0 * x[1]).sin());
        let d = decompose(&g, &pu, true).unwrap();
        assert!(d.reconstruction_residual < 1e-12);
        assert!(d.q_min < 0);
    }

    #[test]
    fn telescoping() {
        let pu = PartitionOfUnity::classical();
        let f = SpectralField::from_fn(grid(), |x| (x[0] + 2.0 * x[1]).sin() + (7.0 * x[2]).cos());
        let q = 2;
        let mut acc = s_q(&f, q, &pu).unwrap();
        for j in q..=grid().q_max() {
            acc = acc.add(&delta_q(&f, j, &pu).unwrap()).unwrap();
        }
        assert!(acc.sub(&f).unwrap().max_abs() < 1e-12);
    }
}
