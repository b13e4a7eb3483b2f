//! Uniform periodic grids and their frequency lattices.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Smallest admissible number of samples per axis.
pub const MIN_POINTS: usize = 16;

/// A uniform grid on the periodic cube `[-L/2, L/2)^dim`.
///
/// Samples sit at cell centres, `x_i = (i + 1/2) h - L/2`, so no sample lies
/// on a coordinate plane through the origin and, in particular, none lies on
/// the symmetry axis `x_1 = x_2 = 0`. Two-dimensional grids are stored with a
/// unit leading axis so that every kernel can treat data as a 3-index array.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridSpec", into = "GridSpec")]
pub struct Grid {
    n: usize,
    box_length: f64,
    dim: usize,
}

/// Serialized form of [`Grid`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub n_points_per_axis: usize,
    pub box_length: f64,
    #[serde(default = "default_dim")]
    pub dim: usize,
}

fn default_dim() -> usize {
    3
}

impl TryFrom<GridSpec> for Grid {
    type Error = Error;
    fn try_from(spec: GridSpec) -> Result<Self> {
        Grid::new(spec.n_points_per_axis, spec.box_length, spec.dim)
    }
}

impl From<Grid> for GridSpec {
    fn from(g: Grid) -> Self {
        GridSpec { n_points_per_axis: g.n, box_length: g.box_length, dim: g.dim }
    }
}

impl Grid {
    pub fn new(n: usize, box_length: f64, dim: usize) -> Result<Self> {
        if !n.is_power_of_two() || n < MIN_POINTS {
            return Err(Error::InvalidGrid(format!(
                "n_points_per_axis must be a power of two >= {MIN_POINTS}, got {n}"
            )));
        }
        if !(box_length.is_finite() && box_length > 0.0) {
            return Err(Error::InvalidGrid(format!("box_length must be positive, got {box_length}")));
        }
        if dim != 2 && dim != 3 {
            return Err(Error::InvalidGrid(format!("dim must be 2 or 3, got {dim}")));
        }
        Ok(Grid { n, box_length, dim })
    }

    /// Three-dimensional cube.
    pub fn cube(n: usize, box_length: f64) -> Result<Self> {
        Self::new(n, box_length, 3)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn box_length(&self) -> f64 {
        self.box_length
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn spacing(&self) -> f64 {
        self.box_length / self.n as f64
    }

    /// Physical array shape, leading axis of length one in 2D.
    pub fn shape(&self) -> [usize; 3] {
        if self.dim == 3 {
            [self.n, self.n, self.n]
        } else {
            [1, self.n, self.n]
        }
    }

    /// Shape of the half-spectrum produced by a real transform.
    pub fn spectral_shape(&self) -> [usize; 3] {
        let [a, b, c] = self.shape();
        [a, b, c / 2 + 1]
    }

    pub fn len(&self) -> usize {
        self.shape().iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spectral_len(&self) -> usize {
        self.spectral_shape().iter().product()
    }

    /// Measure of one grid cell.
    pub fn cell_measure(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    pub fn volume(&self) -> f64 {
        self.box_length.powi(self.dim as i32)
    }

    /// Coordinate of sample `i` along any axis.
    pub fn coordinate(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.spacing() - 0.5 * self.box_length
    }

    /// Coordinate of the first sample, the phase origin of stored coefficients.
    pub fn origin(&self) -> f64 {
        self.coordinate(0)
    }

    /// Physical position of a sample, padded with zero in 2D.
    pub fn position(&self, index: [usize; 3]) -> [f64; 3] {
        if self.dim == 3 {
            [self.coordinate(index[0]), self.coordinate(index[1]), self.coordinate(index[2])]
        } else {
            [self.coordinate(index[1]), self.coordinate(index[2]), 0.0]
        }
    }

    /// Largest block index whose annulus is kept fully inside the lattice.
    pub fn q_max(&self) -> i32 {
        self.n.trailing_zeros() as i32 - 2
    }

    /// Smallest nonzero frequency magnitude.
    pub fn min_frequency(&self) -> f64 {
        2.0 * PI / self.box_length
    }

    /// Axis Nyquist frequency.
    pub fn max_frequency(&self) -> f64 {
        PI * self.n as f64 / self.box_length
    }

    /// Largest frequency magnitude on the lattice (the corner mode).
    pub fn corner_frequency(&self) -> f64 {
        self.max_frequency() * (self.dim as f64).sqrt()
    }

    /// Signed wavenumber of index `i` on an axis of length `len`.
    pub fn wavenumber(i: usize, len: usize) -> i64 {
        if i <= len / 2 {
            i as i64
        } else {
            i as i64 - len as i64
        }
    }

    pub(crate) fn lattice(&self) -> Lattice {
        Lattice::new(self)
    }

    pub fn same_as(&self, other: &Grid) -> bool {
        self == other
    }
}

/// Per-axis frequency tables for the half-spectrum layout.
#[derive(Debug, Clone)]
pub(crate) struct Lattice {
    pub shape: [usize; 3],
    /// Angular frequencies `2 pi k / L` per axis.
    pub xi: [Vec<f64>; 3],
    /// Frequencies used for differentiation: the axis Nyquist mode is zeroed.
    pub dxi: [Vec<f64>; 3],
    /// Modes kept by the two-thirds rule.
    pub keep: [Vec<bool>; 3],
}

impl Lattice {
    fn new(grid: &Grid) -> Self {
        let shape = grid.spectral_shape();
        let phys = grid.shape();
        let unit = 2.0 * PI / grid.box_length();
        let mk = |axis: usize| {
            let len = phys[axis];
            let count = shape[axis];
            let mut xi = Vec::with_capacity(count);
            let mut dxi = Vec::with_capacity(count);
            let mut keep = Vec::with_capacity(count);
            for i in 0..count {
                if len == 1 {
                    xi.push(0.0);
                    dxi.push(0.0);
                    keep.push(true);
                    continue;
                }
                let k = Grid::wavenumber(i, len);
                xi.push(unit * k as f64);
                let nyquist = len % 2 == 0 && k.unsigned_abs() as usize == len / 2;
                dxi.push(if nyquist { 0.0 } else { unit * k as f64 });
                keep.push((k.unsigned_abs() as f64) <= len as f64 / 3.0);
            }
            (xi, dxi, keep)
        };
        let (x0, d0, k0) = mk(0);
        let (x1, d1, k1) = mk(1);
        let (x2, d2, k2) = mk(2);
        Lattice { shape, xi: [x0, x1, x2], dxi: [d0, d1, d2], keep: [k0, k1, k2] }
    }

    #[inline]
    pub fn plane(&self) -> usize {
        self.shape[1] * self.shape[2]
    }

    /// Splits a flat spectral index.
    #[inline]
    pub fn split(&self, idx: usize) -> [usize; 3] {
        let p = self.plane();
        [idx / p, (idx % p) / self.shape[2], idx % self.shape[2]]
    }

    #[inline]
    pub fn rho(&self, i: [usize; 3]) -> f64 {
        let a = self.xi[0][i[0]];
        let b = self.xi[1][i[1]];
        let c = self.xi[2][i[2]];
        (a * a + b * b + c * c).sqrt()
    }

    #[inline]
    pub fn kept(&self, i: [usize; 3]) -> bool {
        self.keep[0][i[0]] && self.keep[1][i[1]] && self.keep[2][i[2]]
    }

    /// Multiplicity of a half-spectrum entry in the full lattice.
    #[inline]
    pub fn weight(&self, k2: usize, nz: usize) -> f64 {
        if k2 == 0 || (nz % 2 == 0 && k2 == nz / 2) {
            1.0
        } else {
            2.0
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_parameters() {
        assert!(Grid::new(48, 1.0, 3).is_err());
        assert!(Grid::new(8, 1.0, 3).is_err());
        assert!(Grid::new(32, 0.0, 3).is_err());
        assert!(Grid::new(32, 1.0, 4).is_err());
        assert!(Grid::new(32, 1.0, 2).is_ok());
    }

    #[test]
    fn frequency_span_and_q_max() {
        let g = Grid::cube(64, 2.0 * PI).unwrap();
        assert!((g.min_frequency() - 1.0).abs() < 1e-15);
        assert!((g.max_frequency() - 32.0).abs() < 1e-12);
        assert_eq!(g.q_max(), 4);
        assert!(g.spacing() > 0.0);
        assert_eq!(g.spectral_shape(), [64, 64, 33]);
    }

    #[test]
    fn samples_avoid_the_axis() {
        let g = Grid::cube(16, 1.0).unwrap();
        for i in 0..16 {
            assert!(g.coordinate(i).abs() > 0.25 * g.spacing());
        }
        assert!((g.coordinate(0) + g.coordinate(15)).abs() < 1e-15);
    }

    #[test]
    fn serde_validates() {
        let ok: Grid = serde_json::from_str(r#"{"n_points_per_axis":32,"box_length":1.0}"#).unwrap();
        assert_eq!(ok.dim(), 3);
        let bad: std::result::Result<Grid, _> =
            serde_json::from_str(r#"{"n_points_per_axis":30,"box_length":1.0}"#);
        assert!(bad.is_err());
    }
}
