//! Scalar fields held jointly as samples and Fourier coefficients.

use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;
use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};
use crate::fft::FftPlan;
use crate::grid::{Grid, Lattice};

/// A real scalar field on a periodic grid.
///
/// Either representation may be supplied; the other is computed on first use
/// and cached. Clones share both caches, so a field is cheap to pass around
/// and is never mutated after construction.
#[derive(Clone)]
pub struct SpectralField {
    grid: Grid,
    samples: Arc<OnceLock<Vec<f64>>>,
    coefficients: Arc<OnceLock<Vec<Complex64>>>,
}

impl std::fmt::Debug for SpectralField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpectralField")
            .field("grid", &self.grid)
            .field("has_samples", &self.samples.get().is_some())
            .field("has_coefficients", &self.coefficients.get().is_some())
            .finish()
    }
}

impl SpectralField {
    pub fn from_samples(grid: Grid, samples: Vec<f64>) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::Inconsistent(format!(
                "expected {} samples, got {}",
                grid.len(),
                samples.len()
            )));
        }
        let cell = OnceLock::new();
        let _ = cell.set(samples);
        Ok(SpectralField { grid, samples: Arc::new(cell), coefficients: Arc::new(OnceLock::new()) })
    }

    /// Builds a field from half-spectrum coefficients in the layout of [`FftPlan`].
    pub fn from_coefficients(grid: Grid, coefficients: Vec<Complex64>) -> Result<Self> {
        if coefficients.len() != grid.spectral_len() {
            return Err(Error::Inconsistent(format!(
                "expected {} coefficients, got {}",
                grid.spectral_len(),
                coefficients.len()
            )));
        }
        let cell = OnceLock::new();
        let _ = cell.set(coefficients);
        Ok(SpectralField { grid, samples: Arc::new(OnceLock::new()), coefficients: Arc::new(cell) })
    }

    pub(crate) fn from_samples_unchecked(grid: Grid, samples: Vec<f64>) -> Self {
        debug_assert_eq!(samples.len(), grid.len());
        Self::from_samples(grid, samples).expect("sample count")
    }

    pub(crate) fn from_coefficients_unchecked(grid: Grid, coefficients: Vec<Complex64>) -> Self {
        Self::from_coefficients(grid, coefficients).expect("coefficient count")
    }

    /// Samples `f` at every grid point.
    pub fn from_fn<F>(grid: Grid, f: F) -> Self
    where
        F: Fn([f64; 3]) -> f64 + Sync,
    {
        let [n0, n1, n2] = grid.shape();
        let mut v = vec![0.0; n0 * n1 * n2];
        v.par_chunks_mut(n2).enumerate().for_each(|(row, out)| {
            let (i0, i1) = (row / n1, row % n1);
            for (i2, o) in out.iter_mut().enumerate() {
                *o = f(grid.position([i0, i1, i2]));
            }
        });
        Self::from_samples_unchecked(grid, v)
    }

    pub fn zeros(grid: Grid) -> Self {
        Self::from_samples_unchecked(grid, vec![0.0; grid.len()])
    }

    pub fn constant(grid: Grid, c: f64) -> Self {
        Self::from_samples_unchecked(grid, vec![c; grid.len()])
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn samples(&self) -> &[f64] {
        self.samples.get_or_init(|| {
            let coeffs = self.coefficients.get().expect("field has neither representation");
            FftPlan::for_shape(self.grid.shape()).inverse(coeffs)
        })
    }

    pub fn coefficients(&self) -> &[Complex64] {
        self.coefficients.get_or_init(|| {
            let samples = self.samples.get().expect("field has neither representation");
            FftPlan::for_shape(self.grid.shape()).forward(samples)
        })
    }

    fn has_coefficients(&self) -> bool {
        self.coefficients.get().is_some()
    }

    fn has_samples(&self) -> bool {
        self.samples.get().is_some()
    }

    pub fn ensure_same_grid(&self, other: &SpectralField) -> Result<()> {
        if self.grid.same_as(&other.grid) {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    /// Sample value at a multi-index.
    pub fn at(&self, index: [usize; 3]) -> f64 {
        let [_, n1, n2] = self.grid.shape();
        self.samples()[(index[0] * n1 + index[1]) * n2 + index[2]]
    }

    /// Mean over the box, the zero-frequency coefficient.
    pub fn mean(&self) -> f64 {
        if self.has_coefficients() || !self.has_samples() {
            self.coefficients()[0].re
        } else {
            let s = self.samples();
            s.iter().sum::<f64>() / s.len() as f64
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.samples().iter().fold(0.0f64, |a, b| a.max(b.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.samples().iter().all(|v| *v == 0.0)
    }

    /// Applies a pointwise map to the samples.
    pub fn map(&self, f: impl Fn(f64) -> f64 + Sync) -> Self {
        let v: Vec<f64> = self.samples().par_iter().map(|x| f(*x)).collect();
        Self::from_samples_unchecked(self.grid, v)
    }

    /// Pointwise combination of two fields on the same grid.
    pub fn zip_map(&self, other: &SpectralField, f: impl Fn(f64, f64) -> f64 + Sync) -> Result<Self> {
        self.ensure_same_grid(other)?;
        let v: Vec<f64> = self
            .samples()
            .par_iter()
            .zip(other.samples().par_iter())
            .map(|(a, b)| f(*a, *b))
            .collect();
        Ok(Self::from_samples_unchecked(self.grid, v))
    }

    /// Pointwise map that also receives the physical position.
    pub fn map_with_position(&self, f: impl Fn([f64; 3], f64) -> f64 + Sync) -> Self {
        let grid = self.grid;
        let [_, n1, n2] = grid.shape();
        let s = self.samples();
        let mut v = vec![0.0; s.len()];
        v.par_chunks_mut(n2).zip(s.par_chunks(n2)).enumerate().for_each(|(row, (out, src))| {
            let (i0, i1) = (row / n1, row % n1);
            for i2 in 0..n2 {
                out[i2] = f(grid.position([i0, i1, i2]), src[i2]);
            }
        });
        Self::from_samples_unchecked(grid, v)
    }

    /// Linear combination `a*self + b*other`, formed in whichever representation
    /// both operands already hold so no transform is triggered needlessly.
    pub fn lincomb(&self, a: f64, other: &SpectralField, b: f64) -> Result<Self> {
        self.ensure_same_grid(other)?;
        if self.has_coefficients() && other.has_coefficients() {
            let v: Vec<Complex64> = self
                .coefficients()
                .par_iter()
                .zip(other.coefficients().par_iter())
                .map(|(x, y)| x * a + y * b)
                .collect();
            Ok(Self::from_coefficients_unchecked(self.grid, v))
        } else {
            self.zip_map(other, |x, y| a * x + b * y)
        }
    }

    pub fn add(&self, other: &SpectralField) -> Result<Self> {
        self.lincomb(1.0, other, 1.0)
    }

    pub fn sub(&self, other: &SpectralField) -> Result<Self> {
        self.lincomb(1.0, other, -1.0)
    }

    pub fn scale(&self, c: f64) -> Self {
        if self.has_coefficients() {
            let v = self.coefficients().iter().map(|z| z * c).collect();
            Self::from_coefficients_unchecked(self.grid, v)
        } else {
            self.map(|x| c * x)
        }
    }

    /// Pointwise product of samples, with no dealiasing.
    pub fn mul(&self, other: &SpectralField) -> Result<Self> {
        self.zip_map(other, |a, b| a * b)
    }

    /// Sum of many fields on one grid, accumulated in a fixed order.
    pub fn sum<'a>(grid: Grid, fields: impl IntoIterator<Item = &'a SpectralField>) -> Result<Self> {
        let mut acc: Option<Vec<Complex64>> = None;
        for f in fields {
            if !f.grid.same_as(&grid) {
                return Err(Error::GridMismatch);
            }
            let c = f.coefficients();
            match acc.as_mut() {
                None => acc = Some(c.to_vec()),
                Some(a) => a.iter_mut().zip(c).for_each(|(x, y)| *x += y),
            }
        }
        Ok(match acc {
            Some(a) => Self::from_coefficients_unchecked(grid, a),
            None => Self::zeros(grid),
        })
    }

    pub(crate) fn lattice(&self) -> Lattice {
        self.grid.lattice()
    }

    /// Multiplies every coefficient by `m(lattice, index)`.
    pub(crate) fn apply_multiplier<M>(&self, lattice: &Lattice, m: M) -> Self
    where
        M: Fn(&Lattice, [usize; 3]) -> Complex64 + Sync,
    {
        let c = self.coefficients();
        let row = lattice.shape[2];
        let mut out = vec![Complex64::new(0.0, 0.0); c.len()];
        out.par_chunks_mut(row).zip(c.par_chunks(row)).enumerate().for_each(|(r, (o, src))| {
            let (i0, i1) = (r / lattice.shape[1], r % lattice.shape[1]);
            for i2 in 0..row {
                o[i2] = src[i2] * m(lattice, [i0, i1, i2]);
            }
        });
        Self::from_coefficients_unchecked(self.grid, out)
    }

    /// Multiplies by a real radial symbol `m(|xi|)`.
    pub fn radial_multiplier(&self, m: impl Fn(f64) -> f64 + Sync) -> Self {
        let lat = self.lattice();
        self.apply_multiplier(&lat, |l, i| Complex64::new(m(l.rho(i)), 0.0))
    }

    /// Partial derivative along a physical axis (0, 1, 2 for x1, x2, x3).
    pub fn derivative(&self, axis: usize) -> Self {
        let a = self.array_axis(axis);
        let lat = self.lattice();
        self.apply_multiplier(&lat, move |l, i| Complex64::new(0.0, l.dxi[a][i[a]]))
    }

    /// Array axis carrying physical axis `axis`.
    pub fn array_axis(&self, axis: usize) -> usize {
        array_axis(&self.grid, axis)
    }

    /// Removes the modes discarded by the two-thirds rule.
    pub fn dealias(&self) -> Self {
        let lat = self.lattice();
        self.apply_multiplier(&lat, |l, i| {
            if l.kept(i) {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    /// Product of the dealiased factors, itself truncated to the kept modes.
    pub fn dealiased_product(&self, other: &SpectralField) -> Result<Self> {
        self.ensure_same_grid(other)?;
        Ok(self.dealias().mul(&other.dealias())?.dealias())
    }

    /// Mean square of the samples, computed from the coefficients (Parseval).
    pub fn spectral_energy(&self) -> f64 {
        let lat = self.lattice();
        let c = self.coefficients();
        let nz = self.grid.shape()[2];
        let mut e = 0.0;
        for (idx, z) in c.iter().enumerate() {
            let k2 = idx % lat.shape[2];
            e += lat.weight(k2, nz) * z.norm_sqr();
        }
        e
    }

    /// Maximum relative sample error after a forward and inverse transform.
    pub fn round_trip_error(&self) -> f64 {
        let plan = FftPlan::for_shape(self.grid.shape());
        let back = plan.inverse(&plan.forward(self.samples()));
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        self.samples().iter().zip(&back).fold(0.0f64, |a, (x, y)| a.max((x - y).abs())) / scale
    }

    /// Largest violation of conjugate symmetry on the self-conjugate planes of
    /// the half spectrum, relative to the largest coefficient.
    pub fn conjugate_symmetry_defect(&self) -> f64 {
        let c = self.coefficients();
        let [n0, n1, m] = self.grid.spectral_shape();
        let nz = self.grid.shape()[2];
        let planes: Vec<usize> = if nz % 2 == 0 { vec![0, m - 1] } else { vec![0] };
        let scale = c.iter().fold(0.0f64, |a, z| a.max(z.norm())).max(f64::MIN_POSITIVE);
        let mut worst = 0.0f64;
        for &k2 in &planes {
            for i0 in 0..n0 {
                for i1 in 0..n1 {
                    let j0 = (n0 - i0) % n0;
                    let j1 = (n1 - i1) % n1;
                    let a = c[(i0 * n1 + i1) * m + k2];
                    let b = c[(j0 * n1 + j1) * m + k2];
                    worst = worst.max((a - b.conj()).norm());
                }
            }
        }
        worst / scale
    }

    /// Trigonometric interpolant evaluated at an arbitrary physical point.
    pub fn evaluate(&self, point: [f64; 3]) -> f64 {
        let grid = self.grid;
        let [n0, n1, n2] = grid.shape();
        let (w0, w1, w2) = if grid.dim() == 3 {
            (
                interpolation_weights(&grid, point[0]),
                interpolation_weights(&grid, point[1]),
                interpolation_weights(&grid, point[2]),
            )
        } else {
            (vec![1.0], interpolation_weights(&grid, point[0]), interpolation_weights(&grid, point[1]))
        };
        let s = self.samples();
        let mut acc = 0.0;
        for i0 in 0..n0 {
            let mut a1 = 0.0;
            for i1 in 0..n1 {
                let row = &s[(i0 * n1 + i1) * n2..][..n2];
                let a2: f64 = row.iter().zip(&w2).map(|(v, w)| v * w).sum();
                a1 += w1[i1] * a2;
            }
            acc += w0[i0] * a1;
        }
        acc
    }

    /// Sup of the trigonometric interpolant near the largest sample, found
    /// by alternating one-dimensional golden-section searches along the axes.
    /// Falls back to the sample maximum on two-dimensional grids.
    pub fn interpolated_max_abs(&self) -> f64 {
        let grid = self.grid;
        let s = self.samples();
        let sample_max = self.max_abs();
        if grid.dim() != 3 || sample_max == 0.0 {
            return sample_max;
        }
        let n = grid.n();
        let (k, v) = s.iter().enumerate().fold((0, 0.0f64), |acc, (i, v)| if v.abs() > acc.1.abs() { (i, *v) } else { acc });
        let sign = v.signum();
        let mut p = [grid.coordinate(k / (n * n)), grid.coordinate((k / n) % n), grid.coordinate(k % n)];
        let strides = [n * n, n, 1];
        let h = grid.spacing();
        let mut best = sample_max;
        for _round in 0..3 {
            for a in 0..3 {
                let others: Vec<usize> = (0..3).filter(|&b| b != a).collect();
                let wb = interpolation_weights(&grid, p[others[0]]);
                let wc = interpolation_weights(&grid, p[others[1]]);
                let mut line = vec![0.0; n];
                for (ib, wbi) in wb.iter().enumerate() {
                    for (ic, wci) in wc.iter().enumerate() {
                        let w = wbi * wci;
                        let base = ib * strides[others[0]] + ic * strides[others[1]];
                        for (j, l) in line.iter_mut().enumerate() {
                            *l += w * s[base + j * strides[a]];
                        }
                    }
                }
                let g = |y: f64| sign * interpolation_weights(&grid, y).iter().zip(&line).map(|(w, l)| w * l).sum::<f64>();
                let (y, val) = golden_max(g, p[a] - h, p[a] + h);
                if val > best {
                    best = val;
                    p[a] = y;
                }
            }
        }
        best
    }

    /// Resamples every line along physical axis `axis` at new positions:
    /// output index `i` takes the interpolant's value at `positions[i]`.
    pub fn resample_axis(&self, axis: usize, positions: &[f64]) -> Self {
        let grid = self.grid;
        let n = grid.n();
        assert_eq!(positions.len(), n);
        let matrix: Vec<Vec<f64>> = positions.iter().map(|&y| interpolation_weights(&grid, y)).collect();
        let a = self.array_axis(axis);
        let shape = grid.shape();
        let strides = [shape[1] * shape[2], shape[2], 1];
        let s = self.samples();
        let mut out = vec![0.0; s.len()];
        let others: Vec<usize> = (0..3).filter(|&k| k != a).collect();
        let (ba, bb) = (others[0], others[1]);
        let mut line = vec![0.0; n];
        for ia in 0..shape[ba] {
            for ib in 0..shape[bb] {
                let base = ia * strides[ba] + ib * strides[bb];
                for (j, l) in line.iter_mut().enumerate() {
                    *l = s[base + j * strides[a]];
                }
                for (i, row) in matrix.iter().enumerate() {
                    out[base + i * strides[a]] = row.iter().zip(&line).map(|(w, v)| w * v).sum();
                }
            }
        }
        Self::from_samples_unchecked(grid, out)
    }
}

/// Maximum of a unimodal function on `[lo, hi]`, as `(argmax, max)`.
fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> (f64, f64) {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..40 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = f(x1);
        }
    }
    if f1 > f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

pub(crate) fn array_axis(grid: &Grid, axis: usize) -> usize {
    assert!(axis < grid.dim(), "axis {axis} out of range for dim {}", grid.dim());
    if grid.dim() == 3 {
        axis
    } else {
        axis + 1
    }
}

/// Weights `w_j` with `f(y) = sum_j w_j f(x_j)` for the trigonometric
/// interpolant on one axis; the Nyquist mode is split evenly between `±n/2`.
pub fn interpolation_weights(grid: &Grid, y: f64) -> Vec<f64> {
    let n = grid.n();
    let unit = 2.0 * PI / grid.box_length();
    let half = n / 2;
    (0..n)
        .map(|j| {
            let d = unit * (y - grid.coordinate(j));
            let mut acc = 1.0;
            for k in 1..half {
                acc += 2.0 * (k as f64 * d).cos();
            }
            acc += (half as f64 * d).cos();
            acc / n as f64
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize) -> Grid {
        Grid::cube(n, 2.0 * PI).unwrap()
    }

    fn smooth(g: Grid) -> SpectralField {
        SpectralField::from_fn(g, |x| (x[0]).sin() * (2.0 * x[1]).cos() + (x[2] - 0.3).cos().powi(2))
    }

    #[test]
    fn lazy_representations_agree() {
        let f = smooth(grid(16));
        let g = SpectralField::from_coefficients(*f.grid(), f.coefficients().to_vec()).unwrap();
        let err = f.samples().iter().zip(g.samples()).fold(0.0f64, |a, (x, y)| a.max((x - y).abs()));
        assert!(err < 1e-13);
        assert!(f.round_trip_error() < 1e-12);
        assert!(f.conjugate_symmetry_defect() < 1e-14);
    }

    #[test]
    fn interpolated_sup_finds_the_peak_between_samples() {
        let g = grid(64);
        // the peak sits between grid points on every axis
        let c = [0.03, -0.02, 0.0];
        let f = SpectralField::from_fn(g, |x| {
            -2.0 * (-((x[0] - c[0]).powi(2) + (x[1] - c[1]).powi(2) + (x[2] - c[2]).powi(2)) / 0.3).exp()
        });
        assert!(2.0 - f.max_abs() > 1e-3);
        let m = f.interpolated_max_abs();
        assert!((m - 2.0).abs() < 1e-9, "{m} vs {}", f.max_abs());
    }

    #[test]
    fn derivative_of_a_mode() {
        let g = grid(32);
        let f = SpectralField::from_fn(g, |x| (3.0 * x[1] + x[2]).sin());
        let d = f.derivative(1);
        let want = SpectralField::from_fn(g, |x| 3.0 * (3.0 * x[1] + x[2]).cos());
        let err = d.sub(&want).unwrap().max_abs();
        assert!(err < 1e-12, "{err}");
    }

    #[test]
    fn mean_and_parseval() {
        let f = smooth(grid(16));
        let direct = f.samples().iter().map(|v| v * v).sum::<f64>() / f.grid().len() as f64;
        assert!((f.spectral_energy() - direct).abs() < 1e-12 * direct);
        assert!((f.mean() - 0.5).abs() < 1e-13);
    }

    #[test]
    fn interpolation_reproduces_band_limited_values() {
        let g = grid(32);
        let f = smooth(g);
        let p: [f64; 3] = [0.123, -1.7, 2.9];
        let exact = p[0].sin() * (2.0 * p[1]).cos() + (p[2] - 0.3f64).cos().powi(2);
        assert!((f.evaluate(p) - exact).abs() < 1e-12);
        let shifted: Vec<f64> = (0..32).map(|i| g.coordinate(i) + 0.3).collect();
        let r = f.resample_axis(0, &shifted);
        let want = SpectralField::from_fn(g, |x| (x[0] + 0.3).sin() * (2.0 * x[1]).cos() + (x[2] - 0.3).cos().powi(2));
        assert!(r.sub(&want).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn dealiased_product_keeps_low_modes() {
        let g = grid(32);
        let a = SpectralField::from_fn(g, |x| x[0].cos());
        let b = SpectralField::from_fn(g, |x| (2.0 * x[0]).cos());
        let p = a.dealiased_product(&b).unwrap();
        let want = SpectralField::from_fn(g, |x| 0.5 * (x[0].cos() + (3.0 * x[0]).cos()));
        assert!(p.sub(&want).unwrap().max_abs() < 1e-13);
    }
}
