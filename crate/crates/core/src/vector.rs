//! Three-component fields and the spectral vector calculus on them.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::grid::{Grid, Lattice};

/// Relative divergence admitted for a field claimed divergence free.
pub const DIVERGENCE_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct VectorField {
    components: [SpectralField; 3],
    divergence_free: bool,
}

impl VectorField {
    /// Builds a field; a claim of zero divergence is verified spectrally.
    pub fn new(components: [SpectralField; 3], divergence_free: bool) -> Result<Self> {
        let g = *components[0].grid();
        if !components.iter().all(|c| c.grid().same_as(&g)) {
            return Err(Error::GridMismatch);
        }
        let v = VectorField { components, divergence_free: false };
        if divergence_free {
            v.require_dim3()?;
            let violation = v.relative_divergence();
            if violation > DIVERGENCE_TOL {
                return Err(Error::NotDivergenceFree { violation });
            }
        }
        Ok(VectorField { divergence_free, ..v })
    }

    /// Builds a field without any claim.
    pub fn from_components(components: [SpectralField; 3]) -> Result<Self> {
        Self::new(components, false)
    }

    pub fn from_fn<F>(grid: Grid, f: F) -> Self
    where
        F: Fn([f64; 3]) -> [f64; 3] + Sync,
    {
        let comps = [0, 1, 2].map(|i| SpectralField::from_fn(grid, |x| f(x)[i]));
        VectorField { components: comps, divergence_free: false }
    }

    pub fn zeros(grid: Grid) -> Self {
        let z = SpectralField::zeros(grid);
        VectorField { components: [z.clone(), z.clone(), z], divergence_free: true }
    }

    pub fn grid(&self) -> &Grid {
        self.components[0].grid()
    }

    pub fn component(&self, i: usize) -> &SpectralField {
        &self.components[i]
    }

    pub fn components(&self) -> &[SpectralField; 3] {
        &self.components
    }

    pub fn into_components(self) -> [SpectralField; 3] {
        self.components
    }

    pub fn is_divergence_free(&self) -> bool {
        self.divergence_free
    }

    fn require_dim3(&self) -> Result<()> {
        if self.grid().dim() != 3 {
            return Err(Error::InvalidGrid("vector calculus needs a three-dimensional grid".into()));
        }
        Ok(())
    }

    /// Pointwise Euclidean magnitude.
    pub fn magnitude(&self) -> SpectralField {
        let [a, b, c] = &self.components;
        let (a, b, c) = (a.samples(), b.samples(), c.samples());
        let v: Vec<f64> = (0..a.len())
            .into_par_iter()
            .map(|i| (a[i] * a[i] + b[i] * b[i] + c[i] * c[i]).sqrt())
            .collect();
        SpectralField::from_samples(*self.grid(), v).expect("matching lengths")
    }

    /// `sup_x |v(x)|` with the Euclidean norm.
    pub fn max_norm(&self) -> f64 {
        self.magnitude().max_abs()
    }

    pub fn max_component(&self) -> f64 {
        self.components.iter().map(|c| c.max_abs()).fold(0.0, f64::max)
    }

    pub fn mean(&self) -> [f64; 3] {
        [0, 1, 2].map(|i| self.components[i].mean())
    }

    pub fn map_components(&self, f: impl Fn(&SpectralField) -> SpectralField) -> Self {
        VectorField { components: [0, 1, 2].map(|i| f(&self.components[i])), divergence_free: false }
    }

    pub fn scale(&self, c: f64) -> Self {
        VectorField {
            components: [0, 1, 2].map(|i| self.components[i].scale(c)),
            divergence_free: self.divergence_free,
        }
    }

    pub fn lincomb(&self, a: f64, other: &VectorField, b: f64) -> Result<Self> {
        let mut out = Vec::with_capacity(3);
        for i in 0..3 {
            out.push(self.components[i].lincomb(a, &other.components[i], b)?);
        }
        let comps: [SpectralField; 3] = out.try_into().expect("three components");
        Ok(VectorField { components: comps, divergence_free: self.divergence_free && other.divergence_free })
    }

    pub fn add(&self, other: &VectorField) -> Result<Self> {
        self.lincomb(1.0, other, 1.0)
    }

    pub fn sub(&self, other: &VectorField) -> Result<Self> {
        self.lincomb(1.0, other, -1.0)
    }

    /// Spectral divergence.
    pub fn divergence(&self) -> SpectralField {
        let g = *self.grid();
        let lat = g.lattice();
        let c = [0, 1, 2].map(|i| self.components[i].coefficients());
        let out = spectral_map(&lat, |l, idx, flat| {
            let i = Complex64::new(0.0, 1.0);
            i * (c[0][flat] * l.dxi[0][idx[0]] + c[1][flat] * l.dxi[1][idx[1]] + c[2][flat] * l.dxi[2][idx[2]])
        });
        SpectralField::from_coefficients(g, out).expect("lattice size")
    }

    /// `||div v||_inf / ||v||_inf`, zero for the zero field.
    pub fn relative_divergence(&self) -> f64 {
        let scale = self.max_norm();
        if scale == 0.0 {
            return 0.0;
        }
        self.divergence().max_abs() / scale
    }

    /// Spectral curl; the result is divergence free by construction.
    pub fn curl(&self) -> Result<VectorField> {
        self.require_dim3()?;
        let g = *self.grid();
        let lat = g.lattice();
        let c = [0, 1, 2].map(|i| self.components[i].coefficients());
        let i = Complex64::new(0.0, 1.0);
        let comp = |a: usize, b: usize| {
            // (curl v)_k = d_a v_b - d_b v_a with (k, a, b) cyclic
            let out = spectral_map(&lat, |l, idx, flat| {
                i * (c[b][flat] * l.dxi[a][idx[a]] - c[a][flat] * l.dxi[b][idx[b]])
            });
            SpectralField::from_coefficients(g, out).expect("lattice size")
        };
        Ok(VectorField { components: [comp(1, 2), comp(2, 0), comp(0, 1)], divergence_free: true })
    }

    /// Spectral gradient of a scalar field.
    pub fn gradient(f: &SpectralField) -> VectorField {
        let dim = f.grid().dim();
        let comps = [0, 1, 2].map(|a| if a < dim { f.derivative(a) } else { SpectralField::zeros(*f.grid()) });
        VectorField { components: comps, divergence_free: false }
    }

    /// Removes the gradient part; the mean passes through unchanged.
    pub fn leray_project(&self) -> Result<VectorField> {
        self.require_dim3()?;
        let g = *self.grid();
        let lat = g.lattice();
        let c = [0, 1, 2].map(|i| self.components[i].coefficients());
        let comp = |k: usize| {
            let out = spectral_map(&lat, |l, idx, flat| {
                let xi = [l.dxi[0][idx[0]], l.dxi[1][idx[1]], l.dxi[2][idx[2]]];
                let n2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
                if n2 == 0.0 {
                    return c[k][flat];
                }
                let dot = c[0][flat] * xi[0] + c[1][flat] * xi[1] + c[2][flat] * xi[2];
                c[k][flat] - dot * (xi[k] / n2)
            });
            SpectralField::from_coefficients(g, out).expect("lattice size")
        };
        Ok(VectorField { components: [comp(0), comp(1), comp(2)], divergence_free: true })
    }

    /// Mean-free, divergence-free field whose curl is `self`:
    /// `u_hat = i xi x omega_hat / |xi|^2`.
    pub fn inverse_curl(&self) -> Result<VectorField> {
        self.require_dim3()?;
        let g = *self.grid();
        let lat = g.lattice();
        let c = [0, 1, 2].map(|i| self.components[i].coefficients());
        let i = Complex64::new(0.0, 1.0);
        let comp = |a: usize, b: usize| {
            let out = spectral_map(&lat, |l, idx, flat| {
                let xi = [l.dxi[0][idx[0]], l.dxi[1][idx[1]], l.dxi[2][idx[2]]];
                let n2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
                if n2 == 0.0 {
                    return Complex64::new(0.0, 0.0);
                }
                i * (c[b][flat] * xi[a] - c[a][flat] * xi[b]) / n2
            });
            SpectralField::from_coefficients(g, out).expect("lattice size")
        };
        Ok(VectorField { components: [comp(1, 2), comp(2, 0), comp(0, 1)], divergence_free: true })
    }

    /// All first derivatives: `grad[i][j] = d_j v_i`.
    pub fn jacobian(&self) -> [[SpectralField; 3]; 3] {
        [0, 1, 2].map(|i| [0, 1, 2].map(|j| self.components[i].derivative(j)))
    }

    /// Same value as [`gradient_sup`] of the Jacobian, holding one derivative at a time.
    pub fn gradient_sup(&self) -> f64 {
        let mut acc = vec![0.0; self.grid().len()];
        for c in &self.components {
            for j in 0..3 {
                let d = c.derivative(j);
                acc.par_iter_mut().zip(d.samples().par_iter()).for_each(|(a, v)| *a += v * v);
            }
        }
        acc.into_par_iter().map(f64::sqrt).reduce(|| 0.0, f64::max)
    }
}

/// `sup_x (sum_ij (d_j v_i)^2)^{1/2}`, the sup of the Frobenius norm of the Jacobian.
pub fn gradient_sup(grad: &[[SpectralField; 3]; 3]) -> f64 {
    let s: Vec<&[f64]> = grad.iter().flat_map(|r| r.iter().map(|f| f.samples())).collect();
    let len = s[0].len();
    (0..len)
        .into_par_iter()
        .map(|p| s.iter().map(|c| c[p] * c[p]).sum::<f64>().sqrt())
        .reduce(|| 0.0, f64::max)
}

fn spectral_map(lat: &Lattice, f: impl Fn(&Lattice, [usize; 3], usize) -> Complex64 + Sync) -> Vec<Complex64> {
    let total = lat.shape[0] * lat.shape[1] * lat.shape[2];
    (0..total).into_par_iter().map(|flat| f(lat, lat.split(flat), flat)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid() -> Grid {
        Grid::cube(32, 2.0 * PI).unwrap()
    }

    fn potential(g: Grid) -> SpectralField {
        SpectralField::from_fn(g, |x| (x[0] + 2.0 * x[1]).sin() * x[2].cos() + (3.0 * x[2]).sin())
    }

    fn solenoidal(g: Grid) -> VectorField {
        // curl of a smooth vector potential
        let a = VectorField::from_fn(g, |x| [x[1].sin() * x[2].cos(), (2.0 * x[2]).sin(), (x[0] - x[1]).cos()]);
        a.curl().unwrap()
    }

    #[test]
    fn gradients_are_curl_free_and_projected_out() {
        let g = grid();
        let grad = VectorField::gradient(&potential(g));
        assert!(grad.curl().unwrap().max_component() < 1e-12);
        assert!(grad.leray_project().unwrap().max_component() < 1e-12);
    }

    #[test]
    fn projection_fixes_solenoidal_fields_and_is_idempotent() {
        let g = grid();
        let w = solenoidal(g);
        let p = w.leray_project().unwrap();
        assert!(p.sub(&w).unwrap().max_component() < 1e-12);
        let v = VectorField::gradient(&potential(g)).add(&w).unwrap();
        let pv = v.leray_project().unwrap();
        assert!(pv.sub(&w).unwrap().max_component() < 1e-12);
        let ppv = pv.leray_project().unwrap();
        assert!(ppv.sub(&pv).unwrap().max_component() < 1e-12);
    }

    #[test]
    fn inverse_curl_round_trip() {
        let g = grid();
        let w = solenoidal(g);
        let u = w.inverse_curl().unwrap();
        assert!(u.relative_divergence() < 1e-13);
        assert!(u.curl().unwrap().sub(&w).unwrap().max_component() < 1e-12);
    }

    #[test]
    fn divergence_claim_is_checked() {
        let g = grid();
        let grad = VectorField::gradient(&potential(g));
        let [a, b, c] = grad.into_components();
        assert!(matches!(VectorField::new([a, b, c], true), Err(Error::NotDivergenceFree { .. })));
        let [a, b, c] = solenoidal(g).into_components();
        assert!(VectorField::new([a, b, c], true).is_ok());
    }
}
