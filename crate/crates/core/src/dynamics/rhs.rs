//! Right-hand sides and the stage-by-stage Runge-Kutta machinery shared by
//! the Euler solver, the vorticity model and scalar transport.

use std::sync::OnceLock;

use rayon::prelude::*;

use crate::error::Result;
use crate::field::SpectralField;
use crate::grid::Grid;
use crate::vector::VectorField;

/// A velocity prepared for repeated use within one Runge-Kutta stage.
pub struct PreparedVelocity {
    u: VectorField,
    dealias: bool,
    factors: OnceLock<[SpectralField; 3]>,
    gradient: OnceLock<[[Vec<f64>; 3]; 3]>,
}

impl PreparedVelocity {
    pub fn new(u: VectorField, dealias: bool) -> Self {
        PreparedVelocity { u, dealias, factors: OnceLock::new(), gradient: OnceLock::new() }
    }

    pub fn velocity(&self) -> &VectorField {
        &self.u
    }

    pub fn grid(&self) -> &Grid {
        self.u.grid()
    }

    fn factors(&self) -> &[SpectralField; 3] {
        self.factors.get_or_init(|| [0, 1, 2].map(|i| factor(self.u.component(i), self.dealias)))
    }

    /// `grad[i][j] = d_j u^i` on the samples of the (dealiased) velocity.
    fn gradient(&self) -> &[[Vec<f64>; 3]; 3] {
        self.gradient.get_or_init(|| {
            let f = self.factors();
            [0, 1, 2].map(|i| [0, 1, 2].map(|j| f[i].derivative(j).samples().to_vec()))
        })
    }

    /// `sum_j u^j d_j f`.
    pub fn advect(&self, f: &SpectralField) -> SpectralField {
        let fd = factor(f, self.dealias);
        let u = self.factors();
        let d = [0, 1, 2].map(|j| fd.derivative(j));
        let us = [0, 1, 2].map(|j| u[j].samples());
        let ds = [0, 1, 2].map(|j| d[j].samples());
        let mut out = vec![0.0; f.grid().len()];
        out.par_iter_mut().enumerate().for_each(|(p, o)| {
            *o = us[0][p] * ds[0][p] + us[1][p] * ds[1][p] + us[2][p] * ds[2][p];
        });
        product(*f.grid(), out, self.dealias)
    }

    /// `Omega . grad u` for each component.
    pub fn stretch(&self, omega: &[SpectralField; 3]) -> [SpectralField; 3] {
        let w = omega.each_ref().map(|c| factor(c, self.dealias));
        let ws = w.each_ref().map(|c| c.samples());
        let grad = self.gradient();
        [0, 1, 2].map(|i| {
            let mut out = vec![0.0; self.grid().len()];
            let g = &grad[i];
            out.par_iter_mut().enumerate().for_each(|(p, o)| {
                *o = ws[0][p] * g[0][p] + ws[1][p] * g[1][p] + ws[2][p] * g[2][p];
            });
            product(*self.grid(), out, self.dealias)
        })
    }
}

fn factor(f: &SpectralField, dealias: bool) -> SpectralField {
    if dealias {
        f.dealias()
    } else {
        f.clone()
    }
}

fn product(grid: Grid, samples: Vec<f64>, dealias: bool) -> SpectralField {
    let p = SpectralField::from_samples(grid, samples).expect("grid size");
    if dealias {
        p.dealias()
    } else {
        p
    }
}

/// Which linear equation a member obeys under a given velocity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Equation {
    /// `d_t f + u . grad f = 0`, one component.
    Transport,
    /// `d_t Omega + u . grad Omega = Omega . grad u`, three components.
    Vorticity,
}

/// Right-hand side of `eq` at `y`.
pub fn rhs(eq: Equation, y: &[SpectralField], u: &PreparedVelocity) -> Vec<SpectralField> {
    match eq {
        Equation::Transport => y.iter().map(|f| u.advect(f).scale(-1.0)).collect(),
        Equation::Vorticity => {
            let w: [SpectralField; 3] = [y[0].clone(), y[1].clone(), y[2].clone()];
            let s = u.stretch(&w);
            (0..3).map(|i| s[i].sub(&u.advect(&y[i])).expect("shared grid")).collect()
        }
    }
}

const NODES: [f64; 3] = [0.5, 0.5, 1.0];
const WEIGHTS: [f64; 4] = [1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0];

/// One field advanced by classical Runge-Kutta, one stage at a time.
#[derive(Debug, Clone)]
pub struct Rk4Member {
    pub eq: Equation,
    pub y: Vec<SpectralField>,
    stage_input: Vec<SpectralField>,
    acc: Vec<SpectralField>,
    dt: f64,
}

impl Rk4Member {
    pub fn new(eq: Equation, y: Vec<SpectralField>) -> Self {
        Rk4Member { eq, stage_input: y.clone(), acc: Vec::new(), y, dt: 0.0 }
    }

    pub fn begin(&mut self, dt: f64) {
        self.dt = dt;
        self.stage_input = self.y.clone();
        self.acc.clear();
    }

    /// Input of the next stage (after `stage` has run), or of the first stage.
    pub fn stage_input(&self) -> &[SpectralField] {
        &self.stage_input
    }

    /// Runs stage `s` (0..4) with the stage velocity; the last stage commits.
    pub fn stage(&mut self, s: usize, u: &PreparedVelocity) -> Result<()> {
        let k = rhs(self.eq, &self.stage_input, u);
        if self.acc.is_empty() {
            self.acc = k.iter().map(|f| f.scale(self.dt * WEIGHTS[s])).collect();
        } else {
            for (a, f) in self.acc.iter_mut().zip(&k) {
                *a = a.lincomb(1.0, f, self.dt * WEIGHTS[s])?;
            }
        }
        if s < 3 {
            let c = self.dt * NODES[s];
            self.stage_input = self.y.iter().zip(&k).map(|(y, f)| y.lincomb(1.0, f, c)).collect::<Result<_>>()?;
        } else {
            self.y = self.y.iter().zip(&self.acc).map(|(y, a)| y.add(a)).collect::<Result<_>>()?;
            self.stage_input = self.y.clone();
            self.acc.clear();
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{band_limited, solenoidal};
    use std::f64::consts::PI;

    /// A constant velocity translates a mode exactly: d_t f = -c d_x f.
    #[test]
    fn rk4_translation_matches_the_exact_phase() {
        let g = Grid::cube(16, 2.0 * PI).unwrap();
        let c = 0.7;
        let u = VectorField::new(
            [SpectralField::constant(g, c), SpectralField::zeros(g), SpectralField::zeros(g)],
            true,
        )
        .unwrap();
        let pv = PreparedVelocity::new(u, true);
        let f0 = SpectralField::from_fn(g, |x| (2.0 * x[0]).sin());
        let mut m = Rk4Member::new(Equation::Transport, vec![f0]);
        let dt = 0.05;
        for _ in 0..20 {
            m.begin(dt);
            for s in 0..4 {
                m.stage(s, &pv).unwrap();
            }
        }
        // RK4 amplification of the mode i k c dt with k = 2
        let z = num_complex::Complex64::new(0.0, -2.0 * c * dt);
        let amp = 1.0 + z + z * z / 2.0 + z * z * z / 6.0 + z * z * z * z / 24.0;
        let a = amp.powu(20);
        let want = SpectralField::from_fn(g, |x| a.norm() * (2.0 * x[0] + a.arg()).sin());
        assert!(m.y[0].sub(&want).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn zero_velocity_gives_zero_rhs() {
        let g = Grid::cube(16, 2.0 * PI).unwrap();
        let pv = PreparedVelocity::new(VectorField::zeros(g), true);
        let w = solenoidal(&g, 4, 5.0);
        let r = rhs(Equation::Vorticity, w.components(), &pv);
        assert!(r.iter().all(|f| f.max_abs() == 0.0));
        let f = band_limited(&g, 2, 5.0, true);
        assert_eq!(rhs(Equation::Transport, &[f], &pv)[0].max_abs(), 0.0);
    }
}
