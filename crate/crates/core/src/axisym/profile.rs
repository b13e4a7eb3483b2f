//! Built-in axisymmetric flows without swirl.
//!
//! Every profile derives from a vector potential `A = r G(r^2, z) e_theta`,
//! so the velocity `u_r = -r G_z`, `u_z = 2G + 2s G_s` (with `s = r^2`) is
//! divergence free and regular on the axis, and the advected quantity
//! `alpha = omega_theta / r = -(8 G_s + 4 s G_ss + G_zz)` is known in closed form.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;

/// Relative envelope level below which a profile is set to exactly zero.
pub const ENVELOPE_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AxisymProfile {
    /// Gaussian vortex ring of radius `ring_radius` and core width `core_width`.
    RingVortex {
        amplitude: f64,
        ring_radius: f64,
        core_width: f64,
        #[serde(default)]
        z_center: f64,
    },
    /// Gaussian jet along the axis.
    GaussianBlob {
        amplitude: f64,
        width: f64,
        #[serde(default)]
        z_center: f64,
    },
    /// Pair of counter-rotating axial jets, odd in `z - z_center`.
    Dipole {
        amplitude: f64,
        width: f64,
        #[serde(default)]
        z_center: f64,
    },
    /// Seeded superposition of Gaussian rings of random radius, width, offset and sign.
    Random { seed: u64, terms: usize, amplitude: f64 },
    /// Sum of profiles.
    Sum { parts: Vec<AxisymProfile> },
    /// The zero flow.
    Rest,
}

/// Potential `G` and the derivatives that enter the velocity and vorticity.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Potential {
    pub g: f64,
    pub gs: f64,
    pub gss: f64,
    pub gz: f64,
    pub gzz: f64,
}

impl std::ops::AddAssign for Potential {
    fn add_assign(&mut self, o: Self) {
        self.g += o.g;
        self.gs += o.gs;
        self.gss += o.gss;
        self.gz += o.gz;
        self.gzz += o.gzz;
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Shape {
    /// `Q = d^2 / (d + 4 R^2) + (z - z0)^2` with `d = s - R^2`: close to
    /// `(r - R)^2` near the core and to `s` far out, so the width never shrinks.
    Ring { r2: f64 },
    /// `Q = s + (z - z0)^2`
    Blob,
}

/// One Gaussian term `A exp(-Q / (2 sigma^2))`, optionally times `(z - z0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Term {
    amplitude: f64,
    sigma: f64,
    z0: f64,
    shape: Shape,
    odd: bool,
}

impl Term {
    fn q_max(&self) -> f64 {
        2.0 * self.sigma * self.sigma * (1.0 / ENVELOPE_FLOOR).ln()
    }

    fn support_radius(&self) -> f64 {
        let qm = self.q_max();
        match self.shape {
            // positive root of d^2 = qm (d + 4 R^2)
            Shape::Ring { r2 } => (r2 + 0.5 * (qm + (qm * qm + 16.0 * qm * r2).sqrt())).sqrt(),
            Shape::Blob => qm.sqrt(),
        }
    }

    fn axial_extent(&self) -> f64 {
        self.z0.abs() + self.q_max().sqrt()
    }

    fn eval(&self, s: f64, z: f64) -> Potential {
        let c = 1.0 / (2.0 * self.sigma * self.sigma);
        let h = z - self.z0;
        let (q, qs, qss) = match self.shape {
            Shape::Ring { r2 } => {
                let d = s - r2;
                let p = d + 4.0 * r2;
                (d * d / p + h * h, d * (d + 8.0 * r2) / (p * p), 32.0 * r2 * r2 / (p * p * p))
            }
            Shape::Blob => (s + h * h, 1.0, 0.0),
        };
        let (qz, qzz) = (2.0 * h, 2.0);
        let e = (-c * q).exp();
        if e < ENVELOPE_FLOOR {
            return Potential::default();
        }
        let a = self.amplitude;
        let g = a * e;
        let gs = -c * qs * g;
        let gss = (c * c * qs * qs - c * qss) * g;
        let gz = -c * qz * g;
        let gzz = (c * c * qz * qz - c * qzz) * g;
        if self.odd {
            Potential { g: h * g, gs: h * gs, gss: h * gss, gz: g + h * gz, gzz: 2.0 * gz + h * gzz }
        } else {
            Potential { g, gs, gss, gz, gzz }
        }
    }
}

impl AxisymProfile {
    /// The canonical ring used by the conservation and decomposition studies.
    pub fn reference_ring() -> Self {
        AxisymProfile::RingVortex { amplitude: 0.1, ring_radius: 0.5, core_width: 0.16, z_center: 0.0 }
    }

    fn terms(&self) -> Vec<Term> {
        match self {
            AxisymProfile::RingVortex { amplitude, ring_radius, core_width, z_center } => vec![Term {
                amplitude: *amplitude,
                sigma: *core_width,
                z0: *z_center,
                shape: Shape::Ring { r2: ring_radius * ring_radius },
                odd: false,
            }],
            AxisymProfile::GaussianBlob { amplitude, width, z_center } => vec![Term {
                amplitude: *amplitude,
                sigma: *width,
                z0: *z_center,
                shape: Shape::Blob,
                odd: false,
            }],
            AxisymProfile::Dipole { amplitude, width, z_center } => vec![Term {
                amplitude: *amplitude / *width,
                sigma: *width,
                z0: *z_center,
                shape: Shape::Blob,
                odd: true,
            }],
            AxisymProfile::Random { seed, terms, amplitude } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                (0..*terms)
                    .map(|_| {
                        let radius: f64 = rng.gen_range(0.3..0.5);
                        let sigma: f64 = rng.gen_range(0.15..0.16);
                        let z0: f64 = rng.gen_range(-0.15..0.15);
                        let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                        let scale: f64 = rng.gen_range(0.5..1.0);
                        Term {
                            amplitude: sign * scale * amplitude,
                            sigma,
                            z0,
                            shape: Shape::Ring { r2: radius * radius },
                            odd: false,
                        }
                    })
                    .collect()
            }
            AxisymProfile::Sum { parts } => parts.iter().flat_map(|p| p.terms()).collect(),
            AxisymProfile::Rest => Vec::new(),
        }
    }

    /// Checks the physical parameters.
    pub fn validate(&self) -> Result<()> {
        for t in self.terms() {
            if !(t.sigma.is_finite() && t.sigma > 0.0) {
                return Err(Error::Config(format!("profile width must be positive, got {}", t.sigma)));
            }
            if let Shape::Ring { r2 } = t.shape {
                if !(r2.is_finite() && r2 > 0.0) {
                    return Err(Error::Config("ring radius must be positive".into()));
                }
            }
            if !t.amplitude.is_finite() || !t.z0.is_finite() {
                return Err(Error::Config("profile parameters must be finite".into()));
            }
        }
        Ok(())
    }

    /// Radius beyond which the profile vanishes identically.
    pub fn support_radius(&self) -> f64 {
        self.terms().iter().map(Term::support_radius).fold(0.0, f64::max)
    }

    /// Largest `|z|` reached by the support.
    pub fn axial_extent(&self) -> f64 {
        self.terms().iter().map(Term::axial_extent).fold(0.0, f64::max)
    }

    /// Requires the support to stay inside the central half-box of `grid`.
    pub fn check_support(&self, grid: &Grid) -> Result<()> {
        self.validate()?;
        let limit = 0.25 * grid.box_length();
        let (r, z) = (self.support_radius(), self.axial_extent());
        if r > limit || z > limit {
            return Err(Error::SupportViolation(format!(
                "support radius {r:.4} and axial extent {z:.4} must not exceed {limit:.4}"
            )));
        }
        Ok(())
    }

    pub fn potential(&self, s: f64, z: f64) -> Potential {
        let mut p = Potential::default();
        for t in self.terms() {
            p += t.eval(s, z);
        }
        p
    }

    fn evaluator(&self) -> impl Fn(f64, f64) -> Potential + Sync {
        let terms = self.terms();
        move |s, z| {
            let mut p = Potential::default();
            for t in &terms {
                p += t.eval(s, z);
            }
            p
        }
    }

    pub fn u_r(&self, r: f64, z: f64) -> f64 {
        -r * self.potential(r * r, z).gz
    }

    pub fn u_z(&self, r: f64, z: f64) -> f64 {
        let s = r * r;
        let p = self.potential(s, z);
        2.0 * p.g + 2.0 * s * p.gs
    }

    /// `omega_theta / r`.
    pub fn alpha(&self, r: f64, z: f64) -> f64 {
        let s = r * r;
        let p = self.potential(s, z);
        -(8.0 * p.gs + 4.0 * s * p.gss + p.gzz)
    }

    pub fn omega_theta(&self, r: f64, z: f64) -> f64 {
        r * self.alpha(r, z)
    }

    /// `u_r / r`.
    pub fn ur_over_r(&self, r: f64, z: f64) -> f64 {
        -self.potential(r * r, z).gz
    }

    /// Cartesian velocity at a point, `[-x1 G_z, -x2 G_z, 2G + 2s G_s]`.
    pub(crate) fn velocity_fn(&self) -> impl Fn([f64; 3]) -> [f64; 3] + Sync {
        let eval = self.evaluator();
        move |x| {
            let s = x[0] * x[0] + x[1] * x[1];
            let p = eval(s, x[2]);
            [-x[0] * p.gz, -x[1] * p.gz, 2.0 * p.g + 2.0 * s * p.gs]
        }
    }

    pub(crate) fn alpha_fn(&self) -> impl Fn([f64; 3]) -> f64 + Sync {
        let eval = self.evaluator();
        move |x| {
            let s = x[0] * x[0] + x[1] * x[1];
            let p = eval(s, x[2]);
            -(8.0 * p.gs + 4.0 * s * p.gss + p.gzz)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Central differences of the closed form against the analytic derivatives.
    #[test]
    fn derivatives_match_finite_differences() {
        let profiles = [
            AxisymProfile::reference_ring(),
            AxisymProfile::Dipole { amplitude: 0.3, width: 0.25, z_center: 0.1 },
            AxisymProfile::GaussianBlob { amplitude: 1.0, width: 0.3, z_center: -0.2 },
        ];
        let h = 1e-4;
        for p in &profiles {
            for &(s, z) in &[(0.1, 0.05), (0.3, -0.1), (0.05, 0.2)] {
                let c = p.potential(s, z);
                let ds = (p.potential(s + h, z).g - p.potential(s - h, z).g) / (2.0 * h);
                let dss = (p.potential(s + h, z).gs - p.potential(s - h, z).gs) / (2.0 * h);
                let dz = (p.potential(s, z + h).g - p.potential(s, z - h).g) / (2.0 * h);
                let dzz = (p.potential(s, z + h).gz - p.potential(s, z - h).gz) / (2.0 * h);
                let scale = c.g.abs().max(1.0);
                assert!((ds - c.gs).abs() < 1e-5 * scale);
                assert!((dss - c.gss).abs() < 1e-4 * scale);
                assert!((dz - c.gz).abs() < 1e-5 * scale);
                assert!((dzz - c.gzz).abs() < 1e-4 * scale);
            }
        }
    }

    /// `alpha = (d_z u_r - d_r u_z) / r` checked by differencing the velocity.
    #[test]
    fn alpha_is_the_vorticity_quotient() {
        let p = AxisymProfile::reference_ring();
        let h = 1e-5;
        for &(r, z) in &[(0.3, 0.1), (0.6, -0.2), (0.9, 0.0)] {
            let dz_ur = (p.u_r(r, z + h) - p.u_r(r, z - h)) / (2.0 * h);
            let dr_uz = (p.u_z(r + h, z) - p.u_z(r - h, z)) / (2.0 * h);
            assert!(((dz_ur - dr_uz) / r - p.alpha(r, z)).abs() < 1e-5);
        }
    }

    #[test]
    fn support_and_serde() {
        let ring = AxisymProfile::reference_ring();
        let g = Grid::cube(64, 2.0 * std::f64::consts::PI).unwrap();
        ring.check_support(&g).unwrap();
        let r = ring.support_radius();
        assert_eq!(ring.u_z(r * 1.001, 0.0), 0.0);
        assert!(ring.check_support(&Grid::cube(64, 2.0).unwrap()).is_err());
        let js = serde_json::to_string(&ring).unwrap();
        assert!(js.contains("\"kind\":\"ring_vortex\""));
        let back: AxisymProfile = serde_json::from_str(&js).unwrap();
        assert_eq!(back, ring);
        let rnd = AxisymProfile::Random { seed: 7, terms: 3, amplitude: 0.2 };
        assert_eq!(rnd.terms(), rnd.terms());
        rnd.check_support(&g).unwrap();
    }
}
