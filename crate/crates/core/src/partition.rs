//! Smooth dyadic partition of unity in frequency.
//!
//! `chi` is a radial low-pass equal to one on `[0, a]` and vanishing beyond
//! `b = a(1 + w)`; `phi(rho) = chi(rho/2) - chi(rho)` is supported in the
//! annulus `[a, 2b]`. The inhomogeneous and homogeneous sums then telescope,
//! which is what makes reconstruction exact up to rounding.

use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::grid::Grid;

/// Smooth transition from 0 (at `t <= 0`) to 1 (at `t >= 1`) built from `exp(-1/t)`.
pub fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        1.0 / (1.0 + (1.0 / t - 1.0 / (1.0 - t)).exp())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PartitionParams", into = "PartitionParams")]
pub struct PartitionOfUnity {
    inner: f64,
    outer: f64,
    width: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PartitionParams {
    pub inner_radius: f64,
    pub transition_width: f64,
}

impl TryFrom<PartitionParams> for PartitionOfUnity {
    type Error = Error;
    fn try_from(p: PartitionParams) -> Result<Self> {
        build_partition(p.inner_radius, p.transition_width)
    }
}

impl From<PartitionOfUnity> for PartitionParams {
    fn from(p: PartitionOfUnity) -> Self {
        PartitionParams { inner_radius: p.inner, transition_width: p.width }
    }
}

/// Builds the partition with `chi = 1` on `[0, inner_radius]` and `chi = 0`
/// beyond `inner_radius * (1 + transition_width)`.
///
/// Annuli two octaves apart must not overlap, which forces
/// `transition_width <= 1`.
pub fn build_partition(inner_radius: f64, transition_width: f64) -> Result<PartitionOfUnity> {
    if !(inner_radius.is_finite() && inner_radius > 0.0) {
        return Err(Error::InvalidPartition(format!("inner radius must be positive, got {inner_radius}")));
    }
    if !(transition_width.is_finite() && transition_width > 0.0) {
        return Err(Error::InvalidPartition(format!(
            "transition width must be positive, got {transition_width}"
        )));
    }
    if transition_width > 1.0 {
        return Err(Error::InvalidPartition(format!(
            "transition width {transition_width} > 1 makes annuli two octaves apart overlap \
             (outer chi radius {} exceeds twice the inner radius {})",
            inner_radius * (1.0 + transition_width),
            inner_radius
        )));
    }
    Ok(PartitionOfUnity {
        inner: inner_radius,
        outer: inner_radius * (1.0 + transition_width),
        width: transition_width,
    })
}

impl Default for PartitionOfUnity {
    fn default() -> Self {
        Self::classical()
    }
}

impl PartitionOfUnity {
    /// `chi` supported in `rho <= 4/3`, `phi` in `3/4 <= rho <= 8/3`.
    pub fn classical() -> Self {
        build_partition(0.75, 7.0 / 9.0).expect("classical parameters are admissible")
    }

    pub fn chi(&self, rho: f64) -> f64 {
        smooth_step((self.outer - rho) / (self.outer - self.inner))
    }

    pub fn phi(&self, rho: f64) -> f64 {
        self.chi(0.5 * rho) - self.chi(rho)
    }

    /// Radius of the ball carrying `chi`.
    pub fn support_chi(&self) -> f64 {
        self.outer
    }

    /// Annulus carrying `phi`.
    pub fn support_phi(&self) -> (f64, f64) {
        (self.inner, 2.0 * self.outer)
    }

    /// Radius below which `chi` is identically one.
    pub fn plateau_chi(&self) -> f64 {
        self.inner
    }

    /// Interval on which `phi` is identically one.
    pub fn plateau_phi(&self) -> (f64, f64) {
        (self.outer, 2.0 * self.inner)
    }

    /// Symbol of the block at frequency magnitude `rho`; `q = -1` is the low-pass.
    pub fn block_symbol(&self, q: i32, rho: f64) -> f64 {
        if q < 0 {
            self.chi(rho)
        } else {
            self.phi(rho * 2f64.powi(-q))
        }
    }

    /// Homogeneous block symbol, defined for every integer `q`.
    pub fn homogeneous_symbol(&self, q: i32, rho: f64) -> f64 {
        self.phi(rho * 2f64.powi(-q))
    }

    /// Symbol of the partial sum of blocks `-1..=q-1`, which telescopes to `chi(2^{-q} rho)`.
    pub fn low_pass_symbol(&self, q: i32, rho: f64) -> f64 {
        self.chi(rho * 2f64.powi(-q))
    }

    /// Radii on which the homogeneous window `q_lo..=q_hi` sums to one.
    pub fn homogeneous_band(&self, q_lo: i32, q_hi: i32) -> (f64, f64) {
        (self.outer * 2f64.powi(q_lo), self.inner * 2f64.powi(q_hi + 1))
    }

    /// Largest radius reconstructed exactly by blocks `-1..=q_hi`.
    pub fn band_limit(&self, q_hi: i32) -> f64 {
        self.inner * 2f64.powi(q_hi + 1)
    }

    /// Smallest `Q` whose blocks `-1..=Q` sum to one for every `rho <= rho_max`.
    pub fn covering_index(&self, rho_max: f64) -> i32 {
        let mut q = -1;
        while self.band_limit(q) < rho_max {
            q += 1;
        }
        q
    }

    /// Lowest homogeneous block needed so the window covers `rho_min`.
    pub fn homogeneous_floor(&self, rho_min: f64) -> i32 {
        (rho_min / self.outer).log2().floor() as i32
    }

    /// `chi(rho) + sum_{q >= 0} phi(2^{-q} rho)`, summed until the terms vanish.
    pub fn inhomogeneous_sum(&self, rho: f64) -> f64 {
        let mut acc = self.chi(rho);
        let mut q = 0;
        while rho * 2f64.powi(-q) >= self.inner && q < 1100 {
            acc += self.phi(rho * 2f64.powi(-q));
            q += 1;
        }
        acc
    }

    /// Checks all four partition identities on every radius of the lattice.
    pub fn audit(&self, grid: &Grid) -> PartitionAudit {
        let radii = lattice_radii(grid);
        let mut identity = 0.0f64;
        let mut disjoint = 0.0f64;
        let mut chi_phi = 0.0f64;
        let mut homogeneous = 0.0f64;
        let q_top = self.covering_index(grid.corner_frequency()) + 1;
        let q_lo = self.homogeneous_floor(grid.min_frequency());
        let q_hi = grid.q_max();
        let (band_lo, band_hi) = self.homogeneous_band(q_lo, q_hi);
        let mut band_count = 0usize;
        for &rho in &radii {
            identity = identity.max((self.inhomogeneous_sum(rho) - 1.0).abs());
            for p in 0..=q_top {
                let fp = self.phi(rho * 2f64.powi(-p));
                for q in (p + 2)..=(q_top + 1) {
                    disjoint = disjoint.max((fp * self.phi(rho * 2f64.powi(-q))).abs());
                }
            }
            for q in 1..=q_top {
                chi_phi = chi_phi.max((self.chi(rho) * self.phi(rho * 2f64.powi(-q))).abs());
            }
            if rho > 0.0 && rho >= band_lo && rho <= band_hi {
                let s: f64 = (q_lo..=q_hi).map(|q| self.homogeneous_symbol(q, rho)).sum();
                homogeneous = homogeneous.max((s - 1.0).abs());
                band_count += 1;
            }
        }
        PartitionAudit {
            radii_checked: radii.len(),
            identity_violation: identity,
            disjointness_violation: disjoint,
            chi_phi_violation: chi_phi,
            homogeneous_violation: homogeneous,
            homogeneous_window: (q_lo, q_hi),
            homogeneous_band: (band_lo, band_hi),
            homogeneous_radii_checked: band_count,
        }
    }

    /// `rho,chi,phi` rows for the given radii.
    pub fn to_csv(&self, radii: &[f64]) -> String {
        let mut s = String::from("rho,chi,phi\n");
        for &r in radii {
            let _ = writeln!(s, "{:.17e},{:.17e},{:.17e}", r, self.chi(r), self.phi(r));
        }
        s
    }
}

/// Outcome of [`PartitionOfUnity::audit`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionAudit {
    pub radii_checked: usize,
    pub identity_violation: f64,
    pub disjointness_violation: f64,
    pub chi_phi_violation: f64,
    pub homogeneous_violation: f64,
    pub homogeneous_window: (i32, i32),
    pub homogeneous_band: (f64, f64),
    pub homogeneous_radii_checked: usize,
}

impl PartitionAudit {
    pub fn passes(&self, tol: f64) -> bool {
        self.identity_violation <= tol
            && self.homogeneous_violation <= tol
            && self.disjointness_violation == 0.0
            && self.chi_phi_violation == 0.0
    }
}

/// Every distinct frequency magnitude representable on the grid, ascending.
pub fn lattice_radii(grid: &Grid) -> Vec<f64> {
    let half = (grid.n() / 2) as usize;
    let max = if grid.dim() == 3 { 3 * half * half } else { 2 * half * half };
    let mut seen = vec![false; max + 1];
    let k0_range = if grid.dim() == 3 { half } else { 0 };
    for k0 in 0..=k0_range {
        for k1 in 0..=half {
            for k2 in 0..=half {
                seen[k0 * k0 + k1 * k1 + k2 * k2] = true;
            }
        }
    }
    let unit = grid.min_frequency();
    seen.iter()
        .enumerate()
        .filter(|(_, s)| **s)
        .map(|(m, _)| unit * (m as f64).sqrt())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classical_supports() {
        let pu = PartitionOfUnity::classical();
        assert!((pu.support_chi() - 4.0 / 3.0).abs() < 1e-15);
        let (lo, hi) = pu.support_phi();
        assert!((lo - 0.75).abs() < 1e-15 && (hi - 8.0 / 3.0).abs() < 1e-15);
        assert_eq!(pu.chi(0.0), 1.0);
        assert_eq!(pu.phi(0.0), 0.0);
        assert_eq!(pu.phi(0.75), 0.0);
        assert_eq!(pu.phi(8.0 / 3.0), 0.0);
        assert_eq!(pu.phi(1.4), 1.0);
    }

    #[test]
    fn identity_at_one() {
        let pu = PartitionOfUnity::classical();
        let s = pu.chi(1.0) + (0..=20).map(|q| pu.phi(2f64.powi(-q))).sum::<f64>();
        assert!((s - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn octaves_three_apart_are_disjoint() {
        let pu = PartitionOfUnity::classical();
        for i in 0..64 {
            let rho = 0.1 + 0.3 * i as f64;
            assert_eq!(pu.phi(rho) * pu.phi(rho / 8.0), 0.0);
        }
    }

    #[test]
    fn rejects_wide_transition() {
        assert!(build_partition(0.75, 1.5).is_err());
        assert!(build_partition(-1.0, 0.5).is_err());
        assert!(build_partition(1.0, 0.0).is_err());
        assert!(build_partition(1.0, 1.0).is_ok());
    }

    #[test]
    fn audit_on_small_grid() {
        let g = Grid::cube(32, 2.0 * std::f64::consts::PI).unwrap();
        let a = PartitionOfUnity::classical().audit(&g);
        assert!(a.passes(1e-12), "{a:?}");
        assert!(a.homogeneous_radii_checked > 0);
    }

    #[test]
    fn serde_round_trip() {
        let pu = build_partition(0.8, 0.5).unwrap();
        let s = serde_json::to_string(&pu).unwrap();
        let back: PartitionOfUnity = serde_json::from_str(&s).unwrap();
        assert_eq!(pu, back);
        assert!(serde_json::from_str::<PartitionOfUnity>(
            r#"{"inner_radius":0.75,"transition_width":3.0}"#
        )
        .is_err());
    }
}
