//! Nonincreasing rearrangement and Lorentz quasi-norms.
//!
//! On the grid the distribution function of `|f|` is a step function, so the
//! rearrangement `f*` is a finite staircase and the Lorentz integral
//! `int_0^inf (t^{1/p} f*(t))^q dt/t` can be evaluated exactly step by step.

use serde::{Deserialize, Serialize};

use super::lebesgue::check_exponent;
use crate::error::{Error, Result};
use crate::field::SpectralField;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LorentzSpec", into = "LorentzSpec")]
pub struct LorentzParams {
    p: f64,
    q: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LorentzSpec {
    pub p: f64,
    pub q: f64,
}

impl TryFrom<LorentzSpec> for LorentzParams {
    type Error = Error;
    fn try_from(s: LorentzSpec) -> Result<Self> {
        LorentzParams::new(s.p, s.q)
    }
}

impl From<LorentzParams> for LorentzSpec {
    fn from(l: LorentzParams) -> Self {
        LorentzSpec { p: l.p, q: l.q }
    }
}

impl LorentzParams {
    pub fn new(p: f64, q: f64) -> Result<Self> {
        check_exponent(p, "Lorentz p")?;
        check_exponent(q, "Lorentz q")?;
        if p.is_infinite() && q.is_finite() {
            return Err(Error::InvalidExponent(format!(
                "L^(inf, {q}) contains only the zero function; p = inf requires q = inf"
            )));
        }
        Ok(LorentzParams { p, q })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }
}

/// Decreasing rearrangement of sampled magnitudes.
///
/// `thresholds[k]` is the value of `f*` on `[measures[k-1], measures[k])`
/// (with `measures[-1] = 0`); equal magnitudes are merged, so thresholds are
/// strictly decreasing and measures strictly increasing to the box volume.
#[derive(Debug, Clone, PartialEq)]
pub struct Rearrangement {
    pub thresholds: Vec<f64>,
    pub measures: Vec<f64>,
}

impl Rearrangement {
    pub fn from_samples(samples: &[f64], cell_measure: f64) -> Self {
        let mut mags: Vec<f64> = samples.iter().map(|v| v.abs()).collect();
        mags.sort_unstable_by(|a, b| b.total_cmp(a));
        let mut thresholds = Vec::new();
        let mut measures = Vec::new();
        let mut count = 0usize;
        let mut i = 0;
        while i < mags.len() {
            let v = mags[i];
            while i < mags.len() && mags[i] == v {
                i += 1;
                count += 1;
            }
            thresholds.push(v);
            measures.push(count as f64 * cell_measure);
        }
        Rearrangement { thresholds, measures }
    }

    pub fn of(f: &SpectralField) -> Self {
        Self::from_samples(f.samples(), f.grid().cell_measure())
    }

    pub fn total_measure(&self) -> f64 {
        self.measures.last().copied().unwrap_or(0.0)
    }

    /// `f*(t)`, right-continuous, zero beyond the total measure.
    pub fn value_at(&self, t: f64) -> f64 {
        let k = self.measures.partition_point(|m| *m <= t);
        self.thresholds.get(k).copied().unwrap_or(0.0)
    }

    /// Distribution function `mu{|f| > s}`.
    pub fn distribution(&self, s: f64) -> f64 {
        let k = self.thresholds.partition_point(|v| *v > s);
        if k == 0 {
            0.0
        } else {
            self.measures[k - 1]
        }
    }

    /// Exact Lorentz quasi-norm of the staircase.
    pub fn lorentz_norm(&self, lp: LorentzParams) -> f64 {
        let (p, q) = (lp.p, lp.q);
        if p.is_infinite() {
            return self.thresholds.first().copied().unwrap_or(0.0);
        }
        if q.is_infinite() {
            return self
                .thresholds
                .iter()
                .zip(&self.measures)
                .map(|(v, m)| v * m.powf(1.0 / p))
                .fold(0.0, f64::max);
        }
        let r = q / p;
        let vmax = self.thresholds.first().copied().unwrap_or(0.0);
        if vmax == 0.0 {
            return 0.0;
        }
        let mut acc = 0.0;
        let mut prev = 0.0f64;
        for (v, m) in self.thresholds.iter().zip(&self.measures) {
            // m^r - prev^r without cancellation
            let inc = if prev == 0.0 {
                m.powf(r)
            } else {
                prev.powf(r) * (r * ((m - prev) / prev).ln_1p()).exp_m1()
            };
            acc += (v / vmax).powf(q) * inc;
            prev = *m;
        }
        vmax * ((p / q) * acc).powf(1.0 / q)
    }
}

/// `||f||_{L^{p,q}}` by exact integration over the rearrangement.
pub fn lorentz_norm(f: &SpectralField, lp: LorentzParams) -> f64 {
    Rearrangement::of(f).lorentz_norm(lp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;

    #[test]
    fn rejects_inf_finite() {
        assert!(LorentzParams::new(f64::INFINITY, 2.0).is_err());
        assert!(LorentzParams::new(0.5, 2.0).is_err());
        assert!(LorentzParams::new(f64::INFINITY, f64::INFINITY).is_ok());
    }

    #[test]
    fn indicator_closed_form() {
        let g = Grid::cube(16, 2.0).unwrap();
        // x_0 < 0 covers half of a box of volume 8, so the set has measure 4.
        let f = SpectralField::from_fn(g, |x| if x[0] < 0.0 { -1.0 } else { 0.0 });
        let m: f64 = 4.0;
        let lp = LorentzParams::new(3.0, 1.0).unwrap();
        assert!((lorentz_norm(&f, lp) - 3.0 * m.powf(1.0 / 3.0)).abs() < 1e-12);
        let r = Rearrangement::of(&f);
        assert_eq!(r.thresholds, vec![1.0, 0.0]);
        assert_eq!(r.value_at(3.999), 1.0);
        assert_eq!(r.value_at(4.0), 0.0);
        assert_eq!(r.distribution(0.5), 4.0);
    }

    #[test]
    fn weak_type_is_sup() {
        let r = Rearrangement { thresholds: vec![4.0, 1.0], measures: vec![1.0, 16.0] };
        let lp = LorentzParams::new(2.0, f64::INFINITY).unwrap();
        assert_eq!(r.lorentz_norm(lp), 4.0);
        let lp = LorentzParams::new(1.0, f64::INFINITY).unwrap();
        assert_eq!(r.lorentz_norm(lp), 16.0);
    }
}
